// SPDX-License-Identifier: Apache-2.0
//
// hrs-cluster: user clustering for hierarchical rate splitting
// Copyright (C) 2026 The hrs-cluster authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "hrs/evaluation.hpp"
#include "hrs/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace hrs
{
    const char *method_name(Method m)
    {
        switch (m)
        {
        case Method::HC:
            return "HC";
        case Method::NN:
            return "NN";
        case Method::UNI:
            return "UNI";
        case Method::SING:
            return "SING";
        }
        return "?";
    }

    double percentile(std::vector<double> v, double p)
    {
        if (v.empty())
            throw std::invalid_argument("Percentile of an empty list.");
        std::sort(v.begin(), v.end());
        const double pos = p / 100.0 * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return v[lo] + frac * (v[hi] - v[lo]);
    }

    BoxplotSummary boxplot_stats(const std::vector<double> &values)
    {
        if (values.empty())
            throw std::invalid_argument("Boxplot statistics need at least one value.");
        BoxplotSummary s;
        s.p1 = percentile(values, 1.0);
        s.p25 = percentile(values, 25.0);
        s.median = percentile(values, 50.0);
        s.p75 = percentile(values, 75.0);
        s.p99 = percentile(values, 99.0);
        for (double v : values)
            if (v < s.p1 || v > s.p99)
                s.outliers.push_back(v);
        return s;
    }

    RelativeRateMetric relative_rate(const std::vector<double> &nn_rates, const std::vector<double> &hc_rates)
    {
        if (nn_rates.size() != hc_rates.size())
            throw std::invalid_argument("Relative rate needs paired per-sample rates.");
        RelativeRateMetric m;
        if (hc_rates.empty())
            return m;
        double nn = 0.0, hc = 0.0;
        for (std::size_t i = 0; i < hc_rates.size(); ++i)
        {
            nn += nn_rates[i];
            hc += hc_rates[i];
        }
        nn /= static_cast<double>(hc_rates.size());
        hc /= static_cast<double>(hc_rates.size());
        m.ratio = hc > 0.0 ? nn / hc : 0.0;
        m.exceeds_reference = m.ratio > 1.0 + 1e-9;
        return m;
    }

    const MethodResult &BaselineRun::result(Method m) const
    {
        for (const auto &r : methods)
            if (r.method == m)
                return r;
        throw std::out_of_range(std::string("No result for method ") + method_name(m) + ".");
    }

    std::vector<std::string> predict_partitions(const mlp::MlpModel &model, std::span<const Sample> samples)
    {
        std::vector<std::string> out;
        if (samples.empty())
            return out;
        const mlp::Matrix probs = mlp::forward(model, mlp::featurize(samples, model.stats));
        for (Eigen::Index r = 0; r < probs.rows(); ++r)
        {
            Eigen::Index best = 0;
            for (Eigen::Index c = 1; c < probs.cols(); ++c)
                if (probs(r, c) > probs(r, best))
                    best = c;
            out.push_back(model.class_index[static_cast<std::size_t>(best)]);
        }
        return out;
    }

    void check_compatible(const mlp::MlpModel &model, const DatasetSplit &data)
    {
        const auto &sc = model.scenario;
        if (sc.contains("num_users") && sc.contains("num_antennas") &&
            (sc.at("num_users").get<int>() != data.config.num_users ||
             sc.at("num_antennas").get<int>() != data.config.num_antennas))
            throw ConfigError("Model was trained for N = " + sc.at("num_users").dump() + ", M = " +
                              sc.at("num_antennas").dump() + " but the data has N = " +
                              std::to_string(data.config.num_users) + ", M = " +
                              std::to_string(data.config.num_antennas) + ".");
        if (model.input_width() != 2 * data.config.num_users * data.config.num_antennas)
            throw ConfigError("Model input width does not match the scenario.");
        if (model.class_index != data.class_index)
            throw ConfigError("Model class index differs from the dataset class index.");
    }

    namespace
    {
        BaselineRun run_impl(const ScenarioConfig &scenario, const mlp::MlpModel *model, std::span<const Sample> samples,
                             int threads)
        {
            const HrsConfig config = scenario.hrs_config();
            const int N = scenario.num_users;
            const Partition universal = Partition::universal(N);
            const Partition singletons = Partition::singletons(N);
            std::vector<std::string> predicted;
            if (model)
                predicted = predict_partitions(*model, samples);

            const std::size_t n = samples.size();
            std::vector<std::array<RateRecord, 4>> rows(n);
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            auto worker = [&] {
                try
                {
                    for (std::size_t i = next++; i < n; i = next++)
                    {
                        const Sample &s = samples[i];
                        const ChannelSet ch = s.channels();
                        auto eval = [&](Method m, const Partition &p) {
                            rows[i][static_cast<std::size_t>(m)] = {i, m, p.key(), evaluate_partition(ch, p, config)};
                        };
                        eval(Method::HC, Partition::from_key(s.label));
                        if (model)
                            eval(Method::NN, Partition::from_key(predicted[i]));
                        eval(Method::UNI, universal);
                        eval(Method::SING, singletons);
                    }
                }
                catch (...)
                {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = n;
                }
            };
            const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n, 1))));
            if (n_threads == 1)
                worker();
            else
            {
                std::vector<std::jthread> pool;
                for (int t = 0; t < n_threads; ++t)
                    pool.emplace_back(worker);
            }
            if (failure)
                std::rethrow_exception(failure);

            BaselineRun run;
            for (Method m : all_methods)
            {
                if (m == Method::NN && !model)
                    continue;
                MethodResult res;
                res.method = m;
                for (std::size_t i = 0; i < n; ++i)
                {
                    const RateRecord &rec = rows[i][static_cast<std::size_t>(m)];
                    res.rates.push_back(rec.rate.R_total);
                    run.records.push_back(rec);
                }
                if (!res.rates.empty())
                    res.summary = boxplot_stats(res.rates);
                run.methods.push_back(std::move(res));
            }
            if (model)
                run.relative = relative_rate(run.result(Method::NN).rates, run.result(Method::HC).rates);
            return run;
        }
    }

    BaselineRun run_baselines(const ScenarioConfig &scenario, const mlp::MlpModel *model, std::span<const Sample> samples,
                              int threads)
    {
        if (!model)
            throw ConfigError("NN baseline requires a trained model.");
        return run_impl(scenario, model, samples, threads);
    }

    BaselineRun run_reference_baselines(const ScenarioConfig &scenario, std::span<const Sample> samples, int threads)
    {
        return run_impl(scenario, nullptr, samples, threads);
    }
}
