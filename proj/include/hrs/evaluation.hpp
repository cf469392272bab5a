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

#pragma once

#include <array>
#include <string>
#include <vector>

#include "hrs/dataset.hpp"
#include "hrs/mlp.hpp"

namespace hrs
{
    enum class Method
    {
        HC,   // best dendrogram level (the dataset label)
        NN,   // classifier top-1 partition
        UNI,  // all users in one group
        SING  // every user alone
    };

    inline constexpr std::array<Method, 4> all_methods = {Method::HC, Method::NN, Method::UNI, Method::SING};
    const char *method_name(Method m);

    struct BoxplotSummary
    {
        double p1 = 0.0, p25 = 0.0, median = 0.0, p75 = 0.0, p99 = 0.0;
        std::vector<double> outliers; // values outside [p1, p99]
    };

    // Linear interpolation between order statistics at rank p/100 * (n - 1).
    double percentile(std::vector<double> sorted_values, double p);
    BoxplotSummary boxplot_stats(const std::vector<double> &values);

    struct MethodResult
    {
        Method method = Method::HC;
        std::vector<double> rates; // per test sample
        BoxplotSummary summary;
    };

    struct RateRecord
    {
        std::size_t sample = 0;
        Method method = Method::HC;
        std::string partition;
        RateBreakdown rate;
    };

    struct RelativeRateMetric
    {
        double ratio = 0.0;          // mean(NN) / mean(HC)
        bool exceeds_reference = false;
    };

    RelativeRateMetric relative_rate(const std::vector<double> &nn_rates, const std::vector<double> &hc_rates);

    struct BaselineRun
    {
        std::vector<MethodResult> methods;   // HC, NN, UNI, SING order
        std::vector<RateRecord> records;     // one per (sample, method)
        RelativeRateMetric relative;

        const MethodResult &result(Method m) const;
    };

    // Top-1 class key for each sample.
    std::vector<std::string> predict_partitions(const mlp::MlpModel &model, std::span<const Sample> samples);

    // Throws ConfigError when the model was trained for a different scenario or class set.
    void check_compatible(const mlp::MlpModel &model, const DatasetSplit &data);

    // Rates of the four clustering methods on each sample; samples are independent and
    // evaluated by `threads` workers.
    BaselineRun run_baselines(const ScenarioConfig &scenario, const mlp::MlpModel *model,
                              std::span<const Sample> samples, int threads = 1);

    // Rates without a classifier (HC, UNI and SING only; NN left empty).
    BaselineRun run_reference_baselines(const ScenarioConfig &scenario, std::span<const Sample> samples, int threads = 1);
}
