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

#include "hrs/dataset.hpp"
#include "hrs/binary_io.hpp"
#include "hrs/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_map>

namespace hrs
{
    ChannelSet Sample::channels() const
    {
        ChannelSet c;
        c.H_true = H_true;
        c.H_hat = H_hat;
        c.cov_assignment = cov_assignment;
        return c;
    }

    Sample generate_sample(const ScenarioConfig &cfg, std::span<const CovarianceMatrix> covs,
                           const SimilarityCalibration &calib, std::uint64_t index)
    {
        const std::uint64_t seed = derive_seed(cfg.seed, 1, index);
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, cfg.num_covs - 1);
        std::vector<int> assignment(static_cast<std::size_t>(cfg.num_users));
        for (int &a : assignment)
            a = pick(rng);

        ChannelSet ch = sample_channels(covs, assignment, derive_seed(seed, 2));
        ch = corrupt_csi(ch, covs, std::sqrt(cfg.tau_sq), derive_seed(seed, 3));
        const Dendrogram dendrogram = agglomerate(ch.H_hat, calib);
        const PartitionChoice best = best_partition(ch, dendrogram, cfg.hrs_config());

        Sample s;
        s.H_true = std::move(ch.H_true);
        s.H_hat = std::move(ch.H_hat);
        s.cov_assignment = std::move(assignment);
        s.label = best.partition.key();
        s.label_rate = best.rate.R_total;
        return s;
    }

    std::vector<Sample> generate_samples(const ScenarioConfig &cfg, int threads)
    {
        cfg.validate();
        const auto covs = cfg.covariances();
        SimilarityCalibration calib(cfg.calibration_draws);
        calib.prepare(cfg.num_antennas, cfg.num_users);

        const auto total = static_cast<std::size_t>(cfg.samples);
        std::vector<Sample> out(total);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            try
            {
                for (std::size_t i = next++; i < total; i = next++)
                    out[i] = generate_sample(cfg, covs, calib, i);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = total;
            }
        };

        const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(total, 1))));
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
        return out;
    }

    std::vector<ClassSummary> summarize_classes(const std::vector<Sample> &samples)
    {
        std::vector<ClassSummary> out;
        std::unordered_map<std::string, std::size_t> where;
        for (const auto &s : samples)
        {
            auto [it, inserted] = where.emplace(s.label, out.size());
            if (inserted)
                out.push_back({s.label, 0, 0.0});
            auto &c = out[it->second];
            ++c.count;
            c.mean_rate += s.label_rate;
        }
        for (auto &c : out)
            c.mean_rate /= static_cast<double>(c.count);
        return out;
    }

    std::vector<Sample> balance(const std::vector<Sample> &samples, const ScenarioConfig &cfg)
    {
        if (samples.empty())
            throw ConfigError("Cannot balance an empty sample set.");
        double average = 0.0;
        for (const auto &s : samples)
            average += s.label_rate;
        average /= static_cast<double>(samples.size());

        std::unordered_map<std::string, std::size_t> quota;
        for (const auto &c : summarize_classes(samples))
        {
            const bool low_rate = c.mean_rate < cfg.rate_floor_frac * average;
            const bool small = c.count < static_cast<std::size_t>(cfg.min_class);
            const bool drop = cfg.balance_rule == BalanceRule::both ? (low_rate && small) : (low_rate || small);
            if (!drop)
                quota[c.label] = static_cast<std::size_t>(cfg.max_class);
        }

        std::vector<Sample> out;
        for (const auto &s : samples)
        {
            auto it = quota.find(s.label);
            if (it != quota.end() && it->second > 0)
            {
                --it->second;
                out.push_back(s);
            }
        }
        if (out.empty())
            throw ConfigError("Balancing removed every class; the scenario is degenerate.");
        return out;
    }

    std::vector<Sample> augment(const std::vector<Sample> &samples, const ScenarioConfig &cfg, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::vector<Sample> out;
        out.reserve(samples.size() * static_cast<std::size_t>(cfg.num_shuffles + 1));
        for (const auto &s : samples)
        {
            out.push_back(s);
            const Partition label = Partition::from_key(s.label);
            for (int c = 0; c < cfg.num_shuffles; ++c)
            {
                // source[u]: user whose channel moves to slot u
                std::vector<int> source(s.cov_assignment.size());
                for (const auto &members : label.blocks())
                {
                    std::vector<int> shuffled = members;
                    std::shuffle(shuffled.begin(), shuffled.end(), rng);
                    for (std::size_t i = 0; i < members.size(); ++i)
                        source[static_cast<std::size_t>(members[i])] = shuffled[i];
                }
                Sample copy;
                copy.H_true.resize(s.H_true.rows(), s.H_true.cols());
                copy.H_hat.resize(s.H_hat.rows(), s.H_hat.cols());
                copy.cov_assignment.resize(source.size());
                for (std::size_t u = 0; u < source.size(); ++u)
                {
                    const auto from = source[u];
                    copy.H_true.col(static_cast<Eigen::Index>(u)) = s.H_true.col(from);
                    copy.H_hat.col(static_cast<Eigen::Index>(u)) = s.H_hat.col(from);
                    copy.cov_assignment[u] = s.cov_assignment[static_cast<std::size_t>(from)];
                }
                copy.label = label.key();
                copy.label_rate = s.label_rate;
                out.push_back(std::move(copy));
            }
        }
        return out;
    }

    int DatasetSplit::class_id(const std::string &label) const
    {
        auto it = std::lower_bound(class_index.begin(), class_index.end(), label);
        if (it == class_index.end() || *it != label)
            return -1;
        return static_cast<int>(it - class_index.begin());
    }

    DatasetSplit split(const std::vector<Sample> &samples, std::uint64_t seed)
    {
        std::map<std::string, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < samples.size(); ++i)
            by_class[samples[i].label].push_back(i);

        std::mt19937_64 rng(seed);
        std::vector<std::size_t> train, val, test;
        DatasetSplit out;
        for (auto &[label, idx] : by_class)
        {
            if (idx.size() < 3)
                throw ConfigError("Class \"" + label + "\" has " + std::to_string(idx.size()) +
                                  " samples; stratified splitting needs at least 3.");
            std::shuffle(idx.begin(), idx.end(), rng);
            const auto n = static_cast<double>(idx.size());
            const auto n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 * n)));
            const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 * n)));
            const std::size_t n_train = idx.size() - n_val - n_test;
            train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
            val.insert(val.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                       idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
            test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
            out.class_index.push_back(label);
        }
        auto gather = [&](std::vector<std::size_t> &idx, std::vector<Sample> &dst) {
            std::sort(idx.begin(), idx.end());
            dst.reserve(idx.size());
            for (std::size_t i : idx)
                dst.push_back(samples[i]);
        };
        gather(train, out.train);
        gather(val, out.validation);
        gather(test, out.test);
        return out;
    }

    DatasetSplit build_dataset(const ScenarioConfig &cfg, int threads)
    {
        const auto raw = generate_samples(cfg, threads);
        const auto balanced = balance(raw, cfg);
        const auto augmented = augment(balanced, cfg, derive_seed(cfg.seed, 4));
        DatasetSplit out = split(augmented, derive_seed(cfg.seed, 5));
        out.config = cfg;
        out.stats = {{"raw_samples", raw.size()},
                     {"raw_classes", summarize_classes(raw).size()},
                     {"balanced_samples", balanced.size()},
                     {"balanced_classes", summarize_classes(balanced).size()},
                     {"augmented_samples", augmented.size()}};
        return out;
    }

    // ---------- binary format ----------

    namespace
    {
        constexpr std::string_view split_names[3] = {"train", "validation", "test"};
    }

    std::vector<std::uint8_t> encode_dataset(const DatasetSplit &ds)
    {
        const int N = ds.config.num_users, M = ds.config.num_antennas;
        io::ByteWriter payload;
        nlohmann::json records = nlohmann::json::array();
        const std::vector<Sample> *parts[3] = {&ds.train, &ds.validation, &ds.test};
        for (int p = 0; p < 3; ++p)
            for (const Sample &s : *parts[p])
            {
                if (s.H_true.rows() != M || s.H_true.cols() != N || s.H_hat.rows() != M || s.H_hat.cols() != N)
                    throw ConfigError("Sample dimensions disagree with the scenario.");
                records.push_back({{"split", split_names[p]},
                                   {"label", s.label},
                                   {"cov_assignment", s.cov_assignment},
                                   {"offset", payload.size()}});
                payload.put_f64(s.label_rate);
                payload.put_complex({s.H_true.data(), static_cast<std::size_t>(s.H_true.size())});
                payload.put_complex({s.H_hat.data(), static_cast<std::size_t>(s.H_hat.size())});
            }

        nlohmann::json header = {{"format_version", dataset_format_version},
                                 {"config", to_json(ds.config)},
                                 {"num_users", N},
                                 {"num_antennas", M},
                                 {"class_index", ds.class_index},
                                 {"stats", ds.stats},
                                 {"record_count", records.size()},
                                 {"record_bytes", 8 + 2 * 16 * N * M},
                                 {"records", records}};
        return io::encode_envelope(std::string_view(dataset_magic, 8), header, payload.bytes());
    }

    DatasetSplit decode_dataset(std::span<const std::uint8_t> bytes)
    {
        const io::Envelope env = io::decode_envelope(std::string_view(dataset_magic, 8), bytes);
        const auto &h = env.header;
        DatasetSplit ds;
        try
        {
            if (h.at("format_version").get<int>() != dataset_format_version)
                throw FormatError("Unsupported dataset format version " + h.at("format_version").dump() + ".");
            ds.config = scenario_from_json(h.at("config"));
            ds.class_index = h.at("class_index").get<std::vector<std::string>>();
            ds.stats = h.value("stats", nlohmann::json::object());
            const int N = h.at("num_users").get<int>(), M = h.at("num_antennas").get<int>();
            if (N != ds.config.num_users || M != ds.config.num_antennas)
                throw FormatError("Header dimensions disagree with the embedded config.");
            const auto &records = h.at("records");
            if (records.size() != h.at("record_count").get<std::size_t>())
                throw FormatError("Record count does not match the record table.");

            io::ByteReader reader(env.payload);
            for (const auto &r : records)
            {
                reader.seek(r.at("offset").get<std::size_t>());
                Sample s;
                s.label = r.at("label").get<std::string>();
                s.cov_assignment = r.at("cov_assignment").get<std::vector<int>>();
                s.label_rate = reader.get_f64();
                s.H_true.resize(M, N);
                s.H_hat.resize(M, N);
                reader.get_complex({s.H_true.data(), static_cast<std::size_t>(s.H_true.size())});
                reader.get_complex({s.H_hat.data(), static_cast<std::size_t>(s.H_hat.size())});
                const auto part = r.at("split").get<std::string>();
                if (part == "train")
                    ds.train.push_back(std::move(s));
                else if (part == "validation")
                    ds.validation.push_back(std::move(s));
                else if (part == "test")
                    ds.test.push_back(std::move(s));
                else
                    throw FormatError("Unknown split name \"" + part + "\".");
            }
            if (reader.position() != env.payload.size() && !records.empty())
                throw FormatError("Trailing bytes after the last record.");
        }
        catch (const nlohmann::json::exception &e)
        {
            throw FormatError(std::string("Malformed dataset header: ") + e.what());
        }
        catch (const ConfigError &e)
        {
            throw FormatError(std::string("Dataset carries an invalid config: ") + e.what());
        }
        return ds;
    }

    void serialize(const DatasetSplit &split, const std::filesystem::path &path)
    {
        io::write_file(path, encode_dataset(split));
    }

    DatasetSplit load_dataset(const std::filesystem::path &path) { return decode_dataset(io::read_file(path)); }

    void export_csv(const DatasetSplit &ds, const std::filesystem::path &path)
    {
        std::ofstream f(path);
        if (!f)
            throw std::runtime_error("Cannot open '" + path.string() + "' for writing.");
        f.precision(17);
        f << "label,rate,scenario,split\n";
        const std::vector<Sample> *parts[3] = {&ds.train, &ds.validation, &ds.test};
        for (int p = 0; p < 3; ++p)
            for (const auto &s : *parts[p])
                f << '"' << s.label << "\"," << s.label_rate << ',' << ds.config.name << ',' << split_names[p] << '\n';
    }
}
