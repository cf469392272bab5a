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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hrs/clustering.hpp"
#include "hrs/scenario.hpp"

namespace hrs
{
    struct Sample
    {
        CMatrix H_true;
        CMatrix H_hat;
        std::string label;      // canonical partition key
        double label_rate = 0.0;
        std::vector<int> cov_assignment;

        ChannelSet channels() const; // view without innovations
    };

    // Draws, labels and returns cfg.samples samples. Sample i depends only on (cfg, i),
    // so results are identical for any thread count.
    std::vector<Sample> generate_samples(const ScenarioConfig &cfg, int threads = 1);

    // Single labeled sample (exposed for tests and the evaluation harness).
    Sample generate_sample(const ScenarioConfig &cfg, std::span<const CovarianceMatrix> covs,
                           const SimilarityCalibration &calib, std::uint64_t index);

    struct ClassSummary
    {
        std::string label;
        std::size_t count = 0;
        double mean_rate = 0.0;
    };

    // Classes in first-appearance order.
    std::vector<ClassSummary> summarize_classes(const std::vector<Sample> &samples);

    // Drops low-rate/small classes (per cfg.balance_rule) and keeps at most cfg.max_class
    // samples per class, preserving input order. Throws ConfigError if nothing survives.
    std::vector<Sample> balance(const std::vector<Sample> &samples, const ScenarioConfig &cfg);

    // Emits each sample followed by cfg.num_shuffles copies whose users are permuted within
    // the blocks of the label.
    std::vector<Sample> augment(const std::vector<Sample> &samples, const ScenarioConfig &cfg, std::uint64_t seed);

    struct DatasetSplit
    {
        ScenarioConfig config;
        std::vector<Sample> train, validation, test;
        std::vector<std::string> class_index; // class id -> partition key, sorted
        nlohmann::json stats = nlohmann::json::object();

        int class_id(const std::string &label) const; // -1 if unknown
        std::size_t num_classes() const { return class_index.size(); }
    };

    // Stratified 80/10/10 split; every class needs at least 3 samples.
    DatasetSplit split(const std::vector<Sample> &samples, std::uint64_t seed);

    // generate -> balance -> augment -> split
    DatasetSplit build_dataset(const ScenarioConfig &cfg, int threads = 1);

    inline constexpr char dataset_magic[] = "HRSDAT01";
    inline constexpr int dataset_format_version = 1;

    std::vector<std::uint8_t> encode_dataset(const DatasetSplit &split);
    DatasetSplit decode_dataset(std::span<const std::uint8_t> bytes);

    void serialize(const DatasetSplit &split, const std::filesystem::path &path);
    DatasetSplit load_dataset(const std::filesystem::path &path);

    // label, rate, scenario, split
    void export_csv(const DatasetSplit &split, const std::filesystem::path &path);
}
