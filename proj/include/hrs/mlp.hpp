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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hrs/dataset.hpp"

namespace hrs::mlp
{
    using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    struct FeatureStats
    {
        std::vector<double> mean;
        std::vector<double> stddev; // floored at 1e-8

        static FeatureStats fit(const Matrix &raw);
    };

    // H_hat flattened column-major as interleaved (re, im); H_true is never read.
    std::vector<double> raw_features(const Sample &sample);
    Matrix raw_features(std::span<const Sample> samples);

    std::vector<double> featurize(const Sample &sample, const FeatureStats &stats);
    Matrix featurize(std::span<const Sample> samples, const FeatureStats &stats);
    void standardize(Matrix &raw, const FeatureStats &stats);

    struct Layer
    {
        Matrix weight;              // out x in
        Eigen::VectorXd bias;       // out
    };

    // Dense ReLU layers with a softmax output.
    struct MlpModel
    {
        std::vector<int> dims;      // [input, hidden..., classes]
        std::vector<Layer> layers;
        FeatureStats stats;
        std::vector<std::string> class_index;
        nlohmann::json scenario = nlohmann::json::object();

        int input_width() const { return dims.front(); }
        int num_classes() const { return dims.back(); }
        std::size_t num_parameters() const;
    };

    // He-uniform weights (limit sqrt(6 / fan_in)), zero biases.
    MlpModel init_model(std::vector<int> dims, std::uint64_t seed);

    struct ForwardCache
    {
        std::vector<Matrix> inputs;        // input to each layer
        std::vector<Matrix> pre;           // pre-activation of each layer
        Matrix probs;
    };

    // Row-wise softmax with max subtraction.
    Matrix softmax(const Matrix &logits);

    ForwardCache forward_cached(const MlpModel &model, const Matrix &batch);
    Matrix forward(const MlpModel &model, const Matrix &batch);

    // Mean categorical cross-entropy, probabilities floored at 1e-12.
    double loss(const Matrix &probs, std::span<const int> labels);

    struct Gradients
    {
        std::vector<Matrix> weight;
        std::vector<Eigen::VectorXd> bias;
    };

    // Exact gradient of the mean loss; the output layer uses (probs - onehot) / batch.
    Gradients backward(const MlpModel &model, const ForwardCache &cache, std::span<const int> labels);

    struct AdamState
    {
        double lr = 1e-3;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1e-8;
        std::uint64_t step = 0;
        std::vector<Matrix> m_weight, v_weight;
        std::vector<Eigen::VectorXd> m_bias, v_bias;

        static AdamState for_model(const MlpModel &model, double lr = 1e-3);
    };

    void adam_step(MlpModel &model, AdamState &state, const Gradients &grads);

    // Fraction of rows whose label is among the k most probable classes (ties by class index).
    std::vector<double> evaluate_topk(const Matrix &probs, std::span<const int> labels, std::span<const int> ks);
    std::vector<double> evaluate_topk(const MlpModel &model, const Matrix &features, std::span<const int> labels,
                                      std::span<const int> ks);

    struct TrainOptions
    {
        int epochs = 50;
        int batch_size = 128;
        double learning_rate = 1e-3;
        std::vector<int> hidden = {256, 128};
        std::uint64_t seed = 1;
        bool verbose = false;
    };

    struct TrainReport
    {
        std::vector<double> train_loss;       // per epoch
        std::vector<double> val_top1;         // per epoch
        double test_top1 = 0.0, test_top3 = 0.0, test_top5 = 0.0;
        double relative_rate = 0.0;           // filled by the evaluation harness
        std::size_t num_classes = 0;
    };

    nlohmann::json to_json(const TrainReport &r);

    // Class ids for samples, via split.class_index; throws ConfigError on unknown labels.
    std::vector<int> class_ids(const DatasetSplit &split, std::span<const Sample> samples);

    // Generic loop on prepared features; returns per-epoch mean training loss.
    std::vector<double> fit(MlpModel &model, const Matrix &features, std::span<const int> labels,
                            const TrainOptions &options, const std::function<void(int, double)> &on_epoch = {});

    struct TrainResult
    {
        MlpModel model;
        TrainReport report;
    };

    TrainResult train(const DatasetSplit &split, const TrainOptions &options);

    inline constexpr char model_magic[] = "HRSMLP01";
    inline constexpr int model_format_version = 1;

    std::vector<std::uint8_t> encode_model(const MlpModel &model);
    MlpModel decode_model(std::span<const std::uint8_t> bytes);
    void save_model(const MlpModel &model, const std::filesystem::path &path);
    MlpModel load_model(const std::filesystem::path &path);
}
