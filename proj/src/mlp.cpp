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

#include "hrs/mlp.hpp"
#include "hrs/binary_io.hpp"
#include "hrs/errors.hpp"
#include "hrs/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

namespace hrs::mlp
{
    // ---------- features ----------

    FeatureStats FeatureStats::fit(const Matrix &raw)
    {
        FeatureStats st;
        const auto n = static_cast<double>(raw.rows());
        st.mean.assign(static_cast<std::size_t>(raw.cols()), 0.0);
        st.stddev.assign(static_cast<std::size_t>(raw.cols()), 1.0);
        if (raw.rows() == 0)
            return st;
        for (Eigen::Index c = 0; c < raw.cols(); ++c)
        {
            const double mu = raw.col(c).sum() / n;
            const double var = (raw.col(c).array() - mu).square().sum() / n;
            st.mean[static_cast<std::size_t>(c)] = mu;
            st.stddev[static_cast<std::size_t>(c)] = std::max(std::sqrt(var), 1e-8);
        }
        return st;
    }

    std::vector<double> raw_features(const Sample &sample)
    {
        // Eigen stores complex column-major, which already is the interleaved layout
        const auto *p = reinterpret_cast<const double *>(sample.H_hat.data());
        return {p, p + 2 * sample.H_hat.size()};
    }

    Matrix raw_features(std::span<const Sample> samples)
    {
        if (samples.empty())
            return Matrix(0, 0);
        const Eigen::Index width = 2 * samples.front().H_hat.size();
        Matrix out(static_cast<Eigen::Index>(samples.size()), width);
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            if (2 * samples[i].H_hat.size() != width)
                throw ConfigError("Samples disagree in channel dimensions.");
            const auto *p = reinterpret_cast<const double *>(samples[i].H_hat.data());
            std::copy(p, p + width, out.row(static_cast<Eigen::Index>(i)).data());
        }
        return out;
    }

    void standardize(Matrix &raw, const FeatureStats &stats)
    {
        if (static_cast<std::size_t>(raw.cols()) != stats.mean.size())
            throw ConfigError("Feature width " + std::to_string(raw.cols()) + " does not match the model input " +
                              std::to_string(stats.mean.size()) + ".");
        for (Eigen::Index r = 0; r < raw.rows(); ++r)
            for (Eigen::Index c = 0; c < raw.cols(); ++c)
            {
                const auto ci = static_cast<std::size_t>(c);
                raw(r, c) = (raw(r, c) - stats.mean[ci]) / stats.stddev[ci];
            }
    }

    std::vector<double> featurize(const Sample &sample, const FeatureStats &stats)
    {
        Matrix m = raw_features(std::span<const Sample>(&sample, 1));
        standardize(m, stats);
        return {m.data(), m.data() + m.size()};
    }

    Matrix featurize(std::span<const Sample> samples, const FeatureStats &stats)
    {
        Matrix m = raw_features(samples);
        if (samples.empty())
            return Matrix(0, static_cast<Eigen::Index>(stats.mean.size()));
        standardize(m, stats);
        return m;
    }

    // ---------- model ----------

    std::size_t MlpModel::num_parameters() const
    {
        std::size_t n = 0;
        for (const auto &l : layers)
            n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
        return n;
    }

    MlpModel init_model(std::vector<int> dims, std::uint64_t seed)
    {
        if (dims.size() < 2)
            throw ConfigError("A model needs at least input and output widths.");
        for (int d : dims)
            if (d < 1)
                throw ConfigError("Layer widths must be positive.");
        MlpModel m;
        m.dims = std::move(dims);
        std::mt19937_64 rng(seed);
        for (std::size_t l = 0; l + 1 < m.dims.size(); ++l)
        {
            const int in = m.dims[l], out = m.dims[l + 1];
            std::uniform_real_distribution<double> init(-std::sqrt(6.0 / in), std::sqrt(6.0 / in));
            Layer layer;
            layer.weight.resize(out, in);
            for (Eigen::Index i = 0; i < layer.weight.size(); ++i)
                layer.weight.data()[i] = init(rng);
            layer.bias = Eigen::VectorXd::Zero(out);
            m.layers.push_back(std::move(layer));
        }
        m.stats.mean.assign(static_cast<std::size_t>(m.dims.front()), 0.0);
        m.stats.stddev.assign(static_cast<std::size_t>(m.dims.front()), 1.0);
        return m;
    }

    Matrix softmax(const Matrix &logits)
    {
        Matrix out(logits.rows(), logits.cols());
        for (Eigen::Index r = 0; r < logits.rows(); ++r)
        {
            const double mx = logits.row(r).maxCoeff();
            double sum = 0.0;
            for (Eigen::Index c = 0; c < logits.cols(); ++c)
                sum += (out(r, c) = std::exp(logits(r, c) - mx));
            out.row(r) /= sum;
        }
        return out;
    }

    ForwardCache forward_cached(const MlpModel &model, const Matrix &batch)
    {
        if (batch.cols() != model.input_width())
            throw ConfigError("Input width " + std::to_string(batch.cols()) + " does not match model input " +
                              std::to_string(model.input_width()) + ".");
        const auto &kern = simd::active();
        ForwardCache cache;
        Matrix x = batch;
        for (std::size_t l = 0; l < model.layers.size(); ++l)
        {
            const Layer &layer = model.layers[l];
            const auto in = static_cast<std::size_t>(layer.weight.cols());
            Matrix z(x.rows(), layer.weight.rows());
            for (Eigen::Index b = 0; b < x.rows(); ++b)
                for (Eigen::Index o = 0; o < layer.weight.rows(); ++o)
                    z(b, o) = layer.bias(o) + kern.dot(layer.weight.row(o).data(), x.row(b).data(), in);
            if (!z.allFinite())
                throw NumericalError("Non-finite activation in layer " + std::to_string(l + 1) + ".");
            cache.inputs.push_back(std::move(x));
            if (l + 1 < model.layers.size())
                x = z.cwiseMax(0.0);
            cache.pre.push_back(std::move(z));
        }
        cache.probs = softmax(cache.pre.back());
        return cache;
    }

    Matrix forward(const MlpModel &model, const Matrix &batch) { return forward_cached(model, batch).probs; }

    namespace
    {
        void check_labels(std::span<const int> labels, Eigen::Index rows, Eigen::Index classes)
        {
            if (static_cast<Eigen::Index>(labels.size()) != rows)
                throw ConfigError("Label count does not match batch size.");
            for (int y : labels)
                if (y < 0 || y >= classes)
                    throw std::out_of_range("Label " + std::to_string(y) + " outside [0, " + std::to_string(classes) + ").");
        }
    }

    double loss(const Matrix &probs, std::span<const int> labels)
    {
        check_labels(labels, probs.rows(), probs.cols());
        if (probs.rows() == 0)
            return 0.0;
        double total = 0.0;
        for (Eigen::Index r = 0; r < probs.rows(); ++r)
            total -= std::log(std::max(probs(r, labels[static_cast<std::size_t>(r)]), 1e-12));
        return total / static_cast<double>(probs.rows());
    }

    Gradients backward(const MlpModel &model, const ForwardCache &cache, std::span<const int> labels)
    {
        const Eigen::Index B = cache.probs.rows();
        check_labels(labels, B, cache.probs.cols());
        if (cache.pre.size() != model.layers.size())
            throw ConfigError("Forward cache does not belong to this model.");
        const auto &kern = simd::active();

        Matrix delta = cache.probs;
        for (Eigen::Index r = 0; r < B; ++r)
            delta(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
        delta /= static_cast<double>(B);

        Gradients g;
        g.weight.resize(model.layers.size());
        g.bias.resize(model.layers.size());
        for (std::size_t l = model.layers.size(); l-- > 0;)
        {
            const Layer &layer = model.layers[l];
            const Matrix &x = cache.inputs[l];
            const auto in = static_cast<std::size_t>(layer.weight.cols());
            const auto out = static_cast<std::size_t>(layer.weight.rows());

            Matrix dW = Matrix::Zero(layer.weight.rows(), layer.weight.cols());
            for (Eigen::Index o = 0; o < layer.weight.rows(); ++o)
                for (Eigen::Index b = 0; b < B; ++b)
                    if (const double d = delta(b, o); d != 0.0)
                        kern.axpy(d, x.row(b).data(), dW.row(o).data(), in);
            g.weight[l] = std::move(dW);
            g.bias[l] = delta.colwise().sum().transpose();

            if (l == 0)
                break;
            Matrix dx = Matrix::Zero(B, layer.weight.cols());
            for (Eigen::Index b = 0; b < B; ++b)
                for (std::size_t o = 0; o < out; ++o)
                    if (const double d = delta(b, static_cast<Eigen::Index>(o)); d != 0.0)
                        kern.axpy(d, layer.weight.row(static_cast<Eigen::Index>(o)).data(), dx.row(b).data(), in);
            // ReLU of the previous layer
            const Matrix &z_prev = cache.pre[l - 1];
            for (Eigen::Index i = 0; i < dx.size(); ++i)
                if (!(z_prev.data()[i] > 0.0))
                    dx.data()[i] = 0.0;
            delta = std::move(dx);
        }
        return g;
    }

    AdamState AdamState::for_model(const MlpModel &model, double lr)
    {
        AdamState s;
        s.lr = lr;
        for (const auto &l : model.layers)
        {
            s.m_weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
            s.v_weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
            s.m_bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
            s.v_bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
        }
        return s;
    }

    void adam_step(MlpModel &model, AdamState &state, const Gradients &grads)
    {
        if (state.m_weight.size() != model.layers.size() || grads.weight.size() != model.layers.size())
            throw ConfigError("Optimizer state does not match the model.");
        ++state.step;
        const double t = static_cast<double>(state.step);
        const double c2 = std::sqrt(1.0 - std::pow(state.beta2, t));
        const double lr_t = state.lr * c2 / (1.0 - std::pow(state.beta1, t));
        const double eps_t = state.eps * c2;
        const auto &kern = simd::active();
        for (std::size_t l = 0; l < model.layers.size(); ++l)
        {
            Layer &layer = model.layers[l];
            if (grads.weight[l].size() != layer.weight.size() || state.m_weight[l].size() != layer.weight.size())
                throw ConfigError("Gradient shape mismatch in layer " + std::to_string(l + 1) + ".");
            kern.adam(layer.weight.data(), grads.weight[l].data(), state.m_weight[l].data(), state.v_weight[l].data(),
                      static_cast<std::size_t>(layer.weight.size()), state.beta1, state.beta2, lr_t, eps_t);
            kern.adam(layer.bias.data(), grads.bias[l].data(), state.m_bias[l].data(), state.v_bias[l].data(),
                      static_cast<std::size_t>(layer.bias.size()), state.beta1, state.beta2, lr_t, eps_t);
        }
    }

    std::vector<double> evaluate_topk(const Matrix &probs, std::span<const int> labels, std::span<const int> ks)
    {
        check_labels(labels, probs.rows(), probs.cols());
        for (int k : ks)
            if (k < 1 || k > probs.cols())
                throw std::domain_error("top-k with k = " + std::to_string(k) + " but only " +
                                        std::to_string(probs.cols()) + " classes.");
        std::vector<double> hits(ks.size(), 0.0);
        if (probs.rows() == 0)
            return hits;
        for (Eigen::Index r = 0; r < probs.rows(); ++r)
        {
            const int y = labels[static_cast<std::size_t>(r)];
            const double py = probs(r, y);
            int rank = 0; // classes ranked strictly ahead of y
            for (Eigen::Index c = 0; c < probs.cols(); ++c)
                if (probs(r, c) > py || (probs(r, c) == py && c < y))
                    ++rank;
            for (std::size_t i = 0; i < ks.size(); ++i)
                if (rank < ks[i])
                    hits[i] += 1.0;
        }
        for (double &h : hits)
            h /= static_cast<double>(probs.rows());
        return hits;
    }

    std::vector<double> evaluate_topk(const MlpModel &model, const Matrix &features, std::span<const int> labels,
                                      std::span<const int> ks)
    {
        return evaluate_topk(forward(model, features), labels, ks);
    }

    nlohmann::json to_json(const TrainReport &r)
    {
        return {{"train_loss", r.train_loss}, {"val_top1", r.val_top1},   {"test_top1", r.test_top1},
                {"test_top3", r.test_top3},   {"test_top5", r.test_top5}, {"relative_rate", r.relative_rate},
                {"num_classes", r.num_classes}};
    }

    std::vector<int> class_ids(const DatasetSplit &split, std::span<const Sample> samples)
    {
        std::vector<int> out;
        out.reserve(samples.size());
        for (const auto &s : samples)
        {
            const int id = split.class_id(s.label);
            if (id < 0)
                throw ConfigError("Label \"" + s.label + "\" is not in the class index.");
            out.push_back(id);
        }
        return out;
    }

    std::vector<double> fit(MlpModel &model, const Matrix &features, std::span<const int> labels,
                            const TrainOptions &options, const std::function<void(int, double)> &on_epoch)
    {
        if (options.epochs < 0 || options.batch_size < 1)
            throw ConfigError("Epochs must be nonnegative and batch size positive.");
        check_labels(labels, features.rows(), model.num_classes());

        AdamState adam = AdamState::for_model(model, options.learning_rate);
        std::mt19937_64 rng(derive_seed(options.seed, 11));
        std::vector<Eigen::Index> order(static_cast<std::size_t>(features.rows()));
        std::iota(order.begin(), order.end(), Eigen::Index{0});

        std::vector<double> history;
        for (int epoch = 0; epoch < options.epochs; ++epoch)
        {
            std::shuffle(order.begin(), order.end(), rng);
            double total = 0.0;
            for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(options.batch_size))
            {
                const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));
                Matrix batch(static_cast<Eigen::Index>(end - start), features.cols());
                std::vector<int> y(end - start);
                for (std::size_t i = start; i < end; ++i)
                {
                    batch.row(static_cast<Eigen::Index>(i - start)) = features.row(order[i]);
                    y[i - start] = labels[static_cast<std::size_t>(order[i])];
                }
                const ForwardCache cache = forward_cached(model, batch);
                total += loss(cache.probs, y) * static_cast<double>(end - start);
                adam_step(model, adam, backward(model, cache, y));
            }
            const double mean = order.empty() ? 0.0 : total / static_cast<double>(order.size());
            history.push_back(mean);
            if (on_epoch)
                on_epoch(epoch, mean);
        }
        return history;
    }

    TrainResult train(const DatasetSplit &split, const TrainOptions &options)
    {
        if (split.train.empty() || split.num_classes() == 0)
            throw ConfigError("Training split is empty.");

        TrainResult result;
        const Matrix raw_train = raw_features(split.train);
        const FeatureStats stats = FeatureStats::fit(raw_train);

        std::vector<int> dims{static_cast<int>(raw_train.cols())};
        dims.insert(dims.end(), options.hidden.begin(), options.hidden.end());
        dims.push_back(static_cast<int>(split.num_classes()));
        MlpModel model = init_model(dims, derive_seed(options.seed, 10));
        model.stats = stats;
        model.class_index = split.class_index;
        model.scenario = to_json(split.config);

        Matrix x_train = raw_train;
        standardize(x_train, stats);
        const auto y_train = class_ids(split, split.train);
        const Matrix x_val = featurize(split.validation, stats);
        const auto y_val = class_ids(split, split.validation);
        const int one[] = {1};

        TrainReport &report = result.report;
        report.num_classes = split.num_classes();
        report.train_loss = fit(model, x_train, y_train, options, [&](int epoch, double mean_loss) {
            const double val = x_val.rows() ? evaluate_topk(model, x_val, y_val, one)[0] : 0.0;
            report.val_top1.push_back(val);
            if (options.verbose)
                std::cerr << "epoch " << epoch + 1 << "/" << options.epochs << "  loss " << mean_loss << "  val top-1 "
                          << val << '\n';
        });

        const Matrix x_test = featurize(split.test, stats);
        const auto y_test = class_ids(split, split.test);
        if (x_test.rows())
        {
            const int G = static_cast<int>(split.num_classes());
            const int ks[] = {1, std::min(3, G), std::min(5, G)};
            const auto acc = evaluate_topk(model, x_test, y_test, ks);
            report.test_top1 = acc[0];
            report.test_top3 = acc[1];
            report.test_top5 = acc[2];
        }
        result.model = std::move(model);
        return result;
    }

    // ---------- checkpoint ----------

    std::vector<std::uint8_t> encode_model(const MlpModel &model)
    {
        io::ByteWriter payload;
        for (const auto &l : model.layers)
        {
            payload.put_f64({l.weight.data(), static_cast<std::size_t>(l.weight.size())});
            payload.put_f64({l.bias.data(), static_cast<std::size_t>(l.bias.size())});
        }
        nlohmann::json header = {{"format_version", model_format_version},
                                 {"dims", model.dims},
                                 {"feature_mean", model.stats.mean},
                                 {"feature_std", model.stats.stddev},
                                 {"class_index", model.class_index},
                                 {"scenario", model.scenario},
                                 {"activation", "relu"},
                                 {"output", "softmax"}};
        return io::encode_envelope(std::string_view(model_magic, 8), header, payload.bytes());
    }

    MlpModel decode_model(std::span<const std::uint8_t> bytes)
    {
        const io::Envelope env = io::decode_envelope(std::string_view(model_magic, 8), bytes);
        MlpModel m;
        try
        {
            const auto &h = env.header;
            if (h.at("format_version").get<int>() != model_format_version)
                throw FormatError("Unsupported model format version " + h.at("format_version").dump() + ".");
            m.dims = h.at("dims").get<std::vector<int>>();
            m.stats.mean = h.at("feature_mean").get<std::vector<double>>();
            m.stats.stddev = h.at("feature_std").get<std::vector<double>>();
            m.class_index = h.at("class_index").get<std::vector<std::string>>();
            m.scenario = h.value("scenario", nlohmann::json::object());
        }
        catch (const nlohmann::json::exception &e)
        {
            throw FormatError(std::string("Malformed model header: ") + e.what());
        }
        if (m.dims.size() < 2 || static_cast<std::size_t>(m.dims.front()) != m.stats.mean.size() ||
            m.stats.mean.size() != m.stats.stddev.size() ||
            static_cast<std::size_t>(m.dims.back()) != m.class_index.size())
            throw FormatError("Model header fields are inconsistent.");

        io::ByteReader reader(env.payload);
        for (std::size_t l = 0; l + 1 < m.dims.size(); ++l)
        {
            if (m.dims[l] < 1 || m.dims[l + 1] < 1)
                throw FormatError("Model header has a non-positive layer width.");
            Layer layer;
            layer.weight.resize(m.dims[l + 1], m.dims[l]);
            layer.bias.resize(m.dims[l + 1]);
            reader.get_f64({layer.weight.data(), static_cast<std::size_t>(layer.weight.size())});
            reader.get_f64({layer.bias.data(), static_cast<std::size_t>(layer.bias.size())});
            m.layers.push_back(std::move(layer));
        }
        if (reader.remaining() != 0)
            throw FormatError("Trailing bytes after model parameters.");
        return m;
    }

    void save_model(const MlpModel &model, const std::filesystem::path &path)
    {
        io::write_file(path, encode_model(model));
    }

    MlpModel load_model(const std::filesystem::path &path) { return decode_model(io::read_file(path)); }
}
