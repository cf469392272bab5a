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

#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"

#include "hrs/errors.hpp"
#include "hrs/mlp.hpp"

using namespace hrs;
using namespace hrs::mlp;

namespace
{
    Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> n(0.0, 1.0);
        Matrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j)
                m(i, j) = n(rng);
        return m;
    }

    double max_rel_grad_error(MlpModel model, const Matrix &X, const std::vector<int> &y)
    {
        const auto grads = backward(model, forward_cached(model, X), y);
        const double h = 1e-5;
        double worst = 0.0;
        auto check = [&](double &param, double analytic) {
            const double keep = param;
            param = keep + h;
            const double up = loss(forward(model, X), y);
            param = keep - h;
            const double down = loss(forward(model, X), y);
            param = keep;
            const double numeric = (up - down) / (2.0 * h);
            const double err = std::abs(numeric - analytic) / std::max(1e-7, std::abs(numeric) + std::abs(analytic));
            worst = std::max(worst, err);
        };
        for (std::size_t l = 0; l < model.layers.size(); ++l)
        {
            auto &L = model.layers[l];
            for (Eigen::Index i = 0; i < L.weight.rows(); ++i)
                for (Eigen::Index j = 0; j < L.weight.cols(); ++j)
                    check(L.weight(i, j), grads.weight[l](i, j));
            for (Eigen::Index i = 0; i < L.bias.size(); ++i)
                check(L.bias(i), grads.bias[l](i));
        }
        return worst;
    }
}

TEST_CASE("softmax properties")
{
    const Matrix zero = Matrix::Zero(2, 5);
    const Matrix p = softmax(zero);
    for (Eigen::Index j = 0; j < 5; ++j)
        CHECK(p(0, j) == Catch::Approx(0.2).epsilon(1e-15));

    std::mt19937_64 rng(1);
    const Matrix z = random_matrix(4, 7, rng);
    const Matrix shifted = (z.array() + 123.0).matrix();
    CHECK((softmax(z) - softmax(shifted)).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index i = 0; i < 4; ++i)
        CHECK(std::abs(softmax(z).row(i).sum() - 1.0) < 1e-12);

    Matrix big = Matrix::Zero(1, 3);
    big(0, 1) = 1000.0;
    const Matrix pb = softmax(big);
    CHECK(std::isfinite(pb(0, 0)));
    CHECK(pb(0, 1) == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cross-entropy loss")
{
    Matrix onehot = Matrix::Zero(2, 3);
    onehot(0, 1) = onehot(1, 2) = 1.0;
    const std::vector<int> y = {1, 2};
    CHECK(loss(onehot, y) == Catch::Approx(0.0).margin(1e-15));
    const Matrix uni = Matrix::Constant(1, 50, 1.0 / 50.0);
    const std::vector<int> y0 = {7};
    CHECK(loss(uni, y0) == Catch::Approx(std::log(50.0)).epsilon(1e-12));
    CHECK(std::abs(std::log(50.0) - 3.912) < 1e-3);
    const std::vector<int> bad = {3, 0};
    CHECK_THROWS_AS(loss(onehot, bad), std::out_of_range);
    Matrix zero_prob = Matrix::Zero(1, 2);
    zero_prob(0, 0) = 1.0;
    const std::vector<int> y1 = {1};
    CHECK(loss(zero_prob, y1) == Catch::Approx(-std::log(1e-12)));
}

TEST_CASE("forward pass contracts")
{
    auto model = init_model({4, 3, 2}, 5);
    CHECK(model.num_parameters() == 4 * 3 + 3 + 3 * 2 + 2);
    std::mt19937_64 rng(2);
    const Matrix X = random_matrix(6, 4, rng);
    const Matrix p = forward(model, X);
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        CHECK(std::abs(p.row(i).sum() - 1.0) < 1e-9);
    CHECK_THROWS(forward(model, random_matrix(2, 5, rng)));
    model.layers[0].weight(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(forward(model, X), NumericalError);

    const auto a = init_model({4, 3, 2}, 5);
    const auto b = init_model({4, 3, 2}, 5);
    CHECK(a.layers[0].weight == b.layers[0].weight);
    const double limit = std::sqrt(6.0 / 4.0);
    CHECK(a.layers[0].weight.cwiseAbs().maxCoeff() <= limit);
    CHECK(a.layers[0].bias.isZero());
}

TEST_CASE("analytic gradients match finite differences")
{
    std::mt19937_64 rng(3);
    const auto model = init_model({4, 3, 2}, 9);
    const Matrix X = random_matrix(5, 4, rng);
    const std::vector<int> y = {0, 1, 1, 0, 1};
    CHECK(max_rel_grad_error(model, X, y) < 1e-4);

    const auto deep = init_model({6, 5, 4, 3}, 10);
    const Matrix X2 = random_matrix(7, 6, rng);
    const std::vector<int> y2 = {0, 1, 2, 2, 1, 0, 1};
    CHECK(max_rel_grad_error(deep, X2, y2) < 1e-4);
}

TEST_CASE("gradient structure")
{
    auto model = init_model({3, 2, 2}, 4);
    model.layers[0].weight.setZero();
    model.layers[0].bias << -1.0, -1.0; // every hidden unit is off
    std::mt19937_64 rng(5);
    const Matrix X = random_matrix(4, 3, rng);
    const std::vector<int> y = {0, 1, 0, 1};
    const auto g = backward(model, forward_cached(model, X), y);
    CHECK(g.weight[0].isZero());
    CHECK(g.bias[0].isZero());

    const auto m2 = init_model({3, 4, 2}, 6);
    Matrix X1 = random_matrix(2, 3, rng);
    Matrix Xd(4, 3);
    Xd << X1, X1;
    const std::vector<int> y1 = {0, 1};
    const std::vector<int> yd = {0, 1, 0, 1};
    const auto g1 = backward(m2, forward_cached(m2, X1), y1);
    const auto gd = backward(m2, forward_cached(m2, Xd), yd);
    for (std::size_t l = 0; l < g1.weight.size(); ++l)
    {
        CHECK((g1.weight[l] - gd.weight[l]).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((g1.bias[l] - gd.bias[l]).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("adam")
{
    auto model = init_model({3, 4, 2}, 7);
    const auto before = model;
    auto state = AdamState::for_model(model);
    Gradients zero;
    for (const auto &L : model.layers)
    {
        zero.weight.push_back(Matrix::Zero(L.weight.rows(), L.weight.cols()));
        zero.bias.push_back(Eigen::VectorXd::Zero(L.bias.size()));
    }
    adam_step(model, state, zero);
    CHECK(model.layers[0].weight == before.layers[0].weight);

    // first step moves each parameter by lr against the gradient sign
    auto m2 = before;
    auto s2 = AdamState::for_model(m2);
    std::mt19937_64 rng(8);
    Gradients g = zero;
    for (auto &w : g.weight)
        w = random_matrix(w.rows(), w.cols(), rng);
    for (auto &b : g.bias)
        b = Eigen::VectorXd::Constant(b.size(), 0.5);
    adam_step(m2, s2, g);
    for (std::size_t l = 0; l < m2.layers.size(); ++l)
    {
        const Matrix delta = m2.layers[l].weight - before.layers[l].weight;
        for (Eigen::Index i = 0; i < delta.rows(); ++i)
            for (Eigen::Index j = 0; j < delta.cols(); ++j)
                CHECK(delta(i, j) == Catch::Approx(-1e-3 * (g.weight[l](i, j) > 0 ? 1.0 : -1.0)).epsilon(1e-4));
    }

    auto run = [&] {
        auto m = before;
        auto s = AdamState::for_model(m);
        for (int t = 0; t < 10; ++t)
            adam_step(m, s, g);
        return m;
    };
    const auto r1 = run(), r2 = run();
    for (std::size_t l = 0; l < r1.layers.size(); ++l)
        CHECK(r1.layers[l].weight == r2.layers[l].weight);
}

TEST_CASE("top-k accuracy")
{
    Matrix p(3, 4);
    p << 0.1, 0.2, 0.3, 0.4,
         0.25, 0.25, 0.25, 0.25,
         0.7, 0.1, 0.1, 0.1;
    const std::vector<int> y = {2, 1, 0};
    const std::vector<int> ks = {1, 2, 3, 4};
    const auto acc = evaluate_topk(p, y, ks);
    // row 2 ties: class index order puts 0, 1 in the top 2
    CHECK(acc[0] == Catch::Approx(1.0 / 3.0));
    CHECK(acc[1] == Catch::Approx(3.0 / 3.0));
    CHECK(acc[3] == 1.0);
    for (std::size_t i = 1; i < acc.size(); ++i)
        CHECK(acc[i] >= acc[i - 1]);
    const std::vector<int> too_big = {5};
    CHECK_THROWS_AS(evaluate_topk(p, y, too_big), std::domain_error);

    // permuting classes and outputs together leaves accuracy unchanged (tie-free rows)
    Matrix r(3, 4);
    r << 0.1, 0.2, 0.3, 0.4,
         0.3, 0.2, 0.1, 0.4,
         0.7, 0.05, 0.1, 0.15;
    const std::vector<int> perm = {2, 0, 3, 1};
    Matrix q(3, 4);
    for (int c = 0; c < 4; ++c)
        q.col(perm[static_cast<std::size_t>(c)]) = r.col(c);
    std::vector<int> yq;
    for (int v : y)
        yq.push_back(perm[static_cast<std::size_t>(v)]);
    CHECK(evaluate_topk(q, yq, ks) == evaluate_topk(r, y, ks));
}

TEST_CASE("feature standardization")
{
    std::mt19937_64 rng(9);
    Matrix raw = random_matrix(50, 6, rng);
    raw.col(3).setConstant(2.0);
    const auto stats = FeatureStats::fit(raw);
    CHECK(stats.stddev[3] == 1e-8);
    Matrix z = raw;
    standardize(z, stats);
    for (Eigen::Index j = 0; j < z.cols(); ++j)
    {
        CHECK(std::abs(z.col(j).mean()) < 1e-9);
        if (j != 3)
        {
            const double var = (z.col(j).array() - z.col(j).mean()).square().sum() / static_cast<double>(z.rows());
            CHECK(std::sqrt(var) == Catch::Approx(1.0).epsilon(1e-9));
        }
    }

    Sample s;
    s.H_hat = CMatrix::Zero(2, 2);
    s.H_hat(1, 0) = cd(3.0, -4.0);
    s.H_true = CMatrix::Constant(2, 2, cd(99.0, 99.0));
    const auto f = raw_features(s);
    CHECK(f == std::vector<double>{0.0, 0.0, 3.0, -4.0, 0.0, 0.0, 0.0, 0.0});
    FeatureStats st;
    st.mean.assign(8, 1.0);
    st.stddev.assign(8, 2.0);
    s.H_hat.setZero();
    for (double v : featurize(s, st))
        CHECK(v == -0.5);
}

TEST_CASE("training separates a linearly separable toy set")
{
    std::mt19937_64 rng(10);
    std::normal_distribution<double> n(0.0, 0.3);
    Matrix X(200, 2);
    std::vector<int> y(200);
    for (int i = 0; i < 200; ++i)
    {
        y[static_cast<std::size_t>(i)] = i % 2;
        const double c = (i % 2) ? 2.0 : -2.0;
        X(i, 0) = c + n(rng);
        X(i, 1) = -c + n(rng);
    }
    auto model = init_model({2, 8, 2}, 3);
    TrainOptions opt;
    opt.epochs = 30;
    opt.batch_size = 16;
    opt.learning_rate = 1e-2;
    const auto losses = fit(model, X, y, opt);
    CHECK(losses.size() == 30);
    CHECK(losses.back() < losses.front());
    const std::vector<int> k1 = {1};
    CHECK(evaluate_topk(model, X, y, k1)[0] == 1.0);

    auto again = init_model({2, 8, 2}, 3);
    fit(again, X, y, opt);
    CHECK(again.layers[1].weight == model.layers[1].weight);
}

TEST_CASE("model checkpoint round trip")
{
    auto model = init_model({4, 6, 3}, 12);
    model.class_index = {"1,2", "1|2", "2"};
    model.stats.mean = {0.0, 1.0, 2.0, 3.0};
    model.stats.stddev = {1.0, 1.0, 0.5, 1e-8};
    model.scenario = {{"num_users", 2}};
    const auto bytes = encode_model(model);
    const auto back = decode_model(bytes);
    CHECK(encode_model(back) == bytes);
    CHECK(back.dims == model.dims);
    CHECK(back.layers[1].weight == model.layers[1].weight);
    CHECK(back.stats.stddev == model.stats.stddev);
    CHECK(back.class_index == model.class_index);
    auto broken = bytes;
    broken[broken.size() - 10] ^= 0x40;
    CHECK_THROWS_AS(decode_model(broken), FormatError);
    auto wrong = bytes;
    wrong[3] = 'X';
    CHECK_THROWS_AS(decode_model(wrong), FormatError);
}
