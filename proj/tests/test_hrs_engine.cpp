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
#include <numbers>
#include <random>

#include "catch_amalgamated.hpp"

#include "hrs/channel_model.hpp"
#include "hrs/errors.hpp"
#include "hrs/hrs_engine.hpp"

using namespace hrs;

namespace
{
    ChannelSet perfect(const CMatrix &H)
    {
        ChannelSet c;
        c.H_true = H;
        c.H_hat = H;
        c.cov_assignment.assign(H.cols(), 0);
        return c;
    }

    CMatrix random_channels(int M, int N, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        return complex_gaussian(M, N, rng);
    }
}

TEST_CASE("power grids")
{
    const auto g = uniform_power_grid(10);
    REQUIRE(g.size() == 10);
    CHECK(g.front() == Catch::Approx(0.1));
    CHECK(g.back() == 1.0);
    const auto a = HrsConfig::default_alpha_grid();
    CHECK(a.size() == 11);
    CHECK(a.front() == 1e-3);
}

TEST_CASE("group dimensions and feasibility")
{
    HrsConfig cfg;
    const auto d = group_dims(cfg, 8, Partition::from_key("1,2|3,4,5|6"));
    CHECK(d.b == std::vector<int>{2, 2, 2});
    CHECK(d.r == std::vector<int>{2, 2, 2});
    CHECK(d.feasible);

    const auto sing = group_dims(cfg, 4, Partition::singletons(8));
    CHECK_FALSE(sing.feasible);
    CHECK_FALSE(sing.violation.empty());

    cfg.enforce_user_dof = true;
    CHECK_FALSE(group_dims(cfg, 8, Partition::from_key("1,2,3|4|5|6")).feasible);
    CHECK(group_dims(cfg, 8, Partition::from_key("1,2|3,4|5|6")).feasible);
}

TEST_CASE("power allocation conserves total power")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1e-6, 1.0);
    for (int t = 0; t < 200; ++t)
    {
        const auto parts = std::vector<std::string>{"1,2,3,4", "1|2|3|4", "1,2|3|4", "1,3,4|2"};
        const auto p = Partition::from_key(parts[t % parts.size()]);
        const double P = 1.0 + 100.0 * u(rng);
        const auto a = allocate_power(u(rng), u(rng), P, p);
        CHECK(std::abs(a.total() - P) <= 1e-9 * P);
    }
    const auto a = allocate_power(0.2, 0.5, 10.0, Partition::from_key("1,2|3"));
    CHECK(a.p_oc == Catch::Approx(2.0));
    CHECK(a.p_ic[0] == Catch::Approx(2.0));
    CHECK(a.p_priv[0][0] == Catch::Approx(1.0));
    CHECK(a.p_priv[1][0] == Catch::Approx(2.0));
    CHECK_THROWS_AS(allocate_power(0.0, 0.5, 10.0, Partition::universal(2)), std::domain_error);
    CHECK_THROWS_AS(allocate_power(0.5, 1.5, 10.0, Partition::universal(2)), std::domain_error);
}

TEST_CASE("outer precoder of a single group is the identity")
{
    const CMatrix H = random_channels(4, 3, 1);
    const auto p = Partition::universal(3);
    const auto dims = group_dims(HrsConfig{}, 4, p);
    const auto B = compute_outer_precoders(group_channels(H, p), dims, 4);
    REQUIRE(B.size() == 1);
    CHECK((B[0].adjoint() * B[0] - CMatrix::Identity(4, 4)).norm() < 1e-10);
    CHECK(B[0].cols() == 4);
    CHECK(std::abs(std::abs(B[0].determinant()) - 1.0) < 1e-10);
}

TEST_CASE("outer precoders null orthogonal groups exactly")
{
    CMatrix H = CMatrix::Zero(4, 4);
    H(0, 0) = 1.0;
    H(1, 1) = cd(0.0, 1.0);
    H(2, 2) = 1.0;
    H(3, 3) = -1.0;
    const auto p = Partition::from_key("1,2|3,4");
    const auto grouped = group_channels(H, p);
    const auto B = compute_outer_precoders(grouped, group_dims(HrsConfig{}, 4, p), 4);
    CHECK((B[0].adjoint() * grouped[1]).norm() < 1e-8);
    CHECK((B[1].adjoint() * grouped[0]).norm() < 1e-8);
}

TEST_CASE("outer precoders null the other group's dominant directions")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const CMatrix H = random_channels(8, 6, seed);
        const auto p = Partition::from_key("1,2,3|4,5,6");
        const auto grouped = group_channels(H, p);
        const auto dims = group_dims(HrsConfig{}, 8, p);
        const auto B = compute_outer_precoders(grouped, dims, 8);
        for (int g = 0; g < 2; ++g)
        {
            CHECK((B[g].adjoint() * B[g] - CMatrix::Identity(B[g].cols(), B[g].cols())).norm() < 1e-8);
            const CMatrix &other = grouped[1 - g];
            Eigen::JacobiSVD<CMatrix> svd(other, Eigen::ComputeFullU);
            const int keep = std::min<int>(dims.r[1 - g], static_cast<int>(other.cols()));
            for (int i = 0; i < keep; ++i)
                CHECK((B[g].adjoint() * svd.matrixU().col(i)).norm() <= 1e-8);
        }
    }
}

TEST_CASE("inner precoders")
{
    SECTION("single user matched filter")
    {
        const std::vector<CMatrix> B = {CMatrix::Identity(2, 2)};
        CMatrix h = CMatrix::Zero(2, 1);
        h(0, 0) = 1.0;
        const auto pre = compute_inner_precoders(B, {h}, 10.0);
        CHECK((pre.W[0].col(0) - h.col(0)).norm() < 1e-12);
        CHECK((pre.w_ic[0] - h.col(0)).norm() < 1e-12);
        CHECK((pre.w_oc - h.col(0)).norm() < 1e-12);
    }
    SECTION("unit norms on random inputs")
    {
        const CMatrix H = random_channels(8, 6, 21);
        const auto p = Partition::from_key("1,4|2,3,5|6");
        const auto grouped = group_channels(H, p);
        const auto B = compute_outer_precoders(grouped, group_dims(HrsConfig{}, 8, p), 8);
        const auto pre = compute_inner_precoders(B, grouped, 100.0);
        for (std::size_t g = 0; g < pre.W.size(); ++g)
        {
            for (Eigen::Index k = 0; k < pre.W[g].cols(); ++k)
                CHECK(std::abs(pre.W[g].col(k).norm() - 1.0) < 1e-9);
            CHECK(std::abs(pre.w_ic[g].norm() - 1.0) < 1e-9);
        }
        CHECK(std::abs(pre.w_oc.norm() - 1.0) < 1e-9);
    }
    SECTION("heavy regularization approaches the matched filter")
    {
        const CMatrix H = random_channels(4, 3, 5);
        const std::vector<CMatrix> B = {CMatrix::Identity(4, 4)};
        const auto pre = compute_inner_precoders(B, {H}, 3.0, 1e6); // epsilon = 1e6
        for (Eigen::Index k = 0; k < H.cols(); ++k)
        {
            const CVector mf = H.col(k).normalized();
            CHECK((pre.W[0].col(k) - mf).norm() < 1e-4);
        }
    }
}

TEST_CASE("scalar AWGN channel gives one bit")
{
    const CMatrix h = CMatrix::Ones(1, 1);
    const auto p = Partition::universal(1);
    const auto grouped = group_channels(h, p);
    const auto B = compute_outer_precoders(grouped, group_dims(HrsConfig{}, 1, p), 1);
    const auto pre = compute_inner_precoders(B, grouped, 1.0);
    const auto r = compute_sinr_and_rate(h, p, pre, allocate_power(1e-12, 1e-12, 1.0, p));
    CHECK(r.R_total == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.R_p == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.R_total == Catch::Approx(r.R_oc + r.R_ic + r.R_p).margin(1e-12));
}

TEST_CASE("two orthogonal users in separate groups")
{
    const CMatrix H = CMatrix::Identity(2, 2);
    const auto p = Partition::singletons(2);
    const auto grouped = group_channels(H, p);
    const auto B = compute_outer_precoders(grouped, group_dims(HrsConfig{}, 2, p), 2);
    const auto pre = compute_inner_precoders(B, grouped, 10.0);
    const auto r = compute_sinr_and_rate(H, p, pre, allocate_power(1e-12, 1e-12, 10.0, p));
    CHECK(r.R_p == Catch::Approx(2.0 * std::log2(6.0)).margin(1e-9));
}

TEST_CASE("infeasible partitions rate zero")
{
    const ChannelSet ch = perfect(random_channels(4, 8, 2));
    const auto r = evaluate_partition(ch, Partition::singletons(8), HrsConfig{});
    CHECK_FALSE(r.feasible);
    CHECK(r.R_total == 0.0);
    CHECK_THROWS_AS(compute_outer_precoders(group_channels(ch.H_hat, Partition::singletons(8)),
                                            group_dims(HrsConfig{}, 4, Partition::singletons(8)), 4),
                    FeasibilityError);
}

TEST_CASE("grid search dominates every grid point")
{
    const CMatrix H = random_channels(8, 6, 31);
    ChannelSet ch = perfect(H);
    ch.H_hat = H + 0.3 * random_channels(8, 6, 32);
    const auto p = Partition::from_key("1,2,3|4,5,6");
    const HrsConfig cfg;
    const auto best = evaluate_partition(ch, p, cfg);
    REQUIRE(best.feasible);
    CHECK(best.R_total == Catch::Approx(best.R_oc + best.R_ic + best.R_p).margin(1e-9));
    const auto grouped = group_channels(ch.H_hat, p);
    const auto B = compute_outer_precoders(grouped, group_dims(cfg, 8, p), 8);
    const auto pre = compute_inner_precoders(B, grouped, cfg.total_power);
    for (double a : cfg.alpha_grid)
        for (double b : cfg.beta_grid)
        {
            const auto r = compute_sinr_and_rate(ch.H_true, p, pre, allocate_power(a, b, cfg.total_power, p));
            CHECK(r.R_total <= best.R_total + 1e-12);
        }
}

TEST_CASE("orthogonal groups with perfect CSI need no outer common message")
{
    // two groups living on disjoint antenna coordinates
    CMatrix H = CMatrix::Zero(8, 4);
    const CMatrix G1 = random_channels(4, 2, 41);
    const CMatrix G2 = random_channels(4, 2, 42);
    H.block(0, 0, 4, 2) = G1;
    H.block(4, 2, 4, 2) = G2;
    const auto p = Partition::from_key("1,2|3,4");
    const HrsConfig cfg;
    const auto best = evaluate_partition(perfect(H), p, cfg);
    CHECK(best.best_alpha == cfg.alpha_grid.front());

    const auto grouped = group_channels(H, p);
    const auto B = compute_outer_precoders(grouped, group_dims(cfg, 8, p), 8);
    const auto pre = compute_inner_precoders(B, grouped, cfg.total_power);
    std::vector<double> alphas = cfg.alpha_grid;
    std::sort(alphas.begin(), alphas.end());
    double prev = std::numeric_limits<double>::infinity();
    for (double a : alphas)
    {
        double top = 0.0;
        for (double b : cfg.beta_grid)
            top = std::max(top, compute_sinr_and_rate(H, p, pre, allocate_power(a, b, cfg.total_power, p)).R_total);
        CHECK(top <= prev + 1e-9);
        prev = top;
    }
}

TEST_CASE("rate breakdown json")
{
    RateBreakdown r;
    r.R_oc = 1.0;
    r.R_total = 1.0;
    r.feasible = true;
    const auto j = to_json(r);
    CHECK(j.at("R_total").get<double>() == 1.0);
    CHECK(j.at("feasible").get<bool>());
}
