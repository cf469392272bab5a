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

#include "hrs/hrs_engine.hpp"
#include "hrs/errors.hpp"
#include "hrs/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hrs
{
    std::vector<double> uniform_power_grid(int points)
    {
        std::vector<double> out;
        for (int i = 1; i <= points; ++i)
            out.push_back(static_cast<double>(i) / points);
        return out;
    }

    std::vector<double> HrsConfig::default_alpha_grid()
    {
        std::vector<double> grid{1e-3};
        const auto rest = uniform_power_grid(10);
        grid.insert(grid.end(), rest.begin(), rest.end());
        return grid;
    }

    GroupDims group_dims(const HrsConfig &config, int num_antennas, const Partition &partition)
    {
        const int G = partition.num_groups();
        const int M = num_antennas;
        GroupDims d;
        if (!config.b_override.empty() || !config.r_override.empty())
        {
            if (static_cast<int>(config.b_override.size()) != G || static_cast<int>(config.r_override.size()) != G)
                throw ConfigError("Explicit b/r dimensions must list one entry per group.");
            d.b = config.b_override;
            d.r = config.r_override;
        }
        else
        {
            d.b.assign(static_cast<std::size_t>(G), M / G);
            d.r.assign(static_cast<std::size_t>(G), M / G);
        }

        const long r_sum = [&] { long s = 0; for (int r : d.r) s += r; return s; }();
        for (int g = 0; g < G; ++g)
        {
            const auto gi = static_cast<std::size_t>(g);
            const long r_star = G > 1 ? r_sum - d.r[gi] : 0;
            const int n_g = static_cast<int>(partition.block(gi).size());
            if (d.r[gi] < 0)
                d.violation = "group " + std::to_string(g + 1) + ": r_g must be nonnegative";
            else if (d.b[gi] < 1)
                d.violation = "group " + std::to_string(g + 1) + ": b_g = " + std::to_string(d.b[gi]) +
                              " leaves no dimension for the outer precoder (G > M)";
            else if (d.b[gi] > M - r_star)
                d.violation = "group " + std::to_string(g + 1) + ": b_g = " + std::to_string(d.b[gi]) +
                              " exceeds M - r* = " + std::to_string(M - r_star);
            else if (config.enforce_user_dof && n_g > d.b[gi])
                d.violation = "group " + std::to_string(g + 1) + ": N_g = " + std::to_string(n_g) +
                              " exceeds b_g = " + std::to_string(d.b[gi]);
            if (!d.violation.empty())
                return d;
        }
        d.feasible = true;
        return d;
    }

    std::vector<CMatrix> group_channels(const CMatrix &H, const Partition &partition)
    {
        std::vector<CMatrix> out;
        out.reserve(partition.blocks().size());
        for (const auto &members : partition.blocks())
        {
            CMatrix Hg(H.rows(), static_cast<Eigen::Index>(members.size()));
            for (std::size_t k = 0; k < members.size(); ++k)
                Hg.col(static_cast<Eigen::Index>(k)) = H.col(members[k]);
            out.push_back(std::move(Hg));
        }
        return out;
    }

    double PowerAllocation::total() const
    {
        double s = p_oc;
        for (double p : p_ic)
            s += p;
        for (const auto &grp : p_priv)
            for (double p : grp)
                s += p;
        return s;
    }

    PowerAllocation allocate_power(double alpha, double beta, double total_power, const Partition &partition)
    {
        if (!(alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && beta <= 1.0))
            throw std::domain_error("Power split fractions must lie in (0, 1].");
        const double G = partition.num_groups();
        PowerAllocation p;
        p.alpha = alpha;
        p.beta = beta;
        p.p_oc = alpha * total_power;
        p.p_ic.assign(partition.blocks().size(), (1.0 - alpha) * beta * total_power / G);
        for (const auto &members : partition.blocks())
        {
            const double n_g = static_cast<double>(members.size());
            p.p_priv.emplace_back(members.size(), (1.0 - alpha) * (1.0 - beta) * total_power / (G * n_g));
        }
        return p;
    }

    nlohmann::json to_json(const RateBreakdown &r)
    {
        return {{"R_oc", r.R_oc},     {"R_ic", r.R_ic},           {"R_p", r.R_p},
                {"R_total", r.R_total}, {"alpha", r.best_alpha}, {"beta", r.best_beta},
                {"feasible", r.feasible}};
    }

    std::vector<CMatrix> compute_outer_precoders(const std::vector<CMatrix> &H_hat_grouped, const GroupDims &dims,
                                                 int num_antennas)
    {
        if (!dims.feasible)
            throw FeasibilityError("Infeasible partition: " + dims.violation);
        const std::size_t G = H_hat_grouped.size();
        const Eigen::Index M = num_antennas;
        std::vector<CMatrix> B(G);

        if (G == 1)
        {
            B[0] = CMatrix::Identity(M, std::min<Eigen::Index>(M, dims.b[0]));
            return B;
        }

        // dominant directions of each group, computed once
        std::vector<CMatrix> dominant(G);
        for (std::size_t l = 0; l < G; ++l)
        {
            const Eigen::Index k = std::min<Eigen::Index>({dims.r[l], H_hat_grouped[l].cols(), M});
            dominant[l] = linalg::dominant_left_singular_vectors(H_hat_grouped[l], k);
        }

        for (std::size_t g = 0; g < G; ++g)
        {
            Eigen::Index width = 0;
            for (std::size_t l = 0; l < G; ++l)
                if (l != g)
                    width += dominant[l].cols();
            CMatrix stacked(M, width);
            Eigen::Index col = 0;
            for (std::size_t l = 0; l < G; ++l)
                if (l != g)
                {
                    stacked.middleCols(col, dominant[l].cols()) = dominant[l];
                    col += dominant[l].cols();
                }

            const CMatrix nulled = linalg::column_space_basis(stacked);
            const CMatrix free_space = linalg::orthogonal_complement(nulled, M);
            if (free_space.cols() < dims.b[g])
                throw FeasibilityError("Group " + std::to_string(g + 1) + ": only " +
                                       std::to_string(free_space.cols()) + " free dimensions for b_g = " +
                                       std::to_string(dims.b[g]));

            const CMatrix projected = free_space.adjoint() * H_hat_grouped[g];
            B[g] = free_space * linalg::dominant_left_singular_vectors(projected, dims.b[g]);
        }
        return B;
    }

    namespace
    {
        // Unit-normalizes v in place; a vanishing vector is replaced by fallback (already unit norm).
        template <typename Vec>
        void normalize_or(Vec &&v, const CVector &fallback)
        {
            const double n = v.norm();
            if (n > 1e-300)
                v /= n;
            else
                v = fallback;
        }

        CVector unit(Eigen::Index dim)
        {
            CVector e = CVector::Zero(dim);
            e(0) = 1.0;
            return e;
        }
    }

    PrecoderSet compute_inner_precoders(const std::vector<CMatrix> &B, const std::vector<CMatrix> &H_hat_grouped,
                                        double total_power, double epsilon_scale)
    {
        if (B.size() != H_hat_grouped.size() || B.empty())
            throw ConfigError("Outer precoders and channel groups disagree in count.");
        const Eigen::Index M = B.front().rows();

        PrecoderSet out;
        out.B = B;
        CVector oc_sum = CVector::Zero(M);
        for (std::size_t g = 0; g < B.size(); ++g)
        {
            const CMatrix Ht = B[g].adjoint() * H_hat_grouped[g]; // b_g x N_g effective channel
            const Eigen::Index b = Ht.rows();
            const double eps = epsilon_scale * static_cast<double>(Ht.cols()) / total_power;

            CMatrix gram = Ht * Ht.adjoint();
            gram.diagonal().array() += eps;
            CMatrix W;
            if (eps > 0.0)
            {
                W = gram.ldlt().solve(Ht);
            }
            else
            {
                Eigen::FullPivLU<CMatrix> lu(gram);
                if (!lu.isInvertible())
                    throw NumericalError("Unregularized private precoder is singular (rank-deficient effective channel).");
                W = lu.solve(Ht);
            }
            if (!W.allFinite())
                throw NumericalError("Private precoder solve produced non-finite values.");

            const CVector e0 = unit(b);
            for (Eigen::Index k = 0; k < W.cols(); ++k)
                normalize_or(W.col(k), e0);

            CVector ic = W.rowwise().sum();
            normalize_or(ic, W.col(0));

            oc_sum += B[g] * Ht.rowwise().sum();
            out.W.push_back(std::move(W));
            out.w_ic.push_back(std::move(ic));
        }
        normalize_or(oc_sum, unit(M));
        out.w_oc = std::move(oc_sum);
        return out;
    }

    BeamGains beam_gains(const CMatrix &H_true, const Partition &partition, const PrecoderSet &precoders)
    {
        const Eigen::Index M = H_true.rows();
        const Eigen::Index N = H_true.cols();
        const auto G = static_cast<Eigen::Index>(partition.blocks().size());
        if (partition.num_users() != N || static_cast<Eigen::Index>(precoders.B.size()) != G)
            throw ConfigError("Channel, partition and precoders disagree in dimensions.");

        // transmit directions in antenna space
        CMatrix ic_beams(M, G), priv_beams(M, N);
        BeamGains out;
        out.group.assign(static_cast<std::size_t>(N), 0);
        out.stream.assign(static_cast<std::size_t>(N), 0);
        Eigen::Index s = 0;
        for (Eigen::Index g = 0; g < G; ++g)
        {
            const auto gi = static_cast<std::size_t>(g);
            ic_beams.col(g) = precoders.B[gi] * precoders.w_ic[gi];
            const auto &members = partition.block(gi);
            for (std::size_t k = 0; k < members.size(); ++k, ++s)
            {
                priv_beams.col(s) = precoders.B[gi] * precoders.W[gi].col(static_cast<Eigen::Index>(k));
                out.group[static_cast<std::size_t>(members[k])] = static_cast<int>(g);
                out.stream[static_cast<std::size_t>(members[k])] = static_cast<int>(s);
            }
        }

        const auto &kern = simd::active();
        const auto m = static_cast<std::size_t>(M);
        out.oc.resize(N);
        out.ic.resize(N, G);
        out.priv.resize(N, N);
        for (Eigen::Index u = 0; u < N; ++u)
        {
            const cd *h = H_true.col(u).data();
            out.oc(u) = std::norm(kern.cdot(h, precoders.w_oc.data(), m));
            for (Eigen::Index g = 0; g < G; ++g)
                out.ic(u, g) = std::norm(kern.cdot(h, ic_beams.col(g).data(), m));
            for (Eigen::Index t = 0; t < N; ++t)
                out.priv(u, t) = std::norm(kern.cdot(h, priv_beams.col(t).data(), m));
        }
        return out;
    }

    RateBreakdown rates_from_gains(const BeamGains &gains, const Partition &partition, const PowerAllocation &power)
    {
        const auto N = static_cast<std::size_t>(partition.num_users());
        const auto G = partition.blocks().size();

        std::vector<double> stream_power;
        stream_power.reserve(N);
        for (const auto &grp : power.p_priv)
            stream_power.insert(stream_power.end(), grp.begin(), grp.end());

        RateBreakdown r;
        r.feasible = true;
        r.best_alpha = power.alpha;
        r.best_beta = power.beta;
        double oc_min = std::numeric_limits<double>::infinity();
        std::vector<double> ic_min(G, std::numeric_limits<double>::infinity());

        for (std::size_t u = 0; u < N; ++u)
        {
            const auto ui = static_cast<Eigen::Index>(u);
            const auto g = static_cast<std::size_t>(gains.group[u]);
            const auto s = static_cast<std::size_t>(gains.stream[u]);

            double interference = 0.0;
            for (std::size_t l = 0; l < G; ++l)
                interference += power.p_ic[l] * gains.ic(ui, static_cast<Eigen::Index>(l));
            for (std::size_t t = 0; t < N; ++t)
                interference += stream_power[t] * gains.priv(ui, static_cast<Eigen::Index>(t));

            const double own_ic = power.p_ic[g] * gains.ic(ui, static_cast<Eigen::Index>(g));
            const double own_p = stream_power[s] * gains.priv(ui, static_cast<Eigen::Index>(s));
            const double den_oc = 1.0 + interference;
            const double den_ic = 1.0 + interference - own_ic;
            const double den_p = 1.0 + interference - (own_ic + own_p);
            if (den_ic < -1e-12 || den_p < -1e-12)
                throw NumericalError("Negative SINR denominator for user " + std::to_string(u + 1) +
                                     ": self terms exceed total interference.");

            const double sinr_oc = power.p_oc * gains.oc(ui) / den_oc;
            const double sinr_ic = own_ic / den_ic;
            const double sinr_p = own_p / den_p;
            oc_min = std::min(oc_min, std::log2(1.0 + sinr_oc));
            ic_min[g] = std::min(ic_min[g], std::log2(1.0 + sinr_ic));
            r.R_p += std::log2(1.0 + sinr_p);
        }
        r.R_oc = N ? oc_min : 0.0;
        for (double v : ic_min)
            r.R_ic += v;
        r.R_total = r.R_oc + r.R_ic + r.R_p;
        return r;
    }

    RateBreakdown compute_sinr_and_rate(const CMatrix &H_true, const Partition &partition,
                                        const PrecoderSet &precoders, const PowerAllocation &power)
    {
        return rates_from_gains(beam_gains(H_true, partition, precoders), partition, power);
    }

    RateBreakdown evaluate_partition(const ChannelSet &channels, const Partition &partition, const HrsConfig &config)
    {
        const int M = static_cast<int>(channels.num_antennas());
        if (partition.num_users() != channels.num_users())
            throw ConfigError("Partition covers " + std::to_string(partition.num_users()) + " users, channel has " +
                              std::to_string(channels.num_users()) + ".");
        const GroupDims dims = group_dims(config, M, partition);
        if (!dims.feasible)
            return RateBreakdown{};

        const auto grouped = group_channels(channels.H_hat, partition);
        const auto B = compute_outer_precoders(grouped, dims, M);
        const PrecoderSet precoders = compute_inner_precoders(B, grouped, config.total_power);
        const BeamGains gains = beam_gains(channels.H_true, partition, precoders);

        // single group: no inter-group leakage, outer common stays at the smallest grid point
        std::vector<double> alphas = config.alpha_grid;
        if (partition.num_groups() == 1)
            alphas = {*std::min_element(alphas.begin(), alphas.end())};

        RateBreakdown best;
        bool first = true;
        for (double a : alphas)
            for (double b : config.beta_grid)
            {
                const RateBreakdown r = rates_from_gains(gains, partition, allocate_power(a, b, config.total_power, partition));
                if (first || r.R_total > best.R_total)
                {
                    best = r;
                    first = false;
                }
            }
        return best;
    }
}
