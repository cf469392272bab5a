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

#include "hrs/clustering.hpp"
#include "hrs/errors.hpp"
#include "hrs/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace hrs
{
    CMatrix projection_matrix(const CMatrix &H)
    {
        const Eigen::Index n = H.cols();
        if (n == 0 || n > H.rows())
            throw DegenerateInputError("Projection needs 1 <= N_j <= M columns, got " + std::to_string(n) + " for M = " +
                                       std::to_string(H.rows()) + ".");
        const CMatrix gram = H.adjoint() * H;
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
        const RVector &ev = eig.eigenvalues();
        if (!(ev(0) > 0.0) || ev(ev.size() - 1) / ev(0) > 1e12)
            throw DegenerateInputError("Channel block is rank deficient (Gram condition number above 1e12).");
        CMatrix P = H * gram.ldlt().solve(H.adjoint());
        return 0.5 * (P + P.adjoint());
    }

    Subspace column_subspace(const CMatrix &H)
    {
        const CMatrix Q = linalg::column_space_basis(H);
        return {Q * Q.adjoint(), Q.cols()};
    }

    namespace
    {
        // Re tr(A B) for Hermitian A, B equals the real inner product of their entries.
        double trace_of_product(const CMatrix &A, const CMatrix &B)
        {
            return simd::dot(reinterpret_cast<const double *>(A.data()), reinterpret_cast<const double *>(B.data()),
                             2 * static_cast<std::size_t>(A.size()));
        }

        double clamp_unit(double s) { return std::clamp(s, 0.0, 1.0); }
    }

    double pf_similarity(const Subspace &a, const Subspace &b)
    {
        const Eigen::Index r = std::min(a.rank, b.rank);
        if (r == 0)
            return 0.0;
        return clamp_unit(trace_of_product(a.projector, b.projector) / static_cast<double>(r));
    }

    double pf_similarity(const CMatrix &H_k, const CMatrix &H_j)
    {
        if (H_k.rows() != H_j.rows())
            throw ConfigError("Similarity between channels with different antenna counts.");
        const CMatrix Pk = projection_matrix(H_k);
        const CMatrix Pj = projection_matrix(H_j);
        return clamp_unit(trace_of_product(Pk, Pj) / static_cast<double>(std::min(H_k.cols(), H_j.cols())));
    }

    SimilarityStats calibrate_similarity(int M, int N_k, int N_j, int num_draws, std::uint64_t rng_seed)
    {
        if (!SimilarityCalibration::applicable(M, N_k, N_j))
            throw NotApplicableError("Normalized similarity needs M > N_k + N_j (M = " + std::to_string(M) +
                                     ", N_k = " + std::to_string(N_k) + ", N_j = " + std::to_string(N_j) + ").");
        if (num_draws < 2000)
            throw ConfigError("Calibration needs at least 2000 draws.");

        std::mt19937_64 rng(rng_seed);
        double sum = 0.0, sum_sq = 0.0;
        for (int d = 0; d < num_draws; ++d)
        {
            const CMatrix A = complex_gaussian(M, N_k, rng);
            const CMatrix B = complex_gaussian(M, N_j, rng);
            const double s = pf_similarity(A, B);
            sum += s;
            sum_sq += s * s;
        }
        const double n = num_draws;
        SimilarityStats st;
        st.eta = sum / n;
        st.sigma = std::sqrt(std::max(0.0, (sum_sq - n * st.eta * st.eta) / (n - 1.0)));
        if (!(st.sigma > 0.0))
            throw NumericalError("Degenerate similarity distribution in calibration.");
        return st;
    }

    std::uint64_t SimilarityCalibration::key_seed(int M, int a, int b) const
    {
        const auto [m, lo, hi] = key(M, a, b);
        return derive_seed(seed_, static_cast<std::uint64_t>(m) << 32 | static_cast<std::uint64_t>(lo) << 16 |
                                      static_cast<std::uint64_t>(hi));
    }

    void SimilarityCalibration::prepare(int M, int num_users)
    {
        for (int a = 1; a <= num_users; ++a)
            for (int b = a; a + b <= num_users; ++b)
                if (applicable(M, a, b))
                    ensure(M, a, b);
    }

    const SimilarityStats &SimilarityCalibration::ensure(int M, int N_k, int N_j)
    {
        const Key k = key(M, N_k, N_j);
        auto it = table_.find(k);
        if (it == table_.end())
        {
            const auto [m, lo, hi] = k;
            it = table_.emplace(k, calibrate_similarity(m, lo, hi, num_draws_, key_seed(m, lo, hi))).first;
        }
        return it->second;
    }

    const SimilarityStats &SimilarityCalibration::lookup(int M, int N_k, int N_j) const
    {
        auto it = table_.find(key(M, N_k, N_j));
        if (it == table_.end())
            throw CalibrationMissingError("No similarity calibration for (M, N_k, N_j) = (" + std::to_string(M) + ", " +
                                          std::to_string(N_k) + ", " + std::to_string(N_j) + ").");
        return it->second;
    }

    namespace
    {
        double standardize(double s, int M, int n_k, int n_j, const SimilarityCalibration &calib)
        {
            if (!SimilarityCalibration::applicable(M, n_k, n_j))
                return s;
            const SimilarityStats &st = calib.lookup(M, n_k, n_j);
            return (s - st.eta) / st.sigma;
        }
    }

    double normalized_similarity(const CMatrix &H_k, const CMatrix &H_j, const SimilarityCalibration &calib)
    {
        const double s = pf_similarity(H_k, H_j);
        return standardize(s, static_cast<int>(H_k.rows()), static_cast<int>(H_k.cols()), static_cast<int>(H_j.cols()),
                           calib);
    }

    Dendrogram agglomerate(const CMatrix &H_hat, const SimilarityCalibration &calib)
    {
        const auto N = static_cast<int>(H_hat.cols());
        const auto M = static_cast<int>(H_hat.rows());
        if (N < 1)
            throw ConfigError("Agglomeration needs at least one user.");

        std::map<std::vector<int>, Subspace> cache;
        auto subspace_of = [&](const std::vector<int> &members) -> const Subspace & {
            auto it = cache.find(members);
            if (it == cache.end())
            {
                CMatrix Hb(H_hat.rows(), static_cast<Eigen::Index>(members.size()));
                for (std::size_t k = 0; k < members.size(); ++k)
                    Hb.col(static_cast<Eigen::Index>(k)) = H_hat.col(members[k]);
                it = cache.emplace(members, column_subspace(Hb)).first;
            }
            return it->second;
        };

        Dendrogram d;
        d.levels.push_back(Partition::singletons(N));
        while (d.levels.back().num_groups() > 1)
        {
            const Partition &cur = d.levels.back();
            const auto G = cur.blocks().size();
            double best = -std::numeric_limits<double>::infinity();
            std::pair<std::size_t, std::size_t> pick{0, 1};
            // blocks are ordered by min member, so (i, j) order is the lexicographic tie-break order
            for (std::size_t i = 0; i < G; ++i)
                for (std::size_t j = i + 1; j < G; ++j)
                {
                    const auto &bi = cur.block(i), &bj = cur.block(j);
                    const double s = pf_similarity(subspace_of(bi), subspace_of(bj));
                    const double score = standardize(s, M, static_cast<int>(bi.size()), static_cast<int>(bj.size()), calib);
                    if (score > best)
                    {
                        best = score;
                        pick = {i, j};
                    }
                }
            d.merges.push_back({static_cast<int>(d.levels.size()),
                                {static_cast<int>(pick.first), static_cast<int>(pick.second)},
                                best});
            d.levels.push_back(cur.merged(pick.first, pick.second));
        }
        return d;
    }

    PartitionChoice best_partition(const ChannelSet &channels, const Dendrogram &dendrogram, const HrsConfig &config)
    {
        std::optional<PartitionChoice> best;
        // universal level first so that strict improvement keeps ties at fewer groups
        for (auto it = dendrogram.levels.rbegin(); it != dendrogram.levels.rend(); ++it)
        {
            const RateBreakdown r = evaluate_partition(channels, *it, config);
            if (!r.feasible)
                continue;
            if (!best || r.R_total > best->rate.R_total)
                best = PartitionChoice{*it, r};
        }
        if (!best)
            throw FeasibilityError("No dendrogram level admits a feasible precoder design.");
        return *best;
    }

    PartitionChoice exhaustive_best(const ChannelSet &channels, const HrsConfig &config)
    {
        const auto N = static_cast<int>(channels.num_users());
        if (N > max_exhaustive_users)
            throw ConfigError("Exhaustive search is limited to N <= " + std::to_string(max_exhaustive_users) + " users.");

        std::optional<PartitionChoice> best;
        for (const Partition &p : enumerate_partitions(N))
        {
            const RateBreakdown r = evaluate_partition(channels, p, config);
            if (!r.feasible)
                continue;
            if (!best || r.R_total > best->rate.R_total ||
                (r.R_total == best->rate.R_total && p.num_groups() < best->partition.num_groups()))
                best = PartitionChoice{p, r};
        }
        if (!best)
            throw FeasibilityError("No partition admits a feasible precoder design.");
        return *best;
    }
}
