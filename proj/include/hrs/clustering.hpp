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
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "hrs/channel_model.hpp"
#include "hrs/errors.hpp"
#include "hrs/hrs_engine.hpp"
#include "hrs/partition.hpp"

namespace hrs
{
    class CalibrationMissingError : public ConfigError
    {
    public:
        using ConfigError::ConfigError;
    };

    class NotApplicableError : public ConfigError
    {
    public:
        using ConfigError::ConfigError;
    };

    // Orthogonal projector H (H^H H)^{-1} H^H. Requires N_j <= M and a Gram matrix with
    // condition number <= 1e12, otherwise DegenerateInputError.
    CMatrix projection_matrix(const CMatrix &H);

    // Projector onto the column space for any shape (rank min(N_j, M) generically).
    // Used by the agglomeration, where merged blocks may exceed M columns.
    struct Subspace
    {
        CMatrix projector;
        Eigen::Index rank = 0;
    };
    Subspace column_subspace(const CMatrix &H);

    // tr(P_a P_b) / min(rank_a, rank_b), in [0, 1]
    double pf_similarity(const Subspace &a, const Subspace &b);

    // s = tr(P_k P_j) / min(N_k, N_j) via projection_matrix
    double pf_similarity(const CMatrix &H_k, const CMatrix &H_j);

    struct SimilarityStats
    {
        double eta = 0.0;
        double sigma = 0.0;
    };

    // Monte Carlo mean and standard deviation of pf_similarity between independent
    // i.i.d. CN(0,1) matrices of sizes M x N_k and M x N_j. Requires M > N_k + N_j and
    // num_draws >= 2000.
    SimilarityStats calibrate_similarity(int M, int N_k, int N_j, int num_draws, std::uint64_t rng_seed);

    constexpr int default_calibration_draws = 2000;

    // Cached (M, N_k, N_j) -> (eta, sigma); keys are symmetric in N_k, N_j.
    class SimilarityCalibration
    {
    public:
        SimilarityCalibration() = default;
        explicit SimilarityCalibration(int num_draws, std::uint64_t seed = 0x5EED) : num_draws_(num_draws), seed_(seed) {}

        static bool applicable(int M, int N_k, int N_j) { return M > N_k + N_j; }

        // Calibrate every key that an agglomeration over num_users users at M antennas can touch.
        void prepare(int M, int num_users);

        // Calibrates on demand if absent (not thread-safe; call prepare() before sharing).
        const SimilarityStats &ensure(int M, int N_k, int N_j);

        // Throws CalibrationMissingError when the key has not been calibrated.
        const SimilarityStats &lookup(int M, int N_k, int N_j) const;

        std::size_t size() const { return table_.size(); }
        int num_draws() const { return num_draws_; }
        std::uint64_t key_seed(int M, int a, int b) const;

    private:
        using Key = std::tuple<int, int, int>;
        static Key key(int M, int N_k, int N_j) { return {M, std::min(N_k, N_j), std::max(N_k, N_j)}; }
        std::map<Key, SimilarityStats> table_;
        int num_draws_ = default_calibration_draws;
        std::uint64_t seed_ = 0x5EED;
    };

    // (s - eta) / sigma when M > N_k + N_j, raw s otherwise.
    double normalized_similarity(const CMatrix &H_k, const CMatrix &H_j, const SimilarityCalibration &calib);

    struct MergeStep
    {
        int level = 0;                    // index of the level produced by this merge
        std::pair<int, int> blocks;       // block indices in the previous level
        double similarity = 0.0;
    };

    struct Dendrogram
    {
        std::vector<Partition> levels;    // levels[0] all singletons ... levels[N-1] universal
        std::vector<MergeStep> merges;    // merges[i] turns levels[i] into levels[i+1]
    };

    // Bottom-up merging of the most similar pair; ties go to the lexicographically smallest
    // (min member, min member) pair.
    Dendrogram agglomerate(const CMatrix &H_hat, const SimilarityCalibration &calib);

    struct PartitionChoice
    {
        Partition partition;
        RateBreakdown rate;
    };

    // Best feasible dendrogram level by R_total; ties go to fewer groups.
    PartitionChoice best_partition(const ChannelSet &channels, const Dendrogram &dendrogram, const HrsConfig &config);

    constexpr int max_exhaustive_users = 6;

    // Global maximizer over all Bell(N) partitions, N <= 6.
    PartitionChoice exhaustive_best(const ChannelSet &channels, const HrsConfig &config);
}
