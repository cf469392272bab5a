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

#include <string>
#include <vector>

#include "hrs/channel_model.hpp"
#include "hrs/partition.hpp"

#include <json.hpp>

namespace hrs
{
    // Uniform grid over (0, 1]: {1/n, 2/n, ..., 1}
    std::vector<double> uniform_power_grid(int points);

    struct HrsConfig
    {
        double total_power = 100.0;

        // Outer-common fraction: 10 uniform points plus 1e-3 (no outer common)
        std::vector<double> alpha_grid = default_alpha_grid();
        // Inner-common fraction of the remaining power
        std::vector<double> beta_grid = uniform_power_grid(10);

        // Require N_g <= b_g (one spatial dimension per user in every group)
        bool enforce_user_dof = false;

        // Explicit per-group dimensions; empty means b_g = r_g = floor(M / G)
        std::vector<int> b_override;
        std::vector<int> r_override;

        static std::vector<double> default_alpha_grid();
    };

    struct GroupDims
    {
        std::vector<int> b;   // outer precoder width per group
        std::vector<int> r;   // dominant directions nulled per interfering group
        bool feasible = false;
        std::string violation; // empty when feasible
    };

    GroupDims group_dims(const HrsConfig &config, int num_antennas, const Partition &partition);

    // Columns of H that belong to each block, in block order.
    std::vector<CMatrix> group_channels(const CMatrix &H, const Partition &partition);

    struct PrecoderSet
    {
        std::vector<CMatrix> B;     // M x b_g, orthonormal columns
        std::vector<CMatrix> W;     // b_g x N_g, unit-norm columns
        std::vector<CVector> w_ic;  // b_g, unit norm
        CVector w_oc;               // M, unit norm
    };

    struct PowerAllocation
    {
        double alpha = 0.0;
        double beta = 0.0;
        double p_oc = 0.0;
        std::vector<double> p_ic;                 // per group
        std::vector<std::vector<double>> p_priv;  // per group, per member

        double total() const;
    };

    // p_oc = aP, p_ic,g = (1-a) b P / G, p_gk = (1-a)(1-b) P / (G N_g)
    PowerAllocation allocate_power(double alpha, double beta, double total_power, const Partition &partition);

    struct RateBreakdown
    {
        double R_oc = 0.0;
        double R_ic = 0.0;
        double R_p = 0.0;
        double R_total = 0.0;
        double best_alpha = 0.0;
        double best_beta = 0.0;
        bool feasible = false;
    };

    nlohmann::json to_json(const RateBreakdown &r);

    // B_g spans the b_g dominant directions of H_hat_g after removing the r_l dominant left
    // singular directions of every other group. Throws FeasibilityError.
    std::vector<CMatrix> compute_outer_precoders(const std::vector<CMatrix> &H_hat_grouped, const GroupDims &dims,
                                                 int num_antennas);

    // RZF private precoders with regularization epsilon_g = N_g / P, then inner/outer common MBF.
    // epsilon_scale multiplies every epsilon_g (1 is the default rule); zero requests plain ZF.
    PrecoderSet compute_inner_precoders(const std::vector<CMatrix> &B, const std::vector<CMatrix> &H_hat_grouped,
                                        double total_power, double epsilon_scale = 1.0);

    // Received-power terms |h_u^H v|^2 for every user and every transmitted beam.
    struct BeamGains
    {
        RVector oc;                 // [user]
        RMatrix ic;                 // [user][group]
        RMatrix priv;               // [user][global private stream]; stream order follows partition blocks
        std::vector<int> group;     // [user] -> group
        std::vector<int> stream;    // [user] -> own private stream index
    };

    BeamGains beam_gains(const CMatrix &H_true, const Partition &partition, const PrecoderSet &precoders);

    RateBreakdown rates_from_gains(const BeamGains &gains, const Partition &partition, const PowerAllocation &power);

    RateBreakdown compute_sinr_and_rate(const CMatrix &H_true, const Partition &partition,
                                        const PrecoderSet &precoders, const PowerAllocation &power);

    // Precoders from H_hat, rates against H_true, exhaustive (alpha, beta) grid search.
    // Infeasible partitions return a zero, infeasible breakdown.
    RateBreakdown evaluate_partition(const ChannelSet &channels, const Partition &partition, const HrsConfig &config);
}
