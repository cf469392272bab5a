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
#include <string>
#include <vector>

#include "hrs/channel_model.hpp"
#include "hrs/hrs_engine.hpp"

#include <json.hpp>

namespace hrs
{
    // How the two class-removal conditions of balancing combine.
    enum class BalanceRule
    {
        both,    // drop a class only if its rate is low AND it is small
        either   // drop a class if its rate is low OR it is small
    };

    struct ScenarioConfig
    {
        std::string name = "scenario";
        int num_users = 8;       // N
        int num_antennas = 8;    // M
        double tau_sq = 0.4;
        int num_covs = 4;
        double azimuth_start = -1.5707963267948966; // theta_1 = -pi/2
        double azimuth_step = 1.0471975511965976;   // pi/3
        double spread = 0.5235987755982988;         // pi/6
        int integration_points = default_integration_points;
        int samples = 2000;
        double total_power = 100.0;
        std::uint64_t seed = 1;

        double rate_floor_frac = 0.25;
        int min_class = 50;
        int max_class = 200;
        BalanceRule balance_rule = BalanceRule::both;
        int num_shuffles = 10;

        int calibration_draws = 2000;
        bool enforce_user_dof = false;

        void validate() const; // throws ConfigError
        double azimuth(int g) const { return azimuth_start + azimuth_step * g; } // g is 0-based
        std::vector<CovarianceMatrix> covariances() const;
        HrsConfig hrs_config() const;
    };

    nlohmann::json to_json(const ScenarioConfig &cfg);
    ScenarioConfig scenario_from_json(const nlohmann::json &j); // missing keys keep defaults
    ScenarioConfig load_scenario(const std::filesystem::path &path);

    // (N, M) = (8,4), (8,8), (8,12), (12,6), (12,12), (12,16)
    std::vector<ScenarioConfig> reference_scenarios();
}
