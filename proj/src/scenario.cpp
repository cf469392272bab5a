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

#include "hrs/scenario.hpp"
#include "hrs/errors.hpp"

#include <algorithm>
#include <fstream>

namespace hrs
{
    void ScenarioConfig::validate() const
    {
        auto fail = [](const std::string &what) { throw ConfigError("Invalid scenario: " + what); };
        if (num_users < 1)
            fail("num_users must be positive");
        if (num_antennas < 1)
            fail("num_antennas must be positive");
        if (!(tau_sq >= 0.0 && tau_sq <= 1.0))
            fail("tau_sq must lie in [0, 1]");
        if (num_covs < 1)
            fail("num_covs must be positive");
        if (!(spread > 0.0))
            fail("spread must be positive");
        if (integration_points < 64)
            fail("integration_points must be at least 64");
        if (samples < 0)
            fail("samples must be nonnegative");
        if (!(total_power > 0.0))
            fail("total_power must be positive");
        if (!(rate_floor_frac > 0.0) || min_class < 1 || max_class < 1)
            fail("balancing thresholds must be positive");
        if (num_shuffles < 0)
            fail("num_shuffles must be nonnegative");
        if (calibration_draws < 2000)
            fail("calibration_draws must be at least 2000");
    }

    std::vector<CovarianceMatrix> ScenarioConfig::covariances() const
    {
        const ArrayGeometry uca = ArrayGeometry::uniform_circular(num_antennas);
        std::vector<CovarianceMatrix> out;
        for (int g = 0; g < num_covs; ++g)
            out.push_back(build_covariance(uca, azimuth(g), spread, integration_points));
        return out;
    }

    HrsConfig ScenarioConfig::hrs_config() const
    {
        HrsConfig c;
        c.total_power = total_power;
        c.enforce_user_dof = enforce_user_dof;
        return c;
    }

    nlohmann::json to_json(const ScenarioConfig &c)
    {
        return {{"name", c.name},
                {"num_users", c.num_users},
                {"num_antennas", c.num_antennas},
                {"tau_sq", c.tau_sq},
                {"num_covs", c.num_covs},
                {"azimuth_start", c.azimuth_start},
                {"azimuth_step", c.azimuth_step},
                {"spread", c.spread},
                {"integration_points", c.integration_points},
                {"samples", c.samples},
                {"total_power", c.total_power},
                {"seed", c.seed},
                {"rate_floor_frac", c.rate_floor_frac},
                {"min_class", c.min_class},
                {"max_class", c.max_class},
                {"balance_rule", c.balance_rule == BalanceRule::both ? "both" : "either"},
                {"num_shuffles", c.num_shuffles},
                {"calibration_draws", c.calibration_draws},
                {"enforce_user_dof", c.enforce_user_dof}};
    }

    ScenarioConfig scenario_from_json(const nlohmann::json &j)
    {
        if (!j.is_object())
            throw ConfigError("Scenario config must be a JSON object.");
        static const std::vector<std::string> known = {
            "name", "num_users", "num_antennas", "tau_sq", "num_covs", "azimuth_start", "azimuth_step", "spread",
            "integration_points", "samples", "total_power", "seed", "rate_floor_frac", "min_class", "max_class",
            "balance_rule", "num_shuffles", "calibration_draws", "enforce_user_dof"};
        for (const auto &[k, v] : j.items())
            if (std::find(known.begin(), known.end(), k) == known.end())
                throw ConfigError("Unknown scenario key \"" + k + "\".");

        ScenarioConfig c;
        try
        {
            auto get = [&](const char *k, auto &field) {
                if (j.contains(k))
                    field = j.at(k).get<std::decay_t<decltype(field)>>();
            };
            get("name", c.name);
            get("num_users", c.num_users);
            get("num_antennas", c.num_antennas);
            get("tau_sq", c.tau_sq);
            get("num_covs", c.num_covs);
            get("azimuth_start", c.azimuth_start);
            get("azimuth_step", c.azimuth_step);
            get("spread", c.spread);
            get("integration_points", c.integration_points);
            get("samples", c.samples);
            get("total_power", c.total_power);
            get("seed", c.seed);
            get("rate_floor_frac", c.rate_floor_frac);
            get("min_class", c.min_class);
            get("max_class", c.max_class);
            get("num_shuffles", c.num_shuffles);
            get("calibration_draws", c.calibration_draws);
            get("enforce_user_dof", c.enforce_user_dof);
            if (j.contains("balance_rule"))
            {
                const auto rule = j.at("balance_rule").get<std::string>();
                if (rule == "both")
                    c.balance_rule = BalanceRule::both;
                else if (rule == "either")
                    c.balance_rule = BalanceRule::either;
                else
                    throw ConfigError("balance_rule must be \"both\" or \"either\".");
            }
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError(std::string("Scenario config type error: ") + e.what());
        }
        c.validate();
        return c;
    }

    ScenarioConfig load_scenario(const std::filesystem::path &path)
    {
        std::ifstream f(path);
        if (!f)
            throw ConfigError("Cannot open scenario config '" + path.string() + "'.");
        nlohmann::json j;
        try
        {
            f >> j;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError("Scenario config '" + path.string() + "' is not valid JSON: " + e.what());
        }
        return scenario_from_json(j);
    }

    std::vector<ScenarioConfig> reference_scenarios()
    {
        std::vector<ScenarioConfig> out;
        for (auto [n, m] : {std::pair{8, 4}, {8, 8}, {8, 12}, {12, 6}, {12, 12}, {12, 16}})
        {
            ScenarioConfig c;
            c.num_users = n;
            c.num_antennas = m;
            c.name = "n" + std::to_string(n) + "_m" + std::to_string(m);
            out.push_back(c);
        }
        return out;
    }
}
