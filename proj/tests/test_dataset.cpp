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

#include <algorithm>
#include <array>
#include <numbers>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "catch_amalgamated.hpp"

#include "hrs/dataset.hpp"
#include "hrs/errors.hpp"

using namespace hrs;

namespace
{
    Sample fake(const std::string &label, double rate, int N = 3, int M = 4, std::uint64_t seed = 0)
    {
        std::mt19937_64 rng(seed);
        Sample s;
        s.H_true = complex_gaussian(M, N, rng);
        s.H_hat = complex_gaussian(M, N, rng);
        s.label = label;
        s.label_rate = rate;
        s.cov_assignment.assign(N, 0);
        return s;
    }

    ScenarioConfig small_config()
    {
        ScenarioConfig cfg;
        cfg.name = "unit";
        cfg.num_users = 4;
        cfg.num_antennas = 8;
        cfg.samples = 40;
        cfg.seed = 12;
        return cfg;
    }

    std::filesystem::path temp_file(const std::string &name)
    {
        return std::filesystem::temp_directory_path() / ("hrs_test_" + name);
    }
}

TEST_CASE("scenario config parsing")
{
    const auto cfg = scenario_from_json(nlohmann::json{{"num_users", 6}, {"num_antennas", 12}, {"balance_rule", "either"}});
    CHECK(cfg.num_users == 6);
    CHECK(cfg.balance_rule == BalanceRule::either);
    CHECK(cfg.tau_sq == 0.4);
    CHECK(scenario_from_json(to_json(cfg)).num_antennas == 12);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json{{"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json{{"num_users", "eight"}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json{{"min_class", 0}}), ConfigError);
    const auto all = reference_scenarios();
    REQUIRE(all.size() == 6);
    CHECK(all[0].num_users == 8);
    CHECK(all[0].num_antennas == 4);
    CHECK(all[5].num_users == 12);
    CHECK(all[5].num_antennas == 16);
    CHECK(cfg.azimuth(1) - cfg.azimuth(0) == Catch::Approx(std::numbers::pi / 3));
}

TEST_CASE("sample generation is deterministic and thread independent")
{
    auto cfg = small_config();
    const auto a = generate_samples(cfg, 1);
    const auto b = generate_samples(cfg, 3);
    REQUIRE(a.size() == 40);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].label == b[i].label);
        CHECK(a[i].H_true == b[i].H_true);
        CHECK(a[i].label_rate > 0.0);
        CHECK(Partition::from_key(a[i].label).num_users() == 4);
    }
    cfg.samples = 1;
    CHECK(generate_samples(cfg).size() == 1);
}

TEST_CASE("stored labels reproduce their rate")
{
    const auto cfg = small_config();
    const auto covs = cfg.covariances();
    SimilarityCalibration calib(cfg.calibration_draws);
    calib.prepare(cfg.num_antennas, cfg.num_users);
    for (std::uint64_t i = 0; i < 10; ++i)
    {
        const Sample s = generate_sample(cfg, covs, calib, i);
        const auto ch = s.channels();
        const auto best = best_partition(ch, agglomerate(ch.H_hat, calib), cfg.hrs_config());
        CHECK(best.partition.key() == s.label);
        CHECK(std::abs(best.rate.R_total - s.label_rate) <= 1e-9);
    }
}

TEST_CASE("covariance assignments are uniform")
{
    auto cfg = small_config();
    const auto covs = cfg.covariances();
    SimilarityCalibration calib(cfg.calibration_draws);
    calib.prepare(cfg.num_antennas, cfg.num_users);
    // assignment is drawn before any channel work; check the generator output directly
    std::array<double, 4> counts{};
    const int n = 2500;
    for (int i = 0; i < n; ++i)
    {
        std::mt19937_64 rng(derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<int> pick(0, 3);
        for (int u = 0; u < cfg.num_users; ++u)
            counts[static_cast<std::size_t>(pick(rng))] += 1.0;
    }
    const double expected = n * cfg.num_users / 4.0;
    double chi2 = 0.0;
    for (double c : counts)
        chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 11.345); // chi-square 3 dof, 1%
    const Sample s = generate_sample(cfg, covs, calib, 0);
    std::mt19937_64 rng(derive_seed(cfg.seed, 1, 0));
    std::uniform_int_distribution<int> pick(0, 3);
    for (int u = 0; u < cfg.num_users; ++u)
        CHECK(s.cov_assignment[static_cast<std::size_t>(u)] == pick(rng));
}

TEST_CASE("balancing")
{
    ScenarioConfig cfg = small_config();
    std::vector<Sample> in;
    for (int i = 0; i < 300; ++i)
        in.push_back(fake("1,2,3", 10.0));
    for (int i = 0; i < 60; ++i)
        in.push_back(fake("1|2|3", 10.0));
    for (int i = 0; i < 5; ++i)
        in.push_back(fake("1,2|3", 0.5)); // low rate and small: dropped
    for (int i = 0; i < 5; ++i)
        in.push_back(fake("1,3|2", 20.0)); // small but high rate: kept under the conjunctive rule
    const auto out = balance(in, cfg);
    const auto classes = summarize_classes(out);
    REQUIRE(classes.size() == 3);
    CHECK(classes[0].label == "1,2,3");
    CHECK(classes[0].count == 200);
    CHECK(classes[1].count == 60);
    CHECK(classes[2].label == "1,3|2");
    for (const auto &c : classes)
        CHECK((c.count >= 1 && c.count <= 200));

    cfg.balance_rule = BalanceRule::either;
    CHECK(summarize_classes(balance(in, cfg)).size() == 2);

    std::vector<Sample> flat;
    for (int i = 0; i < 100; ++i)
        flat.push_back(fake(i % 2 ? "1,2,3" : "1|2|3", 5.0));
    CHECK(balance(flat, small_config()).size() == 100);
    CHECK_THROWS_AS(balance({}, cfg), ConfigError);
}

TEST_CASE("augmentation permutes users inside label blocks")
{
    const auto cfg = small_config();
    std::vector<Sample> in = {fake("1,3|2", 1.0, 3, 4, 1), fake("1|2|3", 1.0, 3, 4, 2), fake("1,2,3", 1.0, 3, 4, 3)};
    const auto out = augment(in, cfg, 77);
    REQUIRE(out.size() == in.size() * 11);
    for (std::size_t i = 0; i < in.size(); ++i)
    {
        const Sample &src = in[i];
        const Partition p = Partition::from_key(src.label);
        for (std::size_t c = 0; c < 11; ++c)
        {
            const Sample &a = out[i * 11 + c];
            CHECK(a.label == src.label);
            if (c == 0)
                CHECK(a.H_true == src.H_true);
            if (src.label == "1|2|3")
                CHECK(a.H_hat == src.H_hat);
            // every column comes from a user of the same block, identically in both matrices
            for (const auto &block : p.blocks())
                for (int u : block)
                {
                    bool found = false;
                    for (int v : block)
                        if (a.H_true.col(u) == src.H_true.col(v) && a.H_hat.col(u) == src.H_hat.col(v))
                            found = true;
                    CHECK(found);
                }
        }
    }
}

TEST_CASE("augmented copies keep their label rate")
{
    auto cfg = small_config();
    cfg.samples = 6;
    const auto raw = generate_samples(cfg);
    const auto aug = augment(raw, cfg, 5);
    for (const auto &s : aug)
    {
        const auto r = evaluate_partition(s.channels(), Partition::from_key(s.label), cfg.hrs_config());
        const auto &src = raw[static_cast<std::size_t>(&s - aug.data()) / 11];
        CHECK(std::abs(r.R_total - src.label_rate) <= 1e-9);
    }
}

TEST_CASE("stratified split")
{
    std::vector<Sample> one;
    for (int i = 0; i < 100; ++i)
        one.push_back(fake("1,2,3", 1.0));
    const auto s = split(one, 3);
    CHECK(s.train.size() == 80);
    CHECK(s.validation.size() == 10);
    CHECK(s.test.size() == 10);
    CHECK(s.num_classes() == 1);
    CHECK(s.class_id("1,2,3") == 0);
    CHECK(s.class_id("1|2|3") == -1);

    std::vector<Sample> mixed;
    for (int i = 0; i < 50; ++i)
        mixed.push_back(fake("1,2,3", 1.0, 3, 4, static_cast<std::uint64_t>(i)));
    for (int i = 0; i < 7; ++i)
        mixed.push_back(fake("1|2|3", 1.0, 3, 4, static_cast<std::uint64_t>(100 + i)));
    const auto m = split(mixed, 4);
    CHECK(m.train.size() + m.validation.size() + m.test.size() == mixed.size());
    std::set<std::string> train_labels;
    for (const auto &x : m.train)
        train_labels.insert(x.label);
    for (const auto &x : m.test)
        CHECK(train_labels.count(x.label) == 1);
    CHECK(m.class_index == std::vector<std::string>{"1,2,3", "1|2|3"});

    const auto m2 = split(mixed, 5);
    CHECK(m2.train.size() == m.train.size());
    bool moved = false;
    for (std::size_t i = 0; i < m.test.size(); ++i)
        moved = moved || m.test[i].H_true != m2.test[i].H_true;
    CHECK(moved);

    std::vector<Sample> tiny = {fake("1,2,3", 1.0), fake("1,2,3", 1.0)};
    CHECK_THROWS_AS(split(tiny, 1), ConfigError);
}

TEST_CASE("dataset serialization")
{
    auto cfg = small_config();
    cfg.samples = 30;
    cfg.min_class = 1;
    const DatasetSplit ds = build_dataset(cfg);
    const auto bytes = encode_dataset(ds);
    const DatasetSplit back = decode_dataset(bytes);
    CHECK(encode_dataset(back) == bytes);
    REQUIRE(back.test.size() == ds.test.size());
    for (std::size_t i = 0; i < ds.test.size(); ++i)
    {
        CHECK(back.test[i].H_true == ds.test[i].H_true);
        CHECK(back.test[i].H_hat == ds.test[i].H_hat);
        CHECK(back.test[i].label == ds.test[i].label);
        CHECK(back.test[i].label_rate == ds.test[i].label_rate);
    }
    CHECK(back.class_index == ds.class_index);
    CHECK(back.config.seed == cfg.seed);

    auto bad_magic = bytes;
    bad_magic[0] ^= 0xFF;
    CHECK_THROWS_AS(decode_dataset(bad_magic), FormatError);
    auto flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x01;
    CHECK_THROWS_AS(decode_dataset(flipped), FormatError);
    const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(bytes.size() / 3));
    CHECK_THROWS_AS(decode_dataset(truncated), FormatError);

    DatasetSplit empty;
    empty.config = cfg;
    const auto e = decode_dataset(encode_dataset(empty));
    CHECK(e.train.empty());
    CHECK(e.test.empty());

    const auto path = temp_file("ds.hrsdat");
    serialize(ds, path);
    CHECK(encode_dataset(load_dataset(path)) == bytes);
    const auto csv = temp_file("ds.csv");
    export_csv(ds, csv);
    std::ifstream f(csv);
    std::string header;
    std::getline(f, header);
    CHECK(header == "label,rate,scenario,split");
    std::filesystem::remove(path);
    std::filesystem::remove(csv);
    CHECK_THROWS_AS(load_dataset(temp_file("missing.hrsdat")), FormatError);
}
