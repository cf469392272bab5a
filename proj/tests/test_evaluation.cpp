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

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <regex>

#include "catch_amalgamated.hpp"

#include "hrs/binary_io.hpp"
#include "hrs/errors.hpp"
#include "hrs/evaluation.hpp"
#include "hrs/report.hpp"

using namespace hrs;

namespace
{
    std::filesystem::path temp_path(const std::string &name)
    {
        return std::filesystem::temp_directory_path() / ("hrs_eval_" + name);
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream f(p);
        return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    }
}

TEST_CASE("percentiles and boxplot statistics")
{
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    const auto s = boxplot_stats(v);
    CHECK(s.median == Catch::Approx(50.5));
    CHECK(s.p25 == Catch::Approx(25.75));
    CHECK(s.p75 == Catch::Approx(75.25));
    CHECK(s.p1 == Catch::Approx(1.99));
    CHECK(s.p99 == Catch::Approx(99.01));
    CHECK(s.outliers == std::vector<double>{1.0, 100.0});

    const auto c = boxplot_stats(std::vector<double>(10, 3.0));
    CHECK(c.p1 == 3.0);
    CHECK(c.p99 == 3.0);
    CHECK(c.outliers.empty());
    CHECK_THROWS_AS(boxplot_stats({}), std::invalid_argument);

    std::mt19937_64 rng(1);
    std::exponential_distribution<double> e(1.0);
    for (int t = 0; t < 50; ++t)
    {
        std::vector<double> r(1 + t * 3);
        for (auto &x : r)
            x = e(rng);
        const auto b = boxplot_stats(r);
        CHECK(b.p1 <= b.p25);
        CHECK(b.p25 <= b.median);
        CHECK(b.median <= b.p75);
        CHECK(b.p75 <= b.p99);
    }
}

TEST_CASE("relative rate")
{
    const auto r = relative_rate({1.0, 2.0, 3.0}, {2.0, 2.0, 2.0});
    CHECK(r.ratio == Catch::Approx(1.0));
    CHECK_FALSE(r.exceeds_reference);
    const auto up = relative_rate({3.0}, {2.0});
    CHECK(up.ratio == Catch::Approx(1.5));
    CHECK(up.exceeds_reference);
    CHECK_THROWS(relative_rate({1.0}, {1.0, 2.0}));
}

TEST_CASE("baselines on a small trained scenario")
{
    ScenarioConfig cfg;
    cfg.name = "eval";
    cfg.num_users = 4;
    cfg.num_antennas = 8;
    cfg.samples = 40;
    cfg.seed = 21;
    const DatasetSplit ds = build_dataset(cfg);
    mlp::TrainOptions opt;
    opt.epochs = 3;
    const auto trained = mlp::train(ds, opt);
    CHECK_NOTHROW(check_compatible(trained.model, ds));
    CHECK(trained.report.test_top1 <= trained.report.test_top3);
    CHECK(trained.report.test_top3 <= trained.report.test_top5);
    CHECK(trained.report.train_loss.size() == 3);

    const BaselineRun run = run_baselines(cfg, &trained.model, ds.test, 2);
    REQUIRE(run.methods.size() == 4);
    CHECK(run.methods[0].method == Method::HC);
    CHECK(run.methods[1].method == Method::NN);
    CHECK(run.methods[2].method == Method::UNI);
    CHECK(run.methods[3].method == Method::SING);
    CHECK(run.records.size() == 4 * ds.test.size());

    SimilarityCalibration calib(cfg.calibration_draws);
    calib.prepare(cfg.num_antennas, cfg.num_users);
    const auto predicted = predict_partitions(trained.model, ds.test);
    const auto &hc = run.result(Method::HC).rates;
    const auto &nn = run.result(Method::NN).rates;
    const auto &uni = run.result(Method::UNI).rates;
    for (std::size_t i = 0; i < ds.test.size(); ++i)
    {
        CHECK(hc[i] == Catch::Approx(ds.test[i].label_rate).epsilon(1e-12));
        CHECK(hc[i] >= uni[i] - 1e-9);
        const auto d = agglomerate(ds.test[i].H_hat, calib);
        for (const auto &level : d.levels)
            if (level.key() == predicted[i])
                CHECK(nn[i] <= hc[i] + 1e-9);
    }
    const double mean_nn = std::accumulate(nn.begin(), nn.end(), 0.0) / static_cast<double>(nn.size());
    const double mean_hc = std::accumulate(hc.begin(), hc.end(), 0.0) / static_cast<double>(hc.size());
    CHECK(run.relative.ratio == Catch::Approx(mean_nn / mean_hc).epsilon(1e-12));

    // records written and read back recompute the same metric
    const auto jsonl = temp_path("records.jsonl");
    write_records_jsonl(run.records, jsonl);
    const auto back = read_records_jsonl(jsonl);
    REQUIRE(back.size() == run.records.size());
    std::vector<double> nn2, hc2;
    for (const auto &r : back)
    {
        if (r.method == Method::NN)
            nn2.push_back(r.rate.R_total);
        if (r.method == Method::HC)
            hc2.push_back(r.rate.R_total);
    }
    CHECK(relative_rate(nn2, hc2).ratio == Catch::Approx(run.relative.ratio).epsilon(1e-12));
    std::filesystem::remove(jsonl);

    ScenarioConfig other = cfg;
    other.num_users = 5;
    DatasetSplit mismatch = ds;
    mismatch.config = other;
    CHECK_THROWS_AS(check_compatible(trained.model, mismatch), ConfigError);

    const auto ref = run_reference_baselines(cfg, ds.test);
    CHECK(ref.methods.size() == 3);
    CHECK_THROWS_AS(run_baselines(cfg, nullptr, ds.test), ConfigError);
}

TEST_CASE("singletons are infeasible with fewer antennas than users")
{
    ScenarioConfig cfg;
    cfg.num_users = 8;
    cfg.num_antennas = 4;
    cfg.samples = 5;
    const auto raw = generate_samples(cfg);
    const auto run = run_reference_baselines(cfg, raw);
    for (double r : run.result(Method::SING).rates)
        CHECK(r == 0.0);
}

TEST_CASE("summary table and boxplot reports")
{
    const auto csv = temp_path("summary.csv");
    write_summary_csv({}, csv);
    CHECK(slurp(csv) == std::string(summary_csv_header) + "\n");
    write_summary_csv({{"n8_m8", 0.5, 0.6, 0.7, 0.8, 0.9}}, csv);
    const auto text = slurp(csv);
    CHECK(text.rfind("scenario,val_top1,test_top1,test_top3,test_top5,relative_rate\n", 0) == 0);
    CHECK(text.find("n8_m8,") != std::string::npos);
    std::filesystem::remove(csv);

    std::vector<MethodResult> results;
    for (Method m : all_methods)
    {
        MethodResult r;
        r.method = m;
        r.rates = {1.0, 2.0, 3.0, 4.0};
        r.summary = boxplot_stats(r.rates);
        results.push_back(r);
    }
    const std::string svg = boxplot_svg(results, "demo");
    const std::regex group(R"re(<g class="box" data-method="([A-Z]+)")re");
    std::vector<std::string> order;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), group); it != std::sregex_iterator(); ++it)
        order.push_back((*it)[1]);
    CHECK(order == std::vector<std::string>{"HC", "NN", "UNI", "SING"});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(boxplot_svg({}, "empty").find("</svg>") != std::string::npos);
}

TEST_CASE("binary envelope")
{
    const std::string text = "123456789";
    CHECK(io::crc32({reinterpret_cast<const std::uint8_t *>(text.data()), text.size()}) == 0xCBF43926u);

    io::ByteWriter w;
    w.put_u32(7);
    w.put_f64(-2.5);
    const std::complex<double> z[] = {{1.0, -1.0}};
    w.put_complex(z);
    const auto payload = w.take();
    const auto file = io::encode_envelope("TESTMAG1", {{"k", 1}}, payload);
    const auto env = io::decode_envelope("TESTMAG1", file);
    CHECK(env.header.at("k") == 1);
    io::ByteReader r(env.payload);
    CHECK(r.get_u32() == 7);
    CHECK(r.get_f64() == -2.5);
    std::complex<double> out[1];
    r.get_complex(out);
    CHECK(out[0] == z[0]);
    CHECK(r.remaining() == 0);
    CHECK_THROWS_AS(r.get_u32(), FormatError);

    CHECK_THROWS_AS(io::decode_envelope("OTHERMAG", file), FormatError);
    for (std::size_t i = 0; i < file.size(); i += 7)
    {
        auto bad = file;
        bad[i] ^= 0x10;
        CHECK_THROWS_AS(io::decode_envelope("TESTMAG1", bad), FormatError);
    }
    const std::vector<std::uint8_t> shortfile(file.begin(), file.begin() + 10);
    CHECK_THROWS_AS(io::decode_envelope("TESTMAG1", shortfile), FormatError);
}
