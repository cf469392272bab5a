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

// hrs-cluster command line: dataset generation, training, evaluation and the
// four-way clustering comparison.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hrs/dataset.hpp"
#include "hrs/errors.hpp"
#include "hrs/evaluation.hpp"
#include "hrs/mlp.hpp"
#include "hrs/report.hpp"
#include "hrs/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace hrs;

namespace
{
    struct Globals
    {
        std::optional<std::uint64_t> seed;
        std::optional<double> power;
        int threads = 1;
    };

    void apply_overrides(ScenarioConfig &cfg, const Globals &g)
    {
        if (g.seed)
            cfg.seed = *g.seed;
        if (g.power)
        {
            if (!(*g.power > 0.0))
                throw ConfigError("--power must be positive.");
            cfg.total_power = *g.power;
        }
    }

    DatasetSplit generate(const fs::path &config_path, const fs::path &out, const Globals &g,
                          const std::optional<fs::path> &csv)
    {
        ScenarioConfig cfg = load_scenario(config_path);
        apply_overrides(cfg, g);
        std::cerr << "generating " << cfg.samples << " samples for " << cfg.name << " (N=" << cfg.num_users
                  << ", M=" << cfg.num_antennas << ")\n";
        DatasetSplit ds = build_dataset(cfg, g.threads);
        serialize(ds, out);
        if (csv)
            export_csv(ds, *csv);
        std::cerr << "classes " << ds.num_classes() << ", train/val/test " << ds.train.size() << '/'
                  << ds.validation.size() << '/' << ds.test.size() << "  stats " << ds.stats.dump() << '\n';
        return ds;
    }

    mlp::TrainResult train_model(const DatasetSplit &ds, const fs::path &out, const Globals &g, int epochs, int batch,
                                 bool verbose)
    {
        mlp::TrainOptions opt;
        opt.epochs = epochs;
        opt.batch_size = batch;
        opt.seed = g.seed.value_or(1);
        opt.verbose = verbose;
        auto result = mlp::train(ds, opt);
        mlp::save_model(result.model, out);
        std::ofstream rep(out.string() + ".report.json");
        rep << mlp::to_json(result.report).dump(2) << '\n';
        std::cerr << "test top-1/3/5 " << result.report.test_top1 << " / " << result.report.test_top3 << " / "
                  << result.report.test_top5 << '\n';
        return result;
    }

    SummaryRow evaluate(const DatasetSplit &ds_in, const mlp::MlpModel &model, const fs::path &out_dir,
                        const Globals &g)
    {
        DatasetSplit ds = ds_in;
        apply_overrides(ds.config, Globals{std::nullopt, g.power, g.threads});
        check_compatible(model, ds);
        fs::create_directories(out_dir);

        const int G = static_cast<int>(ds.num_classes());
        const int ks[] = {1, std::min(3, G), std::min(5, G)};
        SummaryRow row;
        row.scenario = ds.config.name;
        if (!ds.validation.empty())
            row.val_top1 = mlp::evaluate_topk(model, mlp::featurize(ds.validation, model.stats),
                                              mlp::class_ids(ds, ds.validation), std::span<const int>(ks, 1))[0];
        if (!ds.test.empty())
        {
            const auto acc = mlp::evaluate_topk(model, mlp::featurize(ds.test, model.stats),
                                                mlp::class_ids(ds, ds.test), ks);
            row.test_top1 = acc[0];
            row.test_top3 = acc[1];
            row.test_top5 = acc[2];
        }
        const BaselineRun run = run_baselines(ds.config, &model, ds.test, g.threads);
        row.relative_rate = run.relative.ratio;

        write_records_jsonl(run.records, out_dir / "records.jsonl");
        write_summary_csv({row}, out_dir / "summary.csv");
        write_boxplot_svg(run.methods, ds.config.name + " (N=" + std::to_string(ds.config.num_users) +
                                           ", M=" + std::to_string(ds.config.num_antennas) + ")",
                          out_dir / "boxplot.svg");

        nlohmann::json rep = {{"scenario", ds.config.name},
                              {"val_top1", row.val_top1},
                              {"test_top1", row.test_top1},
                              {"test_top3", row.test_top3},
                              {"test_top5", row.test_top5},
                              {"relative_rate", row.relative_rate},
                              {"relative_rate_exceeds_hc", run.relative.exceeds_reference}};
        for (const auto &m : run.methods)
            rep["methods"][method_name(m.method)] = {{"p1", m.summary.p1},         {"p25", m.summary.p25},
                                                     {"median", m.summary.median}, {"p75", m.summary.p75},
                                                     {"p99", m.summary.p99},
                                                     {"outliers", m.summary.outliers.size()}};
        std::ofstream(out_dir / "report.json") << rep.dump(2) << '\n';
        return row;
    }

    void print_comparison(const BaselineRun &run)
    {
        std::cout << std::fixed << std::setprecision(4);
        std::cout << "method      p1      p25   median      p75      p99  outliers\n";
        for (const auto &m : run.methods)
        {
            const auto &s = m.summary;
            std::cout << std::left << std::setw(6) << method_name(m.method) << std::right << std::setw(8) << s.p1
                      << std::setw(9) << s.p25 << std::setw(9) << s.median << std::setw(9) << s.p75 << std::setw(9)
                      << s.p99 << std::setw(10) << s.outliers.size() << '\n';
        }
        std::cout << "relative rate (NN / HC): " << run.relative.ratio
                  << (run.relative.exceeds_reference ? "  [NN exceeds HC]" : "") << '\n';
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Hierarchical rate splitting user clustering toolkit"};
    app.require_subcommand(1);

    Globals g;
    std::uint64_t seed_value = 0;
    double power_value = 0.0;
    auto *seed_opt = app.add_option("--seed", seed_value, "Master seed (overrides the config / training seed)");
    auto *power_opt = app.add_option("--power", power_value, "Total transmit power P (overrides the config)");
    app.add_option("--threads", g.threads, "Worker threads for sample generation and evaluation")
        ->check(CLI::PositiveNumber);
    std::string simd_name;
    app.add_option("--simd", simd_name, "Force a kernel variant (scalar, avx2, neon)");

    fs::path config_path, data_path, model_path, out_path, configs_dir;
    std::optional<fs::path> csv_path;
    int epochs = 50, batch = 128;
    bool verbose = false;

    auto *gen = app.add_subcommand("gen-dataset", "Generate, balance, augment and split a labeled dataset");
    gen->add_option("--config", config_path, "Scenario config (JSON)")->required();
    gen->add_option("--out", out_path, "Output dataset file")->required();
    gen->add_option("--csv", csv_path, "Also export (label, rate, scenario, split) as CSV");

    auto *tr = app.add_subcommand("train", "Train the classifier on a dataset");
    tr->add_option("--data", data_path, "Dataset file")->required();
    tr->add_option("--out", out_path, "Output model checkpoint")->required();
    tr->add_option("--epochs", epochs, "Training epochs")->check(CLI::NonNegativeNumber);
    tr->add_option("--batch", batch, "Batch size")->check(CLI::PositiveNumber);
    tr->add_flag("--verbose", verbose, "Print per-epoch progress");

    auto *ev = app.add_subcommand("eval", "Accuracy, relative rate and reports on the test split");
    ev->add_option("--data", data_path, "Dataset file")->required();
    ev->add_option("--model", model_path, "Model checkpoint")->required();
    ev->add_option("--out", out_path, "Report directory")->required();

    auto *cmp = app.add_subcommand("compare", "Rate statistics of HC, NN, UNI and SING on the test split");
    cmp->add_option("--data", data_path, "Dataset file")->required();
    cmp->add_option("--model", model_path, "Model checkpoint")->required();

    auto *sw = app.add_subcommand("sweep", "Generate, train and evaluate every scenario config in a directory");
    sw->add_option("--configs", configs_dir, "Directory of scenario configs (*.json)")->required();
    sw->add_option("--out", out_path, "Output directory (default: <configs>/results)");
    sw->add_option("--epochs", epochs, "Training epochs")->check(CLI::NonNegativeNumber);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::config);
    }

    if (seed_opt->count())
        g.seed = seed_value;
    if (power_opt->count())
        g.power = power_value;

    try
    {
        if (!simd_name.empty() && !simd::select(simd_name))
            throw ConfigError("Kernel variant \"" + simd_name + "\" is not available on this machine.");

        if (gen->parsed())
            generate(config_path, out_path, g, csv_path);
        else if (tr->parsed())
            train_model(load_dataset(data_path), out_path, g, epochs, batch, verbose);
        else if (ev->parsed())
        {
            const SummaryRow row = evaluate(load_dataset(data_path), mlp::load_model(model_path), out_path, g);
            std::cout << summary_csv_header << '\n'
                      << row.scenario << ',' << row.val_top1 << ',' << row.test_top1 << ',' << row.test_top3 << ','
                      << row.test_top5 << ',' << row.relative_rate << '\n';
        }
        else if (cmp->parsed())
        {
            DatasetSplit ds = load_dataset(data_path);
            apply_overrides(ds.config, Globals{std::nullopt, g.power, g.threads});
            const mlp::MlpModel model = mlp::load_model(model_path);
            check_compatible(model, ds);
            print_comparison(run_baselines(ds.config, &model, ds.test, g.threads));
        }
        else if (sw->parsed())
        {
            const fs::path out_dir = out_path.empty() ? configs_dir / "results" : out_path;
            fs::create_directories(out_dir);
            std::vector<fs::path> configs;
            for (const auto &e : fs::directory_iterator(configs_dir))
                if (e.is_regular_file() && e.path().extension() == ".json")
                    configs.push_back(e.path());
            std::sort(configs.begin(), configs.end());
            if (configs.empty())
                throw ConfigError("No *.json scenario configs in '" + configs_dir.string() + "'.");

            std::vector<SummaryRow> rows;
            for (const auto &cfg : configs)
            {
                const std::string stem = cfg.stem().string();
                const DatasetSplit ds = generate(cfg, out_dir / (stem + ".hrsdat"), g, out_dir / (stem + ".csv"));
                const auto trained = train_model(ds, out_dir / (stem + ".hrsmlp"), g, epochs, 128, false);
                rows.push_back(evaluate(ds, trained.model, out_dir / stem, g));
            }
            write_summary_csv(rows, out_dir / "summary.csv");
            std::cout << summary_csv_header << '\n';
            for (const auto &r : rows)
                std::cout << r.scenario << ',' << r.val_top1 << ',' << r.test_top1 << ',' << r.test_top3 << ','
                          << r.test_top5 << ',' << r.relative_rate << '\n';
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(exit_code(e));
    }
    return 0;
}
