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

#include "hrs/report.hpp"
#include "hrs/errors.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hrs
{
    namespace
    {
        std::ofstream open_out(const std::filesystem::path &path)
        {
            std::ofstream f(path);
            if (!f)
                throw std::runtime_error("Cannot open '" + path.string() + "' for writing.");
            return f;
        }

        Method method_from_name(const std::string &s)
        {
            for (Method m : all_methods)
                if (s == method_name(m))
                    return m;
            throw FormatError("Unknown method \"" + s + "\".");
        }
    }

    void write_records_jsonl(const std::vector<RateRecord> &records, const std::filesystem::path &path)
    {
        auto f = open_out(path);
        for (const auto &r : records)
        {
            nlohmann::json j = to_json(r.rate);
            j["sample"] = r.sample;
            j["method"] = method_name(r.method);
            j["partition"] = r.partition;
            f << j.dump() << '\n';
        }
    }

    std::vector<RateRecord> read_records_jsonl(const std::filesystem::path &path)
    {
        std::ifstream f(path);
        if (!f)
            throw FormatError("Cannot open '" + path.string() + "'.");
        std::vector<RateRecord> out;
        std::string line;
        while (std::getline(f, line))
        {
            if (line.empty())
                continue;
            try
            {
                const auto j = nlohmann::json::parse(line);
                RateRecord r;
                r.sample = j.at("sample").get<std::size_t>();
                r.method = method_from_name(j.at("method").get<std::string>());
                r.partition = j.at("partition").get<std::string>();
                r.rate.R_oc = j.at("R_oc").get<double>();
                r.rate.R_ic = j.at("R_ic").get<double>();
                r.rate.R_p = j.at("R_p").get<double>();
                r.rate.R_total = j.at("R_total").get<double>();
                r.rate.best_alpha = j.at("alpha").get<double>();
                r.rate.best_beta = j.at("beta").get<double>();
                r.rate.feasible = j.at("feasible").get<bool>();
                out.push_back(std::move(r));
            }
            catch (const nlohmann::json::exception &e)
            {
                throw FormatError(std::string("Malformed record line: ") + e.what());
            }
        }
        return out;
    }

    void write_summary_csv(const std::vector<SummaryRow> &rows, const std::filesystem::path &path)
    {
        auto f = open_out(path);
        f << summary_csv_header << '\n';
        f << std::setprecision(6) << std::fixed;
        for (const auto &r : rows)
            f << r.scenario << ',' << r.val_top1 << ',' << r.test_top1 << ',' << r.test_top3 << ',' << r.test_top5 << ','
              << r.relative_rate << '\n';
    }

    std::string boxplot_svg(const std::vector<MethodResult> &results, const std::string &title)
    {
        constexpr double width = 480, height = 320, left = 50, right = 20, top = 30, bottom = 40;
        std::vector<const MethodResult *> ordered;
        for (Method m : all_methods)
            for (const auto &r : results)
                if (r.method == m && !r.rates.empty())
                    ordered.push_back(&r);

        double lo = 0.0, hi = 1.0;
        for (const auto *r : ordered)
            for (double v : r->rates)
            {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        const double span = hi - lo > 0 ? hi - lo : 1.0;
        auto y = [&](double v) { return top + (height - top - bottom) * (1.0 - (v - lo) / span); };

        std::ostringstream svg;
        svg << std::fixed << std::setprecision(2);
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
            << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
        svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        svg << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << title
            << "</text>\n";
        svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
            << "\" stroke=\"black\"/>\n";
        for (int t = 0; t <= 4; ++t)
        {
            const double v = lo + span * t / 4.0;
            svg << "<text x=\"" << left - 6 << "\" y=\"" << y(v) + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << v
                << "</text>\n";
        }
        svg << "<text x=\"14\" y=\"" << height / 2 << "\" font-size=\"11\" transform=\"rotate(-90 14 " << height / 2
            << ")\" text-anchor=\"middle\">rate [bps/Hz]</text>\n";

        const double slot = ordered.empty() ? 0.0 : (width - left - right) / static_cast<double>(ordered.size());
        for (std::size_t i = 0; i < ordered.size(); ++i)
        {
            const auto &r = *ordered[i];
            const auto &s = r.summary;
            const double cx = left + slot * (static_cast<double>(i) + 0.5);
            const double half = std::min(30.0, slot * 0.3);
            svg << "<g class=\"box\" data-method=\"" << method_name(r.method) << "\">\n";
            svg << "  <line x1=\"" << cx << "\" y1=\"" << y(s.p99) << "\" x2=\"" << cx << "\" y2=\"" << y(s.p75)
                << "\" stroke=\"black\" stroke-dasharray=\"4 2\"/>\n";
            svg << "  <line x1=\"" << cx << "\" y1=\"" << y(s.p25) << "\" x2=\"" << cx << "\" y2=\"" << y(s.p1)
                << "\" stroke=\"black\" stroke-dasharray=\"4 2\"/>\n";
            for (double w : {s.p1, s.p99})
                svg << "  <line x1=\"" << cx - half / 2 << "\" y1=\"" << y(w) << "\" x2=\"" << cx + half / 2
                    << "\" y2=\"" << y(w) << "\" stroke=\"black\"/>\n";
            svg << "  <rect x=\"" << cx - half << "\" y=\"" << y(s.p75) << "\" width=\"" << 2 * half << "\" height=\""
                << std::max(0.0, y(s.p25) - y(s.p75)) << "\" fill=\"none\" stroke=\"blue\"/>\n";
            svg << "  <line x1=\"" << cx - half << "\" y1=\"" << y(s.median) << "\" x2=\"" << cx + half << "\" y2=\""
                << y(s.median) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
            for (double o : s.outliers)
                svg << "  <text x=\"" << cx << "\" y=\"" << y(o) + 3 << "\" text-anchor=\"middle\" font-size=\"9\" "
                    << "fill=\"red\">+</text>\n";
            svg << "  <text x=\"" << cx << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\" "
                << "font-size=\"11\">" << method_name(r.method) << "</text>\n";
            svg << "</g>\n";
        }
        svg << "</svg>\n";
        return svg.str();
    }

    void write_boxplot_svg(const std::vector<MethodResult> &results, const std::string &title,
                           const std::filesystem::path &path)
    {
        auto f = open_out(path);
        f << boxplot_svg(results, title);
    }
}
