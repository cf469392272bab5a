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

#include <filesystem>
#include <string>
#include <vector>

#include "hrs/evaluation.hpp"

namespace hrs
{
    // One row of the accuracy/rate summary table.
    struct SummaryRow
    {
        std::string scenario;
        double val_top1 = 0.0;
        double test_top1 = 0.0;
        double test_top3 = 0.0;
        double test_top5 = 0.0;
        double relative_rate = 0.0;
    };

    inline constexpr const char *summary_csv_header = "scenario,val_top1,test_top1,test_top3,test_top5,relative_rate";

    // JSON lines: {"sample", "method", "partition", R_oc, R_ic, R_p, R_total, alpha, beta, feasible}
    void write_records_jsonl(const std::vector<RateRecord> &records, const std::filesystem::path &path);
    std::vector<RateRecord> read_records_jsonl(const std::filesystem::path &path);

    void write_summary_csv(const std::vector<SummaryRow> &rows, const std::filesystem::path &path);

    // Box per method in HC, NN, UNI, SING order: whiskers at p1/p99, box p25..p75, median line, outliers.
    std::string boxplot_svg(const std::vector<MethodResult> &results, const std::string &title);
    void write_boxplot_svg(const std::vector<MethodResult> &results, const std::string &title,
                           const std::filesystem::path &path);
}
