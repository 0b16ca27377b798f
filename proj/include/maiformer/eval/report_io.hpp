// Copyright 2026 The MAIFormer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "maiformer/eval/metrics.hpp"

namespace maiformer::eval {

nlohmann::json to_json(const MetricsReport &report);
MetricsReport metrics_report_from_json(const nlohmann::json &j);

/// Fixed-width table, one block per model: a row per horizon plus an
/// average row, MAE / RMSE / MAPE for each variate. With two or more models
/// a PI row follows.
std::string format_report(const std::vector<MetricsReport> &reports);

/// report.txt and metrics.json in `dir`.
void write_reports(const std::filesystem::path &dir, const std::vector<MetricsReport> &reports);

} // namespace maiformer::eval
