// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The noma-effrate Authors
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

#ifndef NOMA_CLI_TABLE_HPP
#define NOMA_CLI_TABLE_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace noma::cli {

/// Rows of already-formatted cells; formatting happens once so the bytes
/// written never depend on how the rows were computed.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

/// 9 significant digits, shortest of fixed/scientific ("%.9g").
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

void write_csv(std::ostream& out, const Table& table);

struct ChartSpec {
    std::string title;
    std::string x_column;
    std::vector<std::string> y_columns;
    /// Columns whose distinct values split a y column into several lines.
    std::vector<std::string> group_columns;
    bool log_y = false;
};

/// Static line chart with one polyline per y column and group. Empty cells
/// are skipped.
void write_svg(std::ostream& out, const Table& table, const ChartSpec& spec);

}  // namespace noma::cli

#endif  // NOMA_CLI_TABLE_HPP
