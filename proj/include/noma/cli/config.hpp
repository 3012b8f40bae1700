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

#ifndef NOMA_CLI_CONFIG_HPP
#define NOMA_CLI_CONFIG_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "noma/effrate.hpp"

namespace noma::cli {

/// Parse or validation failure; `line` is 0 for command-line overrides.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, std::string field, const std::string& message);

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

/// Raw "section.key" -> value entries, before typing.
struct RawEntry {
    std::string value;
    int line = 0;
};
using RawConfig = std::map<std::string, RawEntry>;

/// Reads the INI-like text: [section] headers, key = value lines, '#'
/// comments. Unknown sections or keys and duplicate keys are rejected.
RawConfig parse_config_text(const std::string& text);
RawConfig load_config_file(const std::string& path);

/// Applies a "section.key=value" override; overrides win over file values.
void apply_override(RawConfig& raw, const std::string& assignment);
void set_value(RawConfig& raw, const std::string& key, const std::string& value);

/// Expands "a, b, start:stop:step" into numbers; ranges include both ends.
std::vector<double> parse_number_list(const std::string& text);

enum class OutputFormat { csv, svg };
enum class LambdaUnit { bits_per_slot, service_fraction };

struct SweepConfig {
    // channel
    std::vector<int> alpha{2};
    std::vector<int> mu{1};
    double omega_s = 1.0;
    std::vector<double> omega_w{0.316227766016838};

    // system
    std::vector<double> a_s{0.24};
    std::vector<double> rho_db{0.0, 10.0, 20.0, 30.0};
    std::vector<double> theta{0.5};
    double tb = 1.0;
    Strategy strategy = Strategy::quadrature;
    double r_target = kDefaultTargetRate;

    // snc
    int n = 168;
    std::vector<double> lambda{2.0};
    LambdaUnit lambda_unit = LambdaUnit::bits_per_slot;
    double lambda_scale = 1.0;
    double s_min = 1e-6;
    double s_max = 5.0;
    int s_points = 200;
    double s_tol = 1e-6;
    int max_delay = 30;

    // sim
    std::uint64_t seed = 1;
    std::uint64_t draws = 1'000'000;
    std::uint64_t slots = 1'000'000;
    int batches = 20;
    bool simulate = true;

    // output
    std::string path = "-";
    OutputFormat format = OutputFormat::csv;
};

/// Types and validates every entry. Values are checked against the library
/// constructors for every sweep combination.
SweepConfig build_config(const RawConfig& raw);

}  // namespace noma::cli

#endif  // NOMA_CLI_CONFIG_HPP
