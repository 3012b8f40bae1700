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

#ifndef NOMA_CLI_COMMANDS_HPP
#define NOMA_CLI_COMMANDS_HPP

#include <string_view>

#include "noma/cli/config.hpp"
#include "noma/cli/table.hpp"

namespace noma::cli {

// Every command evaluates its grid points on `jobs` threads and emits rows in
// grid order. Besides the documented columns, dvp, approx and power prefix a
// column for each sweep dimension that has more than one value.

/// alpha,mu,omega_w,a_s,theta,rho_db,R_s,R_w,R_sum,R_sum_oma,gap,strategy,err
Table cmd_er_sweep(const SweepConfig& cfg, int jobs = 1);

/// user,vartheta,bound,minimizer_s,feasible,empirical_p,ci_low,ci_high
Table cmd_dvp(const SweepConfig& cfg, int jobs = 1);

/// rho_db,exact_sum,high_snr_sum,low_snr_sum,ergodic_sum,rate_loss,
/// ebn0_min_s,ebn0_min_w,slope_s,slope_w
Table cmd_approx(const SweepConfig& cfg, int jobs = 1);

/// rho_db,best_a_s,best_sum_er
Table cmd_power_search(const SweepConfig& cfg, int jobs = 1);

/// Default chart for a command's table ("er", "dvp", "approx", "power").
ChartSpec chart_for(std::string_view command, const Table& table);

}  // namespace noma::cli

#endif  // NOMA_CLI_COMMANDS_HPP
