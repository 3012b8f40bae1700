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

#ifndef NOMA_SNC_HPP
#define NOMA_SNC_HPP

#include <optional>
#include <vector>

#include "noma/effrate.hpp"

namespace noma {

/// Search range for the SNC free parameter S.
struct SSearch {
    double s_min = 1e-6;
    double s_max = 5.0;
    int coarse_points = 200;
    double rel_tol = 1e-6;
};

/// Service is N log2(1 + gamma) bits per slot, arrivals are a constant
/// lambda bits per slot.
class SncConfig {
public:
    SncConfig(NomaSystem system, int symbols_per_slot, double arrival_rate, SSearch search = {});

    const NomaSystem& system() const noexcept { return system_; }
    int symbols_per_slot() const noexcept { return n_; }
    double arrival_rate() const noexcept { return lambda_; }
    const SSearch& search() const noexcept { return search_; }

    SncConfig with_arrival_rate(double lambda) const { return {system_, n_, lambda, search_}; }

    /// varpi = N S / ln 2.
    double varpi(double s) const;

private:
    NomaSystem system_;
    int n_;
    double lambda_;
    SSearch search_;
};

/// M(1 - S) = E[(1 + gamma)^{-varpi}].
struct MellinValue {
    double value = 1.0;
    double log_value = 0.0;
    double s = 0.0;
    double varpi = 0.0;
    Strategy strategy = Strategy::quadrature;
    /// Relative error estimate of `value`.
    double error = 0.0;
};

MellinValue mellin_strong(const SncConfig& cfg, double s, Strategy strategy = Strategy::quadrature);
MellinValue mellin_weak(const SncConfig& cfg, double s, Strategy strategy = Strategy::quadrature);
MellinValue mellin(const SncConfig& cfg, User user, double s,
                   Strategy strategy = Strategy::quadrature);

struct DvpBound {
    double target_delay = 0.0;
    double bound = 1.0;
    std::optional<double> minimizer_s;
    bool feasible = false;
};

/// inf over S of M^vartheta / (1 - exp(lambda S) M), with M = M(1 - S),
/// restricted to stable S (exp(lambda S) M < 1) and clamped to 1. The delay
/// is in slots; non-integer values interpolate the bound for plotting.
DvpBound dvp_bound(const SncConfig& cfg, User user, double target_delay);

/// The bound at several delays, sharing the Mellin evaluations.
std::vector<DvpBound> dvp_curve(const SncConfig& cfg, User user,
                                const std::vector<double>& target_delays);

}  // namespace noma

#endif  // NOMA_SNC_HPP
