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

#ifndef NOMA_SIM_HPP
#define NOMA_SIM_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "noma/effrate.hpp"
#include "noma/snc.hpp"

namespace noma {

/// Monte Carlo plan. `samples` counts channel draws for rate estimates and
/// slots for the queue simulator; it is split evenly over `batches`
/// independent streams (batch b uses stream b of `seed`).
struct SimPlan {
    std::uint64_t seed = 1;
    std::uint64_t samples = 1'000'000;
    int batches = 20;
    /// Worker threads; results never depend on it.
    int jobs = 1;

    void validate() const;
};

/// -(1/nu) log2 of the sample mean of (1 + gamma)^{-exponent}; the error
/// estimate is one batch-means standard error (delta method).
RateResult mc_effective_rate(const GainLaw& law, const Sinr& sinr, double exponent, double nu,
                             const SimPlan& plan);
RateResult mc_effective_rate(const NomaSystem& sys, User user, const SimPlan& plan);

/// Sample mean of log2(1 + gamma) with its batch-means standard error.
RateResult mc_ergodic_rate(const GainLaw& law, const Sinr& sinr, const SimPlan& plan);

/// Sample mean of (1 + gamma)^{-varpi}; the error is one standard error.
struct McMean {
    double value;
    double std_error;
};
McMean mc_mellin(const GainLaw& law, const Sinr& sinr, double varpi, const SimPlan& plan);

/// Empirical per-bit delay-violation probabilities Pr(delay > vartheta).
struct DelayCcdf {
    std::vector<double> probability;  // index = vartheta
    std::vector<double> ci_low;       // 99% limits
    std::vector<double> ci_high;
    std::vector<double> std_error;    // batch means over the traces
    std::uint64_t slots = 0;          // slots simulated, warm-up included
    double bits = 0.0;                // bits whose delay was measured
    /// Sample mean service per slot (bits).
    double mean_service = 0.0;
    /// lambda >= mean service; the queue drifts and the bound is infeasible.
    bool unstable = false;
};

/// Slotted fluid FIFO queue with lambda bits arriving per slot and
/// N log2(1 + gamma) bits served per slot. Each batch of the plan is an
/// independent trace; the first 10% of its slots are warm-up and only bits
/// arriving at least max_delay slots before the trace end are measured.
DelayCcdf queue_dvp(const SncConfig& cfg, User user, const SimPlan& plan, int max_delay);

/// Backlog after each slot: B_k = max(0, B_{k-1} + lambda - s_k), B_{-1} = 0.
std::vector<double> backlog_trace(const std::vector<double>& service, double arrival);

/// Fraction of the bits arriving in slot k that are still queued after slot
/// k + vartheta, i.e. whose delay exceeds vartheta.
double late_fraction(const std::vector<double>& backlog, double arrival, std::size_t k,
                     int vartheta);

}  // namespace noma

#endif  // NOMA_SIM_HPP
