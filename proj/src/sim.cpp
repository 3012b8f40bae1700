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

#include "noma/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "noma/error.hpp"
#include "noma/parallel.hpp"

namespace noma {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

// Two-sided 99% Student t quantiles for df = 1..30.
constexpr std::array<double, 30> kT99 = {
    63.6567, 9.9248, 5.8409, 4.6041, 4.0321, 3.7074, 3.4995, 3.3554, 3.2498, 3.1693,
    3.1058,  3.0545, 3.0123, 2.9768, 2.9467, 2.9208, 2.8982, 2.8784, 2.8609, 2.8453,
    2.8314,  2.8188, 2.8073, 2.7969, 2.7874, 2.7787, 2.7707, 2.7633, 2.7564, 2.7500};

double t99(int df) {
    if (df <= 30) return kT99[static_cast<std::size_t>(df - 1)];
    const double z = kZ99;
    return z + (z * z * z + z) / (4.0 * df);
}

// Stream offset so the two users never share random numbers.
std::uint64_t stream_base(User user) { return user == User::weak ? (std::uint64_t{1} << 32) : 0; }

std::uint64_t batch_size(const SimPlan& plan, int b) {
    const auto nb = static_cast<std::uint64_t>(plan.batches);
    return plan.samples / nb + (static_cast<std::uint64_t>(b) < plan.samples % nb ? 1 : 0);
}

struct BatchStats {
    double mean;
    double std_error;
};

// Per-batch means of kernel(gain) merged by sample count, with the standard
// error taken from the spread of the batch means.
template <class Kernel>
BatchStats batch_means(const GainLaw& law, const SimPlan& plan, std::uint64_t base, Kernel kernel) {
    plan.validate();
    std::vector<double> sums(static_cast<std::size_t>(plan.batches), 0.0);
    parallel_for(sums.size(), plan.jobs, [&](std::size_t b) {
        Rng rng = make_stream(plan.seed, base + b);
        const std::uint64_t n = batch_size(plan, static_cast<int>(b));
        double acc = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) acc += kernel(law.sample(rng));
        sums[b] = acc;
    });
    double total = 0.0;
    for (double s : sums) total += s;
    const double mean = total / static_cast<double>(plan.samples);
    double var = 0.0;
    for (std::size_t b = 0; b < sums.size(); ++b) {
        const double d = sums[b] / static_cast<double>(batch_size(plan, static_cast<int>(b))) - mean;
        var += d * d;
    }
    var /= static_cast<double>(plan.batches - 1);
    return {mean, std::sqrt(var / plan.batches)};
}

}  // namespace

void SimPlan::validate() const {
    if (batches < 10) throw Error(ErrorKind::invalid_argument, "simulation needs at least 10 batches");
    if (samples < static_cast<std::uint64_t>(batches))
        throw Error(ErrorKind::invalid_argument, "simulation needs at least one sample per batch");
    if (jobs < 1) throw Error(ErrorKind::invalid_argument, "jobs must be >= 1");
}

RateResult mc_effective_rate(const GainLaw& law, const Sinr& sinr, double exponent, double nu,
                             const SimPlan& plan) {
    if (!(nu > 0.0) || !(exponent > 0.0))
        throw Error(ErrorKind::invalid_argument, "Monte Carlo effective rate needs nu > 0");
    const auto st = batch_means(law, plan, 0, [&](double g) {
        return std::expm1(-exponent * sinr.log1p_gamma(g));
    });
    const double scale = nu * std::numbers::ln2;
    RateResult out;
    out.value = -std::log1p(st.mean) / scale;
    out.strategy = Strategy::monte_carlo;
    out.error_estimate = st.std_error / ((1.0 + st.mean) * scale);
    return out;
}

RateResult mc_effective_rate(const NomaSystem& sys, User user, const SimPlan& plan) {
    const auto law = noma_law(sys, user);
    const double nu = sys.nu();
    if (!(nu > 0.0))
        throw Error(ErrorKind::invalid_argument, "Monte Carlo effective rate needs nu > 0");
    const Sinr sinr = noma_sinr(sys, user);
    const auto st = batch_means(*law, plan, stream_base(user), [&](double g) {
        return std::expm1(-nu * sinr.log1p_gamma(g));
    });
    const double scale = nu * std::numbers::ln2;
    RateResult out;
    out.value = -std::log1p(st.mean) / scale;
    out.strategy = Strategy::monte_carlo;
    out.error_estimate = st.std_error / ((1.0 + st.mean) * scale);
    return out;
}

RateResult mc_ergodic_rate(const GainLaw& law, const Sinr& sinr, const SimPlan& plan) {
    const auto st = batch_means(law, plan, 0, [&](double g) {
        return sinr.log1p_gamma(g) / std::numbers::ln2;
    });
    return {st.mean, Strategy::monte_carlo, st.std_error};
}

McMean mc_mellin(const GainLaw& law, const Sinr& sinr, double varpi, const SimPlan& plan) {
    if (!(varpi >= 0.0)) throw Error(ErrorKind::invalid_argument, "varpi must be >= 0");
    const auto st = batch_means(law, plan, 0, [&](double g) {
        return std::exp(-varpi * sinr.log1p_gamma(g));
    });
    return {st.mean, st.std_error};
}

std::vector<double> backlog_trace(const std::vector<double>& service, double arrival) {
    std::vector<double> backlog(service.size());
    double b = 0.0;
    for (std::size_t k = 0; k < service.size(); ++k) {
        b = std::max(0.0, b + arrival - service[k]);
        backlog[k] = b;
    }
    return backlog;
}

double late_fraction(const std::vector<double>& backlog, double arrival, std::size_t k,
                     int vartheta) {
    const double left = backlog.at(k + static_cast<std::size_t>(vartheta)) - arrival * vartheta;
    return std::clamp(left / arrival, 0.0, 1.0);
}

DelayCcdf queue_dvp(const SncConfig& cfg, User user, const SimPlan& plan, int max_delay) {
    plan.validate();
    if (max_delay < 1) throw Error(ErrorKind::invalid_argument, "max delay must be >= 1");
    const auto& sys = cfg.system();
    const auto law = noma_law(sys, user);
    const Sinr sinr = noma_sinr(sys, user);
    const double lambda = cfg.arrival_rate();
    const double bits_per_nat = cfg.symbols_per_slot() / std::numbers::ln2;
    const auto delays = static_cast<std::size_t>(max_delay) + 1;

    struct Trace {
        std::vector<double> late;  // summed late fractions per vartheta
        std::uint64_t measured = 0;
        double service = 0.0;
    };
    std::vector<Trace> traces(static_cast<std::size_t>(plan.batches));
    parallel_for(traces.size(), plan.jobs, [&](std::size_t b) {
        const std::uint64_t n = batch_size(plan, static_cast<int>(b));
        const std::uint64_t warm = n / 10;
        if (n < warm + delays)
            throw Error(ErrorKind::invalid_argument, "too few slots per batch for the delay range");
        Rng rng = make_stream(plan.seed, stream_base(user) + b);
        std::vector<double> service(n);
        Trace& tr = traces[b];
        for (auto& s : service) {
            s = bits_per_nat * sinr.log1p_gamma(law->sample(rng));
            tr.service += s;
        }
        const auto backlog = backlog_trace(service, lambda);
        tr.late.assign(delays, 0.0);
        const std::uint64_t end = n - static_cast<std::uint64_t>(max_delay);
        for (std::uint64_t k = warm; k < end; ++k) {
            for (std::size_t d = 0; d < delays; ++d) {
                const double f = late_fraction(backlog, lambda, k, static_cast<int>(d));
                if (f == 0.0) break;  // nonincreasing in vartheta
                tr.late[d] += f;
            }
        }
        tr.measured = end - warm;
    });

    DelayCcdf out;
    out.slots = plan.samples;
    std::uint64_t measured = 0;
    double service = 0.0;
    for (const auto& tr : traces) {
        measured += tr.measured;
        service += tr.service;
    }
    out.bits = lambda * static_cast<double>(measured);
    out.mean_service = service / static_cast<double>(plan.samples);
    out.unstable = lambda >= out.mean_service;

    const double n = static_cast<double>(measured);
    const double tq = t99(plan.batches - 1);
    for (std::size_t d = 0; d < delays; ++d) {
        double late = 0.0;
        for (const auto& tr : traces) late += tr.late[d];
        const double p = late / n;

        // Wilson score interval on the measured slots
        const double z2 = kZ99 * kZ99;
        const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        const double half = kZ99 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);

        // batch-means t interval, which accounts for correlation inside a trace
        double var = 0.0;
        for (const auto& tr : traces) {
            const double pb = tr.late[d] / static_cast<double>(tr.measured);
            var += (pb - p) * (pb - p);
        }
        var /= static_cast<double>(plan.batches - 1);
        const double bhalf = tq * std::sqrt(var / plan.batches);

        out.probability.push_back(p);
        out.std_error.push_back(std::sqrt(var / plan.batches));
        out.ci_low.push_back(std::clamp(std::min(centre - half, p - bhalf), 0.0, 1.0));
        out.ci_high.push_back(std::clamp(std::max(centre + half, p + bhalf), 0.0, 1.0));
    }
    return out;
}

}  // namespace noma
