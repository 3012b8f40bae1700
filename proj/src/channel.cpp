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

#include "noma/channel.hpp"

#include <math.h>

#include <cmath>
#include <limits>

#include "noma/error.hpp"

namespace noma {

namespace {

// The (strong, weak) ordering is checked on Omega^alpha; equal values are
// only allowed through ChannelPair::relaxed.
constexpr double kOrderingSlack = 0.0;

double require_nonnegative(double x) {
    if (!(x >= 0.0)) throw Error(ErrorKind::invalid_argument, "gain argument must be >= 0");
    return x;
}

// Regularized lower incomplete gamma P(n, y) for a positive integer n.
double lower_regularized(int n, double y) {
    if (y <= 0.0) return 0.0;
    if (y < n + 1.0) {
        // P = e^-y y^n / n! * sum_k y^k / ((n+1)...(n+k))
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 1000; ++k) {
            term *= y / (n + k);
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return std::exp(n * std::log(y) - y - log_gamma(n + 1.0)) * sum;
    }
    double q = 0.0;
    for (int j = 0; j < n; ++j) q += std::exp(j * std::log(y) - y - log_gamma(j + 1.0));
    return 1.0 - q;
}

// Q(n, y) = 1 - P(n, y) = e^-y sum_{j<n} y^j / j!.
double upper_regularized(int n, double y) {
    if (y <= 0.0) return 1.0;
    if (y < n + 1.0) return 1.0 - lower_regularized(n, y);
    double q = 0.0;
    for (int j = 0; j < n; ++j) q += std::exp(j * std::log(y) - y - log_gamma(j + 1.0));
    return q;
}

double gamma_variable(const AlphaMuChannel& ch, double x) {
    return ch.mu() * std::pow(x, 0.5 * ch.alpha()) / ch.omega_pow_alpha();
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_index),
                      static_cast<std::uint32_t>(stream_index >> 32)};
    return Rng(seq);
}

double log_gamma(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

AlphaMuChannel::AlphaMuChannel(int alpha, int mu, double omega)
    : alpha_(alpha), mu_(mu), omega_(omega), omega_alpha_(std::pow(omega, alpha)) {
    if (alpha < 1) throw Error(ErrorKind::invalid_channel, "alpha must be a positive integer");
    if (mu < 1) throw Error(ErrorKind::invalid_channel, "mu must be a positive integer");
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw Error(ErrorKind::invalid_channel, "omega must be positive and finite");
}

AlphaMuChannel AlphaMuChannel::from_real(double alpha, double mu, double omega) {
    auto positive_integer = [](double v) {
        return std::isfinite(v) && v >= 1.0 && v == std::floor(v) && v < 1e6;
    };
    if (!positive_integer(alpha))
        throw Error(ErrorKind::invalid_channel, "alpha must be a positive integer");
    if (!positive_integer(mu)) throw Error(ErrorKind::invalid_channel, "mu must be a positive integer");
    return AlphaMuChannel(static_cast<int>(alpha), static_cast<int>(mu), omega);
}

double AlphaMuChannel::gain_from_gamma(double y) const {
    const double base = omega_alpha_ * y / mu_;
    if (alpha_ == 2) return base;
    return std::pow(base, 2.0 / alpha_);
}

ChannelPair::ChannelPair(const AlphaMuChannel& strong, const AlphaMuChannel& weak)
    : ChannelPair(strong, weak, true) {}

ChannelPair ChannelPair::relaxed(const AlphaMuChannel& strong, const AlphaMuChannel& weak) {
    return ChannelPair(strong, weak, false);
}

ChannelPair::ChannelPair(const AlphaMuChannel& strong, const AlphaMuChannel& weak, bool strict)
    : strong_(strong), weak_(weak) {
    if (strong.alpha() != weak.alpha() || strong.mu() != weak.mu())
        throw Error(ErrorKind::invalid_channel, "both links must share alpha and mu");
    const double s = strong.omega_pow_alpha();
    const double w = weak.omega_pow_alpha();
    if (strict ? !(w < s - kOrderingSlack) : !(w <= s))
        throw Error(ErrorKind::invalid_channel,
                    strict ? "weak link needs Omega_w^alpha < Omega_s^alpha"
                           : "weak link needs Omega_w^alpha <= Omega_s^alpha");
    omega_tilde_ = 1.0 / (1.0 / s + 1.0 / w);
}

double ChannelPair::gain_from_gamma(double y) const {
    const double base = omega_tilde_ * y / mu();
    if (alpha() == 2) return base;
    return std::pow(base, 2.0 / alpha());
}

std::vector<GammaBranch> min_gain_branches(const ChannelPair& pair) {
    const int mu = pair.mu();
    const double log_tilde = std::log(pair.omega_tilde());
    const double log_s = std::log(pair.strong().omega_pow_alpha());
    const double log_w = std::log(pair.weak().omega_pow_alpha());
    std::vector<GammaBranch> out;
    out.reserve(2 * static_cast<std::size_t>(mu));
    // Density of the strong link times survival of the weak link, then the mirror term.
    for (const auto& [log_dens, log_surv] : {std::pair{log_s, log_w}, std::pair{log_w, log_s}}) {
        for (int m = 0; m < mu; ++m) {
            const double log_weight = (mu + m) * log_tilde + log_gamma(mu + m) - mu * log_dens -
                                      log_gamma(mu) - log_gamma(m + 1.0) - m * log_surv;
            out.push_back({std::exp(log_weight), mu + m});
        }
    }
    return out;
}

double gain_pdf(const AlphaMuChannel& ch, double x) {
    require_nonnegative(x);
    const int alpha = ch.alpha();
    const int mu = ch.mu();
    const double power = 0.5 * alpha * mu - 1.0;
    const double log_norm = std::log(0.5 * alpha) + mu * std::log(static_cast<double>(mu)) -
                            mu * std::log(ch.omega_pow_alpha()) - log_gamma(mu);
    if (x == 0.0) {
        if (power < 0.0)
            throw Error(ErrorKind::unbounded_at_origin, "gain density is unbounded at x = 0");
        return power == 0.0 ? std::exp(log_norm) : 0.0;
    }
    return std::exp(log_norm + power * std::log(x) - gamma_variable(ch, x));
}

double gain_cdf(const AlphaMuChannel& ch, double x) {
    require_nonnegative(x);
    return lower_regularized(ch.mu(), gamma_variable(ch, x));
}

double gain_sf(const AlphaMuChannel& ch, double x) {
    require_nonnegative(x);
    return upper_regularized(ch.mu(), gamma_variable(ch, x));
}

double gain_moment(const AlphaMuChannel& ch, int k) {
    if (k < 1) throw Error(ErrorKind::unsupported_order, "moment order must be >= 1");
    const double mu = ch.mu();
    const double r = 2.0 * k / ch.alpha();
    return std::exp(2.0 * k * std::log(ch.omega()) + log_gamma(mu + r) - r * std::log(mu) -
                    log_gamma(mu));
}

double min_gain_pdf(const ChannelPair& pair, double x) {
    require_nonnegative(x);
    const int alpha = pair.alpha();
    const int mu = pair.mu();
    if (x == 0.0) {
        const double power = 0.5 * alpha * mu - 1.0;
        if (power < 0.0)
            throw Error(ErrorKind::unbounded_at_origin, "minimum-gain density is unbounded at x = 0");
        if (power > 0.0) return 0.0;
    }
    const double log_s = std::log(pair.strong().omega_pow_alpha());
    const double log_w = std::log(pair.weak().omega_pow_alpha());
    const double log_mu = std::log(static_cast<double>(mu));
    const double log_x = x > 0.0 ? std::log(x) : 0.0;
    const double decay = x > 0.0 ? mu * std::pow(x, 0.5 * alpha) / pair.omega_tilde() : 0.0;
    const double log_lead = std::log(0.5 * alpha) - log_gamma(mu);
    double total = 0.0;
    for (const auto& [log_dens, log_surv] : {std::pair{log_s, log_w}, std::pair{log_w, log_s}}) {
        for (int m = 0; m < mu; ++m) {
            const double power = 0.5 * alpha * (mu + m) - 1.0;
            if (x == 0.0 && power > 0.0) continue;
            total += std::exp(log_lead - mu * log_dens + (mu + m) * log_mu - log_gamma(m + 1.0) -
                              m * log_surv + power * log_x - decay);
        }
    }
    return total;
}

double min_gain_cdf(const ChannelPair& pair, double x) {
    return 1.0 - gain_sf(pair.strong(), x) * gain_sf(pair.weak(), x);
}

double min_gain_moment(const ChannelPair& pair, int k) {
    if (k != 1 && k != 2)
        throw Error(ErrorKind::unsupported_order, "minimum-gain moments exist for k = 1, 2 only");
    const int mu = pair.mu();
    const double r = 2.0 * k / pair.alpha();
    const double log_tilde = std::log(pair.omega_tilde());
    const double log_s = std::log(pair.strong().omega_pow_alpha());
    const double log_w = std::log(pair.weak().omega_pow_alpha());
    double total = 0.0;
    for (const auto& [log_dens, log_surv] : {std::pair{log_s, log_w}, std::pair{log_w, log_s}}) {
        for (int m = 0; m < mu; ++m) {
            total += std::exp((mu + m + r) * log_tilde + log_gamma(mu + m + r) - mu * log_dens -
                              log_gamma(mu) - log_gamma(m + 1.0) - r * std::log(double(mu)) -
                              m * log_surv);
        }
    }
    return total;
}

double sample_gain(const AlphaMuChannel& ch, Rng& rng) {
    std::gamma_distribution<double> gamma(static_cast<double>(ch.mu()), 1.0);
    return ch.gain_from_gamma(gamma(rng));
}

double sample_min_gain(const ChannelPair& pair, Rng& rng) {
    const double gs = sample_gain(pair.strong(), rng);
    const double gw = sample_gain(pair.weak(), rng);
    return gs < gw ? gs : gw;
}

}  // namespace noma
