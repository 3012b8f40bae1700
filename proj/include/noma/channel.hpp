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

#ifndef NOMA_CHANNEL_HPP
#define NOMA_CHANNEL_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace noma {

/// Random stream used by every sampler in the library (MT19937-64).
///
/// Streams are derived from a (seed, stream index) pair through
/// std::seed_seq, so parallel work gets one stream per index and the
/// results only depend on the pair, never on thread scheduling.
using Rng = std::mt19937_64;

Rng make_stream(std::uint64_t seed, std::uint64_t stream_index);

/// Real log-gamma for positive arguments (reentrant, no signgam side effect).
double log_gamma(double x);

/// One alpha-mu fading link.
///
/// The channel gain g = |h|^2 has density
///   f(x) = alpha mu^mu x^{alpha mu / 2 - 1} / (2 Omega^{alpha mu} Gamma(mu))
///          * exp(-mu x^{alpha/2} / Omega^alpha),
/// i.e. y = mu g^{alpha/2} / Omega^alpha is a unit-scale Gamma(mu) variate.
/// Omega is the alpha-root-mean of the gain: E[g^{alpha/2}] = Omega^alpha.
class AlphaMuChannel {
public:
    AlphaMuChannel(int alpha, int mu, double omega);

    /// Accepts real-valued parameters (e.g. from a config file) and rejects
    /// anything that is not a positive integer for alpha and mu.
    static AlphaMuChannel from_real(double alpha, double mu, double omega);

    int alpha() const noexcept { return alpha_; }
    int mu() const noexcept { return mu_; }
    double omega() const noexcept { return omega_; }
    /// Omega^alpha, the scale that appears in every density expression.
    double omega_pow_alpha() const noexcept { return omega_alpha_; }

    /// Maps a unit Gamma(mu) variate y to the gain (Omega^alpha y / mu)^{2/alpha}.
    double gain_from_gamma(double y) const;

private:
    int alpha_;
    int mu_;
    double omega_;
    double omega_alpha_;
};

/// The strong/weak link pair of the two-user downlink. Both links share
/// alpha and mu; the weak link has the smaller Omega^alpha.
class ChannelPair {
public:
    ChannelPair(const AlphaMuChannel& strong, const AlphaMuChannel& weak);

    /// Test-only relaxation that also admits weak.omega == strong.omega.
    static ChannelPair relaxed(const AlphaMuChannel& strong, const AlphaMuChannel& weak);

    const AlphaMuChannel& strong() const noexcept { return strong_; }
    const AlphaMuChannel& weak() const noexcept { return weak_; }
    int alpha() const noexcept { return strong_.alpha(); }
    int mu() const noexcept { return strong_.mu(); }

    /// 1 / (Omega_s^-alpha + Omega_w^-alpha).
    double omega_tilde() const noexcept { return omega_tilde_; }

    /// Maps a unit Gamma variate y to (omega_tilde y / mu)^{2/alpha}; every
    /// branch of the minimum-gain density is a Gamma law in this variable.
    double gain_from_gamma(double y) const;

private:
    ChannelPair(const AlphaMuChannel& strong, const AlphaMuChannel& weak, bool strict);

    AlphaMuChannel strong_;
    AlphaMuChannel weak_;
    double omega_tilde_;
};

/// One branch of the minimum-gain density written as a Gamma mixture:
/// f_min(x) dx = sum_b weight_b * Gamma(shape_b) density in y = mu x^{alpha/2} / omega_tilde.
struct GammaBranch {
    double weight;
    int shape;
};

/// The 2 mu branches of the minimum-gain density (weights sum to 1).
std::vector<GammaBranch> min_gain_branches(const ChannelPair& pair);

double gain_pdf(const AlphaMuChannel& ch, double x);
double gain_cdf(const AlphaMuChannel& ch, double x);
/// Survival function 1 - F(x), computed without cancellation.
double gain_sf(const AlphaMuChannel& ch, double x);
/// E[g^k] = Omega^{2k} Gamma(mu + 2k/alpha) / (mu^{2k/alpha} Gamma(mu)).
double gain_moment(const AlphaMuChannel& ch, int k);

double min_gain_pdf(const ChannelPair& pair, double x);
double min_gain_cdf(const ChannelPair& pair, double x);
/// Closed-form double sum for E[g_min^k]; only k = 1, 2 are supported.
double min_gain_moment(const ChannelPair& pair, int k);

double sample_gain(const AlphaMuChannel& ch, Rng& rng);
double sample_min_gain(const ChannelPair& pair, Rng& rng);

}  // namespace noma

#endif  // NOMA_CHANNEL_HPP
