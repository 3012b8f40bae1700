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

#ifndef NOMA_EFFRATE_HPP
#define NOMA_EFFRATE_HPP

#include <functional>
#include <memory>
#include <string_view>
#include <utility>
#include <vector>

#include "noma/channel.hpp"
#include "noma/specfun.hpp"

namespace noma {

/// Delay QoS exponent theta (1/bits) and the block time-bandwidth product TB.
class DelayQos {
public:
    explicit DelayQos(double theta, double block_time_bandwidth = 1.0);

    double theta() const noexcept { return theta_; }
    double block_time_bandwidth() const noexcept { return tb_; }
    /// nu = theta TB / ln 2.
    double nu() const noexcept { return nu_; }

private:
    double theta_;
    double tb_;
    double nu_;
};

/// Two-user downlink: channel pair, strong-user power share a_s (the weak
/// user gets a_w = 1 - a_s > a_s), linear transmit SNR rho and delay QoS.
class NomaSystem {
public:
    NomaSystem(ChannelPair pair, double a_s, double rho, DelayQos qos);

    const ChannelPair& pair() const noexcept { return pair_; }
    double a_s() const noexcept { return a_s_; }
    double a_w() const noexcept { return 1.0 - a_s_; }
    double rho() const noexcept { return rho_; }
    const DelayQos& qos() const noexcept { return qos_; }
    double nu() const noexcept { return qos_.nu(); }

    NomaSystem with_rho(double rho) const { return {pair_, a_s_, rho, qos_}; }
    NomaSystem with_a_s(double a_s) const { return {pair_, a_s, rho_, qos_}; }
    NomaSystem with_qos(DelayQos qos) const { return {pair_, a_s_, rho_, qos}; }

private:
    ChannelPair pair_;
    double a_s_;
    double rho_;
    DelayQos qos_;
};

double db_to_linear(double db);

enum class User { strong, weak };
enum class Strategy { closed_form, quadrature, monte_carlo };

std::string_view to_string(User user) noexcept;
std::string_view to_string(Strategy strategy) noexcept;

struct RateResult {
    double value = 0.0;
    Strategy strategy = Strategy::quadrature;
    double error_estimate = 0.0;
};

// ---------------------------------------------------------------------------
// Building blocks shared with the SNC and simulation layers.

/// SINR as a function of the gain: gamma = signal g / (interference g + 1).
struct Sinr {
    double signal;
    double interference = 0.0;

    double operator()(double g) const { return signal * g / (interference * g + 1.0); }
    /// ln(1 + gamma(g)) without cancellation at small gains.
    double log1p_gamma(double g) const;
};

/// Distribution of the gain that drives one user's SINR.
class GainLaw {
public:
    virtual ~GainLaw() = default;
    /// E[f(g)].
    virtual QuadEstimate expect(const std::function<double(double)>& f) const = 0;
    /// log E[exp(log_f(g))]; `error` is relative.
    virtual QuadEstimate log_expect(const std::function<double(double)>& log_f) const = 0;
    virtual double sample(Rng& rng) const = 0;
};

class AlphaMuLaw final : public GainLaw {
public:
    explicit AlphaMuLaw(AlphaMuChannel ch) : ch_(ch) {}
    QuadEstimate expect(const std::function<double(double)>& f) const override;
    QuadEstimate log_expect(const std::function<double(double)>& log_f) const override;
    double sample(Rng& rng) const override { return sample_gain(ch_, rng); }

private:
    AlphaMuChannel ch_;
};

class MinGainLaw final : public GainLaw {
public:
    explicit MinGainLaw(ChannelPair pair);
    QuadEstimate expect(const std::function<double(double)>& f) const override;
    QuadEstimate log_expect(const std::function<double(double)>& log_f) const override;
    double sample(Rng& rng) const override { return sample_min_gain(pair_, rng); }

private:
    ChannelPair pair_;
    std::vector<GammaBranch> branches_;
};

/// Degenerate law g = value; used as a variance-free stub.
class PointMassLaw final : public GainLaw {
public:
    explicit PointMassLaw(double value) : value_(value) {}
    QuadEstimate expect(const std::function<double(double)>& f) const override;
    QuadEstimate log_expect(const std::function<double(double)>& log_f) const override;
    double sample(Rng&) const override { return value_; }

private:
    double value_;
};

/// Gain law and SINR map of one user in NOMA.
std::unique_ptr<GainLaw> noma_law(const NomaSystem& sys, User user);
Sinr noma_sinr(const NomaSystem& sys, User user);

/// -(1/nu) log2 E[(1 + gamma)^{-exponent}] by quadrature. `exponent` is nu
/// for NOMA and nu / 2 for OMA.
RateResult effective_rate(const GainLaw& law, const Sinr& sinr, double exponent, double nu);

/// E[log2(1 + gamma)] by quadrature.
RateResult ergodic_rate(const GainLaw& law, const Sinr& sinr);

// ---------------------------------------------------------------------------

/// Effective rate of one NOMA user. theta = 0 returns the ergodic rate.
/// Strategy::monte_carlo is served by the simulation layer (mc_effective_rate)
/// and raises strategy-failure here.
RateResult er_noma(const NomaSystem& sys, User user, Strategy strategy = Strategy::quadrature);

/// OMA baseline: each user gets half the slots at full power, so the
/// exponent is nu / 2 and gamma = rho g_i.
RateResult er_oma(const NomaSystem& sys, User user, Strategy strategy = Strategy::quadrature);

/// High-SNR approximation. For the strong user it needs alpha mu > 2 nu
/// (validity-violation otherwise); the weak user saturates at log2(1 + a_w / a_s).
RateResult er_high_snr(const NomaSystem& sys, User user);

struct RateDerivatives {
    double first;
    double second;
};

/// First and second derivative of the effective rate in rho at rho = 0.
RateDerivatives er_derivatives(const NomaSystem& sys, User user);

/// rho R' + rho^2 R'' / 2.
RateResult er_low_snr(const NomaSystem& sys, User user);

/// 1 / R'(0); degenerate if R'(0) is not positive.
double min_energy_per_bit(const NomaSystem& sys, User user);

/// -2 R'(0)^2 ln 2 / R''(0); degenerate unless R''(0) < 0.
double wideband_slope(const NomaSystem& sys, User user);

RateResult ergodic_rate(const NomaSystem& sys, User user, Strategy strategy = Strategy::quadrature);

/// Ergodic rate of the OMA user: (1/2) E[log2(1 + rho g_i)].
RateResult ergodic_rate_oma(const NomaSystem& sys, User user,
                            Strategy strategy = Strategy::quadrature);

/// Ergodic sum rate minus effective sum rate (both NOMA).
double rate_loss(const NomaSystem& sys);

/// Effective sum rate of NOMA minus that of OMA.
double noma_oma_gap(const NomaSystem& sys);

double sum_er_noma(const NomaSystem& sys, Strategy strategy = Strategy::quadrature);
double sum_er_oma(const NomaSystem& sys, Strategy strategy = Strategy::quadrature);

struct PowerSearchResult {
    double best_a_s;
    double best_sum_er;
};

inline constexpr double kDefaultTargetRate = 2.0;

/// Grid search of a_s maximizing the NOMA effective sum rate. Every grid
/// value must lie in (0, 2^{-r_target}); ties go to the smaller a_s.
PowerSearchResult power_search(const NomaSystem& sys, const std::vector<double>& grid,
                               double r_target = kDefaultTargetRate);

// ---------------------------------------------------------------------------
// Closed forms that other layers reuse.

/// E[(1 + c g)^{-varpi}] for one alpha-mu link via the Meijer-G form.
ContourEstimate mellin_alpha_mu_closed(const AlphaMuChannel& ch, double c, double varpi);

/// E[((1 + rho g_min) / (1 + a_s rho g_min))^{-varpi}] via the bivariate Fox-H form.
ContourEstimate mellin_weak_closed(const ChannelPair& pair, double a_s, double rho, double varpi);

}  // namespace noma

#endif  // NOMA_EFFRATE_HPP
