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

#include "noma/effrate.hpp"

#include <math.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "noma/error.hpp"

namespace noma {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kLog2e = std::numbers::log2e;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Closed forms are only asked for high relative accuracy because the rate
// is -log2(M) / nu and M is close to 1 at small nu.
ContourConfig closed_form_config() {
    ContourConfig cfg;
    cfg.tolerance = 1e-13;
    return cfg;
}

// The double contour sums O(N^2) terms, so its rounding floor sits higher.
ContourConfig fox_config() {
    ContourConfig cfg;
    cfg.tolerance = 1e-10;
    return cfg;
}

std::vector<double> delta_set(int k, double y) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) out.push_back((y + j) / k);
    return out;
}

void append(std::vector<double>& dst, const std::vector<double>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

// Turns specfun failures of a closed form into strategy-failure.
template <class F>
auto closed_form_guard(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::contour_failure || e.kind() == ErrorKind::non_convergence ||
            e.kind() == ErrorKind::pole)
            throw Error(ErrorKind::strategy_failure, std::string("closed form failed: ") + e.what());
        throw;
    }
}

RateResult rate_from_mellin(const ContourEstimate& m, double nu) {
    if (!(m.value > 0.0))
        throw Error(ErrorKind::strategy_failure, "closed-form Mellin value is not positive");
    RateResult r;
    r.value = -std::log(m.value) / (nu * kLn2);
    r.error_estimate = m.error / (m.value * nu * kLn2);
    r.strategy = Strategy::closed_form;
    return r;
}

// (1 / (sqrt 2 ln 2 (2 pi)^{alpha - 1/2})) G[(mu / (2 W))^2 / x^alpha] / x^{alpha (mu + y) / 2},
// times exp(log_extra); the Meijer-G building block of the ergodic closed forms.
ContourEstimate ergodic_block(int alpha, int mu, int y, double w, double x, double log_extra) {
    const double h = 0.5 * alpha * (mu + y);
    const auto psi = delta_set(alpha, -h);
    const auto phi = delta_set(alpha, 1.0 - h);
    MeijerGSpec spec;
    spec.a = psi;
    append(spec.a, phi);
    spec.b = delta_set(2, 0.0);
    append(spec.b, psi);
    append(spec.b, psi);
    spec.m = 2 + 2 * alpha;
    spec.n = alpha;
    const double z = std::exp(2.0 * std::log(mu / (2.0 * w)) - alpha * std::log(x));
    const double log_factor = log_extra - 0.5 * std::log(2.0) - std::log(kLn2) -
                              (alpha - 0.5) * std::log(kTwoPi) - h * std::log(x);
    return meijer_g(spec, z, closed_form_config(), log_factor);
}

double digamma_int(int n) {
    double acc = -std::numbers::egamma;
    for (int k = 1; k < n; ++k) acc += 1.0 / k;
    return acc;
}

// E[ln g] for one alpha-mu link.
double mean_log_gain(const AlphaMuChannel& ch) {
    return (2.0 / ch.alpha()) * (digamma_int(ch.mu()) - std::log(double(ch.mu()))) +
           2.0 * std::log(ch.omega());
}

QuadEstimate mix_log(const std::vector<GammaBranch>& branches,
                     const std::function<QuadEstimate(int)>& per_shape) {
    double top = -std::numeric_limits<double>::infinity();
    std::vector<QuadEstimate> parts;
    for (const auto& b : branches) {
        parts.push_back(per_shape(b.shape));
        top = std::max(top, std::log(b.weight) + parts.back().value);
    }
    double acc = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const double w = std::exp(std::log(branches[i].weight) + parts[i].value - top);
        acc += w;
        err += w * parts[i].error;
    }
    QuadEstimate out;
    out.value = top + std::log(acc);
    out.error = err / acc;
    for (const auto& p : parts) out.nodes += p.nodes;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

DelayQos::DelayQos(double theta, double block_time_bandwidth)
    : theta_(theta), tb_(block_time_bandwidth), nu_(theta * block_time_bandwidth / kLn2) {
    if (!(theta >= 0.0) || !std::isfinite(theta))
        throw Error(ErrorKind::invalid_argument, "theta must be finite and >= 0");
    if (!(block_time_bandwidth > 0.0) || !std::isfinite(block_time_bandwidth))
        throw Error(ErrorKind::invalid_argument, "TB must be positive and finite");
}

NomaSystem::NomaSystem(ChannelPair pair, double a_s, double rho, DelayQos qos)
    : pair_(pair), a_s_(a_s), rho_(rho), qos_(qos) {
    if (!(a_s > 0.0) || !(a_s < 0.5))
        throw Error(ErrorKind::invalid_argument, "a_s must lie in (0, 1/2) so that a_s < a_w");
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw Error(ErrorKind::invalid_argument, "rho must be finite and >= 0");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string_view to_string(User user) noexcept {
    return user == User::strong ? "strong" : "weak";
}

std::string_view to_string(Strategy strategy) noexcept {
    switch (strategy) {
        case Strategy::closed_form: return "closed-form";
        case Strategy::quadrature: return "quadrature";
        case Strategy::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

double Sinr::log1p_gamma(double g) const {
    if (interference == 0.0) return std::log1p(signal * g);
    return std::log1p(signal * g / (interference * g + 1.0));
}

// ---------------------------------------------------------------------------

QuadEstimate AlphaMuLaw::expect(const std::function<double(double)>& f) const {
    return gamma_expectation(ch_.mu(), [&](double y) { return f(ch_.gain_from_gamma(y)); });
}

QuadEstimate AlphaMuLaw::log_expect(const std::function<double(double)>& log_f) const {
    return gamma_log_expectation(ch_.mu(),
                                 [&](double y) { return log_f(ch_.gain_from_gamma(y)); });
}

MinGainLaw::MinGainLaw(ChannelPair pair) : pair_(pair), branches_(min_gain_branches(pair)) {}

QuadEstimate MinGainLaw::expect(const std::function<double(double)>& f) const {
    QuadEstimate out;
    for (const auto& b : branches_) {
        const auto e =
            gamma_expectation(b.shape, [&](double y) { return f(pair_.gain_from_gamma(y)); });
        out.value += b.weight * e.value;
        out.error += b.weight * e.error;
        out.nodes += e.nodes;
    }
    return out;
}

QuadEstimate MinGainLaw::log_expect(const std::function<double(double)>& log_f) const {
    return mix_log(branches_, [&](int shape) {
        return gamma_log_expectation(shape,
                                     [&](double y) { return log_f(pair_.gain_from_gamma(y)); });
    });
}

QuadEstimate PointMassLaw::expect(const std::function<double(double)>& f) const {
    return {f(value_), 0.0, 1};
}

QuadEstimate PointMassLaw::log_expect(const std::function<double(double)>& log_f) const {
    return {log_f(value_), 0.0, 1};
}

std::unique_ptr<GainLaw> noma_law(const NomaSystem& sys, User user) {
    if (user == User::strong) return std::make_unique<AlphaMuLaw>(sys.pair().strong());
    return std::make_unique<MinGainLaw>(sys.pair());
}

Sinr noma_sinr(const NomaSystem& sys, User user) {
    if (user == User::strong) return {sys.a_s() * sys.rho(), 0.0};
    return {sys.a_w() * sys.rho(), sys.a_s() * sys.rho()};
}

RateResult effective_rate(const GainLaw& law, const Sinr& sinr, double exponent, double nu) {
    if (!(nu > 0.0) || !(exponent > 0.0))
        throw Error(ErrorKind::invalid_argument, "effective rate needs nu > 0");
    RateResult r;
    r.strategy = Strategy::quadrature;
    const auto lm = law.log_expect([&](double g) { return -exponent * sinr.log1p_gamma(g); });
    if (lm.value > -0.5) {
        // M close to 1: E[expm1(.)] keeps the digits that 1 - M would lose.
        const auto e = law.expect([&](double g) { return std::expm1(-exponent * sinr.log1p_gamma(g)); });
        r.value = -std::log1p(e.value) / (nu * kLn2);
        r.error_estimate = e.error / ((1.0 + e.value) * nu * kLn2);
    } else {
        r.value = -lm.value / (nu * kLn2);
        r.error_estimate = lm.error / (nu * kLn2);
    }
    return r;
}

RateResult ergodic_rate(const GainLaw& law, const Sinr& sinr) {
    const auto e = law.expect([&](double g) { return sinr.log1p_gamma(g); });
    return {e.value / kLn2, Strategy::quadrature, e.error / kLn2};
}

// ---------------------------------------------------------------------------

ContourEstimate mellin_alpha_mu_closed(const AlphaMuChannel& ch, double c, double varpi) {
    if (!(varpi > 0.0)) throw Error(ErrorKind::invalid_argument, "varpi must be > 0");
    if (!(c > 0.0)) throw Error(ErrorKind::invalid_argument, "SNR scale must be > 0");
    const int alpha = ch.alpha();
    const int mu = ch.mu();
    const double half = 0.5 * alpha * mu;
    MeijerGSpec spec;
    spec.a = delta_set(alpha, 1.0 - half);
    spec.b = delta_set(2, 0.0);
    append(spec.b, delta_set(alpha, varpi - half));
    spec.m = 2 + alpha;
    spec.n = alpha;
    const double log_w = std::log(ch.omega_pow_alpha());
    const double z = std::exp(2.0 * std::log(double(mu)) - std::log(4.0) - alpha * std::log(c) -
                              2.0 * log_w);
    const double log_factor = varpi * std::log(double(alpha)) + mu * std::log(double(mu)) -
                              0.5 * std::log(2.0) - (alpha - 0.5) * std::log(kTwoPi) - mu * log_w -
                              log_gamma(mu) - log_gamma(varpi) - half * std::log(c);
    return meijer_g(spec, z, closed_form_config(), log_factor);
}

ContourEstimate mellin_weak_closed(const ChannelPair& pair, double a_s, double rho, double varpi) {
    if (!(varpi > 0.0)) throw Error(ErrorKind::invalid_argument, "varpi must be > 0");
    if (!(rho > 0.0)) throw Error(ErrorKind::invalid_argument, "rho must be > 0");
    const int alpha = pair.alpha();
    const int mu = pair.mu();
    const double wt = pair.omega_tilde();
    const double ws = pair.strong().omega_pow_alpha();
    const double ww = pair.weak().omega_pow_alpha();
    const double z1 = rho * std::pow(wt / mu, 2.0 / alpha);
    const double z2 = a_s * z1;
    int sign = 1;
    double lg_neg = ::lgamma_r(-varpi, &sign);
    const double log_den = log_gamma(mu) + log_gamma(varpi) + lg_neg;
    ContourEstimate out;
    for (int k = 0; k < mu; ++k) {
        const double coef = std::exp((mu + k) * std::log(wt) - log_gamma(k + 1.0)) *
                            (std::exp(-k * std::log(ww) - mu * std::log(ws)) +
                             std::exp(-k * std::log(ws) - mu * std::log(ww)));
        const auto h = fox_h2(FoxH2Spec::weak_user(varpi, k, alpha, mu), z1, z2, fox_config(), std::log(coef) - log_den);
        out.value += sign * h.value;
        out.error += h.error;
        out.evaluations += h.evaluations;
        out.offsets = h.offsets;
    }
    return out;
}

// ---------------------------------------------------------------------------

RateResult ergodic_rate(const NomaSystem& sys, User user, Strategy strategy) {
    if (strategy == Strategy::quadrature) return ergodic_rate(*noma_law(sys, user), noma_sinr(sys, user));
    if (strategy == Strategy::monte_carlo)
        throw Error(ErrorKind::strategy_failure,
                    "Monte Carlo rates are produced by the simulation layer");
    if (sys.rho() == 0.0) return {0.0, Strategy::closed_form, 0.0};
    return closed_form_guard([&] {
        const auto& pair = sys.pair();
        const int alpha = pair.alpha();
        const int mu = pair.mu();
        RateResult r;
        r.strategy = Strategy::closed_form;
        if (user == User::strong) {
            const double w = pair.strong().omega_pow_alpha();
            const double log_extra = mu * std::log(double(mu)) - log_gamma(mu) - mu * std::log(w);
            const auto c = ergodic_block(alpha, mu, 0, w, sys.a_s() * sys.rho(), log_extra);
            r.value = c.value;
            r.error_estimate = c.error;
            return r;
        }
        const double wt = pair.omega_tilde();
        const double ws = pair.strong().omega_pow_alpha();
        const double ww = pair.weak().omega_pow_alpha();
        for (int k = 0; k < mu; ++k) {
            const double coef = std::exp(-k * std::log(ww) - mu * std::log(ws)) +
                                std::exp(-k * std::log(ws) - mu * std::log(ww));
            const double log_extra = (mu + k) * std::log(double(mu)) - log_gamma(mu) -
                                     log_gamma(k + 1.0) + std::log(coef);
            const auto hi = ergodic_block(alpha, mu, k, wt, sys.rho(), log_extra);
            const auto lo = ergodic_block(alpha, mu, k, wt, sys.a_s() * sys.rho(), log_extra);
            r.value += hi.value - lo.value;
            r.error_estimate += hi.error + lo.error;
        }
        return r;
    });
}

RateResult ergodic_rate_oma(const NomaSystem& sys, User user, Strategy strategy) {
    const auto& ch = user == User::strong ? sys.pair().strong() : sys.pair().weak();
    if (strategy == Strategy::quadrature) {
        auto r = ergodic_rate(AlphaMuLaw(ch), Sinr{sys.rho(), 0.0});
        r.value *= 0.5;
        r.error_estimate *= 0.5;
        return r;
    }
    if (strategy == Strategy::monte_carlo)
        throw Error(ErrorKind::strategy_failure,
                    "Monte Carlo rates are produced by the simulation layer");
    if (sys.rho() == 0.0) return {0.0, Strategy::closed_form, 0.0};
    return closed_form_guard([&] {
        const int mu = ch.mu();
        const double w = ch.omega_pow_alpha();
        const double log_extra = mu * std::log(double(mu)) - log_gamma(mu) - mu * std::log(w);
        const auto c = ergodic_block(ch.alpha(), mu, 0, w, sys.rho(), log_extra);
        return RateResult{0.5 * c.value, Strategy::closed_form, 0.5 * c.error};
    });
}

RateResult er_noma(const NomaSystem& sys, User user, Strategy strategy) {
    if (strategy == Strategy::monte_carlo)
        throw Error(ErrorKind::strategy_failure,
                    "Monte Carlo effective rates are produced by the simulation layer");
    const double nu = sys.nu();
    if (nu == 0.0) return ergodic_rate(sys, user, strategy);
    if (sys.rho() == 0.0) return {0.0, strategy, 0.0};
    if (strategy == Strategy::quadrature)
        return effective_rate(*noma_law(sys, user), noma_sinr(sys, user), nu, nu);
    return closed_form_guard([&] {
        if (user == User::strong)
            return rate_from_mellin(
                mellin_alpha_mu_closed(sys.pair().strong(), sys.a_s() * sys.rho(), nu), nu);
        return rate_from_mellin(mellin_weak_closed(sys.pair(), sys.a_s(), sys.rho(), nu), nu);
    });
}

RateResult er_oma(const NomaSystem& sys, User user, Strategy strategy) {
    if (strategy == Strategy::monte_carlo)
        throw Error(ErrorKind::strategy_failure,
                    "Monte Carlo effective rates are produced by the simulation layer");
    const double nu = sys.nu();
    if (nu == 0.0) return ergodic_rate_oma(sys, user, strategy);
    if (sys.rho() == 0.0) return {0.0, strategy, 0.0};
    const auto& ch = user == User::strong ? sys.pair().strong() : sys.pair().weak();
    if (strategy == Strategy::quadrature)
        return effective_rate(AlphaMuLaw(ch), Sinr{sys.rho(), 0.0}, 0.5 * nu, nu);
    return closed_form_guard(
        [&] { return rate_from_mellin(mellin_alpha_mu_closed(ch, sys.rho(), 0.5 * nu), nu); });
}

RateResult er_high_snr(const NomaSystem& sys, User user) {
    RateResult r;
    r.strategy = Strategy::closed_form;
    if (user == User::weak) {
        r.value = std::log2(1.0 + sys.a_w() / sys.a_s());
        return r;
    }
    const auto& ch = sys.pair().strong();
    const double nu = sys.nu();
    const int alpha = ch.alpha();
    const int mu = ch.mu();
    if (!(alpha * mu > 2.0 * nu))
        throw Error(ErrorKind::validity_violation,
                    "high-SNR strong-user approximation needs alpha mu > 2 nu");
    if (!(sys.rho() > 0.0)) throw Error(ErrorKind::invalid_argument, "high-SNR form needs rho > 0");
    const double base = std::log2(sys.a_s() * sys.rho());
    if (nu == 0.0) {
        r.value = base + mean_log_gain(ch) * kLog2e;
        return r;
    }
    // (mu^{1/alpha} / Omega)^{2 nu} Gamma(mu - 2 nu / alpha) / Gamma(mu)
    const double log_term = 2.0 * nu * (std::log(double(mu)) / alpha - std::log(ch.omega())) +
                            log_gamma(mu - 2.0 * nu / alpha) - log_gamma(mu);
    r.value = base - log_term / (nu * kLn2);
    return r;
}

RateDerivatives er_derivatives(const NomaSystem& sys, User user) {
    const double nu = sys.nu();
    if (user == User::strong) {
        const auto& ch = sys.pair().strong();
        const double m1 = gain_moment(ch, 1);
        const double m2 = gain_moment(ch, 2);
        const double a = sys.a_s();
        return {kLog2e * a * m1, kLog2e * a * a * (nu * m1 * m1 - (nu + 1.0) * m2)};
    }
    const double m1 = min_gain_moment(sys.pair(), 1);
    const double m2 = min_gain_moment(sys.pair(), 2);
    const double aw = sys.a_w();
    const double as = sys.a_s();
    return {kLog2e * aw * m1, kLog2e * aw * (nu * aw * m1 * m1 - ((nu + 1.0) * aw + 2.0 * as) * m2)};
}

RateResult er_low_snr(const NomaSystem& sys, User user) {
    const auto d = er_derivatives(sys, user);
    const double rho = sys.rho();
    return {rho * d.first + 0.5 * rho * rho * d.second, Strategy::closed_form, 0.0};
}

double min_energy_per_bit(const NomaSystem& sys, User user) {
    const auto d = er_derivatives(sys, user);
    if (!(d.first > 0.0))
        throw Error(ErrorKind::degenerate, "first rate derivative at rho = 0 is not positive");
    return 1.0 / d.first;
}

double wideband_slope(const NomaSystem& sys, User user) {
    const auto d = er_derivatives(sys, user);
    if (!(d.first > 0.0))
        throw Error(ErrorKind::degenerate, "first rate derivative at rho = 0 is not positive");
    if (!(d.second < 0.0))
        throw Error(ErrorKind::degenerate, "second rate derivative at rho = 0 is not negative");
    return -2.0 * d.first * d.first * kLn2 / d.second;
}

double sum_er_noma(const NomaSystem& sys, Strategy strategy) {
    return er_noma(sys, User::strong, strategy).value + er_noma(sys, User::weak, strategy).value;
}

double sum_er_oma(const NomaSystem& sys, Strategy strategy) {
    return er_oma(sys, User::strong, strategy).value + er_oma(sys, User::weak, strategy).value;
}

double rate_loss(const NomaSystem& sys) {
    const double ergodic =
        ergodic_rate(sys, User::strong).value + ergodic_rate(sys, User::weak).value;
    return ergodic - sum_er_noma(sys);
}

double noma_oma_gap(const NomaSystem& sys) { return sum_er_noma(sys) - sum_er_oma(sys); }

PowerSearchResult power_search(const NomaSystem& sys, const std::vector<double>& grid,
                               double r_target) {
    if (grid.empty()) throw Error(ErrorKind::empty_grid, "power-search grid is empty");
    const double upper = std::exp2(-r_target);
    for (double a : grid)
        if (!(a > 0.0) || !(a < upper))
            throw Error(ErrorKind::invalid_argument,
                        "power-search grid value outside (0, 2^-r_target)");
    PowerSearchResult best{0.0, -std::numeric_limits<double>::infinity()};
    for (double a : grid) {
        const double v = sum_er_noma(sys.with_a_s(a));
        if (v > best.best_sum_er || (v == best.best_sum_er && a < best.best_a_s)) best = {a, v};
    }
    return best;
}

}  // namespace noma
