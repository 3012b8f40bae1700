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

#include "noma/snc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "noma/error.hpp"

namespace noma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MellinValue from_log(double log_value, double rel_error, double s, double varpi,
                     Strategy strategy) {
    MellinValue out;
    out.log_value = log_value;
    out.value = std::exp(log_value);
    out.s = s;
    out.varpi = varpi;
    out.strategy = strategy;
    out.error = rel_error;
    return out;
}

MellinValue evaluate(const SncConfig& cfg, User user, double s, Strategy strategy) {
    if (!(s > 0.0) || !std::isfinite(s))
        throw Error(ErrorKind::invalid_argument, "S must be positive and finite");
    const auto& sys = cfg.system();
    const double varpi = cfg.varpi(s);
    if (sys.rho() == 0.0) return from_log(0.0, 0.0, s, varpi, strategy);
    switch (strategy) {
        case Strategy::quadrature: {
            const auto law = noma_law(sys, user);
            const Sinr sinr = noma_sinr(sys, user);
            const auto e = law->log_expect([&](double g) { return -varpi * sinr.log1p_gamma(g); });
            return from_log(std::min(e.value, 0.0), e.error, s, varpi, strategy);
        }
        case Strategy::closed_form: {
            try {
                const auto m = user == User::strong
                                   ? mellin_alpha_mu_closed(sys.pair().strong(),
                                                            sys.a_s() * sys.rho(), varpi)
                                   : mellin_weak_closed(sys.pair(), sys.a_s(), sys.rho(), varpi);
                if (!(m.value > 0.0))
                    throw Error(ErrorKind::strategy_failure, "closed-form Mellin value is not positive");
                return from_log(std::log(m.value), m.error / m.value, s, varpi, strategy);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::contour_failure || e.kind() == ErrorKind::non_convergence ||
                    e.kind() == ErrorKind::pole)
                    throw Error(ErrorKind::strategy_failure,
                                std::string("closed form failed: ") + e.what());
                throw;
            }
        }
        case Strategy::monte_carlo:
            break;
    }
    throw Error(ErrorKind::strategy_failure,
                "Monte Carlo Mellin values are produced by the simulation layer");
}

// Log of the bracket at one S, or +inf where the queue is not stable.
double log_bracket(double lambda, double s, double log_m, double delay) {
    const double log_k = lambda * s + log_m;
    if (!(log_k < 0.0)) return kInf;
    return delay * log_m - std::log(-std::expm1(log_k));
}

class BoundSearch {
public:
    BoundSearch(const SncConfig& cfg, User user) : cfg_(cfg), user_(user) {
        const auto& sr = cfg.search();
        const double l0 = std::log(sr.s_min);
        const double l1 = std::log(sr.s_max);
        for (int i = 0; i < sr.coarse_points; ++i) {
            const double t = sr.coarse_points == 1 ? 0.0 : double(i) / (sr.coarse_points - 1);
            grid_.push_back(l0 + t * (l1 - l0));
            grid_log_m_.push_back(log_m(std::exp(grid_.back())));
        }
    }

    DvpBound solve(double delay) {
        if (!(delay >= 0.0) || !std::isfinite(delay))
            throw Error(ErrorKind::invalid_argument, "target delay must be finite and >= 0");
        const double lambda = cfg_.arrival_rate();
        std::size_t best = grid_.size();
        double best_v = kInf;
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double v = log_bracket(lambda, std::exp(grid_[i]), grid_log_m_[i], delay);
            if (v < best_v) {
                best_v = v;
                best = i;
            }
        }
        DvpBound out;
        out.target_delay = delay;
        if (best == grid_.size()) return out;  // no stable S

        // golden section in log S on the neighbouring grid cell pair
        double lo = grid_[best == 0 ? 0 : best - 1];
        double hi = grid_[std::min(best + 1, grid_.size() - 1)];
        auto f = [&](double ls) {
            const double s = std::exp(ls);
            return log_bracket(lambda, s, log_m(s), delay);
        };
        const double r = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - r * (hi - lo);
        double x2 = lo + r * (hi - lo);
        double f1 = f(x1);
        double f2 = f(x2);
        const double tol = std::log1p(cfg_.search().rel_tol);
        while (hi - lo > tol) {
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - r * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + r * (hi - lo);
                f2 = f(x2);
            }
        }
        double arg = grid_[best];
        double val = best_v;
        for (const auto& [x, v] : {std::pair{x1, f1}, std::pair{x2, f2}})
            if (v < val) {
                val = v;
                arg = x;
            }
        out.feasible = true;
        out.minimizer_s = std::exp(arg);
        out.bound = std::min(1.0, std::exp(val));
        return out;
    }

private:
    double log_m(double s) {
        auto it = cache_.find(s);
        if (it != cache_.end()) return it->second;
        const double v = evaluate(cfg_, user_, s, Strategy::quadrature).log_value;
        cache_.emplace(s, v);
        return v;
    }

    const SncConfig& cfg_;
    User user_;
    std::vector<double> grid_;
    std::vector<double> grid_log_m_;
    std::map<double, double> cache_;
};

}  // namespace

SncConfig::SncConfig(NomaSystem system, int symbols_per_slot, double arrival_rate, SSearch search)
    : system_(std::move(system)), n_(symbols_per_slot), lambda_(arrival_rate), search_(search) {
    if (symbols_per_slot < 1)
        throw Error(ErrorKind::invalid_argument, "symbols per slot must be >= 1");
    if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate))
        throw Error(ErrorKind::invalid_argument, "arrival rate must be positive and finite");
    if (!(search.s_min > 0.0) || !std::isfinite(search.s_max) || !(search.s_max > search.s_min))
        throw Error(ErrorKind::invalid_argument, "S search needs 0 < s_min < s_max < inf");
    if (search.coarse_points < 2)
        throw Error(ErrorKind::invalid_argument, "S search needs at least two coarse points");
    if (!(search.rel_tol > 0.0))
        throw Error(ErrorKind::invalid_argument, "S search tolerance must be > 0");
}

double SncConfig::varpi(double s) const { return n_ * s / std::numbers::ln2; }

MellinValue mellin_strong(const SncConfig& cfg, double s, Strategy strategy) {
    return evaluate(cfg, User::strong, s, strategy);
}

MellinValue mellin_weak(const SncConfig& cfg, double s, Strategy strategy) {
    return evaluate(cfg, User::weak, s, strategy);
}

MellinValue mellin(const SncConfig& cfg, User user, double s, Strategy strategy) {
    return evaluate(cfg, user, s, strategy);
}

DvpBound dvp_bound(const SncConfig& cfg, User user, double target_delay) {
    BoundSearch search(cfg, user);
    return search.solve(target_delay);
}

std::vector<DvpBound> dvp_curve(const SncConfig& cfg, User user,
                                const std::vector<double>& target_delays) {
    BoundSearch search(cfg, user);
    std::vector<DvpBound> out;
    out.reserve(target_delays.size());
    for (double d : target_delays) out.push_back(search.solve(d));
    return out;
}

}  // namespace noma
