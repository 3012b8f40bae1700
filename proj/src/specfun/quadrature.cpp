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

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "noma/error.hpp"
#include "noma/specfun.hpp"

namespace noma {

namespace {

constexpr double kTailLog = -41.4;  // ln(1e-18)
constexpr double kStartStep = 0.5;
constexpr int kMaxHalvings = 9;
constexpr double kLeftLimit = -750.0;
constexpr double kRightLimit = 7.5;

// Trapezoid rule in t = ln y for (1/Gamma(a)) int f(e^t) e^{a t - e^t} dt.
// `term` returns (log|f|, sign of f) at y.
template <class Term>
class LogTrapezoid {
public:
    LogTrapezoid(double shape, Term term) : shape_(shape), term_(std::move(term)) {
        lg_shape_ = log_gamma(shape);
        center_ = std::log(shape);
    }

    struct Sum {
        double value;  // signed, relative to exp(scale)
        double abs;
        double scale;
        std::size_t nodes;
    };

    Sum evaluate(double h) const {
        std::vector<std::pair<double, int>> pts;
        pts.reserve(512);
        pts.push_back(node(center_));
        march(h, +1.0, pts);
        march(h, -1.0, pts);
        double top = -std::numeric_limits<double>::infinity();
        for (const auto& p : pts) top = std::max(top, p.first);
        Sum s{0.0, 0.0, top, pts.size()};
        if (!std::isfinite(top)) {
            s.scale = 0.0;
            return s;
        }
        for (const auto& p : pts) {
            if (p.second == 0) continue;
            const double e = std::exp(p.first - top);
            s.value += p.second * e * h;
            s.abs += e * h;
        }
        return s;
    }

private:
    std::pair<double, int> node(double t) const {
        const double y = std::exp(t);
        const auto [lf, sign] = term_(y);
        if (sign == 0) return {-std::numeric_limits<double>::infinity(), 0};
        return {lf + shape_ * t - y - lg_shape_, sign};
    }

    void march(double h, double dir, std::vector<std::pair<double, int>>& pts) const {
        double top = pts.front().first;
        double last = top;
        int quiet = 0;
        for (int k = 1;; ++k) {
            const double t = center_ + dir * k * h;
            if (t < kLeftLimit || t > kRightLimit) break;
            const auto p = node(t);
            pts.push_back(p);
            const bool falling = p.first <= last;
            last = p.first;
            top = std::max(top, p.first);
            if (falling && p.first < top + kTailLog) ++quiet;
            else quiet = 0;
            if (quiet >= 3) break;
        }
    }

    double shape_;
    Term term_;
    double lg_shape_;
    double center_;
};

template <class Term>
QuadEstimate run(double shape, Term term, double rel_tol, bool log_result) {
    if (!(shape > 0.0)) throw Error(ErrorKind::invalid_argument, "Gamma shape must be > 0");
    LogTrapezoid<Term> rule(shape, std::move(term));
    auto finish = [&](const typename LogTrapezoid<Term>::Sum& s) {
        return log_result ? std::log(std::abs(s.value)) + s.scale : s.value * std::exp(s.scale);
    };
    double h = kStartStep;
    auto prev = rule.evaluate(h);
    double prev_v = finish(prev);
    std::size_t nodes = prev.nodes;
    for (int level = 0; level < kMaxHalvings; ++level) {
        h *= 0.5;
        const auto now = rule.evaluate(h);
        nodes += now.nodes;
        const double now_v = finish(now);
        // compare on the linear scale relative to the larger of the two scales
        const double scale = std::max(prev.scale, now.scale);
        const double a = prev.value * std::exp(prev.scale - scale);
        const double b = now.value * std::exp(now.scale - scale);
        const double diff = std::abs(a - b);
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * now.abs;
        if (diff <= rel_tol * std::abs(b) || diff <= floor) {
            QuadEstimate out;
            out.value = now_v;
            const double rel = std::abs(b) > 0.0 ? std::max(diff, floor) / std::abs(b) : 0.0;
            out.error = log_result ? rel : std::max(diff, floor) * std::exp(scale);
            out.nodes = nodes;
            return out;
        }
        prev = now;
        prev_v = now_v;
    }
    throw NonConvergence("Gamma-weight trapezoid rule did not converge", prev_v, finish(prev));
}

struct RuleKey {
    double shape;
    int order;
    bool operator<(const RuleKey& o) const {
        return shape != o.shape ? shape < o.shape : order < o.order;
    }
};

// Golub-Welsch: the Jacobi matrix of the generalized Laguerre polynomials
// with parameter shape - 1 has diagonal 2k + shape and off-diagonal
// sqrt(k (k + shape - 1)).
LaguerreRule build_rule(double shape, int order) {
    Eigen::VectorXd diag(order);
    Eigen::VectorXd sub(order > 1 ? order - 1 : 0);
    for (int k = 0; k < order; ++k) diag(k) = 2.0 * k + shape;
    for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(k * (k + shape - 1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::non_convergence, "Laguerre eigenvalue problem failed");
    LaguerreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        const double v = solver.eigenvectors()(0, i);
        rule.weights[i] = v * v;
    }
    return rule;
}

template <class Gain>
double laguerre_adaptive(double shape, const Gain& gain, const std::function<double(double)>& kernel,
                         int order) {
    if (order < 1) throw Error(ErrorKind::invalid_argument, "Laguerre order must be >= 1");
    auto estimate = [&](int n) {
        const auto& rule = laguerre_rule(shape, n);
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            if (rule.weights[i] > 0.0) acc += rule.weights[i] * kernel(gain(rule.nodes[i]));
        return acc;
    };
    double prev = estimate(order);
    for (int n = 2 * order; n <= kLaguerreMaxOrder; n *= 2) {
        const double now = estimate(n);
        if (std::abs(now - prev) <= 1e-9 * std::abs(now) || now == prev) return now;
        if (2 * n > kLaguerreMaxOrder) throw NonConvergence("Gauss-Laguerre order doubling", prev, now);
        prev = now;
    }
    throw NonConvergence("Gauss-Laguerre order doubling", prev, prev);
}

}  // namespace

QuadEstimate gamma_expectation(double shape, const std::function<double(double)>& f,
                               double rel_tol) {
    auto term = [&f](double y) -> std::pair<double, int> {
        const double v = f(y);
        if (v == 0.0) return {0.0, 0};
        if (!std::isfinite(v))
            throw Error(ErrorKind::invalid_argument, "integrand is not finite on (0, inf)");
        return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
    };
    return run(shape, term, rel_tol, false);
}

QuadEstimate gamma_log_expectation(double shape, const std::function<double(double)>& log_f,
                                   double rel_tol) {
    auto term = [&log_f](double y) -> std::pair<double, int> {
        const double v = log_f(y);
        if (v == -std::numeric_limits<double>::infinity()) return {0.0, 0};
        return {v, 1};
    };
    return run(shape, term, rel_tol, true);
}

const LaguerreRule& laguerre_rule(double shape, int order) {
    if (!(shape > 0.0)) throw Error(ErrorKind::invalid_argument, "Gamma shape must be > 0");
    if (order < 1 || order > kLaguerreMaxOrder)
        throw Error(ErrorKind::invalid_argument, "Laguerre order out of range");
    static std::mutex mutex;
    static std::map<RuleKey, std::unique_ptr<const LaguerreRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[RuleKey{shape, order}];
    if (!slot) slot = std::make_unique<const LaguerreRule>(build_rule(shape, order));
    return *slot;
}

double laguerre_expectation(const AlphaMuChannel& ch, const std::function<double(double)>& kernel,
                            int order) {
    auto gain = [&ch](double y) { return ch.gain_from_gamma(y); };
    return laguerre_adaptive(static_cast<double>(ch.mu()), gain, kernel, order);
}

double laguerre_expectation(const ChannelPair& pair, const std::function<double(double)>& kernel,
                            int order) {
    auto gain = [&pair](double y) { return pair.gain_from_gamma(y); };
    // A stalled branch is reported with mixture-level estimates.
    double total = 0.0, total_prev = 0.0;
    bool stalled = false;
    for (const auto& br : min_gain_branches(pair)) {
        try {
            const double v = laguerre_adaptive(static_cast<double>(br.shape), gain, kernel, order);
            total += br.weight * v;
            total_prev += br.weight * v;
        } catch (const NonConvergence& e) {
            stalled = true;
            total += br.weight * e.last_estimate();
            total_prev += br.weight * e.previous_estimate();
        }
    }
    if (stalled) throw NonConvergence("Gauss-Laguerre order doubling", total_prev, total);
    return total;
}

}  // namespace noma
