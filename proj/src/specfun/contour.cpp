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

#include <math.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "noma/error.hpp"
#include "noma/specfun.hpp"

namespace noma {

namespace {

using cd = std::complex<double>;

constexpr double kPi = std::numbers::pi;
constexpr double kTailLog = -41.4;  // ln(1e-18)
constexpr double kPoleEps = 1e-12;
constexpr int kMaxHalvings = 14;
constexpr std::size_t kMaxLineNodes = 4'000'000;

void check_config(const ContourConfig& cfg) {
    if (cfg.nodes < 64) throw Error(ErrorKind::invalid_argument, "contour node count must be >= 64");
    if (!(cfg.half_height > 0.0))
        throw Error(ErrorKind::invalid_argument, "contour truncation height must be > 0");
    if (!(cfg.tolerance > 0.0))
        throw Error(ErrorKind::invalid_argument, "contour tolerance must be > 0");
}

bool is_nonpositive_integer(double x) {
    return x <= kPoleEps && std::abs(x - std::round(x)) <= kPoleEps;
}

bool is_nonnegative_integer(double x) { return is_nonpositive_integer(-x); }

// log|Gamma(x)| and its sign for real x away from poles.
double log_abs_gamma(double x, int& sign) {
    int sg = 1;
    const double v = ::lgamma_r(x, &sg);
    sign *= sg;
    return v;
}

// ---------------------------------------------------------------------------
// Pole bookkeeping for one integration variable.
//
// A "left" family is the pole set start - k of a Gamma(... + s) factor; it
// must lie left of the contour. A "right" family start + k comes from a
// Gamma(... - s) factor and must lie right of it.

struct Family {
    double start;
    bool left;
    int factor;  // index of the Gamma factor that owns the family
};

double nearest_pole_distance(const std::vector<Family>& families, double c) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : families) {
        const double k = f.left ? std::max(0.0, std::round(f.start - c))
                                : std::max(0.0, std::round(c - f.start));
        const double p = f.left ? f.start - k : f.start + k;
        best = std::min(best, std::abs(p - c));
        // the next one over can be closer when rounding lands on the far side
        const double p2 = f.left ? f.start - (k + 1) : f.start + (k + 1);
        best = std::min(best, std::abs(p2 - c));
    }
    return best;
}

struct CrossedPole {
    double at;
    int factor;
    int k;
};

// Poles that the straight line at c leaves on the wrong side.
std::vector<CrossedPole> crossed_poles(const std::vector<Family>& families, double c) {
    std::vector<CrossedPole> out;
    for (std::size_t i = 0; i < families.size(); ++i) {
        const auto& f = families[i];
        for (int k = 0;; ++k) {
            const double p = f.left ? f.start - k : f.start + k;
            const bool wrong = f.left ? p > c : p < c;
            if (!wrong) break;
            out.push_back({p, f.factor, k});
            if (out.size() > 100000)
                throw Error(ErrorKind::contour_failure, "too many poles between contour and gap");
        }
    }
    return out;
}

int multiplicity(const std::vector<Family>& families, double p) {
    int count = 0;
    for (const auto& f : families) {
        const double k = f.left ? f.start - p : p - f.start;
        if (k > -kPoleEps && std::abs(k - std::round(k)) <= kPoleEps) ++count;
    }
    return count;
}

std::vector<double> poles_in(const std::vector<Family>& families, double lo, double hi) {
    std::vector<double> out;
    for (const auto& f : families) {
        for (int k = 0;; ++k) {
            const double p = f.left ? f.start - k : f.start + k;
            if (f.left ? p < lo : p > hi) break;
            if (p >= lo && p <= hi) out.push_back(p);
            if (k > 100000) break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double x, double y) { return std::abs(x - y) <= kPoleEps; }),
              out.end());
    return out;
}

// Golden-section minimum of phi on [lo, hi].
template <class Phi>
double golden_min(Phi phi, double lo, double hi) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo);
    double x2 = lo + r * (hi - lo);
    double f1 = phi(x1);
    double f2 = phi(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-9 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = phi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = phi(x2);
        }
    }
    return 0.5 * (lo + hi);
}

// Minimizes phi over the open interval (lo, hi), which may be unbounded on
// one side, keeping a margin from finite ends.
template <class Phi>
double saddle_offset(Phi phi, double lo, double hi) {
    const bool lo_inf = !std::isfinite(lo);
    const bool hi_inf = !std::isfinite(hi);
    if (!lo_inf && !hi_inf) {
        const double margin = std::min(0.5, 0.25 * (hi - lo));
        return golden_min(phi, lo + margin, hi - margin);
    }
    if (lo_inf && hi_inf) return golden_min(phi, -50.0, 50.0);
    const double dir = lo_inf ? -1.0 : 1.0;
    const double start = lo_inf ? hi - 0.25 : lo + 0.25;
    double x_prev = start;
    double x_cur = start;
    double f_cur = phi(start);
    double x_next = start;
    double step = 1.0;
    for (int it = 0; it < 60; ++it) {
        x_next = x_cur + dir * step;
        const double f_next = phi(x_next);
        if (!(f_next < f_cur)) break;
        x_prev = x_cur;
        x_cur = x_next;
        f_cur = f_next;
        step *= 2.0;
        if (std::abs(x_cur) > 1e5) break;
    }
    return golden_min(phi, std::min(x_prev, x_next), std::max(x_prev, x_next));
}

// ---------------------------------------------------------------------------
// Trapezoid rule on a vertical line for (1/(2 pi)) int f(c + iu) du with
// f(conj s) = conj f(s); only u >= 0 is sampled. log_f returns log f.

struct LineSum {
    double value = 0.0;  // relative to exp(scale)
    double abs_sum = 0.0;
    double scale = 0.0;
};

template <class LogF>
struct LineIntegrator {
    LogF log_f;
    double half_height;
    std::vector<cd> values;  // log f(k h)
    double h = 0.0;
    std::size_t evaluations = 0;

    void extend() {
        int quiet = 0;
        double top = -std::numeric_limits<double>::infinity();
        for (const auto& v : values) top = std::max(top, v.real());
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double u = k * h;
            if (u >= half_height && values[k].real() < top + kTailLog) ++quiet;
            else quiet = 0;
        }
        while (quiet < 4 || values.size() * h < half_height) {
            if (values.size() > kMaxLineNodes)
                throw Error(ErrorKind::non_convergence, "contour tail does not decay");
            const cd v = log_f(values.size() * h);
            ++evaluations;
            values.push_back(v);
            top = std::max(top, v.real());
            if (values.size() * h >= half_height && v.real() < top + kTailLog) ++quiet;
            else quiet = 0;
        }
    }

    void start(double step) {
        h = step;
        values.clear();
        extend();
    }

    void halve() {
        std::vector<cd> next;
        next.reserve(2 * values.size());
        for (std::size_t k = 0; k < values.size(); ++k) {
            next.push_back(values[k]);
            next.push_back(log_f((2 * k + 1) * 0.5 * h));
            ++evaluations;
        }
        values = std::move(next);
        h *= 0.5;
        extend();
    }

    LineSum sum() const {
        double top = -std::numeric_limits<double>::infinity();
        for (const auto& v : values) top = std::max(top, v.real());
        LineSum out;
        out.scale = top;
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double w = (k == 0 ? 0.5 : 1.0) * h / kPi;
            const cd e = std::exp(values[k] - top);
            out.value += w * e.real();
            out.abs_sum += w * std::abs(e);
        }
        // (1/(2 pi)) over the full line is (1/pi) over the half line of Re f
        return out;
    }
};

template <class LogF>
LineIntegrator<LogF> make_line(LogF f, double half_height) {
    return LineIntegrator<LogF>{std::move(f), half_height, {}, 0.0, 0};
}

// Adds two scaled numbers a e^{sa} + b e^{sb} into the scale of the larger.
struct Scaled {
    double value = 0.0;
    double scale = -std::numeric_limits<double>::infinity();

    void add(double v, double s) {
        if (v == 0.0) return;
        if (s > scale) {
            value = value * std::exp(scale - s) + v;
            scale = s;
        } else {
            value += v * std::exp(s - scale);
        }
    }
    double get(double extra) const {
        if (value == 0.0) return 0.0;
        return value * std::exp(scale + extra);
    }
};

double initial_step(double d, const ContourConfig& cfg) {
    return std::min(cfg.half_height / cfg.nodes, 2.0 * kPi * std::min(d, 1.0) / 30.0);
}

// ---------------------------------------------------------------------------
// Meijer G

struct MeijerIntegrand {
    const MeijerGSpec* spec;
    double log_z;

    cd log_value(cd s) const {
        const auto& a = spec->a;
        const auto& b = spec->b;
        cd acc = s * log_z;
        for (int j = 0; j < spec->m; ++j) acc += ln_gamma(b[j] - s);
        for (int j = 0; j < spec->n; ++j) acc += ln_gamma(1.0 - a[j] + s);
        for (int j = spec->m; j < spec->q(); ++j) acc -= ln_gamma(1.0 - b[j] + s);
        for (int j = spec->n; j < spec->p(); ++j) acc -= ln_gamma(a[j] - s);
        return acc;
    }

    // log of the numerator magnitude on the real axis, used to place the line
    double log_numerator(double c) const {
        int sign = 1;
        double acc = c * log_z;
        for (int j = 0; j < spec->m; ++j) acc += log_abs_gamma(spec->b[j] - c, sign);
        for (int j = 0; j < spec->n; ++j) acc += log_abs_gamma(1.0 - spec->a[j] + c, sign);
        return acc;
    }

    // Contribution of a crossed simple pole, returned as (sign, log magnitude).
    // Both families give (-1)^k / k! times the remaining factors at the pole.
    std::pair<int, double> residue(const CrossedPole& pole) const {
        const auto& a = spec->a;
        const auto& b = spec->b;
        const double s = pole.at;
        int sign = (pole.k % 2 == 0) ? 1 : -1;
        double acc = s * log_z - std::lgamma(pole.k + 1.0);
        for (int j = 0; j < spec->m; ++j) {
            if (j == pole.factor) continue;
            acc += log_abs_gamma(b[j] - s, sign);
        }
        for (int j = 0; j < spec->n; ++j) {
            if (spec->m + j == pole.factor) continue;
            acc += log_abs_gamma(1.0 - a[j] + s, sign);
        }
        for (int j = spec->m; j < spec->q(); ++j) {
            const double x = 1.0 - b[j] + s;
            if (is_nonpositive_integer(x)) return {0, 0.0};
            acc -= log_abs_gamma(x, sign);
        }
        for (int j = spec->n; j < spec->p(); ++j) {
            const double x = a[j] - s;
            if (is_nonpositive_integer(x)) return {0, 0.0};
            acc -= log_abs_gamma(x, sign);
        }
        return {sign, acc};
    }
};

struct Placement {
    double offset;
    std::vector<CrossedPole> crossed;
};

Placement place_meijer(const MeijerIntegrand& integrand, const std::vector<Family>& families,
                       const ContourConfig& cfg) {
    auto admissible = [&](double c, std::vector<CrossedPole>& crossed) {
        if (nearest_pole_distance(families, c) < 1e-9) return false;
        crossed = crossed_poles(families, c);
        for (const auto& p : crossed)
            if (multiplicity(families, p.at) != 1) return false;
        return true;
    };
    Placement out;
    if (!cfg.offsets.empty()) {
        out.offset = cfg.offsets.front();
        if (!admissible(out.offset, out.crossed))
            throw Error(ErrorKind::contour_failure,
                        "contour offset sits on a pole or crosses a multiple pole");
        return out;
    }

    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& f : families) {
        if (f.left) lo = std::max(lo, f.start);
        else hi = std::min(hi, f.start);
    }
    auto phi = [&](double c) { return integrand.log_numerator(c); };

    if (lo < hi && (hi - lo >= 0.2 || !std::isfinite(hi - lo))) {
        out.offset = saddle_offset(phi, lo, hi);
        out.crossed.clear();
        return out;
    }

    // Pinched or inverted gap: try the pole-free intervals nearby and pick
    // the widest one whose crossings are all simple poles.
    const double wlo = std::min(lo, hi) - 3.0;
    const double whi = std::max(lo, hi) + 3.0;
    auto pts = poles_in(families, wlo, whi);
    double best_width = -1.0;
    double best_lo = 0.0;
    double best_hi = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double mid = 0.5 * (pts[i] + pts[i + 1]);
        std::vector<CrossedPole> crossed;
        if (!admissible(mid, crossed)) continue;
        const double width = std::min(pts[i + 1] - pts[i], 2.0) - 0.01 * crossed.size();
        if (width > best_width) {
            best_width = width;
            best_lo = pts[i];
            best_hi = pts[i + 1];
        }
    }
    if (best_width < 0.0) {
        if (lo < hi) {
            out.offset = 0.5 * (lo + hi);
            return out;
        }
        throw Error(ErrorKind::contour_failure, "no admissible contour between the pole families");
    }
    out.offset = saddle_offset(phi, best_lo, best_hi);
    if (!admissible(out.offset, out.crossed))
        throw Error(ErrorKind::contour_failure, "contour placement failed");
    return out;
}

// ---------------------------------------------------------------------------
// Bivariate Fox H

struct FoxLine {
    double offset;
    std::vector<CrossedPole> crossed;
};

FoxLine place_fox(const std::vector<Family>& families, double lower, double upper,
                  const std::vector<double>& fixed, std::size_t idx) {
    FoxLine out;
    if (fixed.size() > idx) {
        out.offset = fixed[idx];
    } else {
        auto pts = poles_in(families, lower, upper);
        std::vector<double> cuts{lower};
        for (double p : pts)
            if (p > lower && p < upper) cuts.push_back(p);
        cuts.push_back(upper);
        double best = -1.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double width = cuts[i + 1] - cuts[i];
            if (width > best) {
                best = width;
                out.offset = 0.5 * (cuts[i] + cuts[i + 1]);
            }
        }
        if (best <= 0.0) throw Error(ErrorKind::contour_failure, "no admissible contour offset");
    }
    if (nearest_pole_distance(families, out.offset) < 1e-9)
        throw Error(ErrorKind::contour_failure, "contour offset sits on a pole");
    out.crossed = crossed_poles(families, out.offset);
    for (const auto& p : out.crossed)
        if (multiplicity(families, p.at) != 1)
            throw Error(ErrorKind::contour_failure, "contour crosses a multiple pole");
    for (const auto& p : out.crossed)
        if (families[static_cast<std::size_t>(p.factor)].left == false)
            throw Error(ErrorKind::contour_failure, "contour crosses the right pole family");
    return out;
}

}  // namespace

FoxH2Spec FoxH2Spec::weak_user(double varpi, int y, int alpha, int mu) {
    const double A = 2.0 / alpha;
    return FoxH2Spec{{1.0 - (mu + y), A, A}, {1.0 - varpi, 1.0, 0.0, 1.0}, {1.0 + varpi, 1.0, 0.0, 1.0}};
}

ContourEstimate meijer_g(const MeijerGSpec& spec, double z, const ContourConfig& cfg) {
    return meijer_g(spec, z, cfg, 0.0);
}

ContourEstimate meijer_g(const MeijerGSpec& spec, double z, const ContourConfig& cfg,
                         double log_factor) {
    check_config(cfg);
    if (!(z > 0.0) || !std::isfinite(z))
        throw Error(ErrorKind::invalid_argument, "Meijer-G argument must be positive and finite");
    if (spec.m < 0 || spec.n < 0 || spec.m > spec.q() || spec.n > spec.p())
        throw Error(ErrorKind::invalid_argument, "Meijer-G indices need 0 <= m <= q, 0 <= n <= p");
    if (spec.m + spec.n == 0)
        throw Error(ErrorKind::invalid_argument, "Meijer-G needs at least one numerator factor");
    const double kappa = spec.m + spec.n - 0.5 * (spec.p() + spec.q());
    if (!(kappa > 0.0))
        throw Error(ErrorKind::contour_failure,
                    "integrand does not decay along a vertical contour (m + n <= (p + q) / 2)");
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.m; ++j)
            if (is_nonnegative_integer(spec.a[i] - 1.0 - spec.b[j]))
                throw Error(ErrorKind::contour_failure, "left and right pole families collide");

    std::vector<Family> families;
    for (int j = 0; j < spec.m; ++j) families.push_back({spec.b[j], false, j});
    for (int j = 0; j < spec.n; ++j) families.push_back({spec.a[j] - 1.0, true, spec.m + j});

    const MeijerIntegrand integrand{&spec, std::log(z)};
    const Placement place = place_meijer(integrand, families, cfg);
    const double c = place.offset;

    Scaled residues;
    double residue_abs = 0.0;
    for (const auto& pole : place.crossed) {
        const auto [sign, lg] = integrand.residue(pole);
        if (sign == 0) continue;
        residues.add(sign, lg);
    }
    {
        Scaled tmp;
        for (const auto& pole : place.crossed) {
            const auto [sign, lg] = integrand.residue(pole);
            if (sign != 0) tmp.add(1.0, lg);
        }
        residue_abs = std::abs(tmp.get(log_factor));
    }

    const double d = nearest_pole_distance(families, c);
    auto line = make_line([&](double u) { return integrand.log_value(cd(c, u)); }, cfg.half_height);
    line.start(initial_step(d, cfg));

    auto total = [&](const LineSum& s, double& abs_out) {
        Scaled acc = residues;
        acc.add(s.value, s.scale);
        abs_out = std::exp(s.scale + log_factor) * s.abs_sum + residue_abs;
        return acc.get(log_factor);
    };

    double abs_sum = 0.0;
    double prev = total(line.sum(), abs_sum);
    for (int level = 0; level < kMaxHalvings; ++level) {
        line.halve();
        double abs_now = 0.0;
        const double now = total(line.sum(), abs_now);
        const double diff = std::abs(now - prev);
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * abs_now;
        if (!std::isfinite(now))
            throw NonConvergence("Meijer-G value is not finite in double precision", prev, now);
        if (diff <= cfg.tolerance * std::abs(now) || diff <= floor) {
            ContourEstimate out;
            out.value = now;
            out.error = std::max(diff, floor);
            out.offsets = {c};
            out.evaluations = line.evaluations;
            return out;
        }
        prev = now;
    }
    double abs_now = 0.0;
    throw NonConvergence("Meijer-G contour quadrature did not converge", prev,
                         total(line.sum(), abs_now));
}

ContourEstimate fox_h2(const FoxH2Spec& spec, double z1, double z2, const ContourConfig& cfg) {
    return fox_h2(spec, z1, z2, cfg, 0.0);
}

ContourEstimate fox_h2(const FoxH2Spec& spec, double z1, double z2, const ContourConfig& cfg,
                       double log_factor) {
    check_config(cfg);
    if (!(z1 > 0.0) || !(z2 > 0.0) || !std::isfinite(z1) || !std::isfinite(z2))
        throw Error(ErrorKind::invalid_argument, "Fox-H arguments must be positive and finite");
    const auto& o = spec.outer;
    for (const auto* blk : {&spec.first, &spec.second})
        if (blk->gamma != 1.0 || blk->delta != 1.0)
            throw Error(ErrorKind::invalid_argument,
                        "only unit inner coefficients are supported by fox_h2");
    if (!(o.A1 > 0.0) || o.A1 != o.A2)
        throw Error(ErrorKind::invalid_argument, "fox_h2 needs equal positive outer coefficients");
    const double A = o.A1;
    const double B = 1.0 - o.a;
    if (!(B > 0.0))
        throw Error(ErrorKind::contour_failure, "outer Gamma has a pole family at the origin");
    for (const auto* blk : {&spec.first, &spec.second})
        if (is_nonnegative_integer(blk->c - 1.0 - blk->d))
            throw Error(ErrorKind::contour_failure, "left and right pole families collide");

    const std::vector<Family> fam_s{{spec.first.d, false, 0}, {spec.first.c - 1.0, true, 1}};
    const std::vector<Family> fam_t{{spec.second.d, false, 0}, {spec.second.c - 1.0, true, 1}};

    // Each line stays within half of the outer budget so that
    // B + A (Re s + Re t) > 0 on the lines and at every crossed pole.
    const double beta = 0.45 * B / A;
    const FoxLine ls = place_fox(fam_s, -beta, spec.first.d, cfg.offsets, 0);
    const FoxLine lt = place_fox(fam_t, -beta, spec.second.d, cfg.offsets, 1);
    const double cs = ls.offset;
    const double ct = lt.offset;
    const double outer_re = B + A * (cs + ct);
    if (!(outer_re > 0.0))
        throw Error(ErrorKind::contour_failure, "contour offsets cross the outer pole family");

    const double lz1 = std::log(z1);
    const double lz2 = std::log(z2);
    auto log_p = [&](cd s) {
        return ln_gamma(spec.first.d - s) + ln_gamma(1.0 - spec.first.c + s) + s * lz1;
    };
    auto log_q = [&](cd t) {
        return ln_gamma(spec.second.d - t) + ln_gamma(1.0 - spec.second.c + t) + t * lz2;
    };
    auto log_outer = [&](cd w) { return ln_gamma(B + A * w); };

    // Residue coefficient (with z^p) of a crossed left pole; sign in .first.
    auto residue_s = [&](const CrossedPole& p) {
        int sign = (p.k % 2 == 0) ? 1 : -1;
        const double lg = log_abs_gamma(spec.first.d - p.at, sign) - std::lgamma(p.k + 1.0) + p.at * lz1;
        return std::pair<int, double>{sign, lg};
    };
    auto residue_t = [&](const CrossedPole& p) {
        int sign = (p.k % 2 == 0) ? 1 : -1;
        const double lg =
            log_abs_gamma(spec.second.d - p.at, sign) - std::lgamma(p.k + 1.0) + p.at * lz2;
        return std::pair<int, double>{sign, lg};
    };

    const double d = std::min({nearest_pole_distance(fam_s, cs), nearest_pole_distance(fam_t, ct),
                               outer_re / A});
    double h = initial_step(d, cfg);

    std::size_t evaluations = 0;
    double grid_terms = 0.0;
    auto march = [&](auto&& log_fn, double c, double step) {
        // symmetric samples j = -J..J stored as index j + J
        std::vector<cd> pos;
        double top = -std::numeric_limits<double>::infinity();
        int quiet = 0;
        for (std::size_t k = 0;; ++k) {
            const cd v = log_fn(cd(c, k * step));
            ++evaluations;
            pos.push_back(v);
            top = std::max(top, v.real());
            if (k * step >= cfg.half_height && v.real() < top + kTailLog) ++quiet;
            else quiet = 0;
            if (quiet >= 4) break;
            if (pos.size() > 200000)
                throw Error(ErrorKind::non_convergence, "Fox-H contour tail does not decay");
        }
        const std::size_t J = pos.size() - 1;
        std::vector<cd> full(2 * J + 1);
        for (std::size_t k = 0; k <= J; ++k) {
            full[J + k] = pos[k];
            full[J - k] = std::conj(pos[k]);
        }
        return full;
    };

    auto evaluate = [&](double step, double& abs_out) {
        const auto P = march(log_p, cs, step);
        const auto Q = march(log_q, ct, step);
        const std::size_t Js = (P.size() - 1) / 2;
        const std::size_t Jt = (Q.size() - 1) / 2;
        grid_terms = static_cast<double>(P.size()) * static_cast<double>(Q.size());
        std::vector<cd> O(P.size() + Q.size() - 1);
        for (std::size_t i = 0; i < O.size(); ++i) {
            const double v = (static_cast<double>(i) - static_cast<double>(Js + Jt)) * step;
            O[i] = log_outer(cd(cs + ct, v));
            ++evaluations;
        }
        double top_p = -std::numeric_limits<double>::infinity();
        double top_q = top_p;
        double top_o = top_p;
        for (const auto& v : P) top_p = std::max(top_p, v.real());
        for (const auto& v : Q) top_q = std::max(top_q, v.real());
        for (const auto& v : O) top_o = std::max(top_o, v.real());

        Scaled value;
        Scaled magnitude;
        const double w_line = step / (2.0 * kPi);

        // line x line
        {
            const double ref = top_p + top_q + top_o;
            double acc = 0.0;
            double acc_abs = 0.0;
            for (std::size_t j = 0; j < P.size(); ++j) {
                const cd pj = P[j] - top_p;
                if (pj.real() < 2.0 * kTailLog) continue;
                for (std::size_t k = 0; k < Q.size(); ++k) {
                    const cd e = std::exp(pj + (Q[k] - top_q) + (O[j + k] - top_o));
                    acc += e.real();
                    acc_abs += std::abs(e);
                }
            }
            value.add(acc * w_line * w_line, ref);
            magnitude.add(acc_abs * w_line * w_line, ref);
        }
        // s residues x t line
        for (const auto& ps : ls.crossed) {
            const auto [sign, lg] = residue_s(ps);
            double acc = 0.0;
            double acc_abs = 0.0;
            std::vector<cd> terms(Q.size());
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < Q.size(); ++k) {
                const double v = (static_cast<double>(k) - static_cast<double>(Jt)) * step;
                terms[k] = Q[k] + log_outer(cd(ps.at + ct, v));
                ++evaluations;
                top = std::max(top, terms[k].real());
            }
            for (const auto& t : terms) {
                const cd e = std::exp(t - top);
                acc += e.real();
                acc_abs += std::abs(e);
            }
            value.add(sign * acc * w_line, lg + top);
            magnitude.add(acc_abs * w_line, lg + top);
        }
        // s line x t residues
        for (const auto& pt : lt.crossed) {
            const auto [sign, lg] = residue_t(pt);
            double acc = 0.0;
            double acc_abs = 0.0;
            std::vector<cd> terms(P.size());
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < P.size(); ++j) {
                const double u = (static_cast<double>(j) - static_cast<double>(Js)) * step;
                terms[j] = P[j] + log_outer(cd(cs + pt.at, u));
                ++evaluations;
                top = std::max(top, terms[j].real());
            }
            for (const auto& t : terms) {
                const cd e = std::exp(t - top);
                acc += e.real();
                acc_abs += std::abs(e);
            }
            value.add(sign * acc * w_line, lg + top);
            magnitude.add(acc_abs * w_line, lg + top);
        }
        // residue x residue
        for (const auto& ps : ls.crossed) {
            const auto [ss, lgs] = residue_s(ps);
            for (const auto& pt : lt.crossed) {
                const auto [st, lgt] = residue_t(pt);
                int sign = ss * st;
                const double lo = log_abs_gamma(B + A * (ps.at + pt.at), sign);
                value.add(sign, lgs + lgt + lo);
                magnitude.add(1.0, lgs + lgt + lo);
            }
        }
        abs_out = magnitude.get(log_factor);
        return value.get(log_factor);
    };

    double abs_prev = 0.0;
    double prev = evaluate(h, abs_prev);
    for (int level = 0; level < 6; ++level) {
        h *= 0.5;
        double abs_now = 0.0;
        const double now = evaluate(h, abs_now);
        const double diff = std::abs(now - prev);
        // rounding noise of the double sum grows like the square root of its size
        const double floor =
            std::max(64.0, std::sqrt(grid_terms)) * std::numeric_limits<double>::epsilon() * abs_now;
        if (!std::isfinite(now))
            throw NonConvergence("Fox-H value is not finite in double precision", prev, now);
        if (diff <= cfg.tolerance * std::abs(now) || diff <= floor) {
            ContourEstimate out;
            out.value = now;
            out.error = std::max(diff, floor);
            out.offsets = {cs, ct};
            out.evaluations = evaluations;
            return out;
        }
        prev = now;
    }
    throw NonConvergence("Fox-H contour quadrature did not converge", prev, prev);
}

}  // namespace noma
