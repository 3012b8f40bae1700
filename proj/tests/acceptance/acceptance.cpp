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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "noma/channel.hpp"
#include "noma/effrate.hpp"
#include "noma/error.hpp"
#include "noma/sim.hpp"
#include "noma/snc.hpp"

using namespace noma;

namespace {

const double kOmegaW = std::sqrt(0.1);  // Omega_w^2 = 0.1
constexpr double kAs = 0.24;
constexpr int kSlotSymbols = 168;

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

NomaSystem make_sys(int alpha, int mu, double omega_w, double a_s, double rho_db, double theta) {
    return NomaSystem(ChannelPair(AlphaMuChannel(alpha, mu, 1.0), AlphaMuChannel(alpha, mu, omega_w)), a_s,
                      db_to_linear(rho_db), DelayQos(theta));
}

const char* name(User u) { return u == User::strong ? "strong" : "weak"; }

// Collects the first few failure details of one criterion.
struct Check {
    int failures = 0;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (ok) return;
        if (++failures <= 3) detail += (detail.empty() ? "" : "; ") + what;
    }
};

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Self-consistent arrival rate: a fraction of the user's mean service in bits per slot.
SncConfig load_config(const NomaSystem& sys, User u, double load) {
    return SncConfig(sys, kSlotSymbols, load * kSlotSymbols * ergodic_rate(sys, u).value);
}

// Fitted log-slope of the bound over every vartheta where it is below 1.
double bound_slope(const std::vector<DvpBound>& curve) {
    std::vector<double> x, y;
    for (const auto& b : curve)
        if (b.feasible && b.bound < 1.0 && b.bound > 0.0) {
            x.push_back(b.target_delay);
            y.push_back(std::log(b.bound));
        }
    return x.size() >= 2 ? least_squares_slope(x, y) : std::nan("");
}

// Fitted log-slope of the simulated curve over the resolved points.
double sim_slope(const DelayCcdf& q, std::size_t* used) {
    std::vector<double> x, y;
    for (std::size_t d = 0; d < q.probability.size(); ++d) {
        const double p = q.probability[d];
        if (p > 0.0 && q.std_error[d] <= 0.2 * p) {
            x.push_back(static_cast<double>(d));
            y.push_back(std::log(p));
        }
    }
    *used = x.size();
    return x.size() >= 2 ? least_squares_slope(x, y) : std::nan("");
}

std::vector<double> delays(int max_delay) {
    std::vector<double> out;
    for (int d = 0; d <= max_delay; ++d) out.push_back(d);
    return out;
}

// ---- criteria ----

Check reductions() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    for (int mu : {1, 2, 3})
        for (double omega : {1.0, kOmegaW, 1.7}) {
            const AlphaMuChannel ch(2, mu, omega);
            const double mean = omega * omega;
            const boost::math::gamma_distribution<double> g(mu, mean / mu);
            for (double q = 1e-3; q < 30.0; q *= 1.37) {
                const double x = q * mean;
                double pdf = boost::math::pdf(g, x), cdf = boost::math::cdf(g, x);
                if (mu == 1) {  // plain exponential
                    pdf = std::exp(-x / mean) / mean;
                    cdf = -std::expm1(-x / mean);
                }
                c.expect(rel_diff(gain_pdf(ch, x), pdf) <= 1e-10, fmt("pdf mu=%d x=%g", mu, x));
                c.expect(rel_diff(gain_cdf(ch, x), cdf) <= 1e-10, fmt("cdf mu=%d x=%g", mu, x));
            }
            for (int k = 1; k <= 4; ++k) {
                const double m = std::exp(std::lgamma(mu + k) - std::lgamma(mu)) * std::pow(mean / mu, k);
                c.expect(rel_diff(gain_moment(ch, k), m) <= 1e-10, fmt("moment mu=%d k=%d", mu, k));
            }
        }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 1.0, fmt("runtime %.2f s", secs));
    return c;
}

Check triple_oracle() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    SimPlan plan;
    plan.seed = 20240601;
    plan.samples = 10'000'000;
    plan.batches = 100;
    plan.jobs = 8;
    for (int a : {1, 2, 3})
        for (int m : {1, 2, 3})
            for (double db : {0.0, 10.0, 20.0}) {
                const auto sys = make_sys(a, m, kOmegaW, kAs, db, 0.5);
                for (User u : {User::strong, User::weak}) {
                    const double quad = er_noma(sys, u, Strategy::quadrature).value;
                    const double closed = er_noma(sys, u, Strategy::closed_form).value;
                    const auto mc = mc_effective_rate(sys, u, plan);
                    const double tol = u == User::weak ? 1e-3 : 1e-5;
                    const std::string at = fmt("(%d,%d) %g dB %s", a, m, db, name(u));
                    c.expect(rel_diff(quad, closed) <= tol, at + fmt(" quad/closed rel %.2e", rel_diff(quad, closed)));
                    c.expect(std::abs(quad - mc.value) <= 3 * mc.error_estimate,
                             at + fmt(" quad vs mc %.2f se", std::abs(quad - mc.value) / mc.error_estimate));
                    c.expect(std::abs(closed - mc.value) <= 3 * mc.error_estimate,
                             at + fmt(" closed vs mc %.2f se", std::abs(closed - mc.value) / mc.error_estimate));
                }
            }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 600.0, fmt("runtime %.0f s", secs));
    return c;
}

Check power_optimum() {
    Check c;
    std::vector<double> grid;
    for (int i = 1; i <= 24; ++i) grid.push_back(i / 100.0);
    struct Case {
        int alpha, mu;
        double omega_w;
    };
    // (2,2) under both weak-link readings, (2,1) with Omega_w = 0.1
    for (const Case& k : {Case{2, 2, 0.1}, Case{2, 2, kOmegaW}, Case{2, 1, 0.1}})
        for (double db : {10.0, 20.0, 30.0, 40.0}) {
            const auto r = power_search(make_sys(k.alpha, k.mu, k.omega_w, kAs, db, 0.5), grid);
            c.expect(r.best_a_s == 0.24,
                     fmt("(%d,%d) omega_w=%.3g %g dB best %.2f", k.alpha, k.mu, k.omega_w, db, r.best_a_s));
        }
    return c;
}

Check high_snr_anchor() {
    Check c;
    const double limit = std::log2(1.0 + (1.0 - kAs) / kAs);
    for (int a = 1; a <= 4; ++a)
        for (int m = 1; m <= 4; ++m) {
            const auto weak = make_sys(a, m, kOmegaW, kAs, 60.0, 0.5);
            const double rw = er_noma(weak, User::weak).value;
            c.expect(std::abs(rw - limit) <= 0.02, fmt("weak (%d,%d) off by %.4f bits", a, m, std::abs(rw - limit)));
            const auto strong = make_sys(a, m, kOmegaW, kAs, 40.0, 0.5);
            if (a * m > 2.0 * strong.nu()) {
                const double err = std::abs(er_high_snr(strong, User::strong).value -
                                            er_noma(strong, User::strong).value);
                c.expect(err <= 0.05, fmt("strong (%d,%d) off by %.3f bits", a, m, err));
            }
        }
    return c;
}

Check low_snr_anchor() {
    Check c;
    auto fd = [](const NomaSystem& sys, User u) {
        auto R = [&](double rho) { return er_noma(sys.with_rho(rho), u).value; };
        auto at = [&](double r0) {
            const double h = r0 / 4;
            const double rp = R(r0 + h), rm = R(r0 - h), r = R(r0);
            return RateDerivatives{(rp - rm) / (2 * h), (rp - 2 * r + rm) / (h * h)};
        };
        const auto d1 = at(1.25e-4), d2 = at(2.5e-4);
        return RateDerivatives{2 * d1.first - d2.first, 2 * d1.second - d2.second};
    };
    for (int a = 1; a <= 4; ++a)
        for (int m = 1; m <= 3; ++m)
            for (double theta : {0.5, 1.0, 2.0}) {
                const auto sys = make_sys(a, m, kOmegaW, kAs, -30.0, theta);
                for (User u : {User::strong, User::weak}) {
                    const std::string at = fmt("(%d,%d) theta=%g %s", a, m, theta, name(u));
                    const double taylor = er_low_snr(sys, u).value;
                    const double exact = er_noma(sys, u).value;
                    c.expect(rel_diff(taylor, exact) <= 0.01, at + fmt(" taylor rel %.2e", rel_diff(taylor, exact)));
                    const auto d = er_derivatives(sys, u);
                    const auto f = fd(sys, u);
                    c.expect(rel_diff(d.first, f.first) <= 1e-3, at + " first derivative");
                    c.expect(rel_diff(d.second, f.second) <= 1e-3, at + " second derivative");
                }
            }
    return c;
}

Check jensen_and_limits() {
    Check c;
    for (int a : {1, 2, 3})
        for (int m : {1, 2, 3})
            for (double db : {0.0, 10.0, 20.0})
                for (double theta : {0.1, 0.5, 1.0, 2.0}) {
                    const auto sys = make_sys(a, m, kOmegaW, kAs, db, theta);
                    for (User u : {User::strong, User::weak}) {
                        const double slack = ergodic_rate(sys, u).value - er_noma(sys, u).value;
                        c.expect(slack >= -1e-9, fmt("(%d,%d) %g dB theta=%g %s slack %.2e", a, m, db, theta, name(u), slack));
                    }
                    if (theta == 0.1) {
                        const auto flat = make_sys(a, m, kOmegaW, kAs, db, 1e-9);
                        for (User u : {User::strong, User::weak}) {
                            const double gap = std::abs(er_noma(flat, u).value - ergodic_rate(flat, u).value);
                            c.expect(gap < 1e-6, fmt("(%d,%d) %g dB theta=1e-9 %s gap %.2e", a, m, db, name(u), gap));
                        }
                    }
                }
    for (double db : {10.0, 30.0}) {
        double prev = -1.0;
        for (double theta : {0.1, 0.5, 1.0, 2.0}) {
            const double loss = rate_loss(make_sys(2, 1, kOmegaW, kAs, db, theta));
            c.expect(loss > prev, fmt("rate loss not increasing at %g dB theta=%g", db, theta));
            prev = loss;
        }
    }
    for (double theta : {0.1, 0.5, 1.0, 2.0}) {
        const double lo = rate_loss(make_sys(2, 1, kOmegaW, kAs, 10.0, theta));
        const double hi = rate_loss(make_sys(2, 1, kOmegaW, kAs, 30.0, theta));
        c.expect(hi > lo, fmt("rate loss at 30 dB not above 10 dB, theta=%g", theta));
    }
    return c;
}

Check dvp_validity() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    SimPlan plan;
    plan.seed = 7;
    plan.samples = 1'000'000;
    plan.batches = 20;
    plan.jobs = 8;
    for (auto [a, m] : {std::pair{2, 1}, {3, 1}, {2, 2}}) {
        const auto sys = make_sys(a, m, kOmegaW, kAs, 10.0, 0.5);
        for (User u : {User::strong, User::weak}) {
            const auto cfg = load_config(sys, u, 0.7);
            const auto curve = dvp_curve(cfg, u, delays(30));
            const auto q = queue_dvp(cfg, u, plan, 30);
            const std::string at = fmt("(%d,%d) %s", a, m, name(u));
            for (int d = 0; d <= 30; ++d)
                c.expect(q.ci_low[d] <= curve[d].bound,
                         at + fmt(" vartheta=%d sim %.3e above bound %.3e", d, q.ci_low[d], curve[d].bound));
            std::size_t used = 0;
            const double sb = bound_slope(curve);
            const double ss = sim_slope(q, &used);
            c.expect(used >= 3, at + fmt(" only %zu resolved points", used));
            c.expect(rel_diff(sb, ss) <= 0.15, at + fmt(" slopes %.4f vs %.4f", sb, ss));
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 300.0, fmt("runtime %.0f s", secs));
    return c;
}

Check severity_ordering() {
    Check c;
    auto rate = [](int a, int m, User u) {
        const auto sys = make_sys(a, m, kOmegaW, kAs, 10.0, 0.5);
        return -bound_slope(dvp_curve(load_config(sys, u, 0.7), u, delays(30)));
    };
    for (User u : {User::strong, User::weak}) {
        double prev = 0.0;
        for (int a = 1; a <= 4; ++a) {
            const double r = rate(a, 1, u);
            c.expect(r > prev, fmt("%s alpha=%d decay %.4f not above %.4f", name(u), a, r, prev));
            prev = r;
        }
        prev = 0.0;
        for (int m = 1; m <= 4; ++m) {
            const double r = rate(2, m, u);
            c.expect(r > prev, fmt("%s mu=%d decay %.4f not above %.4f", name(u), m, r, prev));
            prev = r;
        }
    }
    return c;
}

std::string read_all(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Check jobs_determinism() {
    Check c;
    const auto dir = std::filesystem::temp_directory_path() / ("noma_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "sweep.ini";
    std::ofstream(cfg) << "[channel]\nalpha = 2, 3\nmu = 1, 2\n"
                          "[system]\nrho_db = 0:20:10\ntheta = 0.5, 1\n"
                          "[snc]\nlambda_unit = service-fraction\nlambda = 0.7\nmax_delay = 10\n"
                          "[sim]\nseed = 11\nslots = 100000\ndraws = 200000\n";
    auto run = [&](const std::string& args, const std::string& out) {
        const std::string cmd = std::string("\"") + NOMA_EFFRATE_EXE + "\" " + args + " --config \"" +
                                cfg.string() + "\" --out \"" + (dir / out).string() + "\"";
        return std::system(cmd.c_str());
    };
    for (const std::string cmd : {"er", "er --set system.strategy=monte-carlo", "dvp", "approx", "power"}) {
        const int a = run(cmd + " --jobs 1", "one.csv");
        const int b = run(cmd + " --jobs 8", "eight.csv");
        c.expect(a == 0 && b == 0, "'" + cmd + "' exited nonzero");
        const std::string x = read_all(dir / "one.csv"), y = read_all(dir / "eight.csv");
        c.expect(!x.empty() && x == y, "'" + cmd + "' output differs between --jobs 1 and --jobs 8");
    }
    std::filesystem::remove_all(dir);
    return c;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Check()> run;
    };
    const std::vector<Criterion> criteria = {
        {"exponential and Gamma reductions", reductions},
        {"closed form, quadrature and Monte Carlo agree", triple_oracle},
        {"power search optimum at a_s = 0.24", power_optimum},
        {"high-SNR anchors", high_snr_anchor},
        {"low-SNR anchors and derivatives", low_snr_anchor},
        {"Jensen gap and delay-exponent limits", jensen_and_limits},
        {"delay-violation bound dominates the queue simulation", dvp_validity},
        {"bound decays faster for milder fading", severity_ordering},
        {"CSV identical across job counts", jobs_determinism},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = cr.run();
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s (%.1f s)", c.failures ? "FAIL" : "PASS", cr.name, secs);
        if (c.failures) std::printf(": %d failed check(s): %s", c.failures, c.detail.c_str());
        std::printf("\n");
        std::fflush(stdout);
        failed += c.failures ? 1 : 0;
    }
    return failed ? 1 : 0;
}
