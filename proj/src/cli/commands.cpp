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

#include "noma/cli/commands.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <optional>

#include "noma/error.hpp"
#include "noma/parallel.hpp"
#include "noma/sim.hpp"
#include "noma/snc.hpp"

namespace noma::cli {

namespace {

// One sweep point over the dimensions shared by every command.
struct Point {
    int alpha;
    int mu;
    double omega_w;
    double a_s;
    double theta;
    double rho_db;
    double lambda;
};

struct Dim {
    const char* name;
    double Point::*field;  // null for the integer dimensions
};

std::string cell(const Point& p, const Dim& d) {
    if (d.field) return format_number(p.*(d.field));
    return std::to_string(d.name == std::string("alpha") ? p.alpha : p.mu);
}

std::vector<Dim> context_dims(const SweepConfig& c, bool with_theta, bool with_a_s, bool with_rho,
                              bool with_lambda) {
    std::vector<Dim> dims;
    if (c.alpha.size() > 1) dims.push_back({"alpha", nullptr});
    if (c.mu.size() > 1) dims.push_back({"mu", nullptr});
    if (c.omega_w.size() > 1) dims.push_back({"omega_w", &Point::omega_w});
    if (with_a_s && c.a_s.size() > 1) dims.push_back({"a_s", &Point::a_s});
    if (with_theta && c.theta.size() > 1) dims.push_back({"theta", &Point::theta});
    if (with_rho && c.rho_db.size() > 1) dims.push_back({"rho_db", &Point::rho_db});
    if (with_lambda && c.lambda.size() > 1) dims.push_back({"lambda", &Point::lambda});
    return dims;
}

// Cartesian product in a fixed nesting order; single-valued placeholders
// stand in for dimensions a command does not sweep.
std::vector<Point> points(const SweepConfig& c, bool a_s, bool theta, bool rho, bool lambda) {
    const std::vector<double> one{0.0};
    std::vector<Point> out;
    for (int al : c.alpha)
        for (int m : c.mu)
            for (double w : c.omega_w)
                for (double as : a_s ? c.a_s : std::vector<double>{c.a_s.front()})
                    for (double th : theta ? c.theta : std::vector<double>{c.theta.front()})
                        for (double l : lambda ? c.lambda : one)
                            for (double r : rho ? c.rho_db : one)
                                out.push_back({al, m, w, as, th, r, l});
    return out;
}

NomaSystem system_at(const SweepConfig& c, const Point& p) {
    const ChannelPair pair(AlphaMuChannel(p.alpha, p.mu, c.omega_s),
                           AlphaMuChannel(p.alpha, p.mu, p.omega_w));
    return NomaSystem(pair, p.a_s, db_to_linear(p.rho_db), DelayQos(p.theta, c.tb));
}

template <class Row>
Table assemble(std::vector<std::string> header, const std::vector<Dim>& dims,
               const std::vector<Point>& pts, int jobs, Row row) {
    std::vector<std::vector<std::vector<std::string>>> blocks(pts.size());
    parallel_for(pts.size(), jobs, [&](std::size_t i) { blocks[i] = row(pts[i]); });
    Table t;
    for (const auto& d : dims) t.header.emplace_back(d.name);
    t.header.insert(t.header.end(), header.begin(), header.end());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (auto& r : blocks[i]) {
            std::vector<std::string> cells;
            for (const auto& d : dims) cells.push_back(cell(pts[i], d));
            cells.insert(cells.end(), r.begin(), r.end());
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

std::optional<double> maybe(auto&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::validity_violation || e.kind() == ErrorKind::degenerate)
            return std::nullopt;
        throw;
    }
}

SimPlan plan_for(const SweepConfig& c, std::uint64_t samples) {
    SimPlan plan;
    plan.seed = c.seed;
    plan.samples = samples;
    plan.batches = c.batches;
    plan.jobs = 1;  // parallelism is across grid points
    return plan;
}

std::vector<std::string> names(const std::vector<Dim>& dims) {
    std::vector<std::string> out;
    for (const auto& d : dims) out.emplace_back(d.name);
    return out;
}

}  // namespace

Table cmd_er_sweep(const SweepConfig& c, int jobs) {
    Table t;
    t.header = {"alpha", "mu",    "omega_w",   "a_s", "theta",    "rho_db", "R_s",
                "R_w",   "R_sum", "R_sum_oma", "gap", "strategy", "err"};
    const auto pts = points(c, true, true, true, false);
    std::vector<std::vector<std::string>> rows(pts.size());
    parallel_for(pts.size(), jobs, [&](std::size_t i) {
        const Point& p = pts[i];
        const NomaSystem sys = system_at(c, p);
        RateResult rs, rw, os, ow;
        if (c.strategy == Strategy::monte_carlo) {
            const SimPlan plan = plan_for(c, c.draws);
            const double nu = sys.nu();
            rs = mc_effective_rate(sys, User::strong, plan);
            rw = mc_effective_rate(sys, User::weak, plan);
            os = mc_effective_rate(AlphaMuLaw(sys.pair().strong()), Sinr{sys.rho()}, 0.5 * nu, nu, plan);
            ow = mc_effective_rate(AlphaMuLaw(sys.pair().weak()), Sinr{sys.rho()}, 0.5 * nu, nu, plan);
        } else {
            rs = er_noma(sys, User::strong, c.strategy);
            rw = er_noma(sys, User::weak, c.strategy);
            os = er_oma(sys, User::strong, c.strategy);
            ow = er_oma(sys, User::weak, c.strategy);
        }
        const double sum = rs.value + rw.value;
        const double sum_oma = os.value + ow.value;
        rows[i] = {std::to_string(p.alpha),
                   std::to_string(p.mu),
                   format_number(p.omega_w),
                   format_number(p.a_s),
                   format_number(p.theta),
                   format_number(p.rho_db),
                   format_number(rs.value),
                   format_number(rw.value),
                   format_number(sum),
                   format_number(sum_oma),
                   format_number(sum - sum_oma),
                   std::string(to_string(c.strategy)),
                   format_number(rs.error_estimate + rw.error_estimate)};
    });
    t.rows = std::move(rows);
    return t;
}

Table cmd_dvp(const SweepConfig& c, int jobs) {
    const auto dims = context_dims(c, false, true, true, true);
    const auto pts = points(c, true, false, true, true);
    std::vector<Point> expanded;  // each point twice: strong, then weak
    for (const auto& p : pts) {
        expanded.push_back(p);
        expanded.push_back(p);
    }
    std::vector<double> delays;
    for (int d = 0; d <= c.max_delay; ++d) delays.push_back(d);

    std::vector<std::vector<std::vector<std::string>>> blocks(expanded.size());
    parallel_for(expanded.size(), jobs, [&](std::size_t i) {
        const Point& p = expanded[i];
        const User user = i % 2 == 0 ? User::strong : User::weak;
        const NomaSystem sys = system_at(c, p);
        double lambda = p.lambda * c.lambda_scale;
        if (c.lambda_unit == LambdaUnit::service_fraction)
            lambda *= c.n * ergodic_rate(sys, user).value;
        const SncConfig snc(sys, c.n, lambda, SSearch{c.s_min, c.s_max, c.s_points, c.s_tol});
        const auto bounds = dvp_curve(snc, user, delays);
        std::optional<DelayCcdf> sim;
        if (c.simulate) {
            sim = queue_dvp(snc, user, plan_for(c, c.slots), c.max_delay);
            if (sim->unstable)
                spdlog::warn("queue is unstable for {} user (lambda {} >= mean service {})",
                             to_string(user), lambda, sim->mean_service);
        }
        auto& rows = blocks[i];
        for (int d = 0; d <= c.max_delay; ++d) {
            const auto& b = bounds[static_cast<std::size_t>(d)];
            const auto k = static_cast<std::size_t>(d);
            rows.push_back({std::string(to_string(user)), std::to_string(d), format_number(b.bound),
                            format_optional(b.minimizer_s), b.feasible ? "true" : "false",
                            sim ? format_number(sim->probability[k]) : "",
                            sim ? format_number(sim->ci_low[k]) : "",
                            sim ? format_number(sim->ci_high[k]) : ""});
        }
    });

    Table t;
    t.header = names(dims);
    for (const char* h : {"user", "vartheta", "bound", "minimizer_s", "feasible", "empirical_p",
                          "ci_low", "ci_high"})
        t.header.emplace_back(h);
    for (std::size_t i = 0; i < expanded.size(); ++i)
        for (auto& r : blocks[i]) {
            std::vector<std::string> cells;
            for (const auto& d : dims) cells.push_back(cell(expanded[i], d));
            cells.insert(cells.end(), r.begin(), r.end());
            t.rows.push_back(std::move(cells));
        }
    return t;
}

Table cmd_approx(const SweepConfig& c, int jobs) {
    const auto dims = context_dims(c, true, true, false, false);
    const auto pts = points(c, true, true, true, false);
    return assemble(
        {"rho_db", "exact_sum", "high_snr_sum", "low_snr_sum", "ergodic_sum", "rate_loss",
         "ebn0_min_s", "ebn0_min_w", "slope_s", "slope_w"},
        dims, pts, jobs, [&](const Point& p) {
            const NomaSystem sys = system_at(c, p);
            const double exact = sum_er_noma(sys);
            const auto high = maybe([&] {
                return er_high_snr(sys, User::strong).value + er_high_snr(sys, User::weak).value;
            });
            const double low = er_low_snr(sys, User::strong).value + er_low_snr(sys, User::weak).value;
            const double ergodic =
                ergodic_rate(sys, User::strong).value + ergodic_rate(sys, User::weak).value;
            auto ebn0_db = [&](User u) {
                return maybe([&] { return 10.0 * std::log10(min_energy_per_bit(sys, u)); });
            };
            auto slope = [&](User u) { return maybe([&] { return wideband_slope(sys, u); }); };
            return std::vector<std::vector<std::string>>{
                {format_number(p.rho_db), format_number(exact), format_optional(high),
                 format_number(low), format_number(ergodic), format_number(ergodic - exact),
                 format_optional(ebn0_db(User::strong)), format_optional(ebn0_db(User::weak)),
                 format_optional(slope(User::strong)), format_optional(slope(User::weak))}};
        });
}

Table cmd_power_search(const SweepConfig& c, int jobs) {
    const auto dims = context_dims(c, true, false, false, false);
    const auto pts = points(c, false, true, true, false);
    return assemble({"rho_db", "best_a_s", "best_sum_er"}, dims, pts, jobs, [&](const Point& p) {
        const NomaSystem sys = system_at(c, p);
        const auto best = power_search(sys, c.a_s, c.r_target);
        return std::vector<std::vector<std::string>>{
            {format_number(p.rho_db), format_number(best.best_a_s), format_number(best.best_sum_er)}};
    });
}

ChartSpec chart_for(std::string_view command, const Table& table) {
    ChartSpec spec;
    auto groups = [&](std::initializer_list<const char*> skip) {
        std::vector<std::string> out;
        for (const auto& h : table.header) {
            bool keep = true;
            for (const char* s : skip)
                if (h == s) keep = false;
            if (keep) out.push_back(h);
        }
        return out;
    };
    if (command == "er") {
        spec = {"Effective rates", "rho_db", {"R_sum", "R_sum_oma"}, {}, false};
        // only the sweep dimensions separate lines
        for (const char* d : {"alpha", "mu", "omega_w", "a_s", "theta"}) {
            const std::size_t col = table.column(d);
            for (const auto& r : table.rows)
                if (r[col] != table.rows.front()[col]) {
                    spec.group_columns.emplace_back(d);
                    break;
                }
        }
    } else if (command == "dvp") {
        spec = {"Delay violation probability", "vartheta", {"bound", "empirical_p"}, {}, true};
        spec.group_columns = groups({"vartheta", "bound", "minimizer_s", "feasible", "empirical_p",
                                     "ci_low", "ci_high"});
    } else if (command == "approx") {
        spec = {"Sum effective rate approximations", "rho_db",
                {"exact_sum", "high_snr_sum", "low_snr_sum", "ergodic_sum"}, {}, false};
        spec.group_columns = groups({"rho_db", "exact_sum", "high_snr_sum", "low_snr_sum",
                                     "ergodic_sum", "rate_loss", "ebn0_min_s", "ebn0_min_w",
                                     "slope_s", "slope_w"});
    } else if (command == "power") {
        spec = {"Best strong-user power share", "rho_db", {"best_a_s"}, {}, false};
        spec.group_columns = groups({"rho_db", "best_a_s", "best_sum_er"});
    } else {
        throw std::invalid_argument("unknown command");
    }
    return spec;
}

}  // namespace noma::cli
