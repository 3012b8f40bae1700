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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "noma/error.hpp"
#include "noma/snc.hpp"
#include "oracles.hpp"

using namespace noma;

namespace {

const double kOmegaW01 = std::sqrt(0.1);

NomaSystem make_sys(int alpha, int mu, double a_s, double rho_db, double theta = 0.5) {
    return NomaSystem(ChannelPair(AlphaMuChannel(alpha, mu, 1.0), AlphaMuChannel(alpha, mu, kOmegaW01)), a_s,
                      db_to_linear(rho_db), DelayQos(theta));
}

// Mean service per slot in bits.
double mean_service(const NomaSystem& sys, User u, int n) { return n * ergodic_rate(sys, u).value; }

SncConfig at_load(const NomaSystem& sys, User u, double load, int n = 168) {
    return SncConfig(sys, n, load * mean_service(sys, u, n));
}

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::degenerate;
}

}  // namespace

TEST(SncConfig, Validation) {
    const auto sys = make_sys(2, 1, 0.24, 10);
    EXPECT_EQ(kind_of([&] { SncConfig(sys, 0, 1.0); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([&] { SncConfig(sys, 168, 0.0); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([&] { SncConfig(sys, 168, 1.0, SSearch{0.0, 5.0, 200, 1e-6}); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([&] { SncConfig(sys, 168, 1.0, SSearch{1.0, 0.5, 200, 1e-6}); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([&] { SncConfig(sys, 168, 1.0, SSearch{1e-6, INFINITY, 200, 1e-6}); }),
              ErrorKind::invalid_argument);
    const SncConfig c(sys, 168, 2.0);
    EXPECT_DOUBLE_EQ(c.varpi(0.01), 1.68 / std::numbers::ln2);
    EXPECT_EQ(c.with_arrival_rate(3.0).arrival_rate(), 3.0);
}

TEST(MellinStrong, SmallSGivesOne) {
    const SncConfig c(make_sys(3, 2, 0.24, 10), 168, 100.0);
    EXPECT_NEAR(mellin_strong(c, 1e-12).value, 1.0, 1e-9);
    EXPECT_EQ(kind_of([&] { mellin_strong(c, 0.0); }), ErrorKind::invalid_argument);
}

TEST(MellinStrong, RayleighIncompleteGamma) {
    const auto sys = make_sys(2, 1, 0.24, 10);
    const SncConfig c(sys, 168, 100.0);
    for (double s : {1e-4, 0.003, 0.01, 0.05}) {
        const double ref = oracle::rayleigh_mellin(0.24 * sys.rho(), c.varpi(s));
        const auto q = mellin_strong(c, s), cf = mellin_strong(c, s, Strategy::closed_form);
        EXPECT_LT(oracle::rel_diff(q.value, ref), 1e-10) << s;
        EXPECT_LT(oracle::rel_diff(cf.value, ref), 1e-6) << s;
        EXPECT_EQ(cf.strategy, Strategy::closed_form);
        EXPECT_DOUBLE_EQ(q.varpi, c.varpi(s));
        EXPECT_NEAR(q.log_value, std::log(q.value), 1e-12);
    }
}

TEST(MellinStrong, StrategiesAgree) {
    for (int a = 1; a <= 3; ++a)
        for (int m = 1; m <= 3; ++m) {
            const SncConfig c(make_sys(a, m, 0.24, 10), 168, 100.0);
            for (double s : {0.002, 0.02})
                EXPECT_LT(oracle::rel_diff(mellin_strong(c, s).value, mellin_strong(c, s, Strategy::closed_form).value),
                          1e-6)
                    << a << "," << m << " s=" << s;
        }
}

TEST(MellinWeak, SmallSGivesOne) {
    const SncConfig c(make_sys(2, 2, 0.24, 10), 168, 100.0);
    EXPECT_NEAR(mellin_weak(c, 1e-12).value, 1.0, 1e-9);
}

TEST(MellinWeak, HighSnrSaturation) {
    const SncConfig c(make_sys(2, 2, 0.24, 120), 168, 100.0);
    for (double s : {0.001, 0.01}) {
        const double lim = std::pow(1 + 0.76 / 0.24, -c.varpi(s));
        EXPECT_LT(oracle::rel_diff(mellin_weak(c, s).value, lim), 1e-6) << s;
    }
}

TEST(MellinWeak, MatchesIndependentMonteCarlo) {
    const auto sys = make_sys(2, 1, 0.2, 10);
    const SncConfig c(sys, 168, 100.0);
    const double varpi = c.varpi(0.01), rho = sys.rho();
    std::mt19937_64 rng(77);
    std::exponential_distribution<double> es(1.0), ew(1.0 / 0.1);
    std::vector<double> k(10'000'000);
    for (double& v : k) {
        const double g = std::min(es(rng), ew(rng));
        v = std::pow(1 + 0.8 * rho * g / (0.2 * rho * g + 1), -varpi);
    }
    const auto ms = oracle::mean_se(k);
    EXPECT_LT(std::abs(mellin_weak(c, 0.01).value - ms.mean), 3 * ms.se);
}

TEST(MellinWeak, FoxStrategyAgrees) {
    for (auto [a, m] : {std::pair{2, 1}, {2, 2}, {3, 1}, {1, 2}}) {
        const SncConfig c(make_sys(a, m, 0.24, 10), 168, 100.0);
        for (double s : {0.002, 0.013}) {
            const auto q = mellin_weak(c, s), f = mellin_weak(c, s, Strategy::closed_form);
            EXPECT_LT(oracle::rel_diff(q.value, f.value), 1e-4) << a << "," << m << " s=" << s;
        }
    }
}

TEST(Mellin, InUnitIntervalAndDecreasing) {
    for (auto [a, m] : {std::pair{1, 1}, {2, 1}, {2, 3}, {4, 2}}) {
        const SncConfig c(make_sys(a, m, 0.24, 10), 168, 100.0);
        for (User u : {User::strong, User::weak}) {
            double prev = 1.0;
            for (double s = 1e-5; s < 5; s *= 2) {
                const double v = mellin(c, u, s).value;
                EXPECT_GT(v, 0.0);
                EXPECT_LT(v, prev) << a << "," << m << " s=" << s;
                prev = v;
            }
        }
    }
}

TEST(Mellin, ZeroSnrIsOne) {
    const SncConfig c(make_sys(2, 1, 0.24, 10).with_rho(0.0), 168, 1.0);
    EXPECT_EQ(mellin(c, User::weak, 0.1).value, 1.0);
}

TEST(DvpBound, NonincreasingInDelayAndAtMostOne) {
    const auto sys = make_sys(2, 1, 0.24, 10);
    for (User u : {User::strong, User::weak}) {
        const auto c = at_load(sys, u, 0.7);
        double prev = 1.0;
        for (int t = 0; t <= 30; ++t) {
            const auto b = dvp_bound(c, u, t);
            EXPECT_TRUE(b.feasible);
            EXPECT_LE(b.bound, prev);
            EXPECT_GE(b.bound, 0.0);
            EXPECT_EQ(b.target_delay, t);
            prev = b.bound;
        }
    }
}

TEST(DvpBound, StrongUserBelowWeakUser) {
    for (auto [a, m] : {std::pair{2, 1}, {3, 1}, {2, 2}}) {
        const auto sys = make_sys(a, m, 0.24, 10);
        // one arrival rate for both users, inside the weak user's stability region
        const SncConfig c(sys, 168, 0.7 * mean_service(sys, User::weak, 168));
        for (int t : {1, 3, 5, 10, 20}) EXPECT_LE(dvp_bound(c, User::strong, t).bound, dvp_bound(c, User::weak, t).bound);
    }
}

TEST(DvpBound, InfeasibleAboveMeanService) {
    const auto sys = make_sys(2, 1, 0.24, 10);
    for (User u : {User::strong, User::weak}) {
        const auto b = dvp_bound(at_load(sys, u, 1.05), u, 5);
        EXPECT_FALSE(b.feasible);
        EXPECT_EQ(b.bound, 1.0);
        EXPECT_FALSE(b.minimizer_s.has_value());
        EXPECT_TRUE(dvp_bound(at_load(sys, u, 0.95), u, 5).feasible);
    }
}

TEST(DvpBound, VacuousValuesClampToOne) {
    const auto sys = make_sys(2, 1, 0.24, 10);
    const auto b = dvp_bound(at_load(sys, User::weak, 0.9), User::weak, 0);
    EXPECT_TRUE(b.feasible);
    EXPECT_EQ(b.bound, 1.0);
}

TEST(DvpBound, IncreasesWithArrivalRate) {
    const auto sys = make_sys(2, 2, 0.24, 10);
    for (User u : {User::strong, User::weak}) {
        const auto lo = at_load(sys, u, 0.4), hi = at_load(sys, u, 0.7);
        for (int t = 1; t <= 30; t += 3) EXPECT_LE(dvp_bound(lo, u, t).bound, dvp_bound(hi, u, t).bound) << t;
        EXPECT_LT(dvp_bound(lo, u, 6).bound, dvp_bound(hi, u, 6).bound);
    }
}

TEST(DvpBound, LogSlopeIsLogMellinAtMinimizer) {
    const auto sys = make_sys(3, 1, 0.24, 10);
    for (User u : {User::strong, User::weak}) {
        const auto c = at_load(sys, u, 0.7);
        const double t = 20.0, h = 0.01;
        const auto mid = dvp_bound(c, u, t);
        ASSERT_TRUE(mid.minimizer_s.has_value());
        const double fd = (std::log(dvp_bound(c, u, t + h).bound) - std::log(dvp_bound(c, u, t - h).bound)) / (2 * h);
        EXPECT_LT(oracle::rel_diff(fd, mellin(c, u, *mid.minimizer_s).log_value), 1e-3);
    }
}

TEST(DvpBound, MinimizerIsAnInfimum) {
    const auto sys = make_sys(2, 1, 0.24, 10);
    const auto c = at_load(sys, User::strong, 0.7);
    const double t = 12;
    const auto b = dvp_bound(c, User::strong, t);
    // brute force over a fine log grid
    double best = 1.0;
    for (double s = 1e-6; s < 5; s *= 1.002) {
        const double lm = mellin(c, User::strong, s).log_value;
        const double k = c.arrival_rate() * s + lm;
        if (k < 0) best = std::min(best, std::exp(t * lm - std::log(-std::expm1(k))));
    }
    EXPECT_LE(b.bound, best * (1 + 1e-9));
    EXPECT_GT(b.bound, best * (1 - 1e-4));
}

TEST(DvpCurve, MatchesPointwiseBounds) {
    const auto sys = make_sys(2, 2, 0.24, 10);
    const auto c = at_load(sys, User::weak, 0.6);
    std::vector<double> ts;
    for (int t = 0; t <= 30; ++t) ts.push_back(t);
    ts.push_back(7.5);
    const auto curve = dvp_curve(c, User::weak, ts);
    ASSERT_EQ(curve.size(), ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i)
        EXPECT_LT(oracle::rel_diff(curve[i].bound, dvp_bound(c, User::weak, ts[i]).bound), 1e-9) << ts[i];
    EXPECT_EQ(kind_of([&] { dvp_bound(c, User::weak, -1.0); }), ErrorKind::invalid_argument);
}

TEST(DvpBound, SteeperForMilderFading) {
    auto slope = [](int a, int m, User u) {
        const auto c = at_load(make_sys(a, m, 0.24, 10), u, 0.7);
        std::vector<double> x, y;
        for (int t = 0; t <= 30; ++t) {
            const auto b = dvp_bound(c, u, t);
            if (b.bound < 1.0) x.push_back(t), y.push_back(std::log(b.bound));
        }
        return -oracle::ls_slope(x, y);
    };
    for (User u : {User::strong, User::weak}) {
        EXPECT_LT(slope(2, 1, u), slope(3, 1, u));
        EXPECT_LT(slope(2, 1, u), slope(2, 2, u));
    }
}
