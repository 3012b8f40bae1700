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

#ifndef NOMA_SPECFUN_HPP
#define NOMA_SPECFUN_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "noma/channel.hpp"

namespace noma {

/// Principal branch of log Gamma(z). Throws ErrorKind::pole at 0, -1, -2, ...
std::complex<double> ln_gamma(std::complex<double> z);

/// G^{m,n}_{p,q}[z | a; b]. The first n entries of `a` and the first m
/// entries of `b` form the numerator groups of the Mellin-Barnes integrand
///   prod_{j<m} Gamma(b_j - s) prod_{j<n} Gamma(1 - a_j + s)
///   / (prod_{j>=m} Gamma(1 - b_j + s) prod_{j>=n} Gamma(a_j - s)) * z^s.
struct MeijerGSpec {
    std::vector<double> a;
    std::vector<double> b;
    int m = 0;
    int n = 0;

    int p() const noexcept { return static_cast<int>(a.size()); }
    int q() const noexcept { return static_cast<int>(b.size()); }
};

/// Outer (coupling) parameter of the bivariate Fox H-function:
/// Gamma(1 - a + A1 s + A2 t).
struct FoxOuterParam {
    double a;
    double A1;
    double A2;
};

/// One single-variable block with top parameter (c, gamma) and bottom
/// parameter (d, delta): Gamma(d - delta s) Gamma(1 - c + gamma s).
struct FoxInnerBlock {
    double c;
    double gamma;
    double d;
    double delta;
};

/// Bivariate Fox H-function with one outer parameter of the "n" kind and two
/// (1,1:1,1) inner blocks, integrand
///   Gamma(1 - a + A1 s + A2 t) * block1(s) * block2(t) * z1^s z2^t,
/// divided by (2 pi i)^2 and integrated over two Barnes contours.
struct FoxH2Spec {
    FoxOuterParam outer;
    FoxInnerBlock first;
    FoxInnerBlock second;

    /// The H(varpi, y) kernel of the weak-user Mellin transform:
    /// outer (1 - (mu + y); 2/alpha, 2/alpha), first block (1 - varpi, 1; 0, 1),
    /// second block (1 + varpi, 1; 0, 1).
    static FoxH2Spec weak_user(double varpi, int y, int alpha, int mu);
};

/// Controls for the contour quadrature.
///
/// `offsets` fixes the real part of each contour (one value per variable);
/// empty means automatic placement. Poles of a numerator family that end up
/// on the wrong side of a line are picked up as residues, so any offset that
/// avoids the poles themselves is admissible. `half_height` is the initial
/// truncation height and `nodes` the initial node count along it; both grow
/// until the tail and the step-halving error drop below `tolerance`.
struct ContourConfig {
    std::vector<double> offsets;
    double half_height = 8.0;
    int nodes = 64;
    double tolerance = 1e-10;
};

struct ContourEstimate {
    double value = 0.0;
    double error = 0.0;
    std::vector<double> offsets;
    std::size_t evaluations = 0;
};

ContourEstimate meijer_g(const MeijerGSpec& spec, double z, const ContourConfig& cfg = {});

/// exp(log_factor) * G, without forming G itself (G alone may overflow).
ContourEstimate meijer_g(const MeijerGSpec& spec, double z, const ContourConfig& cfg,
                         double log_factor);

ContourEstimate fox_h2(const FoxH2Spec& spec, double z1, double z2, const ContourConfig& cfg = {});

/// exp(log_factor) * H, scaled the same way.
ContourEstimate fox_h2(const FoxH2Spec& spec, double z1, double z2, const ContourConfig& cfg,
                       double log_factor);

// ---------------------------------------------------------------------------
// Expectations against a unit Gamma(shape) weight.

struct QuadEstimate {
    double value = 0.0;
    double error = 0.0;
    std::size_t nodes = 0;
};

/// E[f(Y)], Y ~ Gamma(shape, 1), by the trapezoid rule in t = ln y with
/// step halving until the relative change is below rel_tol.
QuadEstimate gamma_expectation(double shape, const std::function<double(double)>& f,
                               double rel_tol = 1e-13);

/// log E[exp(log_f(Y))]; for integrands whose magnitude over- or underflows.
QuadEstimate gamma_log_expectation(double shape, const std::function<double(double)>& log_f,
                                   double rel_tol = 1e-13);

/// Gauss-Laguerre rule for the weight y^{shape-1} e^{-y} / Gamma(shape),
/// so the weights sum to one. Rules are built once and cached.
struct LaguerreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const LaguerreRule& laguerre_rule(double shape, int order);

inline constexpr int kLaguerreMaxOrder = 1024;

/// E[kernel(g)] for one link, starting at `order` and doubling until two
/// successive estimates agree to 1e-9 relative.
double laguerre_expectation(const AlphaMuChannel& ch, const std::function<double(double)>& kernel,
                            int order = 16);

/// E[kernel(g_min)]: each Gamma branch of the minimum-gain density is
/// integrated with its own rule and the results are mixed.
double laguerre_expectation(const ChannelPair& pair, const std::function<double(double)>& kernel,
                            int order = 16);

}  // namespace noma

#endif  // NOMA_SPECFUN_HPP
