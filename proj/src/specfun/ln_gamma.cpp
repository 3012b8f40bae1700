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

#include <cmath>
#include <complex>
#include <numbers>

#include "noma/error.hpp"
#include "noma/specfun.hpp"

namespace noma {

namespace {

constexpr double kShiftTo = 15.0;

// B_{2k} / (2k (2k - 1)) for k = 1..8.
constexpr double kStirling[] = {
    1.0 / 12.0,       -1.0 / 360.0,         1.0 / 1260.0,       -1.0 / 1680.0,
    1.0 / 1188.0,     -691.0 / 360360.0,    1.0 / 156.0,        -3617.0 / 122400.0,
};

std::complex<double> stirling(std::complex<double> z) {
    const std::complex<double> inv = 1.0 / z;
    const std::complex<double> inv2 = inv * inv;
    std::complex<double> series = 0.0;
    std::complex<double> power = inv;
    for (double c : kStirling) {
        series += c * power;
        power *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

}  // namespace

std::complex<double> ln_gamma(std::complex<double> z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw Error(ErrorKind::pole, "log-gamma pole at a nonpositive integer");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error(ErrorKind::invalid_argument, "log-gamma of a non-finite argument");
    // loggamma(z) = loggamma(z + 1) - log(z) holds on the principal branch,
    // so the shift keeps the branch as long as each log is principal.
    std::complex<double> shift = 0.0;
    while (z.real() < kShiftTo) {
        shift += std::log(z);
        z += 1.0;
    }
    return stirling(z) - shift;
}

}  // namespace noma
