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

#ifndef NOMA_ERROR_HPP
#define NOMA_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace noma {

enum class ErrorKind {
    invalid_channel,
    invalid_argument,
    unbounded_at_origin,
    unsupported_order,
    pole,
    contour_failure,
    non_convergence,
    validity_violation,
    degenerate,
    empty_grid,
    strategy_failure,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_channel: return "invalid-channel";
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::unbounded_at_origin: return "unbounded-at-origin";
        case ErrorKind::unsupported_order: return "unsupported-order";
        case ErrorKind::pole: return "pole";
        case ErrorKind::contour_failure: return "contour-failure";
        case ErrorKind::non_convergence: return "non-convergence";
        case ErrorKind::validity_violation: return "validity-violation";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::empty_grid: return "empty-grid";
        case ErrorKind::strategy_failure: return "strategy-failure";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by adaptive routines; keeps the last two estimates for diagnosis.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double previous, double last)
        : Error(ErrorKind::non_convergence,
                what + " (last estimates " + std::to_string(previous) + ", " +
                    std::to_string(last) + ")"),
          previous_(previous),
          last_(last) {}

    double previous_estimate() const noexcept { return previous_; }
    double last_estimate() const noexcept { return last_; }

private:
    double previous_;
    double last_;
};

namespace detail {

inline void require(bool condition, ErrorKind kind, const char* message) {
    if (!condition) throw Error(kind, message);
}

}  // namespace detail

}  // namespace noma

#endif  // NOMA_ERROR_HPP
