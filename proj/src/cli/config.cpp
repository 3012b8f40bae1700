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

#include "noma/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "noma/error.hpp"
#include "noma/sim.hpp"
#include "noma/snc.hpp"

namespace noma::cli {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"channel", {"alpha", "mu", "omega_s", "omega_w"}},
        {"system", {"a_s", "rho_db", "theta", "tb", "strategy", "r_target"}},
        {"snc",
         {"n", "lambda", "lambda_unit", "lambda_scale", "s_min", "s_max", "s_points", "s_tol",
          "max_delay"}},
        {"sim", {"seed", "draws", "slots", "batches", "enabled"}},
        {"output", {"path", "format"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void check_key(const std::string& key, int line) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw ConfigError(line, key, "expected section.key");
    const auto it = known_keys().find(key.substr(0, dot));
    if (it == known_keys().end()) throw ConfigError(line, key, "unknown section");
    if (!it->second.count(key.substr(dot + 1))) throw ConfigError(line, key, "unknown key");
}

double parse_double(const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
        throw std::invalid_argument("not a finite number: '" + t + "'");
    return v;
}

std::vector<double> expand_range(const std::string& item) {
    std::vector<std::string> parts;
    std::stringstream ss(item);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
    const double start = parse_double(parts[0]);
    const double stop = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (start == stop) return {start};
    if (step == 0.0 || (stop - start) / step < 0.0)
        throw std::invalid_argument("range step does not move from start to stop");
    const double count = std::floor((stop - start) / step + 1e-9);
    if (count > 1e6) throw std::invalid_argument("range has too many points");
    std::vector<double> out;
    for (int i = 0; i <= static_cast<int>(count); ++i) {
        // snap to 12 significant digits so 0.1 steps do not drift
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", start + i * step);
        out.push_back(std::strtod(buf, nullptr));
    }
    return out;
}

const RawEntry* find(const RawConfig& raw, const std::string& key) {
    const auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
}

template <class Fn>
auto typed(const RawConfig& raw, const std::string& key, Fn fn) -> decltype(fn(std::string{})) {
    const RawEntry* e = find(raw, key);
    try {
        return fn(e->value);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError(e->line, key, ex.what());
    }
}

int to_int(double v) {
    if (v != std::floor(v) || std::abs(v) > 1e9) throw std::invalid_argument("expected an integer");
    return static_cast<int>(v);
}

std::uint64_t to_count(const std::string& text) {
    const double v = parse_double(text);
    if (v < 1.0 || v != std::floor(v) || v > 1e15)
        throw std::invalid_argument("expected a positive integer");
    return static_cast<std::uint64_t>(v);
}

int line_of(const RawConfig& raw, const std::string& key) {
    const RawEntry* e = find(raw, key);
    return e ? e->line : 0;
}

}  // namespace

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error(message), line_(line), field_(std::move(field)) {}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty list item");
        if (item.find(':') != std::string::npos) {
            const auto r = expand_range(item);
            out.insert(out.end(), r.begin(), r.end());
        } else {
            out.push_back(parse_double(item));
        }
    }
    if (out.empty()) throw std::invalid_argument("list is empty");
    return out;
}

RawConfig parse_config_text(const std::string& text) {
    RawConfig raw;
    std::stringstream in(text);
    std::string section;
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, line, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_keys().count(section)) throw ConfigError(line_no, section, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, line, "expected key = value");
        if (section.empty()) throw ConfigError(line_no, trim(line.substr(0, eq)), "key outside a section");
        const std::string key = section + "." + trim(line.substr(0, eq));
        check_key(key, line_no);
        if (raw.count(key)) throw ConfigError(line_no, key, "duplicate key");
        raw[key] = RawEntry{trim(line.substr(eq + 1)), line_no};
    }
    return raw;
}

RawConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, path, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void set_value(RawConfig& raw, const std::string& key, const std::string& value) {
    check_key(key, 0);
    raw[key] = RawEntry{trim(value), 0};
}

void apply_override(RawConfig& raw, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(0, assignment, "override must be section.key=value");
    set_value(raw, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

SweepConfig build_config(const RawConfig& raw) {
    SweepConfig c;
    auto has = [&](const char* key) { return find(raw, key) != nullptr; };
    auto list = [&](const char* key) { return typed(raw, key, parse_number_list); };
    auto scalar = [&](const char* key) { return typed(raw, key, parse_double); };
    auto int_list = [&](const char* key) {
        return typed(raw, key, [](const std::string& s) {
            std::vector<int> out;
            for (double v : parse_number_list(s)) out.push_back(to_int(v));
            return out;
        });
    };
    auto integer = [&](const char* key) {
        return typed(raw, key, [](const std::string& s) { return to_int(parse_double(s)); });
    };
    auto count = [&](const char* key) { return typed(raw, key, to_count); };

    if (has("channel.alpha")) c.alpha = int_list("channel.alpha");
    if (has("channel.mu")) c.mu = int_list("channel.mu");
    if (has("channel.omega_s")) c.omega_s = scalar("channel.omega_s");
    if (has("channel.omega_w")) c.omega_w = list("channel.omega_w");

    if (has("system.a_s")) c.a_s = list("system.a_s");
    if (has("system.rho_db")) c.rho_db = list("system.rho_db");
    if (has("system.theta")) c.theta = list("system.theta");
    if (has("system.tb")) c.tb = scalar("system.tb");
    if (has("system.r_target")) c.r_target = scalar("system.r_target");
    if (has("system.strategy")) {
        c.strategy = typed(raw, "system.strategy", [](const std::string& s) {
            for (Strategy st : {Strategy::closed_form, Strategy::quadrature, Strategy::monte_carlo})
                if (s == to_string(st)) return st;
            throw std::invalid_argument("expected closed-form, quadrature or monte-carlo");
        });
    }

    if (has("snc.n")) c.n = integer("snc.n");
    if (has("snc.lambda")) c.lambda = list("snc.lambda");
    if (has("snc.lambda_scale")) c.lambda_scale = scalar("snc.lambda_scale");
    if (has("snc.lambda_unit")) {
        c.lambda_unit = typed(raw, "snc.lambda_unit", [](const std::string& s) {
            if (s == "bits-per-slot") return LambdaUnit::bits_per_slot;
            if (s == "service-fraction") return LambdaUnit::service_fraction;
            throw std::invalid_argument("expected bits-per-slot or service-fraction");
        });
    }
    if (has("snc.s_min")) c.s_min = scalar("snc.s_min");
    if (has("snc.s_max")) c.s_max = scalar("snc.s_max");
    if (has("snc.s_points")) c.s_points = integer("snc.s_points");
    if (has("snc.s_tol")) c.s_tol = scalar("snc.s_tol");
    if (has("snc.max_delay")) c.max_delay = integer("snc.max_delay");

    if (has("sim.seed")) {
        c.seed = typed(raw, "sim.seed", [](const std::string& s) {
            const std::string t = trim(s);
            std::uint64_t v = 0;
            const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
            if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
                throw std::invalid_argument("expected an unsigned 64-bit integer");
            return v;
        });
    }
    if (has("sim.draws")) c.draws = count("sim.draws");
    if (has("sim.slots")) c.slots = count("sim.slots");
    if (has("sim.batches")) c.batches = integer("sim.batches");
    if (has("sim.enabled")) {
        c.simulate = typed(raw, "sim.enabled", [](const std::string& s) {
            if (s == "true" || s == "yes" || s == "1") return true;
            if (s == "false" || s == "no" || s == "0") return false;
            throw std::invalid_argument("expected true or false");
        });
    }

    if (has("output.path")) {
        c.path = find(raw, "output.path")->value;
        if (c.path.empty()) throw ConfigError(line_of(raw, "output.path"), "output.path", "empty path");
    }
    if (has("output.format")) {
        c.format = typed(raw, "output.format", [](const std::string& s) {
            if (s == "csv") return OutputFormat::csv;
            if (s == "svg") return OutputFormat::svg;
            throw std::invalid_argument("expected csv or svg");
        });
    }

    // Run every combination through the library constructors so bad values
    // are reported against the field that holds them.
    auto guard = [&](const char* key, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            throw ConfigError(line_of(raw, key), key, e.what());
        }
    };
    for (int a : c.alpha)
        for (int m : c.mu)
            guard("channel.alpha", [&] { AlphaMuChannel(a, m, c.omega_s); });
    for (int a : c.alpha)
        for (int m : c.mu)
            for (double w : c.omega_w)
                guard("channel.omega_w", [&] {
                    ChannelPair(AlphaMuChannel(a, m, c.omega_s), AlphaMuChannel(a, m, w));
                });
    const ChannelPair probe(AlphaMuChannel(c.alpha.front(), c.mu.front(), c.omega_s),
                            AlphaMuChannel(c.alpha.front(), c.mu.front(), c.omega_w.front()));
    for (double t : c.theta) guard("system.theta", [&] { DelayQos(t, c.tb); });
    guard("system.tb", [&] { DelayQos(c.theta.front(), c.tb); });
    for (double a : c.a_s)
        guard("system.a_s", [&] { NomaSystem(probe, a, 1.0, DelayQos(c.theta.front(), c.tb)); });
    if (!(c.r_target > 0.0)) throw ConfigError(line_of(raw, "system.r_target"), "system.r_target", "must be > 0");
    const NomaSystem sys(probe, c.a_s.front(), 1.0, DelayQos(c.theta.front(), c.tb));
    guard("snc.n", [&] { SncConfig(sys, c.n, 1.0); });
    for (double l : c.lambda)
        guard("snc.lambda", [&] { SncConfig(sys, c.n, l * c.lambda_scale); });
    guard("snc.s_min", [&] { SncConfig(sys, c.n, 1.0, SSearch{c.s_min, c.s_max, c.s_points, c.s_tol}); });
    if (c.lambda_unit == LambdaUnit::service_fraction)
        for (double l : c.lambda)
            if (!(l * c.lambda_scale < 1.0))
                throw ConfigError(line_of(raw, "snc.lambda"), "snc.lambda",
                                  "a service fraction must be below 1");
    if (c.max_delay < 1) throw ConfigError(line_of(raw, "snc.max_delay"), "snc.max_delay", "must be >= 1");
    guard("sim.batches", [&] { SimPlan{c.seed, c.draws, c.batches, 1}.validate(); });
    guard("sim.slots", [&] { SimPlan{c.seed, c.slots, c.batches, 1}.validate(); });
    return c;
}

}  // namespace noma::cli
