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

// noma_effrate: parameter sweeps for two-user downlink NOMA over alpha-mu
// fading. See README.md for the config grammar and the CSV schemas.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "noma/cli/commands.hpp"
#include "noma/cli/config.hpp"
#include "noma/error.hpp"

namespace {

enum Exit { ok = 0, compute_failure = 1, usage_failure = 2, io_failure = 3 };

// One line on stderr: "error: <kind>: <detail>".
int fail(Exit code, const std::string& kind, const std::string& detail) {
    std::string flat = detail;
    for (char& ch : flat)
        if (ch == '\n' || ch == '\r') ch = ' ';
    std::cerr << "error: " << kind << ": " << flat << '\n';
    return code;
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("noma_effrate");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("NOMA_EFFRATE_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only accept real names
        if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    }
}

struct Options {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> format;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    std::optional<double> lambda_scale;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "Sweep config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "Output path ('-' for stdout)");
    cmd->add_option("--format", o.format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));
    cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Simulation seed");
    cmd->add_option("--lambda-scale", o.lambda_scale, "Multiplier applied to every lambda value");
    cmd->add_option("--set", o.overrides, "Override a config value: section.key=value");
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Effective rate and delay-violation sweeps for downlink NOMA over alpha-mu fading"};
    app.require_subcommand(1);
    Options o;
    const std::vector<std::string> commands = {"er", "dvp", "approx", "power"};
    const std::vector<std::string> blurbs = {
        "Effective rates of both users, NOMA and OMA sums",
        "Delay-violation bound and queue simulation per delay target",
        "High- and low-SNR approximations, ergodic sum and rate loss",
        "Grid search of the strong-user power share"};
    for (std::size_t i = 0; i < commands.size(); ++i) add_common(app.add_subcommand(commands[i], blurbs[i]), o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(usage_failure, "usage", e.what());
    }
    const std::string command = app.get_subcommands().front()->get_name();

    noma::cli::SweepConfig cfg;
    try {
        noma::cli::RawConfig raw;
        if (!o.config.empty()) raw = noma::cli::load_config_file(o.config);
        for (const auto& s : o.overrides) noma::cli::apply_override(raw, s);
        if (o.out) noma::cli::set_value(raw, "output.path", *o.out);
        if (o.format) noma::cli::set_value(raw, "output.format", *o.format);
        if (o.seed) noma::cli::set_value(raw, "sim.seed", std::to_string(*o.seed));
        if (o.lambda_scale) {
            std::ostringstream ss;
            ss.precision(17);
            ss << *o.lambda_scale;
            noma::cli::set_value(raw, "snc.lambda_scale", ss.str());
        }
        cfg = noma::cli::build_config(raw);
    } catch (const noma::cli::ConfigError& e) {
        const std::string where = o.config.empty() ? "flags" : o.config;
        return fail(usage_failure, "config",
                    where + ":" + std::to_string(e.line()) + ": " + e.field() + ": " + e.what());
    }
    spdlog::info("running {} with {} job(s)", command, o.jobs);

    noma::cli::Table table;
    try {
        if (command == "er") table = noma::cli::cmd_er_sweep(cfg, o.jobs);
        else if (command == "dvp") table = noma::cli::cmd_dvp(cfg, o.jobs);
        else if (command == "approx") table = noma::cli::cmd_approx(cfg, o.jobs);
        else table = noma::cli::cmd_power_search(cfg, o.jobs);
    } catch (const noma::Error& e) {
        return fail(compute_failure, std::string(noma::to_string(e.kind())), e.what());
    } catch (const std::exception& e) {
        return fail(compute_failure, "internal", e.what());
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (cfg.path != "-") {
        file.open(cfg.path, std::ios::binary);
        if (!file) return fail(io_failure, "io", "cannot open " + cfg.path);
        out = &file;
    }
    if (cfg.format == noma::cli::OutputFormat::csv)
        noma::cli::write_csv(*out, table);
    else
        noma::cli::write_svg(*out, table, noma::cli::chart_for(command, table));
    out->flush();
    if (!*out) return fail(io_failure, "io", "write failed for " + cfg.path);
    spdlog::info("wrote {} rows", table.rows.size());
    return ok;
}
