// cli.hpp: Subcommands behind the ecstate executable
//
// Every command writes delimited text files into an output directory, with
// run metadata on '#' lines only, plus the resolved configuration
// (resolved_config.ini). Exit status: 0 all checks pass, 1 a check failed,
// 2 configuration error.

#pragma once

#include "ecstate/config.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ecstate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

struct Overrides {
    std::optional<double> tolerance;
    std::optional<std::string> strategy;
    std::optional<std::uint64_t> seed;
};

// Applies command-line overrides and re-validates.
RunConfig apply_overrides(RunConfig config, const Overrides& overrides);

struct PropertyLine {
    std::string id;         // fixed check identifier: "2", "3/7", "4", ...
    std::string name;
    double residual{0.0};
    double tolerance{0.0};
    bool pass() const { return residual < tolerance; }
};

// The algebraic property suite on the configured model and ECS coefficients.
std::vector<PropertyLine> property_suite(const RunConfig& config);

int cmd_properties(const RunConfig& config, const std::string& out_dir, std::ostream& log);
int cmd_evolve(const RunConfig& config, const std::string& out_dir, std::ostream& log);
int cmd_gamma(const RunConfig& config, const std::string& out_dir, std::ostream& log);
int cmd_sweep(const RunConfig& config, const std::string& out_dir, std::ostream& log);

}  // namespace ecstate::cli
