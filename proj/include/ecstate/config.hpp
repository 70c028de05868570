// config.hpp: Run configuration read from INI-style key = value files
//
//   [model]     sites, length, dispersion (tight_binding | quadratic),
//               dispersion_parameter, cutoff, omega
//   [couplings] <signed offset> = re,im     (g_{-q} = conj(g_q) required)
//   [ecs]       <signed offset> = re,im     (optional; defaults to the couplings)
//   [time]      t0, t_end, steps
//   [run]       k0, strategy, position_grid, tolerance, seed, output_stride, sweep_points

#pragma once

#include "ecstate/dynamics.hpp"
#include "ecstate/hilbert.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecstate::cli {

// Any problem with the configuration itself (exit status 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    int sites{5};
    double length{5.0};
    std::string dispersion{"tight_binding"};
    double dispersion_parameter{1.0};
    int cutoff{16};
    double omega{1.0};

    std::map<int, Complex> couplings;   // keyed by signed offset
    std::map<int, Complex> ecs;         // empty: use couplings

    double t0{0.0};
    double t_end{5.0};
    int steps{5000};

    int k0{0};                          // signed momentum number
    std::string strategy{"recoil_phase"};
    int position_grid{5};
    double tolerance{1e-6};
    std::uint64_t seed{1};
    int output_stride{50};
    int sweep_points{4};

    Model model() const;
    int k0_index() const;
    CoefficientSet coupling_values() const;
    dynamics::CouplingSet coupling_set() const;
    CoefficientSet ecs_coefficients() const;
    TimeGrid time_grid() const;
    // "all" expands to both strategies.
    std::vector<std::string> strategies() const;
};

// Throws ConfigError with a diagnostic naming the offending key.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Checks indices, Hermiticity, strategy names and the truncation rule.
void validate(const RunConfig& config);

// Fully resolved configuration in the same format (round-trips through parse_config).
void write_config(const RunConfig& config, std::ostream& out);

Complex parse_complex(const std::string& text);
std::string format_complex(Complex z);

}  // namespace ecstate::cli
