#include "ecstate/config.hpp"

#include "ecstate/ecs.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ecstate::cli {

namespace pt = boost::property_tree;

namespace {

const char* const kStrategies[] = {"static_unit", "recoil_phase"};

template <typename T>
T get_value(const pt::ptree& tree, const std::string& key, T fallback) {
    const auto node = tree.get_child_optional(key);
    if (!node) return fallback;
    const std::string text = node->get_value<std::string>();
    std::istringstream in(text);
    T value{};
    in >> value;
    if (in.fail() || !(in >> std::ws).eof()) {
        throw ConfigError("config: key '" + key + "' has invalid value '" + text + "'");
    }
    return value;
}

template <>
std::string get_value<std::string>(const pt::ptree& tree, const std::string& key, std::string fallback) {
    const auto node = tree.get_child_optional(key);
    return node ? node->get_value<std::string>() : fallback;
}

std::map<int, Complex> read_offsets(const pt::ptree& tree, const std::string& section) {
    std::map<int, Complex> out;
    const auto node = tree.get_child_optional(section);
    if (!node) return out;
    for (const auto& [key, value] : *node) {
        std::size_t used = 0;
        int offset = 0;
        try {
            offset = std::stoi(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size() || key.empty()) {
            throw ConfigError("config: [" + section + "] key '" + key + "' is not an integer offset");
        }
        try {
            out[offset] = parse_complex(value.get_value<std::string>());
        } catch (const ConfigError& e) {
            throw ConfigError("config: [" + section + "] offset " + key + ": " + e.what());
        }
    }
    return out;
}

void check_known(const pt::ptree& tree) {
    const std::map<std::string, std::vector<std::string>> known = {
        {"model", {"sites", "length", "dispersion", "dispersion_parameter", "cutoff", "omega"}},
        {"couplings", {}},
        {"ecs", {}},
        {"time", {"t0", "t_end", "steps"}},
        {"run", {"k0", "strategy", "position_grid", "tolerance", "seed", "output_stride", "sweep_points"}},
    };
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) throw ConfigError("config: unknown section [" + section + "]");
        if (it->second.empty()) continue;
        for (const auto& entry : body) {
            if (std::find(it->second.begin(), it->second.end(), entry.first) == it->second.end()) {
                throw ConfigError("config: unknown key '" + entry.first + "' in [" + section + "]");
            }
        }
    }
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

}  // namespace

Complex parse_complex(const std::string& text) {
    const auto comma = text.find(',');
    std::istringstream re_in(text.substr(0, comma));
    double re = 0.0, im = 0.0;
    re_in >> re;
    bool ok = !re_in.fail() && (re_in >> std::ws).eof();
    if (comma != std::string::npos) {
        std::istringstream im_in(text.substr(comma + 1));
        im_in >> im;
        ok = ok && !im_in.fail() && (im_in >> std::ws).eof();
    }
    if (!ok || !std::isfinite(re) || !std::isfinite(im)) {
        throw ConfigError("expected a complex number as \"re,im\", got '" + text + "'");
    }
    return {re, im};
}

std::string format_complex(Complex z) { return format_double(z.real()) + "," + format_double(z.imag()); }

Model RunConfig::model() const {
    try {
        const Lattice lattice(sites, length);
        Dispersion disp;
        if (dispersion == "tight_binding") {
            disp = Dispersion::tight_binding(dispersion_parameter);
        } else if (dispersion == "quadratic") {
            disp = Dispersion::quadratic(dispersion_parameter);
        } else {
            throw ConfigError("config: unknown dispersion '" + dispersion + "' (tight_binding or quadratic)");
        }
        return {lattice, disp, OscillatorSpec(cutoff, omega)};
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [model] ") + e.what());
    }
}

int RunConfig::k0_index() const {
    const Lattice lattice(sites, length);
    const int j = lattice.wrap(k0);
    if (lattice.signed_index(j) != k0) {
        throw ConfigError("config: [run] k0 = " + std::to_string(k0) + " lies outside the momentum window");
    }
    return j;
}

CoefficientSet RunConfig::coupling_values() const {
    try {
        return {Lattice(sites, length), couplings};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [couplings] ") + e.what());
    }
}

dynamics::CouplingSet RunConfig::coupling_set() const {
    try {
        return {Lattice(sites, length), coupling_values()};
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [couplings] ") + e.what());
    }
}

CoefficientSet RunConfig::ecs_coefficients() const {
    if (ecs.empty()) return coupling_values();
    try {
        return {Lattice(sites, length), ecs};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [ecs] ") + e.what());
    }
}

TimeGrid RunConfig::time_grid() const {
    try {
        return {t0, t_end, steps};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [time] ") + e.what());
    }
}

std::vector<std::string> RunConfig::strategies() const {
    if (strategy == "all") return {std::begin(kStrategies), std::end(kStrategies)};
    return {strategy};
}

void validate(const RunConfig& config) {
    const Model model = config.model();
    config.k0_index();
    const auto couplings = config.coupling_set();
    const CoefficientSet h = config.ecs_coefficients();
    config.time_grid();

    if (config.strategy != "all" &&
        std::find(std::begin(kStrategies), std::end(kStrategies), config.strategy) == std::end(kStrategies)) {
        throw ConfigError("config: [run] unknown strategy '" + config.strategy +
                          "' (static_unit, recoil_phase or all)");
    }
    if (config.position_grid < 2 || config.position_grid > config.sites) {
        throw ConfigError("config: [run] position_grid must lie in 2..sites");
    }
    if (!(config.tolerance > 0.0)) throw ConfigError("config: [run] tolerance must be positive");
    if (config.output_stride < 1) throw ConfigError("config: [run] output_stride must be >= 1");
    if (config.sweep_points < 3) throw ConfigError("config: [run] sweep_points must be >= 3");

    try {
        check_truncation(model.oscillator, couplings.total_magnitude(), ecs::kDefaultTruncationTol);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [couplings] ") + e.what());
    }
    try {
        check_truncation(model.oscillator, h.total_amplitude(), ecs::kDefaultTruncationTol);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [ecs] ") + e.what());
    }
}

RunConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    check_known(tree);

    RunConfig c;
    c.sites = get_value(tree, "model.sites", c.sites);
    c.length = get_value(tree, "model.length", c.length);
    c.dispersion = get_value<std::string>(tree, "model.dispersion", c.dispersion);
    c.dispersion_parameter = get_value(tree, "model.dispersion_parameter", c.dispersion_parameter);
    c.cutoff = get_value(tree, "model.cutoff", c.cutoff);
    c.omega = get_value(tree, "model.omega", c.omega);
    c.couplings = read_offsets(tree, "couplings");
    c.ecs = read_offsets(tree, "ecs");
    c.t0 = get_value(tree, "time.t0", c.t0);
    c.t_end = get_value(tree, "time.t_end", c.t_end);
    c.steps = get_value(tree, "time.steps", c.steps);
    c.k0 = get_value(tree, "run.k0", c.k0);
    c.strategy = get_value<std::string>(tree, "run.strategy", c.strategy);
    c.position_grid = get_value(tree, "run.position_grid", c.position_grid);
    c.tolerance = get_value(tree, "run.tolerance", c.tolerance);
    c.seed = get_value(tree, "run.seed", c.seed);
    c.output_stride = get_value(tree, "run.output_stride", c.output_stride);
    c.sweep_points = get_value(tree, "run.sweep_points", c.sweep_points);
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in);
}

void write_config(const RunConfig& c, std::ostream& out) {
    out << "[model]\n"
        << "sites = " << c.sites << "\n"
        << "length = " << format_double(c.length) << "\n"
        << "dispersion = " << c.dispersion << "\n"
        << "dispersion_parameter = " << format_double(c.dispersion_parameter) << "\n"
        << "cutoff = " << c.cutoff << "\n"
        << "omega = " << format_double(c.omega) << "\n\n[couplings]\n";
    for (const auto& [q, g] : c.couplings) out << q << " = " << format_complex(g) << "\n";
    if (!c.ecs.empty()) {
        out << "\n[ecs]\n";
        for (const auto& [q, h] : c.ecs) out << q << " = " << format_complex(h) << "\n";
    }
    out << "\n[time]\n"
        << "t0 = " << format_double(c.t0) << "\n"
        << "t_end = " << format_double(c.t_end) << "\n"
        << "steps = " << c.steps << "\n\n[run]\n"
        << "k0 = " << c.k0 << "\n"
        << "strategy = " << c.strategy << "\n"
        << "position_grid = " << c.position_grid << "\n"
        << "tolerance = " << format_double(c.tolerance) << "\n"
        << "seed = " << c.seed << "\n"
        << "output_stride = " << c.output_stride << "\n"
        << "sweep_points = " << c.sweep_points << "\n";
}

}  // namespace ecstate::cli
