#include "ecstate/cli.hpp"

#include "ecstate/dynamics.hpp"
#include "ecstate/ecs.hpp"
#include "ecstate/observables.hpp"
#include "ecstate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <sstream>

namespace ecstate::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return out;
}

void write_resolved(const RunConfig& config, const std::string& dir) {
    auto out = open_output(dir, "resolved_config.ini");
    write_config(config, out);
}

void write_header(std::ostream& out, const std::string& command, const RunConfig& c) {
    out << "# ecstate " << command << "\n"
        << "# model: sites=" << c.sites << " length=" << num(c.length) << " dispersion=" << c.dispersion << "("
        << num(c.dispersion_parameter) << ") cutoff=" << c.cutoff << " omega=" << num(c.omega) << "\n"
        << "# run: k0=" << c.k0 << " t0=" << num(c.t0) << " t_end=" << num(c.t_end) << " steps=" << c.steps
        << " seed=" << c.seed << "\n";
}

double max_commutator(const CMatrix& a, const CMatrix& b) { return (a * b - b * a).norm(); }

// Largest single-mode amplitude in {1, 3/4, 1/2, 1/4} the cutoff can hold.
double allowed_radius(const Model& model) {
    for (double r : {1.0, 0.75, 0.5, 0.25}) {
        try {
            check_truncation(model.oscillator, r, ecs::kDefaultTruncationTol);
            return r;
        } catch (const std::invalid_argument&) {
        }
    }
    return 0.125;
}

std::string require_single_strategy(const RunConfig& config, const std::string& command) {
    if (config.strategies().size() != 1) {
        throw ConfigError(command + " needs a single strategy (static_unit or recoil_phase), not 'all'");
    }
    return config.strategy;
}

void require_gamma_time(const RunConfig& config, const std::string& command) {
    if (config.t_end != 0.0) {
        throw ConfigError(command + ": the approximate density matrices are defined at t = 0; set [time] t_end = 0");
    }
}

void write_gamma(std::ostream& out, const observables::GammaGrid& g) {
    out << "# columns: x x_prime re im\n";
    for (std::size_t i = 0; i < g.grid.size(); ++i) {
        for (std::size_t j = 0; j < g.grid.size(); ++j) {
            const Complex v = g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            out << num(g.grid.position(i)) << '\t' << num(g.grid.position(j)) << '\t' << num(v.real()) << '\t'
                << num(v.imag()) << '\n';
        }
    }
}

struct GammaSet {
    observables::GammaGrid exact;
    observables::GammaGrid first;
    observables::GammaGrid closed;
    double phi_spread{0.0};
};

GammaSet gamma_all(const Model& model, const dynamics::CouplingSet& g, const std::string& strategy,
                   const TimeGrid& grid, int k0, int grid_points) {
    const auto f = dynamics::modulator_by_name(strategy, model, k0);
    const auto sol = dynamics::zero_order_solution(model, g, f, grid, k0);
    const auto points = observables::PositionGrid::uniform(model.lattice, grid_points);
    const StateVector tilde = dynamics::propagate_residual(sol);
    const auto field = observables::alpha_phi(sol, points);
    return {observables::gamma_exact(tilde, sol, points, grid.steps), observables::gamma_first_approx(sol, points),
            observables::gamma_closed_form(field, model, k0), field.phi_spread()};
}

}  // namespace

RunConfig apply_overrides(RunConfig config, const Overrides& overrides) {
    if (overrides.tolerance) config.tolerance = *overrides.tolerance;
    if (overrides.strategy) config.strategy = *overrides.strategy;
    if (overrides.seed) config.seed = *overrides.seed;
    validate(config);
    return config;
}

std::vector<PropertyLine> property_suite(const RunConfig& config) {
    const Model model = config.model();
    const Lattice& lat = model.lattice;
    const int n = lat.sites();
    const int k0 = config.k0_index();
    const CoefficientSet h = config.ecs_coefficients();
    std::mt19937_64 rng(config.seed);
    std::vector<PropertyLine> lines;

    {
        double worst = 0.0;
        for (int q = 0; q < n; ++q) {
            for (int qp = 0; qp < n; ++qp) worst = std::max(worst, max_commutator(rho_matrix(lat, q), rho_matrix(lat, qp)));
        }
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 8; ++trial) {
            CoefficientSet a(n), b(n);
            for (int q = 0; q < n; ++q) {
                a[q] = {normal(rng), normal(rng)};
                b[q] = {normal(rng), normal(rng)};
            }
            const CMatrix qa = q_matrix(lat, a), qb = q_matrix(lat, b);
            worst = std::max({worst, max_commutator(qa, qb), max_commutator(qa.adjoint(), qb)});
        }
        lines.push_back({"2", "rho_commutativity", worst, 1e-13});
    }

    const ecs::EcsState series = ecs::ecs_series(model, h, k0);
    const ecs::EcsState disp = ecs::ecs_displacement(model, h, k0);
    lines.push_back({"3/7", "series_vs_displacement", 1.0 - oracle::fidelity(series.state.amplitudes(), disp.state.amplitudes()),
                     1e-8});
    lines.push_back({"4", "b_action", ecs::check_b_action(model, series), 1e-8});

    {
        double shift = 0.0, round_trip = 0.0;
        for (int q = 0; q < n; ++q) {
            const ProductOperator r = rho(model, q);
            const StateVector moved = r.apply(series.state);
            const ecs::EcsState target = ecs::ecs_series(model, h, lat.subtract(k0, q));
            shift = std::max(shift, (moved.amplitudes() - target.state.amplitudes()).norm());
            round_trip = std::max(round_trip, (r.adjoint().apply(moved).amplitudes() - series.state.amplitudes()).norm());
        }
        lines.push_back({"5", "momentum_shift", shift, 1e-13});
        lines.push_back({"6", "shift_round_trip", round_trip, 1e-13});
    }

    {
        const double r = allowed_radius(model);
        const int q0 = n > 1 ? 1 : 0;
        double worst = 0.0;
        for (int a = 0; a < 5; ++a) {
            for (int b = 0; b < 5; ++b) {
                const Complex g = std::polar(r * a / 4.0, 2.0 * M_PI * b / 5.0);
                const Complex gp = std::polar(r * b / 4.0, -2.0 * M_PI * a / 5.0 + 0.3);
                const auto s1 = ecs::ecs_series(model, CoefficientSet::single_mode(lat, q0, g), k0);
                const auto s2 = ecs::ecs_series(model, CoefficientSet::single_mode(lat, q0, gp), k0);
                worst = std::max(worst, std::abs(ecs::overlap(s1, s2) - ecs::single_mode_overlap(g, k0, gp, k0)));
                if (n > 1) {
                    const auto s3 = ecs::ecs_series(model, CoefficientSet::single_mode(lat, q0, gp), lat.add(k0, 1));
                    worst = std::max(worst, std::abs(ecs::overlap(s1, s3)));
                }
            }
        }
        lines.push_back({"9", "single_mode_overlap", worst, 1e-8});
    }

    {
        const int q0 = n > 1 ? 1 : 0;
        const auto u = ecs::unity_resolution_check(model, CoefficientSet::single_mode(lat, q0, 1.0));
        const CMatrix moments = ecs::scalar_moments(1.0, 4);
        const double moment_dev = (moments - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff();
        lines.push_back({"10", "resolution_of_unity", std::max(u.deviation, moment_dev), 1e-6});
    }

    {
        std::uniform_int_distribution<int> site(0, n - 1);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const auto r = ecs::sum_rule(model, series, site(rng));
            worst = std::max({worst, 1.0 - r.fidelity, r.max_component_error});
        }
        lines.push_back({"11", "sum_rule", worst, 1e-8});
    }
    return lines;
}

int cmd_properties(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
    const auto lines = property_suite(config);
    write_resolved(config, out_dir);
    auto out = open_output(out_dir, "properties.txt");
    write_header(out, "properties", config);
    out << "# columns: id name residual tolerance status\n";
    bool ok = true;
    for (const auto& l : lines) {
        const std::string status = l.pass() ? "PASS" : "FAIL";
        ok = ok && l.pass();
        out << l.id << '\t' << l.name << '\t' << sci(l.residual) << '\t' << sci(l.tolerance) << '\t' << status
            << '\n';
        log << "check " << l.id << "  " << l.name << "  residual " << sci(l.residual) << "  tol "
            << sci(l.tolerance) << "  " << status << '\n';
    }
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_evolve(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
    const Model model = config.model();
    const auto g = config.coupling_set();
    const TimeGrid grid = config.time_grid();
    const int k0 = config.k0_index();
    const int stride = config.output_stride;
    auto recorded = [&](int i) { return i % stride == 0 || i == grid.steps; };

    // The oracle is strategy independent: run it once.
    std::vector<CVector> reference;
    const CVector initial = make_basis_state(model, k0, 0).amplitudes();
    try {
        oracle::propagate_exact(model, g.values(), grid, initial, [&](int i, double, const CVector& psi) {
            if (recorded(i)) reference.push_back(psi);
        });
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("evolve: ") + e.what());
    }

    write_resolved(config, out_dir);
    bool ok = true;
    for (const std::string& strategy : config.strategies()) {
        const auto f = dynamics::modulator_by_name(strategy, model, k0);
        const auto sol = dynamics::zero_order_solution(model, g, f, grid, k0);

        auto series = open_output(out_dir, "evolve_" + strategy + ".tsv");
        write_header(series, "evolve", config);
        series << "# strategy: " << strategy << "\n# columns: t fidelity residual_norm h_norm\n";

        double worst = 0.0;
        std::size_t slot = 0;
        CVector final_state;
        dynamics::propagate_residual(sol, [&](int i, double t, const StateVector& tilde) {
            if (!recorded(i)) return;
            const CVector physical = sol.propagator(i) * tilde.amplitudes();
            const double fid = oracle::fidelity(physical, reference.at(slot++));
            worst = std::max(worst, 1.0 - fid);
            series << num(t) << '\t' << num(fid) << '\t' << num((tilde.amplitudes() - initial).norm()) << '\t'
                   << num(sol.h(i).total_amplitude()) << '\n';
            if (i == grid.steps) final_state = physical;
        });

        auto dump = open_output(out_dir, "state_" + strategy + ".txt");
        write_header(dump, "evolve", config);
        dump << "# strategy: " << strategy << "\n# physical state at t_end, index = k * (cutoff + 1) + n\n"
             << "# columns: index re im\n";
        for (Eigen::Index i = 0; i < final_state.size(); ++i) {
            dump << i << '\t' << num(final_state[i].real()) << '\t' << num(final_state[i].imag()) << '\n';
        }

        const bool pass = worst <= config.tolerance;
        ok = ok && pass;
        log << "evolve " << strategy << ": max(1 - fidelity) = " << sci(worst) << " (tol " << sci(config.tolerance)
            << ") " << (pass ? "PASS" : "FAIL") << '\n';
    }
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_gamma(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
    require_gamma_time(config, "gamma");
    const std::string strategy = require_single_strategy(config, "gamma");
    const Model model = config.model();
    const GammaSet set = gamma_all(model, config.coupling_set(), strategy, config.time_grid(), config.k0_index(),
                                   config.position_grid);

    write_resolved(config, out_dir);
    const std::pair<const char*, const observables::GammaGrid*> methods[] = {
        {"exact", &set.exact}, {"first_approx", &set.first}, {"closed_form", &set.closed}};
    for (const auto& [name, grid] : methods) {
        auto out = open_output(out_dir, std::string("gamma_") + name + ".tsv");
        write_header(out, "gamma", config);
        out << "# strategy: " << strategy << "\n# method: " << name << "\n";
        write_gamma(out, *grid);
    }

    const double closed_first = observables::max_deviation(set.closed, set.first);
    const bool phi_constant = set.phi_spread < 1e-10;
    const bool pass = closed_first <= config.tolerance;
    auto summary = open_output(out_dir, "gamma_summary.txt");
    write_header(summary, "gamma", config);
    summary << "# strategy: " << strategy << "\n"
            << "deviation\texact\tfirst_approx\t" << sci(observables::max_deviation(set.exact, set.first)) << '\n'
            << "deviation\texact\tclosed_form\t" << sci(observables::max_deviation(set.exact, set.closed)) << '\n'
            << "deviation\tclosed_form\tfirst_approx\t" << sci(closed_first) << '\n';
    for (const auto& [name, grid] : methods) {
        summary << "hermiticity\t" << name << '\t' << sci(grid->hermiticity_defect()) << '\n'
                << "trace\t" << name << '\t' << num(grid->trace()) << '\n';
    }
    summary << "phi_spread\t" << sci(set.phi_spread) << '\n'
            << "phi_constant\t" << (phi_constant ? "yes" : "no") << '\n'
            << "check\tclosed_form_vs_first_approx\t" << sci(closed_first) << '\t' << sci(config.tolerance) << '\t'
            << (pass ? "PASS" : "FAIL") << '\n';

    log << "gamma " << strategy << ": closed_form vs first_approx " << sci(closed_first) << " (tol "
        << sci(config.tolerance) << ") " << (pass ? "PASS" : "FAIL") << "; phi "
        << (phi_constant ? "constant" : "position dependent") << '\n';
    return pass ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
    require_gamma_time(config, "sweep");
    const std::string strategy = require_single_strategy(config, "sweep");
    const Model model = config.model();
    const auto base = config.coupling_set();
    const TimeGrid grid = config.time_grid();
    const int k0 = config.k0_index();

    // Independent runs, one per coupling scale.
    std::vector<std::future<double>> runs;
    for (int j = 0; j < config.sweep_points; ++j) {
        const double scale = std::ldexp(1.0, -j);
        runs.push_back(std::async(std::launch::async, [&, scale] {
            const GammaSet set = gamma_all(model, base.scaled(scale), strategy, grid, k0, config.position_grid);
            return observables::max_deviation(set.exact, set.closed);
        }));
    }
    std::vector<double> gaps;
    for (auto& r : runs) gaps.push_back(r.get());

    write_resolved(config, out_dir);
    auto out = open_output(out_dir, "sweep.tsv");
    write_header(out, "sweep", config);
    out << "# strategy: " << strategy << "\n# columns: scale coupling_magnitude gap observed_order\n";
    double min_order = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        const double scale = std::ldexp(1.0, -static_cast<int>(j));
        out << num(scale) << '\t' << num(scale * base.total_magnitude()) << '\t' << num(gaps[j]) << '\t';
        if (j == 0) {
            out << "nan\n";
        } else {
            const double order = std::log2(gaps[j - 1] / gaps[j]);
            min_order = std::min(min_order, order);
            out << num(order) << '\n';
        }
    }
    const bool pass = min_order >= 1.5;
    out << "# min_observed_order " << num(min_order) << " " << (pass ? "PASS" : "FAIL") << "\n";
    log << "sweep " << strategy << ": min observed order " << num(min_order) << " (>= 1.5) "
        << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kExitOk : kExitCheckFailed;
}

}  // namespace ecstate::cli
