#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ecstate/dynamics.hpp"
#include "ecstate/linalg.hpp"
#include "ecstate/oracle.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace ecstate;
using namespace ecstate::dynamics;

namespace {

CouplingSet pair_couplings(const Lattice& lattice, int q, Complex g) {
    CoefficientSet values(lattice.sites());
    values[q] = g;
    values[lattice.negate(q)] = std::conj(g);
    return {lattice, values};
}

CVector physical_state(const ZeroOrderSolution& sol, int step, const StateVector& tilde) {
    return sol.propagator(step) * tilde.amplitudes();
}

}  // namespace

TEST_CASE("time grid") {
    const TimeGrid grid(-1.0, 2.0, 3);
    CHECK(grid.dt() == doctest::Approx(1.0));
    CHECK(grid.time(3) == 2.0);
    CHECK(grid.midpoint(0) == doctest::Approx(-0.5));
    CHECK(grid.refined().steps == 6);
    CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(1.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(0.0, std::nan(""), 4), std::invalid_argument);
}

TEST_CASE("coupling sets must be Hermitian") {
    const Lattice lat(5, 5.0);
    CHECK_NOTHROW(CouplingSet(lat, CoefficientSet(lat, {{1, {0.1, 0.2}}, {-1, {0.1, -0.2}}, {0, 0.3}})));
    CHECK_THROWS_AS(CouplingSet(lat, CoefficientSet::single_mode(lat, 1, 0.2)), std::invalid_argument);
    CHECK_THROWS_AS(CouplingSet(lat, CoefficientSet(lat, {{0, {0.0, 0.1}}})), std::invalid_argument);
    CHECK_THROWS_AS(CouplingSet(lat, CoefficientSet(4)), std::invalid_argument);
    const CouplingSet g = pair_couplings(lat, 2, {0.3, 0.4});
    CHECK(g.total_magnitude() == doctest::Approx(1.0));
    CHECK(g.scaled(0.5).total_magnitude() == doctest::Approx(0.5));
}

TEST_CASE("modulators") {
    const Model model = testing::tight_binding_model(5, 4);
    const Modulator unit = Modulator::static_unit();
    CHECK(unit.name() == "static_unit");
    CHECK((unit(3, 1.7) == Complex{1.0}));

    const Modulator recoil = Modulator::recoil_phase(model, 1);
    CHECK(recoil.kind() == Modulator::Kind::recoil_phase);
    const Eigen::VectorXd eps = model.dispersion.energies(model.lattice);
    CHECK(recoil.phase(2, 0.7) == doctest::Approx((eps[model.lattice.subtract(1, 2)] - eps[1]) * 0.7));
    CHECK(recoil.phase(0, 3.0) == 0.0);
    CHECK(unimodularity_defect(recoil, 5, {-3.0, 0.0, 0.5, 11.0}) < 1e-15);

    const Modulator custom = Modulator::custom_phase([](int q, double t) { return q * t; });
    CHECK(custom.name() == "custom_phase");
    CHECK(std::abs(custom(2, 0.25) - std::exp(Complex{0.0, 0.5})) < 1e-15);

    CHECK(modulator_by_name("recoil_phase", model, 0).kind() == Modulator::Kind::recoil_phase);
    CHECK(modulator_by_name("static_unit", model, 0).kind() == Modulator::Kind::static_unit);
    CHECK_THROWS_AS(modulator_by_name("magnus", model, 0), std::invalid_argument);
    CHECK_THROWS_AS(Modulator::custom_phase({}), std::invalid_argument);
    CHECK_THROWS_AS(Modulator::recoil_phase(model, 5), std::invalid_argument);
}

TEST_CASE("interaction-picture density operators match dense conjugation") {
    const Model model{Lattice(6, 4.0), Dispersion::quadratic(0.7), OscillatorSpec(3, 1.3)};
    for (int q = 0; q < 6; ++q) {
        for (double t : {-2.0, 0.0, 0.9}) {
            CVector phase(6);
            const Eigen::VectorXd eps = model.dispersion.energies(model.lattice);
            for (int k = 0; k < 6; ++k) phase[k] = std::exp(kI * (eps[k] * t));
            const CMatrix expected = phase.asDiagonal() * rho_matrix(model.lattice, q) * phase.conjugate().asDiagonal();
            CHECK((interaction_rho(model, q, t) - expected).norm() < 1e-14);
        }
    }
}

TEST_CASE("unequal-time commutators follow the two-term phase formula") {
    const Model model = testing::tight_binding_model(7, 2, 1.3);
    for (int q = 0; q < 7; ++q) {
        for (int qp = 0; qp < 7; ++qp) {
            const CMatrix dense = commutator_rho_t(model, q, qp, 0.8, -1.1);
            CHECK((dense - commutator_rho_t_formula(model, q, qp, 0.8, -1.1)).norm() < 1e-13);
            CHECK(commutator_rho_t(model, q, qp, 0.4, 0.4).norm() < 1e-14);
        }
    }
    const Model flat{Lattice(5, 5.0), Dispersion::flat(), OscillatorSpec(2, 1.0)};
    CHECK(commutator_rho_t_formula(flat, 1, 2, 0.3, 2.0).norm() == 0.0);
    // A dispersive lattice does not commute at different times.
    CHECK(commutator_rho_t(model, 1, 2, 0.0, 1.0).norm() > 1e-3);
}

TEST_CASE("interaction Hamiltonian matches the dense oracle and is Hermitian") {
    std::mt19937_64 rng(21);
    const Model model{Lattice(5, 3.0), Dispersion::quadratic(1.0), OscillatorSpec(4, 0.8)};
    const CoefficientSet values = testing::random_hermitian_couplings(model.lattice, rng, 0.9);
    const CouplingSet g(model.lattice, values);
    for (double t : {-1.5, 0.0, 2.25}) {
        const CMatrix h = hamiltonian_full(model, g, t, Picture::interaction).dense();
        CHECK((h - oracle::interaction_hamiltonian(model, values, t)).norm() < 1e-13);
        CHECK((h - h.adjoint()).norm() < 1e-14);
        CHECK(linalg::hermitian_norm(h) <= hamiltonian_bound(model, g) + 1e-12);
    }
    const CMatrix hs = hamiltonian_full(model, g, 5.0, Picture::schrodinger).dense();
    CHECK((hs - oracle::schrodinger_coupling(model, values)).norm() < 1e-14);
}

TEST_CASE("split Hamiltonian") {
    std::mt19937_64 rng(8);
    const Model model = testing::tight_binding_model(5, 4);
    const CouplingSet g(model.lattice, testing::random_hermitian_couplings(model.lattice, rng, 0.6));

    SUBCASE("pieces add up to the full interaction") {
        for (const Modulator& f : {Modulator::static_unit(), Modulator::recoil_phase(model, 2)}) {
            const SplitHamiltonian split = split_hamiltonian(model, g, f, 1.3);
            const CMatrix full = hamiltonian_full(model, g, 1.3, Picture::interaction).dense();
            CHECK(((split.h0 + split.h1).dense() - full).norm() < 1e-14);
            const CMatrix h0 = split.h0.dense();
            CHECK((h0 - oracle::modulated_hamiltonian(model, g.values(), f, 1.3)).norm() < 1e-14);
        }
    }

    SUBCASE("recoil modulator removes the residual on the initial momentum") {
        const Modulator f = Modulator::recoil_phase(model, 2);
        const StateVector initial = make_basis_state(model, 2, 0);
        for (double t : {-4.0, 0.5, 3.0}) {
            const StateVector out = split_hamiltonian(model, g, f, t).h1.apply(initial);
            CHECK(out.norm() < 1e-14);
        }
        const StateVector other = make_basis_state(model, 0, 0);
        CHECK(split_hamiltonian(model, g, f, 3.0).h1.apply(other).norm() > 1e-3);
    }

    SUBCASE("flat dispersion gives an exact split") {
        const Model flat{model.lattice, Dispersion::flat(), model.oscillator};
        for (const Modulator& f : {Modulator::static_unit(), Modulator::recoil_phase(flat, 1)}) {
            for (double t : {-2.0, 0.0, 4.5}) CHECK(split_hamiltonian(flat, g, f, t).h1.dense().norm() == 0.0);
        }
    }

    SUBCASE("modulated family commutes at all times") {
        const Modulator f = Modulator::recoil_phase(model, 2);
        const CMatrix a = modulated_coupling(model, g, f, -1.0);
        const CMatrix b = modulated_coupling(model, g, f, 2.7);
        CHECK((a * b - b * a).norm() < 1e-14);
        CHECK((a.adjoint() * b - b * a.adjoint()).norm() < 1e-14);
    }
}

TEST_CASE("grid stability guard") {
    const Model model = testing::tight_binding_model(3, 16);
    const CouplingSet g = pair_couplings(model.lattice, 1, 0.25);
    CHECK(hamiltonian_bound(model, g) == doctest::Approx(4.0));
    CHECK_NOTHROW(check_grid(model, g, TimeGrid(0.0, 1.0, 9)));
    CHECK_THROWS_AS(check_grid(model, g, TimeGrid(0.0, 1.0, 8)), std::invalid_argument);
    CHECK_THROWS_AS(zero_order_solution(model, g, Modulator::static_unit(), TimeGrid(0.0, 10.0, 50), 0),
                    std::invalid_argument);
}

TEST_CASE("static modulator reproduces the closed-form coefficient with second-order convergence") {
    // f ≡ 1: h_q(t) = −(g_q/ω)(e^{iωt} − e^{iωt0}).
    const Model model{Lattice(3, 3.0), Dispersion::tight_binding(1.0), OscillatorSpec(14, 1.3)};
    const Complex g{0.2, 0.1};
    const CouplingSet couplings = pair_couplings(model.lattice, 1, g);
    const double t0 = -1.0, t1 = 3.0;
    auto error_at = [&](int steps) {
        const TimeGrid grid(t0, t1, steps);
        const ZeroOrderSolution sol = zero_order_solution(model, couplings, Modulator::static_unit(), grid, 0);
        const double w = model.oscillator.omega;
        double worst = 0.0;
        for (int i = 0; i <= steps; ++i) {
            const Complex exact = -(g / w) * (std::exp(kI * (w * grid.time(i))) - std::exp(kI * (w * t0)));
            worst = std::max(worst, std::abs(sol.h(i)[1] - exact));
            worst = std::max(worst, std::abs(sol.h(i)[2] - std::conj(g) / g * exact));
        }
        return worst;
    };
    const double e1 = error_at(100), e2 = error_at(200), e3 = error_at(400);
    CHECK(e3 < 1e-4);
    CHECK(testing::observed_order(e1, e2) >= 1.9);
    CHECK(testing::observed_order(e2, e3) >= 1.9);
}

TEST_CASE("zero-order solution structure") {
    std::mt19937_64 rng(4);
    const Model model = testing::tight_binding_model(5, 12);
    const CouplingSet g(model.lattice, testing::random_hermitian_couplings(model.lattice, rng, 0.4));
    const TimeGrid grid(-2.0, 2.0, 400);
    const ZeroOrderSolution sol = zero_order_solution(model, g, Modulator::recoil_phase(model, 0), grid, 0);

    CHECK(sol.h(0).is_zero());
    CHECK(sol.chi(0).norm() == 0.0);
    CHECK(sol.max_amplitude() > 0.0);
    for (int i : {0, 57, 400}) {
        CHECK((sol.chi(i) - sol.chi(i).adjoint()).norm() < 1e-14);
        const CMatrix u = sol.propagator(i);
        CHECK((u.adjoint() * u - CMatrix::Identity(model.dim(), model.dim())).norm() < 1e-12);
        // Block-diagonal evaluation equals the dense exponential of the generator.
        const CMatrix dense = linalg::anti_hermitian_exp(sol.generator(sol.h(i), sol.chi(i)));
        CHECK((u - dense).norm() < 1e-12);
    }
    // Midpoint values sit between their neighbours.
    for (int q = 0; q < 5; ++q) {
        const Complex avg = 0.5 * (sol.h(10)[q] + sol.h(11)[q]);
        CHECK(std::abs(sol.h_midpoint(10)[q] - avg) < 1e-4);
    }
    CHECK_THROWS(sol.h(401));

    // Coupling too large for the cutoff.
    const Model small = testing::tight_binding_model(5, 2);
    CHECK_THROWS_AS(zero_order_solution(small, g.scaled(4.0), Modulator::static_unit(), TimeGrid(-2.0, 2.0, 400), 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(zero_order_solution(model, g, Modulator::static_unit(), grid, 7), std::invalid_argument);
}

TEST_CASE("zero-order propagator solves the modulated Hamiltonian") {
    std::mt19937_64 rng(12);
    const Model model = testing::tight_binding_model(4, 10);
    const CouplingSet g(model.lattice, testing::random_hermitian_couplings(model.lattice, rng, 0.5));
    const Modulator f = Modulator::recoil_phase(model, 1);
    const TimeGrid grid(0.0, 2.0, 2000);
    const ZeroOrderSolution sol = zero_order_solution(model, g, f, grid, 1);
    const CVector initial = make_basis_state(model, 1, 0).amplitudes();
    const CVector reference = oracle::propagate_modulated(model, g.values(), f, grid, initial);
    CHECK(1.0 - oracle::fidelity(sol.state(grid.steps).amplitudes(), reference) < 1e-8);
}

TEST_CASE("U0 commutator identities") {
    const Model model = testing::tight_binding_model(5, 20);
    const CouplingSet g = pair_couplings(model.lattice, 1, {0.15, 0.1});
    const TimeGrid grid(0.0, 3.0, 300);
    const ZeroOrderSolution sol = zero_order_solution(model, g, Modulator::recoil_phase(model, 0), grid, 0);
    const CommutatorResiduals r = u0_commutators_check(sol, grid.steps);
    CHECK(r.max_level >= 8);
    CHECK(r.max_residual < 1e-7);
    CHECK(u0_commutators_check(sol, 0).max_residual < 1e-14);
}

TEST_CASE("U0 commutator residuals shrink as the cutoff grows") {
    double previous = 1e300;
    for (int cutoff : {12, 16, 20, 24}) {
        const Model model = testing::tight_binding_model(3, cutoff);
        const CouplingSet g = pair_couplings(model.lattice, 1, 0.2);
        const TimeGrid grid(0.0, 3.0, 300);
        const ZeroOrderSolution sol = zero_order_solution(model, g, Modulator::static_unit(), grid, 0);
        const double r = u0_commutators_check(sol, grid.steps, 4).max_residual;
        CHECK(r <= previous);
        previous = r;
    }
    CHECK(previous < 1e-8);
}

TEST_CASE("reliable Fock level estimate") {
    CHECK(reliable_level(20, 0.0) == 20);
    CHECK(reliable_level(20, 0.3) <= 20);
    CHECK(reliable_level(20, 0.3) >= reliable_level(20, 0.6));
    CHECK(reliable_level(24, 0.3) >= reliable_level(20, 0.3));
    CHECK(reliable_level(24, 0.3) < 24);
    CHECK(reliable_level(4, 5.0) == 0);
}

TEST_CASE("residual propagation reproduces the full dynamics") {
    std::mt19937_64 rng(31);
    const Model model = testing::tight_binding_model(4, 10);
    const CouplingSet g(model.lattice, testing::random_hermitian_couplings(model.lattice, rng, 0.4));
    const TimeGrid grid(0.0, 2.0, 1000);
    const CVector initial = make_basis_state(model, 0, 0).amplitudes();
    const CVector reference = oracle::propagate_exact(model, g.values(), grid, initial);

    for (const Modulator& f : {Modulator::static_unit(), Modulator::recoil_phase(model, 0)}) {
        const ZeroOrderSolution sol = zero_order_solution(model, g, f, grid, 0);
        int seen = 0;
        const StateVector tilde = propagate_residual(sol, [&](int, double, const StateVector& s) {
            ++seen;
            CHECK(std::abs(s.norm() - 1.0) < 1e-10);
        });
        CHECK(seen == grid.steps + 1);
        const CVector physical = physical_state(sol, grid.steps, tilde);
        CHECK(1.0 - oracle::fidelity(physical, reference) < 1e-8);
    }
}

TEST_CASE("gauge invariance: both strategies give the same physical state") {
    const Model model{Lattice(5, 5.0), Dispersion::quadratic(1.5), OscillatorSpec(10, 1.0)};
    const CouplingSet g = pair_couplings(model.lattice, 2, {0.1, -0.15});
    const TimeGrid grid(-1.0, 1.0, 1000);
    const ZeroOrderSolution a = zero_order_solution(model, g, Modulator::static_unit(), grid, 3);
    const ZeroOrderSolution b = zero_order_solution(model, g, Modulator::recoil_phase(model, 3), grid, 3);
    const CVector pa = physical_state(a, grid.steps, propagate_residual(a));
    const CVector pb = physical_state(b, grid.steps, propagate_residual(b));
    CHECK(1.0 - oracle::fidelity(pa, pb) < 1e-9);
    // The tilde states themselves differ between gauges.
    CHECK((a.state(grid.steps).amplitudes() - b.state(grid.steps).amplitudes()).norm() > 1e-4);
}

TEST_CASE("flat dispersion leaves the tilde state untouched") {
    const Model model{Lattice(5, 5.0), Dispersion::flat(), OscillatorSpec(12, 1.0)};
    const CouplingSet g = pair_couplings(model.lattice, 1, {0.2, 0.1});
    const TimeGrid grid(0.0, 4.0, 400);
    const StateVector initial = make_basis_state(model, 2, 0);
    for (const Modulator& f : {Modulator::static_unit(), Modulator::recoil_phase(model, 2)}) {
        const StateVector tilde = propagate_residual(model, g, f, grid, 2);
        CHECK((tilde.amplitudes() - initial.amplitudes()).norm() < 1e-12);
    }
}

TEST_CASE("zero couplings keep the vacuum") {
    const Model model = testing::tight_binding_model(3, 4);
    const CouplingSet g(model.lattice, CoefficientSet(3));
    const TimeGrid grid(0.0, 1.0, 10);
    const StateVector tilde = propagate_residual(model, g, Modulator::static_unit(), grid, 1);
    CHECK((tilde.amplitudes() - make_basis_state(model, 1, 0).amplitudes()).norm() == 0.0);
}

TEST_CASE("residual magnitude report") {
    const Model model = testing::tight_binding_model(5, 12);
    const CouplingSet g = pair_couplings(model.lattice, 1, 0.2);
    const TimeGrid grid(0.0, 3.0, 600);
    const ResidualReport rs = residual_magnitude_report(model, g, Modulator::static_unit(), grid, 0);
    const ResidualReport rr = residual_magnitude_report(model, g, Modulator::recoil_phase(model, 0), grid, 0);
    CHECK(rs.strategy == "static_unit");
    CHECK(rr.times.size() == 601);
    CHECK(rr.residual_norm.front() == 0.0);
    CHECK(rr.times.back() == 3.0);
    for (std::size_t i = 0; i < rr.times.size(); ++i) {
        CHECK(rr.residual_norm[i] <= rr.first_order_bound[i] + 1e-10);
        CHECK(rs.residual_norm[i] <= rs.first_order_bound[i] + 1e-10);
    }
    // The recoil modulator tracks the particle phases, leaving a smaller residual.
    CHECK(rr.residual_norm.back() < rs.residual_norm.back());
}
