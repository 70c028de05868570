#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ecstate/ecs.hpp"
#include "ecstate/linalg.hpp"
#include "ecstate/oracle.hpp"
#include "test_support.hpp"

#include <cmath>
#include <stdexcept>

using namespace ecstate;
using namespace ecstate::oracle;

TEST_CASE("constant Hamiltonian is stepped exactly") {
    CMatrix a = CMatrix::Random(6, 6);
    const CMatrix h = 0.5 * (a + a.adjoint());
    const double norm = linalg::hermitian_norm(h);
    const TimeGrid grid(0.0, 3.0, static_cast<int>(std::ceil(3.0 * norm / 0.4)));
    const DensePropagator prop([&](double) { return h; }, grid);
    CVector psi = CVector::Zero(6);
    psi[2] = 1.0;
    int calls = 0;
    const CVector out = prop.evolve(psi, [&](int, double, const CVector&) { ++calls; });
    CHECK(calls == grid.steps + 1);
    CHECK((out - linalg::unitary_exp(h, 3.0) * psi).norm() < 1e-12);
}

TEST_CASE("unstable steps are refused") {
    const CMatrix h = 10.0 * CMatrix::Identity(3, 3);
    const DensePropagator prop([&](double) { return h; }, TimeGrid(0.0, 1.0, 10));
    CHECK_THROWS_AS(prop.step_unitary(0), std::invalid_argument);
    CHECK_THROWS_AS(DensePropagator({}, TimeGrid(0.0, 1.0, 10)), std::invalid_argument);
}

TEST_CASE("free energies and conjugation") {
    const Model model{Lattice(3, 3.0), Dispersion::quadratic(1.0), OscillatorSpec(2, 2.0)};
    const CVector e = free_energies(model);
    CHECK(e.size() == 9);
    CHECK(e[model.index(1, 2)].real() == doctest::Approx(model.dispersion.energy(model.lattice, 1) + 4.0));
    const CMatrix op = CMatrix::Random(9, 9);
    CHECK((conjugate_free(model, op, 0.0) - op).norm() < 1e-15);
    CHECK((conjugate_free(model, conjugate_free(model, op, 0.7), -0.7) - op).norm() < 1e-13);
    CHECK_THROWS_AS(conjugate_free(model, CMatrix::Zero(4, 4), 1.0), std::invalid_argument);
}

TEST_CASE("fidelity") {
    CVector a(2), b(2);
    a << 1.0, 0.0;
    b << Complex{0.0, 2.0}, 0.0;
    CHECK(fidelity(a, b) == doctest::Approx(1.0));
    b << 1.0, 1.0;
    CHECK(fidelity(a, b) == doctest::Approx(0.5));
}

TEST_CASE("flat dispersion: the oracle produces a single-mode coherent state") {
    // With ε ≡ 0 and one self-conjugate mode the exact state is the ECS with
    // h(t) = −(g/ω)(e^{iωt} − e^{iωt0}), up to a global phase.
    const Model model{Lattice(4, 4.0), Dispersion::flat(), OscillatorSpec(14, 1.0)};
    const double g = 0.3;
    const CoefficientSet couplings = CoefficientSet::single_mode(model.lattice, 2, g);
    const double t0 = 0.0, t1 = 2.5;
    const TimeGrid grid(t0, t1, 2000);
    const CVector out = propagate_exact(model, couplings, grid, make_basis_state(model, 1, 0).amplitudes());
    const Complex h = -(g / 1.0) * (std::exp(kI * t1) - std::exp(kI * t0));
    const ecs::EcsState expected =
        ecs::ecs_displacement(model, CoefficientSet::single_mode(model.lattice, 2, h), 1);
    CHECK(1.0 - fidelity(out, expected.state.amplitudes()) < 1e-9);
}

TEST_CASE("oracle converges at second order") {
    const Model model = testing::tight_binding_model(4, 8, 1.2);
    const CoefficientSet g(model.lattice, {{1, {0.2, 0.1}}, {-1, {0.2, -0.1}}, {0, 0.1}});
    const CVector initial = make_basis_state(model, 0, 0).amplitudes();
    auto run = [&](int steps) { return propagate_exact(model, g, TimeGrid(0.0, 2.0, steps), initial); };
    const CVector a = run(50), b = run(100), c = run(200), d = run(400);
    const double e1 = (a - b).norm(), e2 = (b - c).norm(), e3 = (c - d).norm();
    CHECK(testing::observed_order(e1, e2) >= 1.9);
    CHECK(testing::observed_order(e2, e3) >= 1.9);
}
