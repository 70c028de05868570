#include "ecstate/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ecstate::oracle {

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

// exp(−i dt H) through the spectral decomposition of the Hermitian part of H.
CMatrix spectral_step(const CMatrix& h, double dt) {
    const CMatrix herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
    if (es.info() != Eigen::Success) throw std::runtime_error("oracle: eigensolver failed");
    const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(dt * norm < 0.5)) {
        throw std::invalid_argument("oracle: unstable step, dt*|H| = " + std::to_string(dt * norm));
    }
    CVector phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases[i] = std::polar(1.0, -dt * es.eigenvalues()[i]);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

DensePropagator::DensePropagator(HamiltonianFn hamiltonian, TimeGrid grid)
    : hamiltonian_(std::move(hamiltonian)), grid_(grid) {
    if (!hamiltonian_) throw std::invalid_argument("DensePropagator: empty Hamiltonian");
}

CMatrix DensePropagator::step_unitary(int i) const {
    return spectral_step(hamiltonian_(grid_.t0 + (i + 0.5) * grid_.dt()), grid_.dt());
}

CVector DensePropagator::evolve(const CVector& initial, const StepObserver& observer) const {
    CVector psi = initial;
    if (observer) observer(0, grid_.t0, psi);
    for (int i = 0; i < grid_.steps; ++i) {
        psi = step_unitary(i) * psi;
        if (observer) observer(i + 1, grid_.time(i + 1), psi);
    }
    return psi;
}

CVector free_energies(const Model& model) {
    CVector e(model.dim());
    for (int k = 0; k < model.sites(); ++k) {
        const double eps = model.dispersion.energy(model.lattice, k);
        for (int n = 0; n < model.levels(); ++n) e[model.index(k, n)] = eps + model.oscillator.omega * n;
    }
    return e;
}

CMatrix conjugate_free(const Model& model, const CMatrix& op, double t) {
    if (op.rows() != model.dim() || op.cols() != model.dim()) {
        throw std::invalid_argument("conjugate_free: operator does not match model dimension");
    }
    const CVector e = free_energies(model);
    CVector forward(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) forward[i] = std::polar(1.0, e[i].real() * t);
    const CMatrix u = forward.asDiagonal();
    return u * op * u.adjoint();
}

CMatrix schrodinger_coupling(const Model& model, const CoefficientSet& g) {
    CMatrix a = CMatrix::Zero(model.sites(), model.sites());
    for (int q = 0; q < model.sites(); ++q) a += g[q] * rho_matrix(model.lattice, q);
    const CMatrix bd = creation_matrix(model.levels());
    const CMatrix h = kron(a, bd);
    return h + h.adjoint();
}

CMatrix interaction_hamiltonian(const Model& model, const CoefficientSet& g, double t) {
    return conjugate_free(model, schrodinger_coupling(model, g), t);
}

CMatrix modulated_hamiltonian(const Model& model, const CoefficientSet& g, const ModulatorFn& f, double t) {
    CMatrix a = CMatrix::Zero(model.sites(), model.sites());
    for (int q = 0; q < model.sites(); ++q) {
        if (g[q] == Complex{}) continue;
        a += g[q] * f(q, t) * rho_matrix(model.lattice, q);
    }
    const CMatrix h = std::polar(1.0, model.oscillator.omega * t) * kron(a, creation_matrix(model.levels()));
    return h + h.adjoint();
}

CVector propagate_exact(const Model& model, const CoefficientSet& g, const TimeGrid& grid, const CVector& initial,
                        const StepObserver& observer) {
    const CMatrix hs = schrodinger_coupling(model, g);
    const DensePropagator prop([&](double t) { return conjugate_free(model, hs, t); }, grid);
    return prop.evolve(initial, observer);
}

CVector propagate_modulated(const Model& model, const CoefficientSet& g, const ModulatorFn& f,
                            const TimeGrid& grid, const CVector& initial, const StepObserver& observer) {
    const DensePropagator prop([&](double t) { return modulated_hamiltonian(model, g, f, t); }, grid);
    return prop.evolve(initial, observer);
}

double fidelity(const CVector& a, const CVector& b) {
    return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

}  // namespace ecstate::oracle
