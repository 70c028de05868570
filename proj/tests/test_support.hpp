// Shared fixtures and independent brute-force helpers for the unit tests.

#pragma once

#include "ecstate/hilbert.hpp"

#include <cmath>
#include <random>

namespace ecstate::testing {

inline Model tight_binding_model(int sites, int cutoff, double bandwidth = 1.0, double omega = 1.0) {
    return {Lattice(sites, static_cast<double>(sites)), Dispersion::tight_binding(bandwidth),
            OscillatorSpec(cutoff, omega)};
}

inline CoefficientSet random_coefficients(const Lattice& lattice, std::mt19937_64& rng, double total) {
    std::normal_distribution<double> normal;
    CoefficientSet h(lattice.sites());
    for (int q = 0; q < lattice.sites(); ++q) h[q] = Complex{normal(rng), normal(rng)};
    return h.scaled(total / h.total_amplitude());
}

// Couplings with g_{−q} = g_q* built from random values on q > 0.
inline CoefficientSet random_hermitian_couplings(const Lattice& lattice, std::mt19937_64& rng, double total) {
    std::normal_distribution<double> normal;
    CoefficientSet g(lattice.sites());
    g[0] = normal(rng);
    for (int q = 1; q < lattice.sites(); ++q) {
        const int nq = lattice.negate(q);
        if (nq < q) continue;
        g[q] = Complex{normal(rng), normal(rng)};
        g[nq] = std::conj(g[q]);
        if (nq == q) g[q] = g[q].real();
    }
    return g.scaled(total / g.total_amplitude());
}

// Plain Kronecker product, independent of ProductOperator::dense().
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Single-mode ECS written out term by term:
// e^{−|g|²/2} Σ_n gⁿ/n! (ρ_{q0} b†)ⁿ |0,k0) = e^{−|g|²/2} Σ_n gⁿ/√n! |k0 − n q0, n⟩.
inline CVector single_mode_ecs_bruteforce(const Model& model, int q0, Complex g, int k0) {
    CVector v = CVector::Zero(model.dim());
    for (int n = 0; n <= model.cutoff(); ++n) {
        const int k = model.lattice.wrap(k0 - n * q0);
        v[model.index(k, n)] += std::exp(-0.5 * std::norm(g)) * std::pow(g, n) / std::sqrt(std::tgamma(n + 1.0));
    }
    return v;
}

inline double poisson_weight(double mean, int n) {
    return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

inline double observed_order(double coarse_error, double fine_error) {
    return std::log2(coarse_error / fine_error);
}

}  // namespace ecstate::testing
