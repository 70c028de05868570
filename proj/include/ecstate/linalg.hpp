// linalg.hpp: Dense matrix functions via Hermitian eigendecomposition

#pragma once

#include "ecstate/hilbert.hpp"

#include <cmath>
#include <stdexcept>

namespace ecstate::linalg {

// f(H) for Hermitian H.
template <typename F>
CMatrix hermitian_function(const CMatrix& h, F&& f) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_function: eigensolver failed");
    const auto& vals = solver.eigenvalues();
    CVector fv(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i) fv[i] = f(vals[i]);
    return solver.eigenvectors() * fv.asDiagonal() * solver.eigenvectors().adjoint();
}

// exp(−i s H) for Hermitian H.
inline CMatrix unitary_exp(const CMatrix& h, double s) {
    return hermitian_function(h, [s](double e) { return std::exp(Complex{0.0, -s * e}); });
}

// exp(G) for anti-Hermitian G, using iG Hermitian.
inline CMatrix anti_hermitian_exp(const CMatrix& g) {
    const CMatrix h = kI * g;
    return unitary_exp(0.5 * (h + h.adjoint()), 1.0);
}

inline double hermitian_norm(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}


}  // namespace ecstate::linalg
