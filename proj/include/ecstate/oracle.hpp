// oracle.hpp: Brute-force dense reference propagation
//
// Everything here is built directly on dense D×D matrices (D = N(M+1)) from
// the basis operators in hilbert.hpp and its own eigendecomposition-based
// exponentials; none of the dynamics code is reused, so agreement with the
// zero-order/residual machinery is independent evidence.

#pragma once

#include "ecstate/hilbert.hpp"
#include "ecstate/time_grid.hpp"

#include <functional>

namespace ecstate::oracle {

using HamiltonianFn = std::function<CMatrix(double t)>;
using ModulatorFn = std::function<Complex(int q, double t)>;
using StepObserver = std::function<void(int step, double t, const CVector& state)>;

// Midpoint-exponential stepping: ψ_{i+1} = exp(−i dt H(t_i + dt/2)) ψ_i.
class DensePropagator {
public:
    DensePropagator(HamiltonianFn hamiltonian, TimeGrid grid);

    const TimeGrid& grid() const noexcept { return grid_; }
    // Throws std::invalid_argument when dt·‖H(t_mid)‖ ≥ 0.5.
    CMatrix step_unitary(int i) const;
    CVector evolve(const CVector& initial, const StepObserver& observer = {}) const;

private:
    HamiltonianFn hamiltonian_;
    TimeGrid grid_;
};

// Diagonal of H_free = diag(ε_k) ⊗ I + I ⊗ ω b†b.
CVector free_energies(const Model& model);
// e^{iH_free t} op e^{−iH_free t}
CMatrix conjugate_free(const Model& model, const CMatrix& op, double t);

// b† Σ g_q ρ_q + b Σ g_q* ρ_q† (dense).
CMatrix schrodinger_coupling(const Model& model, const CoefficientSet& g);
// Interaction picture by dense conjugation of the Schrödinger coupling.
CMatrix interaction_hamiltonian(const Model& model, const CoefficientSet& g, double t);
// e^{iωt} b† Σ g_q f_q(t) ρ_q + h.c. (dense).
CMatrix modulated_hamiltonian(const Model& model, const CoefficientSet& g, const ModulatorFn& f, double t);

CVector propagate_exact(const Model& model, const CoefficientSet& g, const TimeGrid& grid, const CVector& initial,
                        const StepObserver& observer = {});
CVector propagate_modulated(const Model& model, const CoefficientSet& g, const ModulatorFn& f,
                            const TimeGrid& grid, const CVector& initial, const StepObserver& observer = {});

// |⟨a|b⟩|² / (‖a‖²‖b‖²)
double fidelity(const CVector& a, const CVector& b);

}  // namespace ecstate::oracle
