// ecs.hpp: Extended coherent states |h, k0⟩ and checks of their algebraic properties
//
// An extended coherent state replaces the scalar displacement amplitude of an
// oscillator coherent state by the particle operator Q̂ = Σ_q h_q ρ_q:
//
//   |h, k0⟩ = exp(−½ Q̂†Q̂) Σ_n (Q̂ b†)ⁿ / n! |0, k0)
//           = exp(Q̂ b† − Q̂† b) |0, k0).
//
// Every ρ_q is a momentum shift, so the ρ family commutes and both forms agree
// up to Fock truncation.

#pragma once

#include "ecstate/hilbert.hpp"

#include <array>

namespace ecstate::ecs {

inline constexpr double kDefaultTruncationTol = 1e-10;

enum class Construction { series, displacement };

struct EcsState {
    StateVector state;
    CoefficientSet h;
    int k0;
    Construction construction;
};

// Series form truncated at order_cap (≤ M). Throws std::invalid_argument when
// order_cap > M or the coefficient set violates the truncation rule.
EcsState ecs_series(const Model& model, const CoefficientSet& h, int k0, int order_cap,
                    double tol = kDefaultTruncationTol);
inline EcsState ecs_series(const Model& model, const CoefficientSet& h, int k0) {
    return ecs_series(model, h, k0, model.cutoff());
}

// Displacement form via the dense exponential of the anti-Hermitian generator.
EcsState ecs_displacement(const Model& model, const CoefficientSet& h, int k0,
                          double tol = kDefaultTruncationTol);

EcsState build(const Model& model, const CoefficientSet& h, int k0, Construction construction);

// Q̂ b† − Q̂† b as a dense matrix.
CMatrix displacement_generator(const Model& model, const CoefficientSet& h);

// ‖b|h,k0⟩ − Q̂|h,k0⟩‖.
double check_b_action(const Model& model, const EcsState& ecs);

// ⟨ecs1|ecs2⟩.
Complex overlap(const EcsState& ecs1, const EcsState& ecs2);

// Closed form for two single-mode states sharing the mode q0:
// exp[−½(|g|² + |g′|² − 2 g* g′)] Δ(k0 − k0′).
Complex single_mode_overlap(Complex g, int k0, Complex g_prime, int k0_prime);

// max(‖ρ_q|h,k0⟩ − |h,k0−q⟩‖, ‖ρ_q†ρ_q|h,k0⟩ − |h,k0⟩‖).
double momentum_shift_check(const Model& model, const EcsState& ecs, int q);

struct UnityResolution {
    double deviation{0.0};   // Frobenius norm of (Σ_k ∫ … − I) on the reliable subspace
    int reliable_max_level{0};
    CMatrix resolved;        // full quadrature result
};

// Evaluates Σ_k (1/π) ∫d²z Q̂|zh,k⟩⟨zh,k|Q̂† with a Gauss-Laguerre × uniform
// polar rule, run once per eigenspace of Q̂†Q̂ with the radial variable
// scaled to that eigenvalue (kernel directions get nothing, so a singular Q̂
// shows up as deviation). The scaled states |zh,k⟩ reach amplitudes far beyond the Fock
// cutoff, so they are built from the truncated series directly (no truncation
// guard); each Fock level then receives its own moment exactly. The reliable
// subspace holds the levels n ≤ min(M, 2·radial − 1, angular − 1) for which
// the rule integrates every contributing moment exactly.
UnityResolution unity_resolution_check(const Model& model, const CoefficientSet& h, int radial_nodes = 40,
                                       int angular_nodes = 64);

// M(n, m) = (1/(π n!)) ∫d²z (z*)ⁿ zᵐ e^{−|z|²c²} c^{m+1} c^{n+1} for real c,
// evaluated by the same polar rule; the identity says M = I.
CMatrix scalar_moments(double c, int max_order, int radial_nodes = 40, int angular_nodes = 64);

// Oscillator coherent state e^{−|α|²/2} Σ αⁿ/√n! |n⟩ on levels 0..levels−1.
CVector coherent_state(Complex alpha, int levels);

// Σ_k e^{isk} a_k: contraction of a product-space state onto the oscillator
// space with the particle annihilated (the particle vacuum sector).
// s = site · L/N must lie on the dual lattice.
CVector contract_particle(const Model& model, const StateVector& state, int s_site);

struct SumRuleResult {
    CVector contracted;       // Σ_k e^{isk} a_k |h,k0⟩
    CVector expected;         // e^{isk0} |α)
    Complex alpha;            // Σ_q h_q e^{−isq}
    double fidelity{0.0};     // |⟨expected|contracted⟩|²
    double max_component_error{0.0};  // over Fock levels 0..M−2
};

SumRuleResult sum_rule(const Model& model, const EcsState& ecs, int s_site);

}  // namespace ecstate::ecs
