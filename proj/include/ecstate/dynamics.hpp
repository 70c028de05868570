// dynamics.hpp: Interaction Hamiltonian, modulated split, zero-order ECS evolution
// and the residual time-ordered propagation.
//
// In the interaction picture
//   H_int(t) = e^{iωt} b† Σ_q g_q ρ_q(t) + h.c.,   ρ_q(t)_{k,k+q} = e^{i(ε_k − ε_{k+q})t}.
// Replacing the particle phases of ρ_q(t) by unimodular modulators f_q(t) gives
//   H0(t) = e^{iωt} b† Σ_q g_q f_q(t) ρ_q + h.c.,   H1 = H_int − H0,
// whose particle factors commute at all times, so H0 is solved exactly by
//   U0(t) = exp{Q̂(t) b† − Q̂†(t) b − iχ̂(t)},
//   h_q(t) = −i g_q ∫_{t0}^t f_q(t′) e^{iωt′} dt′,
//   χ̂(t)  = −(i/2) ∫_{t0}^t [Q̇̂†Q̂ − Q̂†Q̇̂] dt′.
// The remainder evolves the tilde state |t⟩ = U0†(t)|t) under U0† H1 U0.

#pragma once

#include "ecstate/hilbert.hpp"
#include "ecstate/time_grid.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace ecstate::dynamics {

// g_q with the constraint g_{−q} = g_q*.
class CouplingSet {
public:
    CouplingSet(const Lattice& lattice, CoefficientSet values, double tol = 1e-12);

    const CoefficientSet& values() const noexcept { return values_; }
    Complex operator[](int q) const { return values_[q]; }
    int sites() const noexcept { return values_.sites(); }
    double total_magnitude() const { return values_.total_amplitude(); }
    bool is_zero() const { return values_.is_zero(); }
    CouplingSet scaled(double s) const;

private:
    CoefficientSet values_;
};

// Unimodular f_q(t) = e^{iφ_q(t)}.
class Modulator {
public:
    enum class Kind { static_unit, recoil_phase, custom_phase };
    using PhaseFn = std::function<double(int q, double t)>;

    static Modulator static_unit();
    // φ_q(t) = (ε_{k0−q} − ε_{k0}) t: the interaction-picture phase ρ_q(t)
    // carries on the matrix element leaving the initial momentum k0.
    static Modulator recoil_phase(const Model& model, int k0);
    static Modulator custom_phase(PhaseFn phase);

    Complex operator()(int q, double t) const;
    double phase(int q, double t) const;
    Kind kind() const noexcept { return kind_; }
    std::string name() const;

private:
    Modulator(Kind kind, PhaseFn phase) : kind_(kind), phase_(std::move(phase)) {}
    Kind kind_;
    PhaseFn phase_;
};

Modulator modulator_by_name(const std::string& name, const Model& model, int k0);

// Max deviation of |f_q(t)| from 1 over all q and the sample times.
double unimodularity_defect(const Modulator& f, int sites, const std::vector<double>& times);

enum class Picture { schrodinger, interaction };

// ρ_q(t) from the analytic phase formula (particle factor).
CMatrix interaction_rho(const Model& model, int q, double t);
// Σ_q g_q ρ_q(t) (or ρ_q in the Schrödinger picture).
CMatrix coupling_operator(const Model& model, const CouplingSet& g, double t, Picture picture);
// A(t) = Σ_q g_q f_q(t) ρ_q: the commuting family inside H0.
CMatrix modulated_coupling(const Model& model, const CouplingSet& g, const Modulator& f, double t);

ProductOperator hamiltonian_full(const Model& model, const CouplingSet& g, double t, Picture picture);

// [ρ_q(t), ρ_q′(t′)] from dense conjugation by the free particle propagator.
CMatrix commutator_rho_t(const Model& model, int q, int q_prime, double t, double t_prime);
// The same commutator from the two-term phase formula on a†_k a_{k+q+q′}.
CMatrix commutator_rho_t_formula(const Model& model, int q, int q_prime, double t, double t_prime);

struct SplitHamiltonian {
    ProductOperator h0;
    ProductOperator h1;
};

SplitHamiltonian split_hamiltonian(const Model& model, const CouplingSet& g, const Modulator& f, double t);

// Upper bound 2√M Σ|g_q| on ‖H_int(t)‖.
double hamiltonian_bound(const Model& model, const CouplingSet& g);
// Throws std::invalid_argument unless dt·‖H‖ < 0.5.
void check_grid(const Model& model, const CouplingSet& g, const TimeGrid& grid);

class ZeroOrderSolution {
public:
    const Model& model() const noexcept { return model_; }
    const CouplingSet& couplings() const noexcept { return couplings_; }
    const Modulator& modulator() const noexcept { return modulator_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    int k0() const noexcept { return k0_; }

    const CoefficientSet& h(int i) const { return h_.at(static_cast<std::size_t>(i)); }
    const CMatrix& chi(int i) const { return chi_.at(static_cast<std::size_t>(i)); }
    const CoefficientSet& h_midpoint(int i) const { return h_mid_.at(static_cast<std::size_t>(i)); }
    const CMatrix& chi_midpoint(int i) const { return chi_mid_.at(static_cast<std::size_t>(i)); }

    // dh_q/dt = −i g_q f_q(t) e^{iωt}
    CoefficientSet h_dot(double t) const;

    // Q̂ b† − Q̂† b − iχ̂ (anti-Hermitian, dense).
    CMatrix generator(const CoefficientSet& h, const CMatrix& chi) const;
    CMatrix propagator(int i) const;
    CMatrix propagator_midpoint(int i) const;
    // U0(t_i)|0,k0)
    StateVector state(int i) const;

    // max_t Σ_q |h_q(t)|
    double max_amplitude() const;

private:
    friend ZeroOrderSolution zero_order_solution(const Model&, const CouplingSet&, const Modulator&,
                                                 const TimeGrid&, int, double);
    ZeroOrderSolution(Model model, CouplingSet g, Modulator f, TimeGrid grid, int k0)
        : model_(std::move(model)), couplings_(std::move(g)), modulator_(std::move(f)), grid_(grid), k0_(k0) {}

    Model model_;
    CouplingSet couplings_;
    Modulator modulator_;
    TimeGrid grid_;
    int k0_;
    std::vector<CoefficientSet> h_;
    std::vector<CMatrix> chi_;
    std::vector<CoefficientSet> h_mid_;
    std::vector<CMatrix> chi_mid_;
};

// Trapezoid quadrature of h_q(t) and χ̂(t) on the grid (plus half-step values
// at every interval midpoint). Throws std::invalid_argument for an unstable
// grid or when max Σ|h_q(t)| breaks the truncation rule.
ZeroOrderSolution zero_order_solution(const Model& model, const CouplingSet& g, const Modulator& f,
                                      const TimeGrid& grid, int k0, double tol = 1e-10);

struct CommutatorResiduals {
    // ‖[b,U0] − U0Q̂‖, ‖[b,U0†] + U0†Q̂‖, ‖[b†,U0] − U0Q̂†‖, ‖[b†,U0†] + U0†Q̂†‖
    std::array<double, 4> residuals{};
    double max_residual{0.0};
    int max_level{0};
};

// Largest Fock level m whose displaced column exp(Q̂b† − Q̂†b)|m⟩ leaks less
// than tol past the cutoff, estimated by a^d √((M+1)!/m!) / d!, d = M+1−m.
int reliable_level(int cutoff, double amplitude, double tol = 1e-8);

// Frobenius norms of the four residual matrices restricted to columns with
// Fock level ≤ max_level (default: reliable_level of Σ|h_q(t_i)|).
CommutatorResiduals u0_commutators_check(const ZeroOrderSolution& sol, int i, int max_level = -1);

using ResidualObserver = std::function<void(int step, double t, const StateVector& tilde)>;

// Unitary midpoint-exponential stepping of i d/dt|t⟩ = U0† H1 U0 |t⟩ from
// |0,k0). The observer sees the tilde state at every grid node.
StateVector propagate_residual(const ZeroOrderSolution& sol, const ResidualObserver& observer = {});
StateVector propagate_residual(const Model& model, const CouplingSet& g, const Modulator& f,
                               const TimeGrid& grid, int k0, const ResidualObserver& observer = {});

struct ResidualReport {
    std::string strategy;
    std::vector<double> times;
    std::vector<double> residual_norm;       // ‖|t⟩ − |0,k0)‖
    std::vector<double> h_norm;              // Σ_q |h_q(t)|
    std::vector<double> first_order_bound;   // ∫ ‖H̃1(t′)‖ dt′
};

ResidualReport residual_magnitude_report(const Model& model, const CouplingSet& g, const Modulator& f,
                                         const TimeGrid& grid, int k0);

}  // namespace ecstate::dynamics
