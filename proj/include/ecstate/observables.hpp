// observables.hpp: One-particle density matrix Γ(x, x′) in position space
//
// Γ(x,x′,t) = ⟨Ψ(x)|Ψ(x′)⟩ with |Ψ(x)⟩ = ψ̂(x,t) U0(t)|t⟩ in the oscillator
// sector and ψ̂(x,t) = Σ_k a_k e^{ikx − iε_k t}. Three evaluations:
//   exact        : the propagated tilde state |t⟩,
//   first_approx : |t⟩ replaced by |0,k0),
//   closed_form  : e^{−ik0x + ik0x′} exp{iΦ(x) − iΦ(x′) − ½[|α(x)|² + |α(x′)|² − 2α*(x)α(x′)]}.

#pragma once

#include "ecstate/dynamics.hpp"
#include "ecstate/hilbert.hpp"

#include <string>
#include <vector>

namespace ecstate::observables {

// Positions on the dual lattice x_m = m L / N, the points where the momentum
// sums wrap consistently. Stored as site numbers m ∈ [0, N).
class PositionGrid {
public:
    PositionGrid(const Lattice& lattice, std::vector<int> sites);
    // count points spread evenly over the N dual-lattice sites.
    static PositionGrid uniform(const Lattice& lattice, int count);

    std::size_t size() const noexcept { return sites_.size(); }
    int site(std::size_t i) const { return sites_.at(i); }
    double position(std::size_t i) const { return sites_.at(i) * spacing_; }
    const std::vector<int>& sites() const noexcept { return sites_; }
    bool covers_lattice() const noexcept { return static_cast<int>(sites_.size()) == lattice_sites_; }

private:
    std::vector<int> sites_;
    double spacing_;
    int lattice_sites_;
};

enum class GammaMethod { exact, first_approx, closed_form };

std::string method_name(GammaMethod method);

struct GammaGrid {
    CMatrix values;   // Γ(x_i, x_j)
    PositionGrid grid;
    GammaMethod method;

    double hermiticity_defect() const;
    // max |Im Γ(x,x)| and max(0, −Re Γ(x,x)).
    double diagonal_defect() const;
    // Mean of the diagonal: 1 per particle when the grid covers the lattice.
    double trace() const;
};

struct AlphaField {
    PositionGrid grid;
    std::vector<double> times;
    CMatrix alpha;               // alpha(t_index, x_index)
    std::vector<double> phi;     // Φ(x) = ∫ Im[α̇* α] dt′ over the whole grid

    CVector alpha_at_end() const { return alpha.row(alpha.rows() - 1).transpose(); }
    double phi_spread() const;
};

// ψ̂(x,t) acting on a product-space state: Σ_k e^{ikx − iε_k t} (row k).
CVector field_contraction(const Model& model, const StateVector& state, int x_site, double t);

GammaGrid gamma_exact(const StateVector& state_tilde, const dynamics::ZeroOrderSolution& sol,
                      const PositionGrid& grid, int step);

// |t⟩ → |0,k0) at the last grid node.
GammaGrid gamma_first_approx(const dynamics::ZeroOrderSolution& sol, const PositionGrid& grid);

AlphaField alpha_phi(const dynamics::ZeroOrderSolution& sol, const PositionGrid& grid);

GammaGrid gamma_closed_form(const AlphaField& field, const Model& model, int k0);

struct IntermediateState {
    CVector numeric;      // ψ̂(x′,0) U0(0)|0,k0)
    CVector analytic;     // e^{ik0x′ − iΦ(x′)} |α(x′,0))
    Complex alpha;
    double phi{0.0};
    double fidelity{0.0}; // |⟨analytic|numeric⟩|²
};

IntermediateState intermediate_state_check(const dynamics::ZeroOrderSolution& sol, int x_site);

double max_deviation(const GammaGrid& a, const GammaGrid& b);

}  // namespace ecstate::observables
