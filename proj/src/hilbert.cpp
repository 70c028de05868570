#include "ecstate/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ecstate {

Lattice::Lattice(int sites, double length) : sites_(sites), length_(length) {
    if (sites < 1) throw std::invalid_argument("Lattice: sites must be positive");
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument("Lattice: length must be positive and finite");
    }
}

int Lattice::signed_index(int i) const {
    check_index(i);
    return i <= sites_ / 2 ? i : i - sites_;
}

int Lattice::wrap(int n) const noexcept {
    const int r = n % sites_;
    return r < 0 ? r + sites_ : r;
}

double Lattice::momentum(int i) const {
    return 2.0 * std::numbers::pi * signed_index(i) / length_;
}

void Lattice::check_index(int i) const {
    if (i < 0 || i >= sites_) {
        throw std::invalid_argument("momentum index " + std::to_string(i) +
                                    " outside lattice of " + std::to_string(sites_) + " sites");
    }
}

Dispersion Dispersion::quadratic(double mass) {
    if (!(mass > 0.0)) throw std::invalid_argument("Dispersion: mass must be positive");
    return {Kind::quadratic, mass};
}

Dispersion Dispersion::tight_binding(double bandwidth) {
    if (!std::isfinite(bandwidth)) throw std::invalid_argument("Dispersion: bandwidth must be finite");
    return {Kind::tight_binding, bandwidth};
}

double Dispersion::energy(const Lattice& lattice, int i) const {
    const double k = lattice.momentum(i);
    switch (kind) {
        case Kind::quadratic:
            return k * k / (2.0 * parameter);
        case Kind::tight_binding:
            // −J cos(k a) with lattice spacing a = L/N: periodic on the zone.
            return -parameter * std::cos(k * lattice.spacing());
    }
    return 0.0;
}

Eigen::VectorXd Dispersion::energies(const Lattice& lattice) const {
    Eigen::VectorXd e(lattice.sites());
    for (int i = 0; i < lattice.sites(); ++i) e[i] = energy(lattice, i);
    return e;
}

OscillatorSpec::OscillatorSpec(int cutoff_, double omega_) : cutoff(cutoff_), omega(omega_) {
    if (cutoff < 1) throw std::invalid_argument("OscillatorSpec: cutoff must be >= 1");
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw std::invalid_argument("OscillatorSpec: omega must be positive");
    }
}

double poisson_tail(double amplitude, int cutoff) {
    const double mean = amplitude * amplitude;
    if (mean == 0.0) return 0.0;
    // Sum the tail directly from n = M+1 upward; terms decay once n > mean.
    double log_term = -mean + (cutoff + 1) * std::log(mean) - std::lgamma(cutoff + 2.0);
    double term = std::exp(log_term);
    double tail = 0.0;
    for (int n = cutoff + 1; n < cutoff + 2000; ++n) {
        tail += term;
        term *= mean / (n + 1);
        if (n > mean && term < 1e-18 * tail) break;
    }
    return std::min(tail, 1.0);
}

void check_truncation(const OscillatorSpec& osc, double amplitude, double tol) {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw std::invalid_argument("truncation rule: amplitude must be finite and non-negative");
    }
    const double a2 = amplitude * amplitude;
    if (a2 > osc.cutoff / 4.0) {
        throw std::invalid_argument("truncation rule violated: |amplitude|^2 = " + std::to_string(a2) +
                                    " exceeds M/4 = " + std::to_string(osc.cutoff / 4.0) +
                                    " (raise the Fock cutoff or reduce the coupling)");
    }
    const double tail = poisson_tail(amplitude, osc.cutoff);
    if (tail > tol) {
        throw std::invalid_argument("truncation tail " + std::to_string(tail) +
                                    " exceeds tolerance at cutoff M = " + std::to_string(osc.cutoff));
    }
}

StateVector::StateVector(int sites, int levels)
    : sites_(sites), levels_(levels), amplitudes_(CVector::Zero(static_cast<Eigen::Index>(sites) * levels)) {}

StateVector::StateVector(int sites, int levels, CVector amplitudes)
    : sites_(sites), levels_(levels), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != static_cast<Eigen::Index>(sites) * levels) {
        throw std::invalid_argument("StateVector: amplitude count does not match sites x levels");
    }
}

Complex StateVector::dot(const StateVector& other) const {
    if (!same_shape(other)) throw std::invalid_argument("StateVector::dot: dimension mismatch");
    return amplitudes_.dot(other.amplitudes_);
}

StateVector make_basis_state(const Model& model, int k0, int n) {
    model.lattice.check_index(k0);
    if (n < 0 || n > model.cutoff()) {
        throw std::invalid_argument("make_basis_state: Fock level " + std::to_string(n) + " outside 0..M");
    }
    StateVector v(model.sites(), model.levels());
    v(k0, n) = 1.0;
    return v;
}

// ---------------------------------------------------------------------------

ProductOperator::ProductOperator(int sites, int levels) : sites_(sites), levels_(levels) {}

ProductOperator ProductOperator::product(CMatrix particle, CMatrix oscillator) {
    ProductOperator op(static_cast<int>(particle.rows()), static_cast<int>(oscillator.rows()));
    op.add_term(std::move(particle), std::move(oscillator));
    return op;
}

ProductOperator ProductOperator::particle_only(CMatrix particle, int levels) {
    return product(std::move(particle), CMatrix::Identity(levels, levels));
}

ProductOperator ProductOperator::oscillator_only(int sites, CMatrix oscillator) {
    return product(CMatrix::Identity(sites, sites), std::move(oscillator));
}

void ProductOperator::add_term(CMatrix particle, CMatrix oscillator) {
    if (particle.rows() != sites_ || particle.cols() != sites_ ||
        oscillator.rows() != levels_ || oscillator.cols() != levels_) {
        throw std::invalid_argument("ProductOperator: term dimensions do not match");
    }
    terms_.push_back({std::move(particle), std::move(oscillator)});
}

ProductOperator ProductOperator::adjoint() const {
    ProductOperator out(sites_, levels_);
    for (const auto& t : terms_) out.terms_.push_back({t.particle.adjoint(), t.oscillator.adjoint()});
    return out;
}

StateVector ProductOperator::apply(const StateVector& state) const {
    if (state.sites() != sites_ || state.levels() != levels_) {
        throw std::invalid_argument("ProductOperator::apply: dimension mismatch");
    }
    const auto psi = state.as_matrix();
    RowMajorCMatrix out = RowMajorCMatrix::Zero(sites_, levels_);
    // (A ⊗ B) vec(Ψ) = vec(A Ψ Bᵀ) for particle-major storage.
    for (const auto& t : terms_) out.noalias() += t.particle * psi * t.oscillator.transpose();
    return {sites_, levels_, Eigen::Map<const CVector>(out.data(), out.size())};
}

CMatrix ProductOperator::dense() const {
    const Eigen::Index d = static_cast<Eigen::Index>(sites_) * levels_;
    CMatrix out = CMatrix::Zero(d, d);
    for (const auto& t : terms_) {
        for (int a = 0; a < sites_; ++a) {
            for (int b = 0; b < sites_; ++b) {
                const Complex pab = t.particle(a, b);
                if (pab == Complex{}) continue;
                out.block(static_cast<Eigen::Index>(a) * levels_, static_cast<Eigen::Index>(b) * levels_,
                          levels_, levels_) += pab * t.oscillator;
            }
        }
    }
    return out;
}

ProductOperator& ProductOperator::operator+=(const ProductOperator& other) {
    if (other.sites_ != sites_ || other.levels_ != levels_) {
        throw std::invalid_argument("ProductOperator: sum of mismatched operators");
    }
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

ProductOperator& ProductOperator::operator*=(Complex scale) {
    for (auto& t : terms_) t.particle *= scale;
    return *this;
}

ProductOperator operator-(ProductOperator a, const ProductOperator& b) {
    return a += (-1.0) * ProductOperator(b);
}

ProductOperator operator*(const ProductOperator& a, const ProductOperator& b) {
    if (a.sites_ != b.sites_ || a.levels_ != b.levels_) {
        throw std::invalid_argument("ProductOperator: composition of mismatched operators");
    }
    ProductOperator out(a.sites_, a.levels_);
    for (const auto& ta : a.terms_) {
        for (const auto& tb : b.terms_) {
            out.terms_.push_back({ta.particle * tb.particle, ta.oscillator * tb.oscillator});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

CoefficientSet::CoefficientSet(int sites) : values_(CVector::Zero(sites)) {}

CoefficientSet::CoefficientSet(const Lattice& lattice, const std::map<int, Complex>& by_signed_offset)
    : values_(CVector::Zero(lattice.sites())) {
    for (const auto& [n, value] : by_signed_offset) {
        const int j = lattice.wrap(n);
        if (lattice.signed_index(j) != n) {
            throw std::invalid_argument("CoefficientSet: offset " + std::to_string(n) +
                                        " outside the lattice momentum window");
        }
        values_[j] = value;
    }
}

CoefficientSet CoefficientSet::single_mode(const Lattice& lattice, int q_index, Complex g) {
    lattice.check_index(q_index);
    CoefficientSet h(lattice.sites());
    h[q_index] = g;
    return h;
}

CoefficientSet CoefficientSet::scaled(Complex z) const {
    CoefficientSet out(sites());
    out.values_ = z * values_;
    return out;
}

CMatrix rho_matrix(const Lattice& lattice, int q) {
    lattice.check_index(q);
    const int n = lattice.sites();
    CMatrix r = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) r(k, lattice.add(k, q)) = 1.0;
    return r;
}

CMatrix q_matrix(const Lattice& lattice, const CoefficientSet& h) {
    if (h.sites() != lattice.sites()) throw std::invalid_argument("q_matrix: coefficient set size mismatch");
    const int n = lattice.sites();
    CMatrix out = CMatrix::Zero(n, n);
    for (int q = 0; q < n; ++q) {
        if (h[q] == Complex{}) continue;
        for (int k = 0; k < n; ++k) out(k, lattice.add(k, q)) += h[q];
    }
    return out;
}

CMatrix annihilation_matrix(int levels) {
    CMatrix b = CMatrix::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

CMatrix creation_matrix(int levels) { return annihilation_matrix(levels).adjoint(); }

ProductOperator rho(const Model& model, int q) {
    return ProductOperator::particle_only(rho_matrix(model.lattice, q), model.levels());
}

ProductOperator ladder_b(const Model& model) {
    return ProductOperator::oscillator_only(model.sites(), annihilation_matrix(model.levels()));
}

ProductOperator ladder_b_dag(const Model& model) {
    return ProductOperator::oscillator_only(model.sites(), creation_matrix(model.levels()));
}

ProductOperator number_operator(const Model& model) { return ladder_b_dag(model) * ladder_b(model); }

ProductOperator build_Q(const Model& model, const CoefficientSet& h) {
    return ProductOperator::particle_only(q_matrix(model.lattice, h), model.levels());
}

}  // namespace ecstate
