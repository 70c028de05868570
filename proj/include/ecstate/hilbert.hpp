// hilbert.hpp: Truncated single-particle ⊗ oscillator Hilbert space
//
// The particle lives on a periodic momentum lattice with N points
// k_n = 2πn/L (n in a symmetric window); the oscillator is truncated to
// Fock levels 0..M. Product-basis amplitudes are stored particle-major:
// index(k, n) = k * (M + 1) + n.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <vector>

namespace ecstate {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RowMajorCMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr Complex kI{0.0, 1.0};

// Periodic momentum lattice. Storage index i ∈ [0, N) maps to the signed
// momentum number n(i) = i for i ≤ ⌊N/2⌋, else i − N (FFT ordering). For even
// N the zone-edge number N/2 is kept positive and is its own negative mod N.
class Lattice {
public:
    Lattice(int sites, double length);

    int sites() const noexcept { return sites_; }
    double length() const noexcept { return length_; }

    // Signed momentum number of storage index i.
    int signed_index(int i) const;
    // Storage index of any integer momentum number (wraps modulo N).
    int wrap(int n) const noexcept;
    double momentum(int i) const;

    int add(int i, int j) const noexcept { return wrap(i + j); }
    int subtract(int i, int j) const noexcept { return wrap(i - j); }
    int negate(int j) const noexcept { return wrap(-j); }

    // Dual (position) lattice: x_m = m L / N. Only these positions make
    // e^{i k x} consistent with modular momentum arithmetic.
    double spacing() const noexcept { return length_ / sites_; }
    double site_position(int m) const noexcept { return m * spacing(); }

    void check_index(int i) const;

private:
    int sites_;
    double length_;
};

struct Dispersion {
    enum class Kind { quadratic, tight_binding };

    Kind kind{Kind::tight_binding};
    // quadratic: mass m; tight_binding: bandwidth J.
    double parameter{1.0};

    static Dispersion quadratic(double mass);
    static Dispersion tight_binding(double bandwidth);
    static Dispersion flat() { return tight_binding(0.0); }

    double energy(const Lattice& lattice, int i) const;
    Eigen::VectorXd energies(const Lattice& lattice) const;
};

struct OscillatorSpec {
    int cutoff{1};     // highest retained Fock level M
    double omega{1.0};

    OscillatorSpec(int cutoff, double omega);
    int levels() const noexcept { return cutoff + 1; }
};

// Lattice + dispersion + oscillator.
struct Model {
    Lattice lattice;
    Dispersion dispersion;
    OscillatorSpec oscillator;

    int sites() const noexcept { return lattice.sites(); }
    int levels() const noexcept { return oscillator.levels(); }
    int cutoff() const noexcept { return oscillator.cutoff; }
    Eigen::Index dim() const noexcept {
        return static_cast<Eigen::Index>(sites()) * levels();
    }
    Eigen::Index index(int k, int n) const noexcept {
        return static_cast<Eigen::Index>(k) * levels() + n;
    }
};

// Poisson tail e^{−|a|²} Σ_{n>M} |a|^{2n}/n!: norm lost when a coherent state
// of amplitude a is truncated at level M.
double poisson_tail(double amplitude, int cutoff);

// Throws std::invalid_argument unless |a|² ≤ M/4 and the Poisson tail is
// below tol.
void check_truncation(const OscillatorSpec& osc, double amplitude, double tol);

class StateVector {
public:
    StateVector(int sites, int levels);
    StateVector(int sites, int levels, CVector amplitudes);

    int sites() const noexcept { return sites_; }
    int levels() const noexcept { return levels_; }
    Eigen::Index dim() const noexcept { return amplitudes_.size(); }

    Complex& operator()(int k, int n) { return amplitudes_[static_cast<Eigen::Index>(k) * levels_ + n]; }
    Complex operator()(int k, int n) const { return amplitudes_[static_cast<Eigen::Index>(k) * levels_ + n]; }

    const CVector& amplitudes() const noexcept { return amplitudes_; }
    CVector& amplitudes() noexcept { return amplitudes_; }

    // N × (M+1) view with rows = particle momentum, cols = Fock level.
    Eigen::Map<const RowMajorCMatrix> as_matrix() const {
        return {amplitudes_.data(), sites_, levels_};
    }

    double norm() const { return amplitudes_.norm(); }
    // ⟨this|other⟩
    Complex dot(const StateVector& other) const;
    bool same_shape(const StateVector& other) const noexcept {
        return sites_ == other.sites_ && levels_ == other.levels_;
    }

private:
    int sites_;
    int levels_;
    CVector amplitudes_;
};

StateVector make_basis_state(const Model& model, int k0, int n);

// Sum of Kronecker terms particle ⊗ oscillator.
class ProductOperator {
public:
    struct Term {
        CMatrix particle;
        CMatrix oscillator;
    };

    ProductOperator(int sites, int levels);

    static ProductOperator product(CMatrix particle, CMatrix oscillator);
    static ProductOperator particle_only(CMatrix particle, int levels);
    static ProductOperator oscillator_only(int sites, CMatrix oscillator);

    int sites() const noexcept { return sites_; }
    int levels() const noexcept { return levels_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }

    void add_term(CMatrix particle, CMatrix oscillator);

    ProductOperator adjoint() const;
    StateVector apply(const StateVector& state) const;
    CMatrix dense() const;

    ProductOperator& operator+=(const ProductOperator& other);
    ProductOperator& operator*=(Complex scale);
    friend ProductOperator operator+(ProductOperator a, const ProductOperator& b) { return a += b; }
    friend ProductOperator operator-(ProductOperator a, const ProductOperator& b);
    friend ProductOperator operator*(ProductOperator a, Complex s) { return a *= s; }
    friend ProductOperator operator*(Complex s, ProductOperator a) { return a *= s; }
    // Composition (a ∘ b).
    friend ProductOperator operator*(const ProductOperator& a, const ProductOperator& b);

private:
    int sites_;
    int levels_;
    std::vector<Term> terms_;
};

// Map q ↦ h_q over lattice offsets (storage indices); absent entries are zero.
class CoefficientSet {
public:
    explicit CoefficientSet(int sites);
    CoefficientSet(const Lattice& lattice, const std::map<int, Complex>& by_signed_offset);

    static CoefficientSet single_mode(const Lattice& lattice, int q_index, Complex g);

    int sites() const noexcept { return static_cast<int>(values_.size()); }
    Complex operator[](int q) const { return values_[static_cast<Eigen::Index>(q)]; }
    Complex& operator[](int q) { return values_[static_cast<Eigen::Index>(q)]; }
    const CVector& values() const noexcept { return values_; }

    // Σ_q |h_q|: bound on the coherent amplitude |α(x)| at any position.
    double total_amplitude() const { return values_.cwiseAbs().sum(); }
    bool is_zero() const { return values_.isZero(0.0); }
    CoefficientSet scaled(Complex z) const;

private:
    CVector values_;
};

// Particle-factor matrices.
CMatrix rho_matrix(const Lattice& lattice, int q);
CMatrix q_matrix(const Lattice& lattice, const CoefficientSet& h);
CMatrix annihilation_matrix(int levels);
CMatrix creation_matrix(int levels);

// ρ_q = Σ_k a†_k a_{k+q}: maps |k+q⟩ → |k⟩, identity on the oscillator.
ProductOperator rho(const Model& model, int q);
ProductOperator ladder_b(const Model& model);
ProductOperator ladder_b_dag(const Model& model);
ProductOperator number_operator(const Model& model);
// Q̂ = Σ_q h_q ρ_q.
ProductOperator build_Q(const Model& model, const CoefficientSet& h);

}  // namespace ecstate
