#include "ecstate/dynamics.hpp"

#include "ecstate/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ecstate::dynamics {

CouplingSet::CouplingSet(const Lattice& lattice, CoefficientSet values, double tol) : values_(std::move(values)) {
    if (values_.sites() != lattice.sites()) throw std::invalid_argument("CouplingSet: size does not match lattice");
    for (int q = 0; q < lattice.sites(); ++q) {
        const Complex partner = values_[lattice.negate(q)];
        if (std::abs(partner - std::conj(values_[q])) > tol) {
            throw std::invalid_argument("CouplingSet: g_{-q} must equal conj(g_q) (violated at offset " +
                                        std::to_string(lattice.signed_index(q)) + ")");
        }
    }
}

CouplingSet CouplingSet::scaled(double s) const {
    CouplingSet out = *this;
    out.values_ = values_.scaled(s);
    return out;
}

// ---------------------------------------------------------------------------

Modulator Modulator::static_unit() {
    return {Kind::static_unit, [](int, double) { return 0.0; }};
}

Modulator Modulator::recoil_phase(const Model& model, int k0) {
    model.lattice.check_index(k0);
    const Eigen::VectorXd eps = model.dispersion.energies(model.lattice);
    const Lattice lattice = model.lattice;
    return {Kind::recoil_phase, [eps, lattice, k0](int q, double t) {
                return (eps[lattice.subtract(k0, q)] - eps[k0]) * t;
            }};
}

Modulator Modulator::custom_phase(PhaseFn phase) {
    if (!phase) throw std::invalid_argument("Modulator::custom_phase: empty phase function");
    return {Kind::custom_phase, std::move(phase)};
}

double Modulator::phase(int q, double t) const { return phase_(q, t); }

Complex Modulator::operator()(int q, double t) const { return std::exp(kI * phase_(q, t)); }

std::string Modulator::name() const {
    switch (kind_) {
        case Kind::static_unit: return "static_unit";
        case Kind::recoil_phase: return "recoil_phase";
        case Kind::custom_phase: return "custom_phase";
    }
    return "unknown";
}

Modulator modulator_by_name(const std::string& name, const Model& model, int k0) {
    if (name == "static_unit") return Modulator::static_unit();
    if (name == "recoil_phase") return Modulator::recoil_phase(model, k0);
    throw std::invalid_argument("unknown strategy '" + name + "' (expected static_unit or recoil_phase)");
}

double unimodularity_defect(const Modulator& f, int sites, const std::vector<double>& times) {
    double worst = 0.0;
    for (int q = 0; q < sites; ++q) {
        for (double t : times) worst = std::max(worst, std::abs(std::abs(f(q, t)) - 1.0));
    }
    return worst;
}

// ---------------------------------------------------------------------------

CMatrix interaction_rho(const Model& model, int q, double t) {
    const Eigen::VectorXd eps = model.dispersion.energies(model.lattice);
    CMatrix r = rho_matrix(model.lattice, q);
    for (int k = 0; k < model.sites(); ++k) {
        const int kq = model.lattice.add(k, q);
        r(k, kq) = std::exp(kI * ((eps[k] - eps[kq]) * t));
    }
    return r;
}

CMatrix coupling_operator(const Model& model, const CouplingSet& g, double t, Picture picture) {
    CMatrix a = CMatrix::Zero(model.sites(), model.sites());
    for (int q = 0; q < model.sites(); ++q) {
        if (g[q] == Complex{}) continue;
        a += g[q] * (picture == Picture::interaction ? interaction_rho(model, q, t) : rho_matrix(model.lattice, q));
    }
    return a;
}

CMatrix modulated_coupling(const Model& model, const CouplingSet& g, const Modulator& f, double t) {
    CMatrix a = CMatrix::Zero(model.sites(), model.sites());
    for (int q = 0; q < model.sites(); ++q) {
        if (g[q] == Complex{}) continue;
        a += g[q] * f(q, t) * rho_matrix(model.lattice, q);
    }
    return a;
}

namespace {

ProductOperator linear_coupling(const Model& model, const CMatrix& a, double t) {
    const Complex phase = std::exp(kI * (model.oscillator.omega * t));
    ProductOperator h(model.sites(), model.levels());
    h.add_term(phase * a, creation_matrix(model.levels()));
    h.add_term(std::conj(phase) * a.adjoint(), annihilation_matrix(model.levels()));
    return h;
}

}  // namespace

ProductOperator hamiltonian_full(const Model& model, const CouplingSet& g, double t, Picture picture) {
    if (g.sites() != model.sites()) throw std::invalid_argument("hamiltonian_full: couplings do not match model");
    if (picture == Picture::schrodinger) return linear_coupling(model, coupling_operator(model, g, t, picture), 0.0);
    return linear_coupling(model, coupling_operator(model, g, t, picture), t);
}

CMatrix commutator_rho_t(const Model& model, int q, int q_prime, double t, double t_prime) {
    const Eigen::VectorXd eps = model.dispersion.energies(model.lattice);
    auto conjugate = [&](int offset, double time) {
        CVector phases(model.sites());
        for (int k = 0; k < model.sites(); ++k) phases[k] = std::exp(kI * (eps[k] * time));
        const CMatrix forward = phases.asDiagonal();
        return CMatrix(forward * rho_matrix(model.lattice, offset) * forward.adjoint());
    };
    const CMatrix a = conjugate(q, t);
    const CMatrix b = conjugate(q_prime, t_prime);
    return a * b - b * a;
}

CMatrix commutator_rho_t_formula(const Model& model, int q, int q_prime, double t, double t_prime) {
    const Eigen::VectorXd eps = model.dispersion.energies(model.lattice);
    const Lattice& lat = model.lattice;
    CMatrix c = CMatrix::Zero(model.sites(), model.sites());
    for (int k = 0; k < model.sites(); ++k) {
        const int kq = lat.add(k, q);
        const int kqp = lat.add(k, q_prime);
        const int kqqp = lat.add(kq, q_prime);
        const double first = eps[k] * t - eps[kqqp] * t_prime - eps[kq] * (t - t_prime);
        const double second = eps[k] * t_prime - eps[kqqp] * t + eps[kqp] * (t - t_prime);
        c(k, kqqp) += std::exp(kI * first) - std::exp(kI * second);
    }
    return c;
}

SplitHamiltonian split_hamiltonian(const Model& model, const CouplingSet& g, const Modulator& f, double t) {
    ProductOperator h0 = linear_coupling(model, modulated_coupling(model, g, f, t), t);
    ProductOperator h1 = hamiltonian_full(model, g, t, Picture::interaction) - h0;
    return {std::move(h0), std::move(h1)};
}

double hamiltonian_bound(const Model& model, const CouplingSet& g) {
    return 2.0 * std::sqrt(static_cast<double>(model.cutoff())) * g.total_magnitude();
}

void check_grid(const Model& model, const CouplingSet& g, const TimeGrid& grid) {
    const double product = grid.dt() * hamiltonian_bound(model, g);
    if (!(product < 0.5)) {
        throw std::invalid_argument("unstable time grid: dt*|H| = " + std::to_string(product) +
                                    " (must be < 0.5; increase steps)");
    }
}

// ---------------------------------------------------------------------------

CoefficientSet ZeroOrderSolution::h_dot(double t) const {
    CoefficientSet d(model_.sites());
    const Complex osc = std::exp(kI * (model_.oscillator.omega * t));
    for (int q = 0; q < model_.sites(); ++q) {
        if (couplings_[q] == Complex{}) continue;
        d[q] = -kI * couplings_[q] * modulator_(q, t) * osc;
    }
    return d;
}

CMatrix ZeroOrderSolution::generator(const CoefficientSet& h, const CMatrix& chi) const {
    const CMatrix q = q_matrix(model_.lattice, h);
    ProductOperator g(model_.sites(), model_.levels());
    g.add_term(q, creation_matrix(model_.levels()));
    g.add_term(-q.adjoint(), annihilation_matrix(model_.levels()));
    g.add_term(-kI * chi, CMatrix::Identity(model_.levels(), model_.levels()));
    return g.dense();
}

namespace {

// exp{Q̂b† − Q̂†b − iχ̂}. Q̂ and χ̂ are circulant in the particle index, so the
// dual-lattice Fourier basis |x_m⟩ = N^{−1/2} Σ_k e^{ikx_m}|k⟩ diagonalises both
// and the exponential splits into N oscillator blocks of size M+1.
CMatrix block_exponential(const Model& model, const CoefficientSet& h, const CMatrix& chi) {
    const int n = model.sites();
    const int levels = model.levels();
    CMatrix fourier(n, n);
    for (int k = 0; k < n; ++k) {
        for (int m = 0; m < n; ++m) {
            fourier(k, m) = std::exp(kI * (model.lattice.momentum(k) * model.lattice.site_position(m))) /
                            std::sqrt(static_cast<double>(n));
        }
    }
    const CVector lambda = (fourier.adjoint() * q_matrix(model.lattice, h) * fourier).diagonal();
    const CVector phase = (fourier.adjoint() * chi * fourier).diagonal();

    const CMatrix b = annihilation_matrix(levels);
    const CMatrix bd = creation_matrix(levels);
    std::vector<CMatrix> blocks;
    blocks.reserve(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        const CMatrix gen = lambda[m] * bd - std::conj(lambda[m]) * b;
        blocks.push_back(std::exp(-kI * phase[m].real()) * linalg::anti_hermitian_exp(gen));
    }

    CMatrix u = CMatrix::Zero(model.dim(), model.dim());
    for (int k = 0; k < n; ++k) {
        for (int kp = 0; kp < n; ++kp) {
            auto block = u.block(model.index(k, 0), model.index(kp, 0), levels, levels);
            for (int m = 0; m < n; ++m) block += (fourier(k, m) * std::conj(fourier(kp, m))) * blocks[m];
        }
    }
    return u;
}

}  // namespace

CMatrix ZeroOrderSolution::propagator(int i) const { return block_exponential(model_, h(i), chi(i)); }

CMatrix ZeroOrderSolution::propagator_midpoint(int i) const {
    return block_exponential(model_, h_midpoint(i), chi_midpoint(i));
}

StateVector ZeroOrderSolution::state(int i) const {
    const StateVector vac = make_basis_state(model_, k0_, 0);
    return {model_.sites(), model_.levels(), propagator(i) * vac.amplitudes()};
}

double ZeroOrderSolution::max_amplitude() const {
    double worst = 0.0;
    for (const auto& h : h_) worst = std::max(worst, h.total_amplitude());
    for (const auto& h : h_mid_) worst = std::max(worst, h.total_amplitude());
    return worst;
}

namespace {

// (i/2)[Q̂†Q̇̂ − Q̇̂†Q̂]: the χ̂ integrand.
CMatrix chi_integrand(const Lattice& lattice, const CoefficientSet& h, const CoefficientSet& h_dot) {
    const CMatrix q = q_matrix(lattice, h);
    const CMatrix qd = q_matrix(lattice, h_dot);
    const CMatrix x = q.adjoint() * qd;
    return 0.5 * kI * (x - x.adjoint());
}

CoefficientSet trapezoid_step(const CoefficientSet& h, const CoefficientSet& da, const CoefficientSet& db,
                              double width) {
    CoefficientSet out = h;
    for (int q = 0; q < h.sites(); ++q) out[q] += 0.5 * width * (da[q] + db[q]);
    return out;
}

}  // namespace

ZeroOrderSolution zero_order_solution(const Model& model, const CouplingSet& g, const Modulator& f,
                                      const TimeGrid& grid, int k0, double tol) {
    model.lattice.check_index(k0);
    if (g.sites() != model.sites()) throw std::invalid_argument("zero_order_solution: couplings do not match model");
    check_grid(model, g, grid);

    ZeroOrderSolution sol(model, g, f, grid, k0);
    const auto steps = static_cast<std::size_t>(grid.steps);
    sol.h_.reserve(steps + 1);
    sol.chi_.reserve(steps + 1);
    sol.h_mid_.reserve(steps);
    sol.chi_mid_.reserve(steps);

    const double dt = grid.dt();
    const Lattice& lat = model.lattice;
    sol.h_.emplace_back(model.sites());
    sol.chi_.push_back(CMatrix::Zero(model.sites(), model.sites()));

    CoefficientSet hd = sol.h_dot(grid.time(0));
    CMatrix integrand = chi_integrand(lat, sol.h_.back(), hd);
    for (int i = 0; i < grid.steps; ++i) {
        const CoefficientSet& h_i = sol.h_.back();
        const CMatrix& chi_i = sol.chi_.back();

        const CoefficientSet hd_mid = sol.h_dot(grid.midpoint(i));
        CoefficientSet h_mid = trapezoid_step(h_i, hd, hd_mid, 0.5 * dt);
        const CMatrix integrand_mid = chi_integrand(lat, h_mid, hd_mid);
        sol.chi_mid_.push_back(chi_i + 0.25 * dt * (integrand + integrand_mid));
        sol.h_mid_.push_back(std::move(h_mid));

        const CoefficientSet hd_next = sol.h_dot(grid.time(i + 1));
        CoefficientSet h_next = trapezoid_step(h_i, hd, hd_next, dt);
        const CMatrix integrand_next = chi_integrand(lat, h_next, hd_next);
        CMatrix chi_next = chi_i + 0.5 * dt * (integrand + integrand_next);
        sol.chi_.push_back(0.5 * (chi_next + chi_next.adjoint()));
        sol.h_.push_back(std::move(h_next));

        hd = hd_next;
        integrand = integrand_next;
    }

    check_truncation(model.oscillator, sol.max_amplitude(), tol);
    return sol;
}

// ---------------------------------------------------------------------------

int reliable_level(int cutoff, double amplitude, double tol) {
    if (amplitude == 0.0) return cutoff;
    const double log_a = std::log(amplitude);
    const double log_tol = std::log(tol);
    for (int m = cutoff; m >= 0; --m) {
        const int d = cutoff + 1 - m;
        const double log_leak =
            d * log_a + 0.5 * (std::lgamma(cutoff + 2.0) - std::lgamma(m + 1.0)) - std::lgamma(d + 1.0);
        if (log_leak < log_tol) return m;
    }
    return 0;
}

CommutatorResiduals u0_commutators_check(const ZeroOrderSolution& sol, int i, int max_level) {
    const Model& model = sol.model();
    const CMatrix u = sol.propagator(i);
    const CMatrix ud = u.adjoint();
    const CMatrix b = ladder_b(model).dense();
    const CMatrix bd = ladder_b_dag(model).dense();
    const CMatrix q = build_Q(model, sol.h(i)).dense();
    const CMatrix qd = q.adjoint();

    CommutatorResiduals out;
    out.max_level = max_level >= 0 ? std::min(max_level, model.cutoff())
                                   : reliable_level(model.cutoff(), sol.h(i).total_amplitude());

    const std::array<CMatrix, 4> residual = {
        CMatrix(b * u - u * b - u * q),
        CMatrix(b * ud - ud * b + ud * q),
        CMatrix(bd * u - u * bd - u * qd),
        CMatrix(bd * ud - ud * bd + ud * qd),
    };
    for (std::size_t r = 0; r < residual.size(); ++r) {
        double sum2 = 0.0;
        for (Eigen::Index col = 0; col < residual[r].cols(); ++col) {
            if (col % model.levels() > out.max_level) continue;
            sum2 += residual[r].col(col).squaredNorm();
        }
        out.residuals[r] = std::sqrt(sum2);
        out.max_residual = std::max(out.max_residual, out.residuals[r]);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

CMatrix tilde_residual_hamiltonian(const ZeroOrderSolution& sol, int i, CMatrix* h1_out) {
    const double t = sol.grid().midpoint(i);
    const CMatrix h1 = split_hamiltonian(sol.model(), sol.couplings(), sol.modulator(), t).h1.dense();
    const CMatrix u = sol.propagator_midpoint(i);
    if (h1_out != nullptr) *h1_out = h1;
    const CMatrix ht = u.adjoint() * h1 * u;
    return 0.5 * (ht + ht.adjoint());
}

}  // namespace

StateVector propagate_residual(const ZeroOrderSolution& sol, const ResidualObserver& observer) {
    const Model& model = sol.model();
    const TimeGrid& grid = sol.grid();
    StateVector psi = make_basis_state(model, sol.k0(), 0);
    if (observer) observer(0, grid.time(0), psi);
    if (sol.couplings().is_zero()) {
        for (int i = 1; i <= grid.steps; ++i) {
            if (observer) observer(i, grid.time(i), psi);
        }
        return psi;
    }
    for (int i = 0; i < grid.steps; ++i) {
        const CMatrix ht = tilde_residual_hamiltonian(sol, i, nullptr);
        psi.amplitudes() = linalg::unitary_exp(ht, grid.dt()) * psi.amplitudes();
        if (observer) observer(i + 1, grid.time(i + 1), psi);
    }
    return psi;
}

StateVector propagate_residual(const Model& model, const CouplingSet& g, const Modulator& f, const TimeGrid& grid,
                               int k0, const ResidualObserver& observer) {
    return propagate_residual(zero_order_solution(model, g, f, grid, k0), observer);
}

ResidualReport residual_magnitude_report(const Model& model, const CouplingSet& g, const Modulator& f,
                                         const TimeGrid& grid, int k0) {
    const ZeroOrderSolution sol = zero_order_solution(model, g, f, grid, k0);
    ResidualReport report;
    report.strategy = f.name();
    const StateVector initial = make_basis_state(model, k0, 0);

    StateVector psi = initial;
    double bound = 0.0;
    auto record = [&](int i) {
        report.times.push_back(grid.time(i));
        report.residual_norm.push_back((psi.amplitudes() - initial.amplitudes()).norm());
        report.h_norm.push_back(sol.h(i).total_amplitude());
        report.first_order_bound.push_back(bound);
    };
    record(0);
    for (int i = 0; i < grid.steps; ++i) {
        if (!g.is_zero()) {
            CMatrix h1;
            const CMatrix ht = tilde_residual_hamiltonian(sol, i, &h1);
            bound += grid.dt() * linalg::hermitian_norm(0.5 * (h1 + h1.adjoint()));
            psi.amplitudes() = linalg::unitary_exp(ht, grid.dt()) * psi.amplitudes();
        }
        record(i + 1);
    }
    return report;
}

}  // namespace ecstate::dynamics
