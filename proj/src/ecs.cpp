#include "ecstate/ecs.hpp"

#include "ecstate/linalg.hpp"
#include "ecstate/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ecstate::ecs {

namespace {

// exp(−½ Q̂†Q̂) Σ_{n ≤ cap} (Q̂ b†)ⁿ / n! |0,k0), without any truncation guard.
StateVector series_state(const Model& model, const CoefficientSet& h, int k0, int cap) {
    const CMatrix q = q_matrix(model.lattice, h);
    const ProductOperator step = ProductOperator::product(q, creation_matrix(model.levels()));

    StateVector term = make_basis_state(model, k0, 0);
    StateVector sum = term;
    for (int n = 1; n <= cap; ++n) {
        term = step.apply(term);
        term.amplitudes() /= static_cast<double>(n);
        sum.amplitudes() += term.amplitudes();
    }

    const CMatrix qdq = q.adjoint() * q;
    const CMatrix prefactor = linalg::hermitian_function(0.5 * (qdq + qdq.adjoint()),
                                                         [](double e) { return Complex{std::exp(-0.5 * e)}; });
    return ProductOperator::particle_only(prefactor, model.levels()).apply(sum);
}

}  // namespace

EcsState ecs_series(const Model& model, const CoefficientSet& h, int k0, int order_cap, double tol) {
    model.lattice.check_index(k0);
    if (order_cap < 0 || order_cap > model.cutoff()) {
        throw std::invalid_argument("ecs_series: order cap must lie in 0..M");
    }
    check_truncation(model.oscillator, h.total_amplitude(), tol);
    return {series_state(model, h, k0, order_cap), h, k0, Construction::series};
}

CMatrix displacement_generator(const Model& model, const CoefficientSet& h) {
    const ProductOperator q = build_Q(model, h);
    const ProductOperator gen = q * ladder_b_dag(model) - q.adjoint() * ladder_b(model);
    return gen.dense();
}

EcsState ecs_displacement(const Model& model, const CoefficientSet& h, int k0, double tol) {
    model.lattice.check_index(k0);
    check_truncation(model.oscillator, h.total_amplitude(), tol);
    const CMatrix u = linalg::anti_hermitian_exp(displacement_generator(model, h));
    const StateVector vac = make_basis_state(model, k0, 0);
    return {StateVector(model.sites(), model.levels(), u * vac.amplitudes()), h, k0, Construction::displacement};
}

EcsState build(const Model& model, const CoefficientSet& h, int k0, Construction construction) {
    return construction == Construction::series ? ecs_series(model, h, k0) : ecs_displacement(model, h, k0);
}

double check_b_action(const Model& model, const EcsState& ecs) {
    const StateVector lhs = ladder_b(model).apply(ecs.state);
    const StateVector rhs = build_Q(model, ecs.h).apply(ecs.state);
    return (lhs.amplitudes() - rhs.amplitudes()).norm();
}

Complex overlap(const EcsState& ecs1, const EcsState& ecs2) {
    if (!ecs1.state.same_shape(ecs2.state)) throw std::invalid_argument("overlap: dimension mismatch");
    return ecs1.state.dot(ecs2.state);
}

Complex single_mode_overlap(Complex g, int k0, Complex g_prime, int k0_prime) {
    if (k0 != k0_prime) return {0.0, 0.0};
    return std::exp(-0.5 * (std::norm(g) + std::norm(g_prime) - 2.0 * std::conj(g) * g_prime));
}

double momentum_shift_check(const Model& model, const EcsState& ecs, int q) {
    const ProductOperator shift = rho(model, q);
    const StateVector shifted = shift.apply(ecs.state);
    const EcsState target = build(model, ecs.h, model.lattice.subtract(ecs.k0, q), ecs.construction);
    const StateVector round_trip = shift.adjoint().apply(shifted);
    return std::max((shifted.amplitudes() - target.state.amplitudes()).norm(),
                    (round_trip.amplitudes() - ecs.state.amplitudes()).norm());
}

UnityResolution unity_resolution_check(const Model& model, const CoefficientSet& h, int radial_nodes,
                                       int angular_nodes) {
    if (radial_nodes < 1 || angular_nodes < 1) {
        throw std::invalid_argument("unity_resolution_check: node counts must be positive");
    }
    const CMatrix q = q_matrix(model.lattice, h);
    const CMatrix qdq = q.adjoint() * q;
    Eigen::SelfAdjointEigenSolver<CMatrix> spectrum(0.5 * (qdq + qdq.adjoint()));
    const Eigen::VectorXd& lambda = spectrum.eigenvalues();
    const double top = std::max(lambda.maxCoeff(), 0.0);
    if (top == 0.0) {
        throw std::invalid_argument("unity_resolution_check: Q has no support (h is identically zero)");
    }

    const ProductOperator q_op = build_Q(model, h);
    const Eigen::Index dim = model.dim();

    UnityResolution out;
    out.resolved = CMatrix::Zero(dim, dim);

    // Q̂ is normal, so every node contributes a block-diagonal term in the
    // eigenspaces of Q̂†Q̂. Each eigenspace gets a polar rule scaled to its own
    // Gaussian e^{−λ|z|²}; kernel directions (λ = 0) receive nothing.
    Eigen::Index first = 0;
    while (first < lambda.size()) {
        Eigen::Index last = first + 1;
        while (last < lambda.size() && lambda[last] - lambda[first] <= 1e-10 * top) ++last;
        const double lam = lambda.segment(first, last - first).mean();
        if (lam > 1e-12 * top) {
            const CMatrix v = spectrum.eigenvectors().middleCols(first, last - first);
            const ProductOperator projector = ProductOperator::particle_only(v * v.adjoint(), model.levels());
            const auto rule = quadrature::polar_rule(std::sqrt(lam), radial_nodes, angular_nodes);

            // Σ w |u⟩⟨u| as U Uᴴ with columns √(w/π) P Q̂|zh,k⟩.
            CMatrix columns(dim, static_cast<Eigen::Index>(rule.nodes.size()) * model.sites());
            Eigen::Index col = 0;
            for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                const CoefficientSet zh = h.scaled(rule.nodes[j]);
                const double root_w = std::sqrt(rule.weights[j] / std::numbers::pi);
                for (int k = 0; k < model.sites(); ++k) {
                    const StateVector u = projector.apply(q_op.apply(series_state(model, zh, k, model.cutoff())));
                    columns.col(col++) = root_w * u.amplitudes();
                }
            }
            out.resolved += columns * columns.adjoint();
        }
        first = last;
    }
    out.reliable_max_level = std::min({model.cutoff(), 2 * radial_nodes - 1, angular_nodes - 1});

    double sum2 = 0.0;
    for (Eigen::Index a = 0; a < dim; ++a) {
        if (a % model.levels() > out.reliable_max_level) continue;
        for (Eigen::Index b = 0; b < dim; ++b) {
            if (b % model.levels() > out.reliable_max_level) continue;
            const Complex target = a == b ? Complex{1.0} : Complex{};
            sum2 += std::norm(out.resolved(a, b) - target);
        }
    }
    out.deviation = std::sqrt(sum2);
    return out;
}

CMatrix scalar_moments(double c, int max_order, int radial_nodes, int angular_nodes) {
    if (max_order < 0) throw std::invalid_argument("scalar_moments: max_order must be non-negative");
    const auto rule = quadrature::polar_rule(c, radial_nodes, angular_nodes);
    CMatrix m = CMatrix::Zero(max_order + 1, max_order + 1);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const Complex z = rule.nodes[j];
        const double gauss = std::exp(-std::norm(z) * c * c);
        for (int n = 0; n <= max_order; ++n) {
            for (int mm = 0; mm <= max_order; ++mm) {
                m(n, mm) += rule.weights[j] * gauss * std::pow(std::conj(z), n) * std::pow(z, mm) *
                            std::pow(c, mm + 1) * std::pow(c, n + 1);
            }
        }
    }
    for (int n = 0; n <= max_order; ++n) m.row(n) /= std::numbers::pi * std::tgamma(n + 1.0);
    return m;
}

CVector coherent_state(Complex alpha, int levels) {
    CVector v(levels);
    Complex term = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n < levels; ++n) {
        v[n] = term;
        term *= alpha / std::sqrt(n + 1.0);
    }
    return v;
}

CVector contract_particle(const Model& model, const StateVector& state, int s_site) {
    if (state.sites() != model.sites() || state.levels() != model.levels()) {
        throw std::invalid_argument("contract_particle: state does not match model");
    }
    model.lattice.check_index(s_site);
    const double s = model.lattice.site_position(s_site);
    const auto psi = state.as_matrix();
    CVector out = CVector::Zero(model.levels());
    for (int k = 0; k < model.sites(); ++k) {
        out += std::exp(kI * (s * model.lattice.momentum(k))) * psi.row(k).transpose();
    }
    return out;
}

SumRuleResult sum_rule(const Model& model, const EcsState& ecs, int s_site) {
    const double s = model.lattice.site_position(s_site);
    SumRuleResult r;
    r.contracted = contract_particle(model, ecs.state, s_site);
    r.alpha = 0.0;
    for (int q = 0; q < model.sites(); ++q) {
        r.alpha += ecs.h[q] * std::exp(-kI * (s * model.lattice.momentum(q)));
    }
    r.expected = std::exp(kI * (s * model.lattice.momentum(ecs.k0))) * coherent_state(r.alpha, model.levels());
    r.fidelity = std::norm(r.expected.dot(r.contracted));
    const int top = std::max(model.cutoff() - 1, 1);
    r.max_component_error = (r.contracted.head(top) - r.expected.head(top)).cwiseAbs().maxCoeff();
    return r;
}

}  // namespace ecstate::ecs
