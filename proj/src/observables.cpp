#include "ecstate/observables.hpp"

#include "ecstate/ecs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ecstate::observables {

PositionGrid::PositionGrid(const Lattice& lattice, std::vector<int> sites)
    : sites_(std::move(sites)), spacing_(lattice.spacing()), lattice_sites_(lattice.sites()) {
    if (sites_.size() < 2) throw std::invalid_argument("PositionGrid: need at least 2 points");
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        if (sites_[i] < 0 || sites_[i] >= lattice.sites()) {
            throw std::invalid_argument("PositionGrid: site outside the ring [0, N)");
        }
        if (i > 0 && sites_[i] <= sites_[i - 1]) throw std::invalid_argument("PositionGrid: sites must increase");
    }
}

PositionGrid PositionGrid::uniform(const Lattice& lattice, int count) {
    if (count < 2 || count > lattice.sites()) {
        throw std::invalid_argument("PositionGrid: point count must lie in 2..N");
    }
    std::vector<int> sites(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) sites[static_cast<std::size_t>(i)] = (i * lattice.sites()) / count;
    return {lattice, std::move(sites)};
}

std::string method_name(GammaMethod method) {
    switch (method) {
        case GammaMethod::exact: return "exact";
        case GammaMethod::first_approx: return "first_approx";
        case GammaMethod::closed_form: return "closed_form";
    }
    return "unknown";
}

double GammaGrid::hermiticity_defect() const { return (values - values.adjoint()).cwiseAbs().maxCoeff(); }

double GammaGrid::diagonal_defect() const {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        worst = std::max({worst, std::abs(values(i, i).imag()), -values(i, i).real()});
    }
    return worst;
}

double GammaGrid::trace() const { return values.diagonal().real().mean(); }

double AlphaField::phi_spread() const {
    const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
    return *hi - *lo;
}

CVector field_contraction(const Model& model, const StateVector& state, int x_site, double t) {
    const double x = model.lattice.site_position(x_site);
    const Eigen::VectorXd eps = model.dispersion.energies(model.lattice);
    const auto psi = state.as_matrix();
    CVector out = CVector::Zero(model.levels());
    for (int k = 0; k < model.sites(); ++k) {
        out += std::exp(kI * (model.lattice.momentum(k) * x - eps[k] * t)) * psi.row(k).transpose();
    }
    return out;
}

namespace {

GammaGrid gamma_from_state(const Model& model, const StateVector& physical, const PositionGrid& grid, double t,
                           GammaMethod method) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    CMatrix fields(model.levels(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        fields.col(i) = field_contraction(model, physical, grid.site(static_cast<std::size_t>(i)), t);
    }
    return {fields.adjoint() * fields, grid, method};
}

}  // namespace

GammaGrid gamma_exact(const StateVector& state_tilde, const dynamics::ZeroOrderSolution& sol,
                      const PositionGrid& grid, int step) {
    const Model& model = sol.model();
    if (state_tilde.sites() != model.sites() || state_tilde.levels() != model.levels()) {
        throw std::invalid_argument("gamma_exact: state does not match the zero-order solution");
    }
    if (step < 0 || step > sol.grid().steps) throw std::invalid_argument("gamma_exact: step outside time grid");
    const StateVector physical(model.sites(), model.levels(), sol.propagator(step) * state_tilde.amplitudes());
    return gamma_from_state(model, physical, grid, sol.grid().time(step), GammaMethod::exact);
}

GammaGrid gamma_first_approx(const dynamics::ZeroOrderSolution& sol, const PositionGrid& grid) {
    if (sol.grid().t_end != 0.0) throw std::invalid_argument("gamma_first_approx: time grid must end at t = 0");
    const int last = sol.grid().steps;
    return gamma_from_state(sol.model(), sol.state(last), grid, sol.grid().time(last), GammaMethod::first_approx);
}

AlphaField alpha_phi(const dynamics::ZeroOrderSolution& sol, const PositionGrid& grid) {
    const Model& model = sol.model();
    const TimeGrid& tg = sol.grid();
    const auto nx = static_cast<Eigen::Index>(grid.size());

    // e^{−iqx} for every offset and grid point.
    CMatrix fourier(model.sites(), nx);
    for (int q = 0; q < model.sites(); ++q) {
        for (Eigen::Index i = 0; i < nx; ++i) {
            fourier(q, i) = std::exp(-kI * (model.lattice.momentum(q) * grid.position(static_cast<std::size_t>(i))));
        }
    }

    AlphaField field{grid, {}, CMatrix(tg.steps + 1, nx), std::vector<double>(grid.size(), 0.0)};
    std::vector<double> previous(grid.size(), 0.0);
    for (int s = 0; s <= tg.steps; ++s) {
        field.times.push_back(tg.time(s));
        const CVector alpha = fourier.transpose() * sol.h(s).values();
        const CVector alpha_dot = fourier.transpose() * sol.h_dot(tg.time(s)).values();
        field.alpha.row(s) = alpha.transpose();
        for (Eigen::Index i = 0; i < nx; ++i) {
            const double integrand = (std::conj(alpha_dot[i]) * alpha[i]).imag();
            const auto iu = static_cast<std::size_t>(i);
            if (s > 0) field.phi[iu] += 0.5 * tg.dt() * (previous[iu] + integrand);
            previous[iu] = integrand;
        }
    }
    return field;
}

GammaGrid gamma_closed_form(const AlphaField& field, const Model& model, int k0) {
    model.lattice.check_index(k0);
    if (field.times.empty() || field.times.back() != 0.0) {
        throw std::invalid_argument("gamma_closed_form: field must be evaluated up to t = 0");
    }
    const double k = model.lattice.momentum(k0);
    const CVector alpha = field.alpha_at_end();
    const auto n = static_cast<Eigen::Index>(field.grid.size());
    CMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = field.grid.position(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < n; ++j) {
            const double xp = field.grid.position(static_cast<std::size_t>(j));
            const Complex exponent =
                kI * (-k * x + k * xp + field.phi[static_cast<std::size_t>(i)] -
                      field.phi[static_cast<std::size_t>(j)]) -
                0.5 * (std::norm(alpha[i]) + std::norm(alpha[j]) - 2.0 * std::conj(alpha[i]) * alpha[j]);
            g(i, j) = std::exp(exponent);
        }
    }
    return {g, field.grid, GammaMethod::closed_form};
}

IntermediateState intermediate_state_check(const dynamics::ZeroOrderSolution& sol, int x_site) {
    const Model& model = sol.model();
    if (sol.grid().t_end != 0.0) throw std::invalid_argument("intermediate_state_check: time grid must end at t = 0");
    const int last = sol.grid().steps;
    model.lattice.check_index(x_site);
    // Two-point grid so alpha_phi can be reused; only the x_site entry is read.
    const int other = x_site + 1 < model.sites() ? x_site + 1 : x_site - 1;
    const PositionGrid point(model.lattice, {std::min(x_site, other), std::max(x_site, other)});
    const std::size_t idx = point.site(0) == x_site ? 0 : 1;
    const AlphaField field = alpha_phi(sol, point);

    IntermediateState out;
    out.numeric = field_contraction(model, sol.state(last), x_site, sol.grid().time(last));
    out.alpha = field.alpha(last, static_cast<Eigen::Index>(idx));
    out.phi = field.phi[idx];
    const double x = model.lattice.site_position(x_site);
    out.analytic = std::exp(kI * (model.lattice.momentum(sol.k0()) * x - out.phi)) *
                   ecs::coherent_state(out.alpha, model.levels());
    out.fidelity = std::norm(out.analytic.dot(out.numeric));
    return out;
}

double max_deviation(const GammaGrid& a, const GammaGrid& b) {
    if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
        throw std::invalid_argument("max_deviation: grids differ in size");
    }
    return (a.values - b.values).cwiseAbs().maxCoeff();
}

}  // namespace ecstate::observables
