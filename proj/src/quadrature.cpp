#include "ecstate/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ecstate::quadrature {

namespace {

// Returns (L_n(x), L_{n−1}(x)) by the three-term recurrence.
std::pair<double, double> laguerre_pair(int n, double x) {
    double prev = 1.0;
    double cur = 1.0 - x;
    if (n == 0) return {1.0, 0.0};
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return {cur, prev};
}

}  // namespace

GaussLaguerre gauss_laguerre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: node count must be positive");
    if (n > 150) throw std::invalid_argument("gauss_laguerre: node count above 150 overflows the recurrence");

    // Golub-Welsch starting values: eigenvalues of the Jacobi matrix.
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 1));
    for (int i = 0; i < n; ++i) diag[i] = 2.0 * i + 1.0;
    for (int i = 0; i + 1 < n; ++i) sub[i] = i + 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);

    GaussLaguerre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = solver.eigenvalues()[i];
        // Newton polish; the eigenvalues are only absolutely accurate.
        for (int it = 0; it < 8; ++it) {
            const auto [ln, lm1] = laguerre_pair(n, x);
            const double deriv = n * (ln - lm1) / x;
            const double step = ln / deriv;
            x -= step;
            if (std::abs(step) <= 1e-15 * x) break;
        }
        const double lm1 = laguerre_pair(n, x).second;
        rule.nodes[i] = x;
        // At a root of L_n: w = x / (n² L_{n−1}(x)²), relatively accurate even
        // for the tiny far-tail weights.
        rule.weights[i] = x / (static_cast<double>(n) * n * lm1 * lm1);
    }
    return rule;
}

PolarRule polar_rule(double scale, int radial_nodes, int angular_nodes) {
    if (radial_nodes < 1 || angular_nodes < 1) {
        throw std::invalid_argument("polar_rule: node counts must be positive");
    }
    if (!(scale > 0.0)) throw std::invalid_argument("polar_rule: scale must be positive");

    const GaussLaguerre radial = gauss_laguerre(radial_nodes);
    PolarRule rule;
    rule.nodes.reserve(static_cast<std::size_t>(radial_nodes) * angular_nodes);
    rule.weights.reserve(rule.nodes.capacity());
    const double dtheta = 2.0 * std::numbers::pi / angular_nodes;
    // d²z = r dr dθ = du dθ / (2c²) with u = c² r².
    const double jacobian = 1.0 / (2.0 * scale * scale);
    for (int i = 0; i < radial_nodes; ++i) {
        const double u = radial.nodes[i];
        const double r = std::sqrt(u) / scale;
        const double w = std::exp(std::log(radial.weights[i]) + u) * jacobian * dtheta;
        for (int j = 0; j < angular_nodes; ++j) {
            rule.nodes.push_back(std::polar(r, j * dtheta));
            rule.weights.push_back(w);
        }
    }
    return rule;
}

}  // namespace ecstate::quadrature
