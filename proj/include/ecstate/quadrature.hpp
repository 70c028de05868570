// quadrature.hpp: Gauss-Laguerre and polar rules for integrals over the complex plane

#pragma once

#include <complex>
#include <vector>

namespace ecstate::quadrature {

// ∫_0^∞ e^{−u} f(u) du ≈ Σ_i weights[i] f(nodes[i]); exact for polynomials of
// degree ≤ 2n − 1.
struct GaussLaguerre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLaguerre gauss_laguerre(int n);

// Nodes z_j and weights w_j with ∫ d²z F(z) ≈ Σ_j w_j F(z_j) for integrands
// F(z) = e^{−c²|z|²} · P(z, z*) with P a polynomial. The radial variable is
// u = c²|z|², so each weight carries the factor e^{+u} that cancels the
// Gaussian the integrand already contains.
struct PolarRule {
    std::vector<std::complex<double>> nodes;
    std::vector<double> weights;
};

PolarRule polar_rule(double scale, int radial_nodes, int angular_nodes);

}  // namespace ecstate::quadrature
