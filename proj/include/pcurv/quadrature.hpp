#pragma once

#include <functional>
#include <vector>

#include "pcurv/geometry.hpp"

namespace pcurv {

struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    long max_subdivisions = 1000000;
    // Algebraic decay |y|^-p of the integrand at infinity; 0 selects 2 * dim.
    int decay_order = 0;
};

struct IntegralResult {
    double value = 0;
    double error_estimate = 0;
    long evaluations = 0;
    bool converged = true;

    IntegralResult& operator+=(const IntegralResult& o);
};

using Integrand = std::function<double(const Vec&)>;

// Throws ToleranceNotReached when the flag is down; returns r otherwise.
const IntegralResult& require_converged(const IntegralResult& r, const char* what);

// Globally adaptive tensor Gauss-Kronrod cubature on [lo, hi] (dimension 1..5).
IntegralResult integrate_box(const Integrand& f, const Vec& lo, const Vec& hi, const QuadratureSpec& spec);

// Upper half-space R^n_+ (last coordinate >= 0).
IntegralResult integrate_half_space(const Integrand& f, int n, const QuadratureSpec& spec);
// Boundary hyperplane R^{n-1}; f receives a length n-1 vector.
IntegralResult integrate_boundary_hyperplane(const Integrand& f, int n, const QuadratureSpec& spec);
IntegralResult integrate_ball(const Integrand& f, int n, const QuadratureSpec& spec);
IntegralResult integrate_sphere(const Integrand& f, int n, const QuadratureSpec& spec);

enum class RegDomain { Ball, Sphere };

// Integrand of (z, h) with h = z - xi supplied without cancellation.
using RegularizedIntegrand = std::function<double(const Vec& z, const Vec& h)>;

struct RegularizedOptions {
    int depth = 40;
};

// Integral over the ball or sphere of an integrand whose only singular point is xi.
// Polar coordinates about xi with dyadic grading toward xi; opposite tangent
// directions are paired, so odd leading terms cancel as principal values.
IntegralResult integrate_regularized(const RegularizedIntegrand& f, RegDomain domain, const Vec& xi,
                                     const QuadratureSpec& spec, const RegularizedOptions& opt = {});

// Orthonormal basis of the tangent space of S^{n-1} at xi (n-1 vectors).
std::vector<Vec> tangent_basis(const Vec& xi);

// Unit vector in R^k from k-1 hyperspherical angles (k >= 2).
Vec unit_from_angles(const Vec& angles);
// Surface element sin^{k-2}(a_0) ... sin(a_{k-3}) for the parametrization above.
double angles_jacobian(const Vec& angles);

}  // namespace pcurv
