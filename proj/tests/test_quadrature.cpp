#include <cmath>
#include <random>

#include "doctest.h"
#include "pcurv/errors.hpp"
#include "pcurv/fields.hpp"
#include "pcurv/geometry.hpp"
#include "pcurv/quadrature.hpp"

using namespace pcurv;

namespace {

QuadratureSpec tight() {
    QuadratureSpec s;
    s.rel_tol = 1e-10;
    s.abs_tol = 1e-13;
    return s;
}

void check_close(const IntegralResult& r, double exact, double rel) {
    CHECK(r.converged);
    CHECK(std::abs(r.value - exact) <= rel * std::abs(exact));
    // Reported error estimates are honest within a factor 10.
    CHECK(std::abs(r.value - exact) <= 10 * r.error_estimate + 1e-14);
}

}  // namespace

TEST_CASE("half-space integrals") {
    const QuadratureSpec s = tight();
    check_close(integrate_half_space([](const Vec& y) { return 1.0 / std::pow(y[0] * y[0] + y[1] * y[1] + 1, 2); }, 2, s),
                M_PI / 2, 1e-9);
    const double D = 2.0;
    auto f = [D](const Vec& y) { return y[1] / std::pow(y[0] * y[0] + (y[1] + D) * (y[1] + D) - 1, 2); };
    const IntegralResult r = integrate_half_space(f, 2, s);
    CHECK(r.value == doctest::Approx(M_PI / 2 * (D - std::sqrt(D * D - 1))).epsilon(1e-8));
}

TEST_CASE("mis-declared decay raises the tolerance flag") {
    QuadratureSpec s;
    s.rel_tol = 1e-10;
    s.abs_tol = 1e-14;
    s.max_subdivisions = 2000;
    s.decay_order = 8;
    const IntegralResult r =
        integrate_half_space([](const Vec& y) { return 1.0 / std::pow(y[0] * y[0] + y[1] * y[1] + 1, 1.05); }, 2, s);
    CHECK_FALSE(r.converged);
    CHECK_THROWS_AS(require_converged(r, "slow decay"), Error);
}

TEST_CASE("non-finite integrands are rejected") {
    CHECK_THROWS_AS(integrate_ball([](const Vec&) { return std::nan(""); }, 2, tight()), Error);
}

TEST_CASE("boundary hyperplane integrals") {
    const QuadratureSpec s = tight();
    check_close(integrate_boundary_hyperplane([](const Vec& y) { return 1.0 / (y[0] * y[0] + 1); }, 2, s), M_PI, 1e-9);
    check_close(integrate_boundary_hyperplane(
                    [](const Vec& y) { return 1.0 / std::pow(y[0] * y[0] + y[1] * y[1] + 1, 2); }, 3, s),
                M_PI, 1e-9);
    check_close(integrate_boundary_hyperplane(
                    [](const Vec& y) {
                        const double r2 = y[0] * y[0] + y[1] * y[1];
                        return r2 / std::pow(r2 + 1, 3);
                    },
                    3, s),
                M_PI / 2, 1e-9);
}

TEST_CASE("ball integrals") {
    const QuadratureSpec s = tight();
    check_close(integrate_ball([](const Vec&) { return 1.0; }, 2, s), M_PI, 1e-10);
    check_close(integrate_ball([](const Vec&) { return 1.0; }, 3, s), 4 * M_PI / 3, 1e-10);
    const IntegralResult r =
        integrate_ball([](const Vec& x) { return 1.0 / std::sqrt(std::max(1e-300, 1 - x[0] * x[0] - x[1] * x[1])); }, 2, s);
    CHECK(r.value == doctest::Approx(2 * M_PI).epsilon(1e-8));
}

TEST_CASE("sphere integrals") {
    const QuadratureSpec s = tight();
    check_close(integrate_sphere([](const Vec&) { return 1.0; }, 2, s), 2 * M_PI, 1e-10);
    check_close(integrate_sphere([](const Vec&) { return 1.0; }, 3, s), 4 * M_PI, 1e-10);
    check_close(integrate_sphere([](const Vec& x) { return x[2] * x[2]; }, 3, s), 4 * M_PI / 3, 1e-10);
    check_close(integrate_sphere([](const Vec&) { return 1.0; }, 5, s), sphere_area(4), 1e-9);
}

TEST_CASE("half-space and ball integrals agree under the inversion") {
    const QuadratureSpec s = tight();
    std::mt19937 gen(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        const int n = 2 + k % 2;
        Vec c(n);
        for (double& v : c) v = u(gen);
        const double w = 1.0 + 0.5 * std::abs(u(gen));
        auto g = [c, w](const Vec& q) {
            double d = 0;
            for (std::size_t i = 0; i < q.size(); ++i) d += (q[i] - 0.3 * c[i]) * (q[i] - 0.3 * c[i]);
            return std::exp(-w * d) * (1 + c[0] * q[0]);
        };
        const IntegralResult ball = integrate_ball(g, n, s);
        QuadratureSpec hs = s;
        hs.decay_order = 2 * n;
        const IntegralResult half = integrate_half_space(
            [&](const Vec& p) { return g(inversion(p, n)) * std::pow(conformal_factor(p), n / 2.0); }, n, hs);
        CHECK(std::abs(half.value - ball.value) < 1e-7 * std::abs(ball.value));
    }
}

TEST_CASE("regularized integrals") {
    const QuadratureSpec s = tight();
    const Vec xi{1.0, 0.0};
    // H constant: the subtracted integrand vanishes identically.
    const IntegralResult z = integrate_regularized([](const Vec&, const Vec&) { return 0.0; }, RegDomain::Sphere, xi, s);
    CHECK(z.value == 0.0);
    // (H(z) - H(xi)) / |z - xi|^2 with H = x_1 gives -pi (-Delta)^{1/2} H(xi) on the circle.
    const IntegralResult r = integrate_regularized(
        [](const Vec& zz, const Vec& h) { return (zz[0] - 1.0) / (h[0] * h[0] + h[1] * h[1]); }, RegDomain::Sphere, xi, s);
    const double spectral = half_laplacian_circle({PolyField::coordinate(2, 0)}, xi);
    CHECK(std::abs(r.value + M_PI * spectral) < 1e-4 * M_PI);
    CHECK_THROWS_AS(integrate_regularized([](const Vec&, const Vec& h) { return 1.0 / std::sqrt(h[0] * h[0] + h[1] * h[1]); },
                                          RegDomain::Sphere, xi, s),
                    Error);
}
