#include <cmath>
#include <random>

#include "doctest.h"
#include "pcurv/errors.hpp"
#include "pcurv/fields.hpp"

using namespace pcurv;

namespace {

PolyField random_poly(int n, int degree, std::mt19937& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> e(0, degree);
    PolyField f(n);
    for (int k = 0; k < 12; ++k) {
        MultiIndex a(n, 0);
        int left = degree;
        for (int i = 0; i < n && left > 0; ++i) {
            a[i] = std::uniform_int_distribution<int>(0, left)(gen);
            left -= a[i];
        }
        f.add_term(a, u(gen));
    }
    (void)e;
    return f;
}

// Orthogonal matrix from Gram-Schmidt on a random matrix, row-major.
std::vector<double> random_rotation(int n, std::mt19937& gen) {
    std::normal_distribution<double> g;
    std::vector<Vec> rows;
    while (static_cast<int>(rows.size()) < n) {
        Vec v(n);
        for (double& c : v) c = g(gen);
        for (const Vec& r : rows) {
            const double d = dot(v, r);
            for (int i = 0; i < n; ++i) v[i] -= d * r[i];
        }
        const double s = norm(v);
        for (double& c : v) c /= s;
        rows.push_back(v);
    }
    std::vector<double> M;
    for (const Vec& r : rows) M.insert(M.end(), r.begin(), r.end());
    return M;
}

Vec apply(const std::vector<double>& M, const Vec& x, bool transpose) {
    const int n = static_cast<int>(x.size());
    Vec y(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) y[i] += (transpose ? M[j * n + i] : M[i * n + j]) * x[j];
    return y;
}

bool same(const PolyField& a, const PolyField& b, double tol = 1e-12) {
    const PolyField d = a - b;
    for (const auto& [k, c] : d.terms())
        if (std::abs(c) > tol) return false;
    return true;
}

}  // namespace

TEST_CASE("polynomial evaluation") {
    CHECK(eval(PolyField::coordinate(3, 2), {0.0, 0.0, 1.0}) == 1.0);
    CHECK(eval(PolyField::constant(4, 1.0), {0.1, 0.2, 0.3, 0.4}) == 1.0);
    PolyField f = PolyField::monomial(2, {2, 0}) + PolyField::monomial(2, {0, 2});
    CHECK(eval(f, {0.6, 0.8}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("formal partial derivatives") {
    PolyField d = partial(PolyField::monomial(2, {2, 0}), {1, 0});
    CHECK(same(d, PolyField::monomial(2, {1, 0}, 2.0)));
    CHECK(partial(PolyField::constant(3, 5.0), {0, 1, 0}).is_zero());
    std::mt19937 gen(5);
    for (int k = 0; k < 5; ++k) {
        PolyField f = random_poly(3, 5, gen);
        CHECK(same(partial(partial(f, {1, 0, 0}), {0, 1, 0}), partial(partial(f, {0, 1, 0}), {1, 0, 0})));
        CHECK(partial(f, {1, 1, 0}).degree() <= f.degree() - 2);
    }
}

TEST_CASE("duplicate multi-indices merge and exact zeros drop") {
    PolyField f(2);
    f.add_term({1, 0}, 2.0);
    f.add_term({1, 0}, -2.0);
    CHECK(f.is_zero());
}

TEST_CASE("normal derivatives") {
    CHECK(normal_derivative(PolyField::coordinate(3, 2), {0, 0, 1}, 1) == doctest::Approx(1.0));
    for (int j = 1; j <= 3; ++j) CHECK(normal_derivative(PolyField::constant(2, 3.0), {0.6, 0.8}, j) == 0.0);
    PolyField r2 = PolyField::monomial(3, {2, 0, 0}) + PolyField::monomial(3, {0, 2, 0}) + PolyField::monomial(3, {0, 0, 2});
    const Vec xi{2.0 / 3, 1.0 / 3, 2.0 / 3};
    CHECK(normal_derivative(r2, xi, 1) == doctest::Approx(2.0));
    const double h = 1e-5;
    auto ray = [&](double t) { return eval(r2, {xi[0] * (1 + t), xi[1] * (1 + t), xi[2] * (1 + t)}); };
    CHECK(std::abs((ray(h) - ray(-h)) / (2 * h) - 2.0) < 1e-8);
    CHECK_THROWS_AS(normal_derivative(r2, {1.0, 1.0, 0.0}, 1), Error);
}

TEST_CASE("tangential Laplacian") {
    CHECK(tangential_laplacian(PolyField::constant(3, 2.0), {0, 0, 1}, 1) == 0.0);
    CHECK(tangential_laplacian(PolyField::coordinate(2, 0), {1, 0}, 1) == doctest::Approx(-1.0));
    CHECK(tangential_laplacian(PolyField::coordinate(3, 2), {0, 0, 1}, 1) == doctest::Approx(-2.0));
    CHECK(tangential_laplacian(PolyField::coordinate(3, 2), {0, 0, 1}, 2) == doctest::Approx(4.0));

    // Second differences along two orthogonal great circles through the north pole.
    PolyField f = PolyField::coordinate(3, 2) + PolyField::monomial(3, {1, 1, 1}, 0.7) + PolyField::monomial(3, {2, 0, 0}, 0.3);
    const double h = 1e-4;
    auto at = [&](double a, double b) {
        const double r = std::sqrt(a * a + b * b);
        if (r == 0) return eval(f, {0, 0, 1});
        return eval(f, {std::sin(r) * a / r, std::sin(r) * b / r, std::cos(r)});
    };
    const double fd = (at(h, 0) + at(-h, 0) + at(0, h) + at(0, -h) - 4 * at(0, 0)) / (h * h);
    CHECK(std::abs(fd - tangential_laplacian(f, {0, 0, 1}, 1)) < 1e-6);
    CHECK_THROWS_AS(tangential_laplacian(f, {0, 0, 0.5}, 1), Error);
}

TEST_CASE("tangential Laplacian is rotation equivariant") {
    std::mt19937 gen(17);
    std::normal_distribution<double> g;
    for (int n = 2; n <= 5; ++n) {
        PolyField f = random_poly(n, 4, gen);
        const std::vector<double> M = random_rotation(n, gen);
        Vec xi(n);
        for (double& c : xi) c = g(gen);
        const double s = norm(xi);
        for (double& c : xi) c /= s;
        // (f o M)(M^T xi) = f(xi)
        const PolyField fr = compose_linear(f, M);
        const Vec xr = apply(M, xi, true);
        for (int p = 1; p <= 2; ++p)
            CHECK(std::abs(tangential_laplacian(fr, xr, p) - tangential_laplacian(f, xi, p)) < 1e-10);
    }
}

TEST_CASE("ambient Laplacian") {
    for (int n = 2; n <= 5; ++n) {
        PolyField r2(n);
        for (int i = 0; i < n; ++i) {
            MultiIndex a(n, 0);
            a[i] = 2;
            r2.add_term(a, 1.0);
        }
        const PolyField L = ambient_laplacian(r2, 1);
        CHECK(L.degree() == 0);
        CHECK(eval(L, Vec(n, 0.3)) == doctest::Approx(2.0 * n));
        // Delta^2 |y|^4 = 4^2 2! Gamma(n/2 + 2) / Gamma(n/2): 120 in R^3, 192 in R^4.
        if (n == 3) CHECK(eval(ambient_laplacian(r2 * r2, 2), Vec(n, 0.1)) == doctest::Approx(120.0));
        if (n == 4) CHECK(eval(ambient_laplacian(r2 * r2, 2), Vec(n, 0.1)) == doctest::Approx(192.0));
    }
    CHECK(ambient_laplacian(PolyField::coordinate(3, 1, 2.0) + PolyField::constant(3, 1.0), 1).is_zero());
}

TEST_CASE("half Laplacian on the circle") {
    const double th = 0.37;
    const Vec xi{std::cos(th), std::sin(th)};
    CHECK(half_laplacian_circle({PolyField::constant(2, 4.0)}, xi) == doctest::Approx(0.0));
    CHECK(half_laplacian_circle({PolyField::coordinate(2, 0)}, xi) == doctest::Approx(std::cos(th)));
    // cos 3t = 4 x^3 - 3 x on the circle
    PolyField c3 = PolyField::monomial(2, {3, 0}, 4.0) + PolyField::coordinate(2, 0, -3.0);
    CHECK(half_laplacian_circle({c3}, xi) == doctest::Approx(3 * std::cos(3 * th)).epsilon(1e-12));
    CHECK_THROWS_AS(half_laplacian_circle({PolyField::coordinate(3, 0)}, {1, 0, 0}), Error);
}

TEST_CASE("half Laplacian equals the normal derivative of the harmonic extension") {
    PolyField h = PolyField::monomial(2, {2, 0}) + PolyField::monomial(2, {1, 3}, 0.5) + PolyField::coordinate(2, 1, -0.2);
    const PolyField ext = harmonic_extension_circle(h);
    CHECK(ambient_laplacian(ext, 1).terms().size() == 0);
    for (int k = 0; k < 64; ++k) {
        const double t = 2 * M_PI * k / 64;
        const Vec xi{std::cos(t), std::sin(t)};
        CHECK(std::abs(eval(ext, xi) - eval(h, xi)) < 1e-12);
        CHECK(std::abs(half_laplacian_circle({h}, xi) - normal_derivative(ext, xi, 1)) < 1e-12);
    }
    // Restriction identity for an already harmonic ambient polynomial.
    PolyField harm = PolyField::monomial(2, {2, 0}) - PolyField::monomial(2, {0, 2}) + PolyField::monomial(2, {1, 1}, 3.0);
    for (int k = 0; k < 64; ++k) {
        const double t = 2 * M_PI * k / 64;
        const Vec xi{std::cos(t), std::sin(t)};
        CHECK(std::abs(half_laplacian_circle({harm}, xi) - normal_derivative(harm, xi, 1)) < 1e-12);
    }
}

TEST_CASE("operators are linear") {
    std::mt19937 gen(23);
    PolyField f = random_poly(3, 4, gen), g = random_poly(3, 4, gen);
    const Vec xi{0.0, 0.6, 0.8};
    const PolyField s = 2.0 * f + g;
    CHECK(normal_derivative(s, xi, 2) == doctest::Approx(2 * normal_derivative(f, xi, 2) + normal_derivative(g, xi, 2)));
    CHECK(tangential_laplacian(s, xi, 1) ==
          doctest::Approx(2 * tangential_laplacian(f, xi, 1) + tangential_laplacian(g, xi, 1)));
    CHECK(same(ambient_laplacian(s, 1), 2.0 * ambient_laplacian(f, 1) + ambient_laplacian(g, 1)));
}
