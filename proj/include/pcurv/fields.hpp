#pragma once

#include <map>
#include <vector>

#include "pcurv/geometry.hpp"

namespace pcurv {

using MultiIndex = std::vector<int>;

// Exact multivariate polynomial in n variables, stored as multi-index -> coefficient.
class PolyField {
public:
    static constexpr int kDefaultDegreeCap = 8;

    explicit PolyField(int n = 2, int degree_cap = kDefaultDegreeCap);

    static PolyField constant(int n, double c);
    static PolyField coordinate(int n, int i, double c = 1.0);
    static PolyField monomial(int n, const MultiIndex& alpha, double c = 1.0);

    int dim() const { return n_; }
    int degree_cap() const { return cap_; }
    void set_degree_cap(int cap);
    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    const std::map<MultiIndex, double>& terms() const { return terms_; }

    // Adds c to the coefficient of x^alpha; drops exact zeros.
    void add_term(const MultiIndex& alpha, double c);

    double operator()(const Vec& x) const;

    PolyField& operator+=(const PolyField& o);
    PolyField& operator-=(const PolyField& o);
    PolyField& operator*=(double s);

    // Homogeneous component of degree k.
    PolyField homogeneous_part(int k) const;

private:
    int n_;
    int cap_;
    std::map<MultiIndex, double> terms_;
};

PolyField operator+(PolyField a, const PolyField& b);
PolyField operator-(PolyField a, const PolyField& b);
PolyField operator*(double s, PolyField a);
// Polynomial product; the result's cap is the larger of the two caps or the product degree.
PolyField operator*(const PolyField& a, const PolyField& b);

// H is represented by an ambient polynomial restricted to the sphere.
struct SphereFunction {
    PolyField ambient;
};

double eval(const PolyField& f, const Vec& q);

PolyField partial(const PolyField& f, const MultiIndex& alpha);
PolyField gradient_component(const PolyField& f, int i);

// f(M x) for a row-major n x n matrix M.
PolyField compose_linear(const PolyField& f, const std::vector<double>& M);

// g(h) = f(c + h), exact re-expansion about c.
PolyField shift(const PolyField& f, const Vec& c);

// j-th derivative of t -> f(xi + t xi) at t = 0.
double normal_derivative(const PolyField& f, const Vec& xi, int j);

// Polynomial whose restriction to each sphere |x| = r equals the unit-sphere
// Laplace-Beltrami operator applied to omega -> f(r omega).
PolyField tangential_laplacian_poly(const PolyField& f, int power);
double tangential_laplacian(const PolyField& f, const Vec& xi, int power);

PolyField ambient_laplacian(const PolyField& f, int power);

// Complex Fourier coefficients of f(cos t, sin t); index k + degree for k in [-degree, degree].
struct CircleSeries {
    int degree = 0;
    std::vector<double> re;
    std::vector<double> im;
    double re_at(int k) const { return re[static_cast<std::size_t>(k + degree)]; }
    double im_at(int k) const { return im[static_cast<std::size_t>(k + degree)]; }
};

CircleSeries circle_series(const PolyField& f);
double half_laplacian_circle(const SphereFunction& h, const Vec& xi);
// Harmonic polynomial in the disk with the same boundary values as f on S^1.
PolyField harmonic_extension_circle(const PolyField& f);

void require_on_sphere(const Vec& xi, int n);

}  // namespace pcurv
