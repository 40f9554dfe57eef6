#include "pcurv/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pcurv/errors.hpp"

namespace pcurv {

void require_dimension(int n) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 2, got " + std::to_string(n));
}

void require_half_space_point(const HalfSpacePoint& p, int n) {
    require_dimension(n);
    if (static_cast<int>(p.size()) != n)
        throw Error(ErrorCode::DimensionMismatch, "half-space point has wrong length");
    for (double v : p)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
    if (p.back() < 0) throw Error(ErrorCode::InvalidArgument, "x_n must be >= 0");
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double south_distance_sq(const Vec& p) {
    const std::size_t n = p.size();
    double d = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) d += p[i] * p[i];
    const double t = p[n - 1] + 1.0;
    return d + t * t;
}

namespace {

BallPoint apply_inversion(const Vec& p) {
    const std::size_t n = p.size();
    const double d = south_distance_sq(p);
    double bar2 = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) bar2 += p[i] * p[i];
    Vec q(n);
    for (std::size_t i = 0; i + 1 < n; ++i) q[i] = 2.0 * p[i] / d;
    q[n - 1] = (1.0 - bar2 - p[n - 1] * p[n - 1]) / d;
    return q;
}

}  // namespace

BallPoint inversion(const HalfSpacePoint& p, int n) {
    require_half_space_point(p, n);
    return apply_inversion(p);
}

HalfSpacePoint inversion_inverse(const BallPoint& q, int n) {
    require_dimension(n);
    if (static_cast<int>(q.size()) != n) throw Error(ErrorCode::DimensionMismatch, "ball point has wrong length");
    if (norm(q) > 1.0 + 1e-12) throw Error(ErrorCode::InvalidArgument, "point outside the closed unit ball");
    if (std::sqrt(south_distance_sq(q)) < kSouthPoleRadius)
        throw Error(ErrorCode::SouthPoleSingular, "inverse inversion at the south pole");
    Vec p = apply_inversion(q);
    if (p[n - 1] < 0 && p[n - 1] > -1e-12) p[n - 1] = 0.0;
    return p;
}

double conformal_factor(const HalfSpacePoint& p) {
    const double d = south_distance_sq(p);
    return 4.0 / (d * d);
}

double rho(const HalfSpacePoint& p, int n) {
    require_dimension(n);
    const double vr = conformal_factor(p);
    if (n == 2) return std::log(vr);
    return std::pow(vr, (n - 2) / 4.0);
}

RhoJet rho_jet(const HalfSpacePoint& p, int n) {
    require_dimension(n);
    const std::size_t dim = p.size();
    const double d = south_distance_sq(p);
    Vec gd(dim);
    for (std::size_t i = 0; i < dim; ++i) gd[i] = 2.0 * p[i];
    gd[dim - 1] = 2.0 * (p[dim - 1] + 1.0);
    const double lap_d = 2.0 * n;
    const double gd2 = dot(gd, gd);
    RhoJet j;
    j.gradient.resize(dim);
    if (n == 2) {
        j.value = std::log(4.0) - 2.0 * std::log(d);
        for (std::size_t i = 0; i < dim; ++i) j.gradient[i] = -2.0 * gd[i] / d;
        j.laplacian = -2.0 * (lap_d / d - gd2 / (d * d));
    } else {
        const double k = (n - 2) / 2.0;
        const double c = std::pow(2.0, k);
        j.value = c * std::pow(d, -k);
        for (std::size_t i = 0; i < dim; ++i) j.gradient[i] = -k * c * std::pow(d, -k - 1) * gd[i];
        j.laplacian = c * (-k * std::pow(d, -k - 1) * lap_d + k * (k + 1) * std::pow(d, -k - 2) * gd2);
    }
    return j;
}

std::vector<double> inversion_jacobian(const HalfSpacePoint& p, int n) {
    require_dimension(n);
    const double d = south_distance_sq(p);
    Vec w(p);
    w[n - 1] += 1.0;
    std::vector<double> J(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            J[i * n + k] = (2.0 / d) * ((i == k ? 1.0 : 0.0) - 2.0 * w[i] * w[k] / d);
    return J;
}

double sphere_area(int k) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "sphere dimension must be >= 0");
    const double h = (k + 1) / 2.0;
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

}  // namespace pcurv
