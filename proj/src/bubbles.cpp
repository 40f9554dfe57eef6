#include "pcurv/bubbles.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "pcurv/errors.hpp"
#include "pcurv/quadrature.hpp"

namespace pcurv {

namespace {

// Forward-mode dual number; nesting gives mixed higher derivatives.
template <class T>
struct Dual {
    T v{};
    T d{};
};

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
template <class T> Dual<T> operator*(double s, const Dual<T>& a) { return {s * a.v, s * a.d}; }

inline double dlog(double x) { return std::log(x); }
inline double dpow(double x, double e) { return std::pow(x, e); }
template <class T> Dual<T> dlog(const Dual<T>& a) { return {dlog(a.v), a.d / a.v}; }
template <class T> Dual<T> dpow(const Dual<T>& a, double e) { return {dpow(a.v, e), e * dpow(a.v, e - 1.0) * a.d}; }

template <class T> struct Lifter {
    static T make(double c) { return T{Lifter<decltype(T{}.v)>::make(c), Lifter<decltype(T{}.v)>::make(0.0)}; }
};
template <> struct Lifter<double> {
    static double make(double c) { return c; }
};

// U as a function of the point and the parameters (x0, lambda).
template <class T>
T U_generic(const std::vector<T>& x, const std::vector<T>& x0, const T& lam, int n, double D) {
    T q = Lifter<T>::make(0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const T t = x[i] - x0[i];
        q = q + t * t;
    }
    const T t = x[n - 1] + D * lam;
    q = q + t * t - lam * lam;
    if (n == 2) return 2.0 * dlog(2.0 * lam / q);
    const double k = (n - 2) / 2.0;
    const double c = std::pow(4.0 * n * (n - 1), (n - 2) / 4.0);
    return c * (dpow(lam, k) * dpow(q, -k));
}

double factor_c(int n) { return std::pow(4.0 * n * (n - 1), (n - 2) / 4.0); }

}  // namespace

void validate(const BubbleParams& b) {
    require_dimension(b.n);
    if (!(b.D > 1.0) || !std::isfinite(b.D)) throw Error(ErrorCode::InvalidArgument, "D must be > 1");
    if (!(b.lambda > 0.0) || !std::isfinite(b.lambda)) throw Error(ErrorCode::InvalidArgument, "lambda must be > 0");
    if (static_cast<int>(b.x0.size()) != b.n - 1) throw Error(ErrorCode::DimensionMismatch, "x0 must have length n-1");
}

BubbleParams make_bubble(int n, double D, const Vec& x0, double lambda) {
    BubbleParams b{n, D, x0, lambda};
    validate(b);
    return b;
}

double big_lambda(int n) {
    require_dimension(n);
    return n == 2 ? 4.0 : 4.0 * n * (n - 1);
}

double bubble_denominator(const HalfSpacePoint& p, const BubbleParams& b) {
    double q = 0;
    for (int i = 0; i + 1 < b.n; ++i) q += (p[i] - b.x0[i]) * (p[i] - b.x0[i]);
    const double t = p[b.n - 1] + b.lambda * b.D;
    return q + t * t - b.lambda * b.lambda;
}

double eval_U_halfspace(const HalfSpacePoint& p, const BubbleParams& b) {
    validate(b);
    require_half_space_point(p, b.n);
    const double q = bubble_denominator(p, b);
    if (b.n == 2) return 2.0 * std::log(2.0 * b.lambda / q);
    const double k = (b.n - 2) / 2.0;
    return factor_c(b.n) * std::pow(b.lambda, k) * std::pow(q, -k);
}

Jet U_jet(const HalfSpacePoint& p, const BubbleParams& b) {
    validate(b);
    const int n = b.n;
    const double q = bubble_denominator(p, b);
    Vec gq(static_cast<std::size_t>(n));
    for (int i = 0; i + 1 < n; ++i) gq[i] = 2.0 * (p[i] - b.x0[i]);
    gq[n - 1] = 2.0 * (p[n - 1] + b.lambda * b.D);
    const double lq = 2.0 * n;
    const double g2 = dot(gq, gq);
    Jet j;
    j.gradient.resize(static_cast<std::size_t>(n));
    if (n == 2) {
        j.value = 2.0 * std::log(2.0 * b.lambda / q);
        for (int i = 0; i < n; ++i) j.gradient[i] = -2.0 * gq[i] / q;
        j.laplacian = -2.0 * (lq / q - g2 / (q * q));
    } else {
        const double k = (n - 2) / 2.0;
        const double c = factor_c(n) * std::pow(b.lambda, k);
        j.value = c * std::pow(q, -k);
        for (int i = 0; i < n; ++i) j.gradient[i] = -k * c * std::pow(q, -k - 1) * gq[i];
        j.laplacian = c * (-k * std::pow(q, -k - 1) * lq + k * (k + 1) * std::pow(q, -k - 2) * g2);
    }
    return j;
}

BallQuadratic ball_quadratic(const BubbleParams& b) {
    validate(b);
    const int n = b.n;
    const double l2 = b.lambda * b.lambda;
    double dc = 0;
    for (double v : b.x0) dc += v * v;
    const double cn = -b.lambda * b.D;
    dc += (cn + 1.0) * (cn + 1.0);
    BallQuadratic g;
    g.alpha = dc - l2;
    g.gamma = dc + 4.0 * b.lambda * b.D - l2;
    // beta = d(c) I(c) - lambda^2 S with S = (0,...,0,-1) and d(c) I(c) = d(c) S + 2 (c - S)
    g.beta.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i + 1 < n; ++i) g.beta[i] = 2.0 * b.x0[i];
    g.beta[n - 1] = -dc + 2.0 * (cn + 1.0) + l2;
    g.scale = 4.0 * big_lambda(n) * l2;
    return g;
}

namespace {

double quad_G(const BallQuadratic& g, const Vec& q) {
    return g.alpha * dot(q, q) - 2.0 * dot(g.beta, q) + g.gamma;
}

}  // namespace

double ball_P(const BallPoint& q, const BubbleParams& b) {
    const BallQuadratic g = ball_quadratic(b);
    if (static_cast<int>(q.size()) != b.n) throw Error(ErrorCode::DimensionMismatch, "ball point length");
    const double G = quad_G(g, q);
    return g.scale / (G * G);
}

double eval_V_ball(const BallPoint& q, const BubbleParams& b) {
    const double P = ball_P(q, b);
    if (b.n == 2) return std::log(P);
    return std::pow(P, (b.n - 2) / 4.0);
}

double eval_V_ball_pullback(const BallPoint& q, const BubbleParams& b) {
    validate(b);
    const HalfSpacePoint z = inversion_inverse(q, b.n);
    const double d = south_distance_sq(z);
    const double Q = bubble_denominator(z, b);
    const double P = big_lambda(b.n) / 4.0 * b.lambda * b.lambda * d * d / (Q * Q);
    if (b.n == 2) return std::log(P);
    return std::pow(P, (b.n - 2) / 4.0);
}

Jet V_jet(const BallPoint& q, const BubbleParams& b) {
    const BallQuadratic g = ball_quadratic(b);
    const int n = b.n;
    const double G = quad_G(g, q);
    Vec gG(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) gG[i] = 2.0 * g.alpha * q[i] - 2.0 * g.beta[i];
    const double lG = 2.0 * n * g.alpha;
    const double g2 = dot(gG, gG);
    Jet j;
    j.gradient.resize(static_cast<std::size_t>(n));
    if (n == 2) {
        j.value = std::log(g.scale) - 2.0 * std::log(G);
        for (int i = 0; i < n; ++i) j.gradient[i] = -2.0 * gG[i] / G;
        j.laplacian = -2.0 * (lG / G - g2 / (G * G));
    } else {
        const double k = (n - 2) / 2.0;
        const double A = std::pow(g.scale, k / 2.0);
        j.value = A * std::pow(G, -k);
        for (int i = 0; i < n; ++i) j.gradient[i] = -k * A * std::pow(G, -k - 1) * gG[i];
        j.laplacian = A * (-k * std::pow(G, -k - 1) * lG + k * (k + 1) * std::pow(G, -k - 2) * g2);
    }
    return j;
}

std::vector<Vec> sphere_points(int n, int count) {
    require_dimension(n);
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(count));
    if (n == 2) {
        for (int i = 0; i < count; ++i) {
            const double t = 2.0 * std::numbers::pi * (i + 0.5) / count;
            pts.push_back({std::cos(t), std::sin(t)});
        }
    } else if (n == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double t = golden * i;
            pts.push_back({r * std::cos(t), r * std::sin(t), z});
        }
    } else {
        std::mt19937_64 rng(0x5eed1234ULL + static_cast<unsigned>(n));
        std::normal_distribution<double> gauss(0.0, 1.0);
        while (static_cast<int>(pts.size()) < count) {
            Vec v(static_cast<std::size_t>(n));
            for (double& c : v) c = gauss(rng);
            const double r = norm(v);
            if (r < 1e-12) continue;
            for (double& c : v) c /= r;
            pts.push_back(v);
        }
    }
    return pts;
}

ResidualSamples default_residual_samples(int n, int per_axis, int boundary_count) {
    require_dimension(n);
    ResidualSamples s;
    // Tensor grid in (r, angles); the last angle is an azimuth.
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    long total = 1;
    for (int i = 0; i < n; ++i) total *= per_axis;
    for (long c = 0; c < total; ++c) {
        long rem = c;
        for (int i = 0; i < n; ++i) {
            idx[i] = static_cast<int>(rem % per_axis);
            rem /= per_axis;
        }
        const double r = (1.0 - 1e-3) * (idx[0] + 1.0) / per_axis;
        Vec ang;
        for (int i = 1; i < n; ++i) {
            const double span = (i == n - 1) ? 2.0 * std::numbers::pi : std::numbers::pi;
            ang.push_back(span * (idx[i] + 0.5) / per_axis);
        }
        Vec w = unit_from_angles(ang);
        for (double& v : w) v *= r;
        s.interior.push_back(w);
    }
    s.boundary = sphere_points(n, boundary_count);
    return s;
}

Residuals residual_unperturbed(const BubbleParams& b, const ResidualSamples& samples, double boundary_lambda_scale) {
    validate(b);
    const int n = b.n;
    BubbleParams bc = b;
    bc.lambda *= boundary_lambda_scale;
    Residuals r;
    for (const BallPoint& q : samples.interior) {
        const Jet j = V_jet(q, b);
        double res;
        if (n == 2) {
            res = -j.laplacian + 2.0 * std::exp(j.value);
        } else {
            res = -4.0 * (n - 1) / (n - 2) * j.laplacian + std::pow(j.value, (n + 2.0) / (n - 2.0));
        }
        r.interior = std::max(r.interior, std::abs(res));
    }
    for (const BallPoint& q : samples.boundary) {
        const Jet j = V_jet(q, b);
        const double dn = dot(q, j.gradient);
        const double vb = V_jet(q, bc).value;
        double res;
        if (n == 2) {
            res = dn + 2.0 - 2.0 * b.D * std::exp(vb / 2.0);
        } else {
            res = 2.0 / (n - 2) * dn + j.value - b.D / std::sqrt(n * (n - 1.0)) * std::pow(vb, n / (n - 2.0));
        }
        r.boundary = std::max(r.boundary, std::abs(res));
    }
    return r;
}

Vec kernel_elements(const HalfSpacePoint& p, const BubbleParams& b) {
    validate(b);
    require_half_space_point(p, b.n);
    const int n = b.n;
    const double q = bubble_denominator(p, b);
    const double lam = b.lambda;
    Vec z(static_cast<std::size_t>(n));
    const double dlq = 2.0 * b.D * (p[n - 1] + lam * b.D) - 2.0 * lam;
    if (n == 2) {
        z[0] = -2.0 * (-2.0 * (p[0] - b.x0[0])) / q;
        z[1] = 2.0 / lam - 2.0 * dlq / q;
        return z;
    }
    const double k = (n - 2) / 2.0;
    const double c = factor_c(n);
    const double base = c * std::pow(lam, k) * std::pow(q, -k - 1);
    for (int i = 0; i + 1 < n; ++i) z[i] = -k * base * (-2.0 * (p[i] - b.x0[i]));
    z[n - 1] = c * k * std::pow(lam, k - 1) * std::pow(q, -k) - k * base * dlq;
    return z;
}

KernelResidual kernel_residuals(const HalfSpacePoint& p, const BubbleParams& b) {
    validate(b);
    require_half_space_point(p, b.n);
    const int n = b.n;
    using A = Dual<double>;
    using B = Dual<A>;
    using C = Dual<B>;
    KernelResidual out;

    // Mixed derivatives d_param d_xi d_xi U at a point via triple nesting.
    auto mixed = [&](const HalfSpacePoint& at, int param, int axis, double& z, double& d1, double& d2) {
        std::vector<C> x(static_cast<std::size_t>(n)), x0(static_cast<std::size_t>(n - 1));
        for (int i = 0; i < n; ++i) {
            const double s = (i == axis) ? 1.0 : 0.0;
            x[i] = C{B{A{at[i], s}, A{s, 0.0}}, B{A{0.0, 0.0}, A{0.0, 0.0}}};
        }
        for (int i = 0; i + 1 < n; ++i) {
            const double s = (i == param) ? 1.0 : 0.0;
            x0[i] = C{B{A{b.x0[i], 0.0}, A{0.0, 0.0}}, B{A{s, 0.0}, A{0.0, 0.0}}};
        }
        const double sl = (param == n - 1) ? 1.0 : 0.0;
        const C lam{B{A{b.lambda, 0.0}, A{0.0, 0.0}}, B{A{sl, 0.0}, A{0.0, 0.0}}};
        const C u = U_generic<C>(x, x0, lam, n, b.D);
        z = u.d.v.v;
        d1 = u.d.d.v;
        d2 = u.d.d.d;
    };

    HalfSpacePoint pb = p;
    pb[n - 1] = 0.0;
    const double U = eval_U_halfspace(p, b);
    const double Ub = eval_U_halfspace(pb, b);
    for (int param = 0; param < n; ++param) {
        double z = 0, lap = 0, d1 = 0, d2 = 0;
        for (int axis = 0; axis < n; ++axis) {
            mixed(p, param, axis, z, d1, d2);
            lap += d2;
        }
        double zb = 0, dy = 0;
        mixed(pb, param, n - 1, zb, dy, d2);
        if (n == 2) {
            out.interior.push_back(-lap + 2.0 * std::exp(U) * z);
            out.boundary.push_back(-dy - b.D * std::exp(Ub / 2.0) * zb);
        } else {
            const double nn = n;
            out.interior.push_back(-4.0 * (nn - 1) / (nn - 2) * lap +
                                   (nn + 2) / (nn - 2) * std::pow(U, 4.0 / (nn - 2)) * z);
            out.boundary.push_back(-2.0 / (nn - 2) * dy - nn / ((nn - 2) * std::sqrt(nn * (nn - 1))) * b.D *
                                                               std::pow(Ub, 2.0 / (nn - 2)) * zb);
        }
    }
    return out;
}

}  // namespace pcurv
