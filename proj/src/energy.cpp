#include "pcurv/energy.hpp"

#include <cmath>
#include <numbers>

#include "pcurv/errors.hpp"

namespace pcurv {

void validate(const EnergyInput& in) {
    require_dimension(in.n);
    if (!(in.D > 1.0) || !std::isfinite(in.D)) throw Error(ErrorCode::InvalidArgument, "D must be > 1");
    if (in.K.dim() != in.n || in.H.ambient.dim() != in.n)
        throw Error(ErrorCode::DimensionMismatch, "K and H must live in dimension n");
}

EnergyInput make_input(int n, double D, const PolyField& K, const PolyField& H, double eps) {
    EnergyInput in{n, D, eps, K, SphereFunction{H}};
    validate(in);
    return in;
}

double small_alpha(int n) {
    require_dimension(n);
    return n == 2 ? 2.0 : (n - 2.0) * (n - 2.0) / (8.0 * n * (n - 1.0));
}

double small_beta(int n) {
    require_dimension(n);
    return n == 2 ? 2.0 : 2.0 * std::sqrt(n / (n - 1.0));
}

double BallFunction::value(const Vec& q) const {
    double v = poly.is_zero() ? 0.0 : poly(q);
    if (bubble) v += V_jet(q, *bubble).value;
    return v;
}

Vec BallFunction::gradient(const Vec& q) const {
    const int n = static_cast<int>(q.size());
    Vec g(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n && !poly.is_zero(); ++i) g[i] = gradient_component(poly, i)(q);
    if (bubble) {
        const Jet j = V_jet(q, *bubble);
        for (int i = 0; i < n; ++i) g[i] += j.gradient[i];
    }
    return g;
}

BallFunction bubble_function(const BubbleParams& b) {
    validate(b);
    BallFunction u;
    u.bubble = b;
    u.poly = PolyField(b.n);
    return u;
}

EnergyValue energy_J(const BallFunction& u, const EnergyInput& in, const QuadratureSpec& spec, EnergyConvention conv) {
    validate(in);
    const int n = in.n;
    if (u.poly.dim() != n || (u.bubble && u.bubble->n != n))
        throw Error(ErrorCode::DimensionMismatch, "u must live in dimension n");
    std::vector<PolyField> grad_poly;
    for (int i = 0; i < n; ++i) grad_poly.push_back(gradient_component(u.poly, i));
    auto value_grad = [&](const Vec& q, double& v, double& g2) {
        v = u.poly.is_zero() ? 0.0 : u.poly(q);
        Vec g(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) g[i] = grad_poly[i].is_zero() ? 0.0 : grad_poly[i](q);
        if (u.bubble) {
            const Jet j = V_jet(q, *u.bubble);
            v += j.value;
            for (int i = 0; i < n; ++i) g[i] += j.gradient[i];
        }
        g2 = dot(g, g);
    };

    const double eps = in.eps;
    const PolyField& K = in.K;
    const PolyField& H = in.H.ambient;
    IntegralResult rb, rs;
    if (n == 2) {
        rb = integrate_ball(
            [&](const Vec& q) {
                double v, g2;
                value_grad(q, v, g2);
                return 0.5 * g2 + 2.0 * (1.0 + eps * K(q)) * std::exp(v);
            },
            n, spec);
        rs = integrate_sphere(
            [&](const Vec& q) {
                double v, g2;
                value_grad(q, v, g2);
                return 2.0 * v - 4.0 * in.D * (1.0 + eps * H(q)) * std::exp(0.5 * v);
            },
            n, spec);
    } else {
        const double an = small_alpha(n);
        const double bn = small_beta(n);
        const double p_in = 2.0 * n / (n - 2.0);
        const double p_bd = 2.0 * (n - 1.0) / (n - 2.0);
        const double ws = conv == EnergyConvention::Variational ? (n - 2) / 4.0 : 0.5;
        rb = integrate_ball(
            [&](const Vec& q) {
                double v, g2;
                value_grad(q, v, g2);
                return 0.5 * g2 + an * (1.0 + eps * K(q)) * std::pow(std::abs(v), p_in);
            },
            n, spec);
        rs = integrate_sphere(
            [&](const Vec& q) {
                double v, g2;
                value_grad(q, v, g2);
                return ws * v * v - an * bn * in.D * (1.0 + eps * H(q)) * std::pow(std::abs(v), p_bd);
            },
            n, spec);
    }
    return {rb.value + rs.value, rb.error_estimate + rs.error_estimate, rb.converged && rs.converged};
}

ConstancyReport energy_constancy_check(const EnergyInput& in, const std::vector<GridPoint>& grid,
                                       const QuadratureSpec& spec, EnergyConvention conv) {
    validate(in);
    ConstancyReport r;
    const BubbleParams b0 = make_bubble(in.n, in.D, Vec(static_cast<std::size_t>(in.n - 1), 0.0), 1.0);
    r.reference = energy_J(bubble_function(b0), in, spec, conv).value;
    for (const GridPoint& g : grid) {
        const BubbleParams b = make_bubble(in.n, in.D, g.x0, g.lambda);
        const double v = energy_J(bubble_function(b), in, spec, conv).value;
        r.values.push_back(v);
        const double dev = std::abs(v - r.reference);
        r.max_abs_deviation = std::max(r.max_abs_deviation, dev);
        r.max_rel_deviation = std::max(r.max_rel_deviation, dev / std::max(1e-300, std::abs(r.reference)));
    }
    return r;
}

namespace {

// Shared evaluation of the two half-space integrals with optional reference subtraction.
IntegralResult gamma_impl(const BubbleParams& b, const EnergyInput& in, const QuadratureSpec& spec, double kref,
                          double href) {
    validate(b);
    validate(in);
    if (b.n != in.n || b.D != in.D) throw Error(ErrorCode::InvalidArgument, "bubble and input disagree on n or D");
    const int n = in.n;
    const double L = big_lambda(n);
    const double D = in.D;
    const double ci = std::pow(L, n / 2.0);
    const double cb = std::pow(L, (n - 1) / 2.0) * small_beta(n) * D;
    Vec x(static_cast<std::size_t>(n));
    const PolyField& K = in.K;
    const PolyField& H = in.H.ambient;

    IntegralResult ri;
    if (!K.is_zero() || kref != 0.0) {
        QuadratureSpec s = spec;
        s.decay_order = 2 * n;
        ri = integrate_half_space(
            [&](const Vec& y) {
                double r2 = 0;
                for (int i = 0; i + 1 < n; ++i) {
                    x[i] = b.lambda * y[i] + b.x0[i];
                    r2 += y[i] * y[i];
                }
                x[n - 1] = b.lambda * y[n - 1];
                const double t = y[n - 1] + D;
                const double den = r2 + t * t - 1.0;
                const double kv = K(inversion(x, n)) - kref;
                return ci * kv / std::pow(den, n);
            },
            n, s);
    }
    IntegralResult rb;
    if (!H.is_zero() || href != 0.0) {
        QuadratureSpec s = spec;
        s.decay_order = 2 * (n - 1);
        rb = integrate_boundary_hyperplane(
            [&](const Vec& y) {
                double r2 = 0;
                for (int i = 0; i + 1 < n; ++i) {
                    x[i] = b.lambda * y[i] + b.x0[i];
                    r2 += y[i] * y[i];
                }
                x[n - 1] = 0.0;
                const double hv = H(inversion(x, n)) - href;
                return cb * hv / std::pow(r2 + D * D - 1.0, n - 1);
            },
            n, s);
    }
    IntegralResult out = ri;
    out.value = ri.value - rb.value;
    out.error_estimate = ri.error_estimate + rb.error_estimate;
    out.evaluations = ri.evaluations + rb.evaluations;
    out.converged = ri.converged && rb.converged;
    return out;
}

}  // namespace

IntegralResult gamma(const BubbleParams& b, const EnergyInput& in, const QuadratureSpec& spec) {
    return gamma_impl(b, in, spec, 0.0, 0.0);
}

IntegralResult gamma_deviation(const BubbleParams& b, const EnergyInput& in, const Vec& ref,
                               const QuadratureSpec& spec) {
    return gamma_impl(b, in, spec, in.K(ref), in.H.ambient(ref));
}

IntegralResult gamma_ball(const BubbleParams& b, const EnergyInput& in, const QuadratureSpec& spec) {
    validate(b);
    validate(in);
    const int n = in.n;
    const BallQuadratic g = ball_quadratic(b);
    auto P = [&](const Vec& q) {
        const double G = g.alpha * dot(q, q) - 2.0 * dot(g.beta, q) + g.gamma;
        return g.scale / (G * G);
    };
    const PolyField& K = in.K;
    const PolyField& H = in.H.ambient;
    IntegralResult ri, rs;
    if (!K.is_zero()) ri = integrate_ball([&](const Vec& q) { return K(q) * std::pow(P(q), n / 2.0); }, n, spec);
    const double cb = small_beta(n) * in.D;
    if (!H.is_zero())
        rs = integrate_sphere([&](const Vec& q) { return cb * H(q) * std::pow(P(q), (n - 1) / 2.0); }, n, spec);
    IntegralResult out = ri;
    out.value = ri.value - rs.value;
    out.error_estimate = ri.error_estimate + rs.error_estimate;
    out.evaluations = ri.evaluations + rs.evaluations;
    out.converged = ri.converged && rs.converged;
    return out;
}

double gamma_limit_check_at(const EnergyInput& in, const Vec& x0, double lambda, const QuadratureSpec& spec) {
    validate(in);
    Vec south(static_cast<std::size_t>(in.n), 0.0);
    south[in.n - 1] = -1.0;
    const BubbleParams b = make_bubble(in.n, in.D, x0, lambda);
    return std::abs(gamma_deviation(b, in, south, spec).value);
}

double gamma_limit_check(const EnergyInput& in, double R, const QuadratureSpec& spec) {
    if (!(R > 0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
    Vec x0(static_cast<std::size_t>(in.n - 1), 0.0);
    x0[0] = R / 2.0;
    return gamma_limit_check_at(in, x0, R / 2.0, spec);
}

std::pair<double, double> gauss_bonnet_identities(const BubbleParams& b, const QuadratureSpec& spec) {
    validate(b);
    if (b.n != 2) throw Error(ErrorCode::DimensionMismatch, "Gauss-Bonnet identities are two-dimensional");
    const IntegralResult len = integrate_sphere([&](const Vec& q) { return std::sqrt(ball_P(q, b)); }, 2, spec);
    const IntegralResult area = integrate_ball([&](const Vec& q) { return ball_P(q, b); }, 2, spec);
    return {len.value, b.D * len.value - area.value};
}

double alpha_D(double D) {
    if (!(D > 1.0)) throw Error(ErrorCode::InvalidArgument, "D must be > 1");
    if (std::abs(D - 2.0 / std::sqrt(3.0)) < 1e-10) throw Error(ErrorCode::DegenerateD, "D = 2/sqrt(3) gives alpha_D = 0");
    return std::numbers::pi * (D / std::sqrt(D * D - 1.0) - 2.0);
}

}  // namespace pcurv
