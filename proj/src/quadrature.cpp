#include "pcurv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

#include "pcurv/errors.hpp"

namespace pcurv {

namespace {

// Symmetric nested rule on [-1, 1]; wg is zero at Kronrod-only nodes.
struct Rule {
    std::vector<double> x, wk, wg;
};

Rule make_rule(const std::vector<double>& xk, const std::vector<double>& wk, const std::vector<double>& wg_half) {
    // xk, wk list the non-negative nodes in decreasing order, ending at 0.
    // Gauss nodes are the odd positions xk[1], xk[3], ...
    Rule r;
    const std::size_t m = xk.size();
    for (std::size_t i = 0; i + 1 < m; ++i) {
        r.x.push_back(-xk[i]);
        r.wk.push_back(wk[i]);
        r.wg.push_back(i % 2 == 1 ? wg_half[i / 2] : 0.0);
    }
    for (std::size_t i = m; i-- > 0;) {
        r.x.push_back(xk[i]);
        r.wk.push_back(wk[i]);
        r.wg.push_back(i % 2 == 1 ? wg_half[i / 2] : 0.0);
    }
    return r;
}

const Rule& rule15() {
    static const Rule r = make_rule(
        {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
         0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
         0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
         0.207784955007898467600689403773245, 0.0},
        {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
         0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
         0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
         0.204432940075298892414161999234649, 0.209482141084727828012999174891714},
        {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
         0.381830050505118944950369775488975, 0.417959183673469387755102040816327});
    return r;
}

const Rule& rule7() {
    static const Rule r = make_rule(
        {0.960491268708020283423507092629, 0.774596669241483377035853079956, 0.434243749346802558002071502844, 0.0},
        {0.104656226026467265193823857192, 0.268488089868333440728569280666, 0.401397414775962222905051818618,
         0.450916538658474142345110087045},
        {0.555555555555555555555555555556, 0.888888888888888888888888888889});
    return r;
}

struct Box {
    Vec lo, hi;
    double value = 0;
    double error = 0;
    int split_axis = 0;
};

struct BoxLess {
    bool operator()(const Box& a, const Box& b) const { return a.error < b.error; }
};

class BoxRule {
public:
    explicit BoxRule(int dim) : dim_(dim), rule_(dim <= 3 ? rule15() : rule7()) {
        const std::size_t k = rule_.x.size();
        std::size_t total = 1;
        for (int i = 0; i < dim; ++i) total *= k;
        total_ = total;
        point_.resize(static_cast<std::size_t>(dim));
        idx_.resize(static_cast<std::size_t>(dim));
        axis_gauss_.resize(static_cast<std::size_t>(dim));
    }

    std::size_t points_per_box() const { return total_; }

    void evaluate(const Integrand& f, Box& b) {
        const std::size_t k = rule_.x.size();
        Vec half(static_cast<std::size_t>(dim_)), mid(static_cast<std::size_t>(dim_));
        double scale = 1.0;
        for (int i = 0; i < dim_; ++i) {
            half[i] = 0.5 * (b.hi[i] - b.lo[i]);
            mid[i] = 0.5 * (b.hi[i] + b.lo[i]);
            scale *= half[i];
        }
        std::fill(idx_.begin(), idx_.end(), 0);
        std::fill(axis_gauss_.begin(), axis_gauss_.end(), 0.0);
        double qk = 0;
        for (std::size_t p = 0; p < total_; ++p) {
            double w = 1.0;
            for (int i = 0; i < dim_; ++i) {
                point_[i] = mid[i] + half[i] * rule_.x[idx_[i]];
                w *= rule_.wk[idx_[i]];
            }
            const double v = f(point_);
            if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteIntegrand, "integrand returned a non-finite value");
            qk += w * v;
            for (int i = 0; i < dim_; ++i) {
                const double wgi = rule_.wg[idx_[i]];
                if (wgi != 0.0) axis_gauss_[i] += w / rule_.wk[idx_[i]] * wgi * v;
            }
            for (int i = 0; i < dim_; ++i) {
                if (++idx_[i] < k) break;
                idx_[i] = 0;
            }
        }
        b.value = qk * scale;
        b.error = 0;
        double worst = -1;
        for (int i = 0; i < dim_; ++i) {
            const double e = std::abs(qk - axis_gauss_[i]) * std::abs(scale);
            b.error += e;
            if (e > worst) {
                worst = e;
                b.split_axis = i;
            }
        }
    }

private:
    int dim_;
    const Rule& rule_;
    std::size_t total_ = 1;
    Vec point_;
    std::vector<std::size_t> idx_;
    Vec axis_gauss_;
};

double tolerance_for(const QuadratureSpec& spec, double value) {
    return std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
}

void validate_spec(const QuadratureSpec& spec) {
    if (!(spec.rel_tol > 0) || !(spec.abs_tol >= 0) || spec.max_subdivisions < 1)
        throw Error(ErrorCode::InvalidArgument, "invalid quadrature tolerances");
}

// Exponent q of the compactifying map y = t / (1 - t)^q.
double compactify_exponent(const QuadratureSpec& spec, int dim) {
    const int p = spec.decay_order > 0 ? spec.decay_order : 2 * dim;
    if (p <= dim)
        throw Error(ErrorCode::InvalidArgument,
                    "decay_order " + std::to_string(p) + " must exceed dimension " + std::to_string(dim));
    return std::max(1.0, static_cast<double>(dim) / (p - dim));
}

}  // namespace

IntegralResult& IntegralResult::operator+=(const IntegralResult& o) {
    value += o.value;
    error_estimate += o.error_estimate;
    evaluations += o.evaluations;
    converged = converged && o.converged;
    return *this;
}

const IntegralResult& require_converged(const IntegralResult& r, const char* what) {
    if (!r.converged)
        throw Error(ErrorCode::ToleranceNotReached,
                    std::string(what) + ": value " + std::to_string(r.value) + ", error " +
                        std::to_string(r.error_estimate));
    return r;
}

IntegralResult integrate_box(const Integrand& f, const Vec& lo, const Vec& hi, const QuadratureSpec& spec) {
    validate_spec(spec);
    const int dim = static_cast<int>(lo.size());
    if (dim < 1 || dim > 5 || hi.size() != lo.size())
        throw Error(ErrorCode::InvalidArgument, "box dimension must be in [1, 5]");
    BoxRule rule(dim);
    std::priority_queue<Box, std::vector<Box>, BoxLess> heap;
    IntegralResult res;

    // Start from a 2^dim split so a single unlucky rule cannot hide a feature.
    const int start = 1 << dim;
    for (int c = 0; c < start; ++c) {
        Box b;
        b.lo = lo;
        b.hi = hi;
        for (int i = 0; i < dim; ++i) {
            const double m = 0.5 * (lo[i] + hi[i]);
            if (c & (1 << i)) b.lo[i] = m;
            else b.hi[i] = m;
        }
        rule.evaluate(f, b);
        res.evaluations += static_cast<long>(rule.points_per_box());
        res.value += b.value;
        res.error_estimate += b.error;
        heap.push(std::move(b));
    }

    long subdivisions = 0;
    while (res.error_estimate > tolerance_for(spec, res.value)) {
        if (subdivisions >= spec.max_subdivisions) {
            res.converged = false;
            break;
        }
        Box worst = heap.top();
        heap.pop();
        const int ax = worst.split_axis;
        const double m = 0.5 * (worst.lo[ax] + worst.hi[ax]);
        Box a, b;
        a.lo = worst.lo;
        a.hi = worst.hi;
        a.hi[ax] = m;
        b.lo = worst.lo;
        b.hi = worst.hi;
        b.lo[ax] = m;
        rule.evaluate(f, a);
        rule.evaluate(f, b);
        res.evaluations += 2 * static_cast<long>(rule.points_per_box());
        res.value += a.value + b.value - worst.value;
        res.error_estimate += a.error + b.error - worst.error;
        heap.push(std::move(a));
        heap.push(std::move(b));
        ++subdivisions;
        if (subdivisions % 4096 == 0) {
            // Re-accumulate to stop drift of the running sums.
            auto copy = heap;
            double v = 0, e = 0;
            while (!copy.empty()) {
                v += copy.top().value;
                e += copy.top().error;
                copy.pop();
            }
            res.value = v;
            res.error_estimate = e;
        }
    }
    double v = 0, e = 0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    res.value = v;
    res.error_estimate = e;
    return res;
}

IntegralResult integrate_half_space(const Integrand& f, int n, const QuadratureSpec& spec) {
    require_dimension(n);
    if (n > 5) throw Error(ErrorCode::InvalidArgument, "quadrature supports n <= 5");
    const double q = compactify_exponent(spec, n);
    Vec lo(static_cast<std::size_t>(n), -1.0), hi(static_cast<std::size_t>(n), 1.0);
    lo[n - 1] = 0.0;
    Vec y(static_cast<std::size_t>(n));
    auto g = [&](const Vec& t) {
        double jac = 1.0;
        for (int i = 0; i + 1 < n; ++i) {
            const double s = 1.0 - t[i] * t[i];
            if (s <= 0) return 0.0;
            y[i] = t[i] / std::pow(s, q);
            jac *= (s + 2.0 * q * t[i] * t[i]) / std::pow(s, q + 1.0);
        }
        const double s = 1.0 - t[n - 1];
        if (s <= 0) return 0.0;
        y[n - 1] = t[n - 1] / std::pow(s, q);
        jac *= (s + q * t[n - 1]) / std::pow(s, q + 1.0);
        if (!std::isfinite(jac)) return 0.0;
        for (double v : y)
            if (!std::isfinite(v)) return 0.0;
        const double v = f(y);
        if (v == 0.0) return 0.0;
        return v * jac;
    };
    return integrate_box(g, lo, hi, spec);
}

IntegralResult integrate_boundary_hyperplane(const Integrand& f, int n, const QuadratureSpec& spec) {
    require_dimension(n);
    if (n > 5) throw Error(ErrorCode::InvalidArgument, "quadrature supports n <= 5");
    const int d = n - 1;
    const double q = compactify_exponent(spec, d);
    Vec lo(static_cast<std::size_t>(d), -1.0), hi(static_cast<std::size_t>(d), 1.0);
    Vec y(static_cast<std::size_t>(d));
    auto g = [&](const Vec& t) {
        double jac = 1.0;
        for (int i = 0; i < d; ++i) {
            const double s = 1.0 - t[i] * t[i];
            if (s <= 0) return 0.0;
            y[i] = t[i] / std::pow(s, q);
            jac *= (s + 2.0 * q * t[i] * t[i]) / std::pow(s, q + 1.0);
        }
        if (!std::isfinite(jac)) return 0.0;
        for (double v : y)
            if (!std::isfinite(v)) return 0.0;
        const double v = f(y);
        if (v == 0.0) return 0.0;
        return v * jac;
    };
    return integrate_box(g, lo, hi, spec);
}

Vec unit_from_angles(const Vec& a) {
    const std::size_t k = a.size() + 1;
    Vec x(k);
    double s = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        x[i] = s * std::cos(a[i]);
        s *= std::sin(a[i]);
    }
    x[k - 1] = s;
    return x;
}

double angles_jacobian(const Vec& a) {
    const std::size_t k = a.size() + 1;
    double j = 1.0;
    for (std::size_t i = 0; i + 2 < k; ++i) j *= std::pow(std::sin(a[i]), static_cast<double>(k - 2 - i));
    return j;
}

namespace {

void angle_box(int k, Vec& lo, Vec& hi) {
    // Angles for S^{k-1}: k-2 polar angles in [0, pi], one azimuth in [0, 2 pi].
    for (int i = 0; i + 2 < k; ++i) {
        lo.push_back(0.0);
        hi.push_back(std::numbers::pi);
    }
    lo.push_back(0.0);
    hi.push_back(2.0 * std::numbers::pi);
}

}  // namespace

IntegralResult integrate_ball(const Integrand& f, int n, const QuadratureSpec& spec) {
    require_dimension(n);
    if (n > 5) throw Error(ErrorCode::InvalidArgument, "quadrature supports n <= 5");
    Vec lo{0.0}, hi{1.0};
    angle_box(n, lo, hi);
    Vec x(static_cast<std::size_t>(n));
    // r = 1 - (1 - s)^2 absorbs inverse square-root growth at the sphere.
    auto g = [&](const Vec& t) {
        const double c = 1.0 - t[0];
        const double r = 1.0 - c * c;
        const Vec ang(t.begin() + 1, t.end());
        const Vec w = unit_from_angles(ang);
        for (int i = 0; i < n; ++i) x[i] = r * w[i];
        return f(x) * 2.0 * c * std::pow(r, n - 1) * angles_jacobian(ang);
    };
    return integrate_box(g, lo, hi, spec);
}

IntegralResult integrate_sphere(const Integrand& f, int n, const QuadratureSpec& spec) {
    require_dimension(n);
    if (n > 5) throw Error(ErrorCode::InvalidArgument, "quadrature supports n <= 5");
    Vec lo, hi;
    angle_box(n, lo, hi);
    auto g = [&](const Vec& t) { return f(unit_from_angles(t)) * angles_jacobian(t); };
    return integrate_box(g, lo, hi, spec);
}

std::vector<Vec> tangent_basis(const Vec& xi) {
    const std::size_t n = xi.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(xi[a]) < std::abs(xi[b]); });
    std::vector<Vec> basis{xi};
    const double nx = norm(xi);
    for (double& v : basis[0]) v /= nx;
    for (std::size_t k : order) {
        if (basis.size() == n) break;
        Vec v(n, 0.0);
        v[k] = 1.0;
        for (const Vec& b : basis) {
            const double c = dot(v, b);
            for (std::size_t i = 0; i < n; ++i) v[i] -= c * b[i];
        }
        const double nv = norm(v);
        if (nv < 1e-8) continue;
        for (double& c : v) c /= nv;
        basis.push_back(v);
    }
    basis.erase(basis.begin());
    return basis;
}

IntegralResult integrate_regularized(const RegularizedIntegrand& f, RegDomain domain, const Vec& xi,
                                     const QuadratureSpec& spec, const RegularizedOptions& opt) {
    const int n = static_cast<int>(xi.size());
    require_dimension(n);
    if (n > 5) throw Error(ErrorCode::InvalidArgument, "quadrature supports n <= 5");
    if (std::abs(norm(xi) - 1.0) > kSphereTol) throw Error(ErrorCode::NotOnSphere, "|xi| != 1");
    if (opt.depth < 1) throw Error(ErrorCode::InvalidArgument, "grading depth must be positive");
    const std::vector<Vec> tb = tangent_basis(xi);
    const int te = n - 1;  // tangent dimension

    Vec z(static_cast<std::size_t>(n)), h(static_cast<std::size_t>(n)), e(static_cast<std::size_t>(n));
    double peak = 0;

    // Tangent direction from the trailing coordinates of t (S^{n-2}).
    auto tangent_dir = [&](const Vec& t, std::size_t off, double& jac) {
        std::fill(e.begin(), e.end(), 0.0);
        if (te == 1) {
            jac = 1.0;
            for (int i = 0; i < n; ++i) e[i] = tb[0][i];
            return;
        }
        const Vec ang(t.begin() + static_cast<long>(off), t.end());
        const Vec w = unit_from_angles(ang);
        jac = angles_jacobian(ang);
        for (int k = 0; k < te; ++k)
            for (int i = 0; i < n; ++i) e[i] += w[k] * tb[k][i];
    };

    // Sum over the antipodal tangent pair; counting measure on S^0, average otherwise.
    auto paired = [&](auto&& point_at) {
        double acc = 0;
        for (int sign : {1, -1}) {
            point_at(sign);
            const double v = f(z, h);
            if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteIntegrand, "regularized integrand non-finite");
            acc += v;
        }
        return te == 1 ? acc : 0.5 * acc;
    };

    Integrand g;
    Vec lo0, hi0;
    if (domain == RegDomain::Sphere) {
        g = [&](const Vec& t) {
            const double s = t[0];
            double jac = 1.0;
            tangent_dir(t, 1, jac);
            const double c = std::cos(s), sn = std::sin(s), hv = -2.0 * std::sin(0.5 * s) * std::sin(0.5 * s);
            auto at = [&](int sign) {
                for (int i = 0; i < n; ++i) {
                    h[i] = hv * xi[i] + sign * sn * e[i];
                    z[i] = c * xi[i] + sign * sn * e[i];
                }
            };
            return paired(at) * std::pow(sn, n - 2) * jac;
        };
        lo0 = {0.0};
        hi0 = {std::numbers::pi};
        if (te > 1) angle_box(te, lo0, hi0);
    } else {
        // z = xi + t w, w = -cos(s) xi + sin(s) e, t = 2 cos(s) u, u in [0, 1].
        g = [&](const Vec& t) {
            const double u = t[0], s = t[1];
            double jac = 1.0;
            tangent_dir(t, 2, jac);
            const double c = std::cos(s), sn = std::sin(s);
            const double len = 2.0 * c * u;
            auto at = [&](int sign) {
                for (int i = 0; i < n; ++i) {
                    h[i] = len * (-c * xi[i] + sign * sn * e[i]);
                    z[i] = xi[i] + h[i];
                }
            };
            return paired(at) * std::pow(2.0 * c, n) * std::pow(u, n - 1) * std::pow(sn, n - 2) * jac;
        };
        lo0 = {0.0, 0.0};
        hi0 = {1.0, 0.5 * std::numbers::pi};
        if (te > 1) angle_box(te, lo0, hi0);
    }

    const double top = lo0.empty() ? 0 : hi0[0];
    QuadratureSpec piece_spec = spec;
    piece_spec.abs_tol = spec.abs_tol / (opt.depth + 1);
    IntegralResult total;
    std::vector<double> pieces;
    std::vector<double> peaks;
    double upper = top;
    for (int k = 0; k <= opt.depth; ++k) {
        const double lower = (k == opt.depth) ? 0.0 : top * std::ldexp(1.0, -(k + 1));
        Vec lo = lo0, hi = hi0;
        lo[0] = lower;
        hi[0] = upper;
        QuadratureSpec ps = piece_spec;
        ps.abs_tol = std::max(piece_spec.abs_tol, spec.rel_tol * std::abs(total.value) / (opt.depth + 1));
        peak = 0;
        // Peaks of the weighted, pair-summed integrand: bounded unless the integral diverges.
        const IntegralResult r = integrate_box(
            [&](const Vec& t) {
                const double v = g(t);
                peak = std::max(peak, std::abs(v));
                return v;
            },
            lo, hi, ps);
        total += r;
        pieces.push_back(r.value);
        peaks.push_back(peak);
        upper = lower;
    }
    // Removable singularities give pieces shrinking roughly geometrically.
    const std::size_t m = pieces.size();
    if (m >= 8) {
        const double late = std::abs(pieces[m - 2]);
        const double early = std::abs(pieces[m - 7]);
        if (late > std::max(spec.abs_tol, 1e-300) && late > 0.5 * early)
            throw Error(ErrorCode::SingularityDetected, "graded pieces do not decay toward xi");
    }
    // Integrable singularities keep the weighted values bounded; a divergent one grows by 2^k over k shells.
    const double inner = peaks[m - 2];
    const double outer = m >= 12 ? peaks[m - 12] : peaks.front();
    if (inner > 64.0 * std::max(outer, spec.abs_tol) ||
        (spec.abs_tol > 0 && *std::max_element(peaks.begin(), peaks.end()) > 1.0 / spec.abs_tol))
        throw Error(ErrorCode::SingularityDetected, "integrand grows beyond 1/abs_tol near xi");
    return total;
}

}  // namespace pcurv
