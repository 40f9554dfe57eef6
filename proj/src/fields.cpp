#include "pcurv/fields.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <string>

#include "pcurv/errors.hpp"

namespace pcurv {

namespace {

int total_degree(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace

PolyField::PolyField(int n, int degree_cap) : n_(n), cap_(degree_cap) {
    require_dimension(n);
    if (degree_cap < 0) throw Error(ErrorCode::InvalidArgument, "negative degree cap");
}

PolyField PolyField::constant(int n, double c) {
    PolyField p(n);
    p.add_term(MultiIndex(static_cast<std::size_t>(n), 0), c);
    return p;
}

PolyField PolyField::coordinate(int n, int i, double c) {
    if (i < 0 || i >= n) throw Error(ErrorCode::InvalidArgument, "coordinate index out of range");
    MultiIndex a(static_cast<std::size_t>(n), 0);
    a[static_cast<std::size_t>(i)] = 1;
    PolyField p(n);
    p.add_term(a, c);
    return p;
}

PolyField PolyField::monomial(int n, const MultiIndex& alpha, double c) {
    PolyField p(n, std::max(kDefaultDegreeCap, total_degree(alpha)));
    p.add_term(alpha, c);
    return p;
}

void PolyField::set_degree_cap(int cap) {
    if (degree() > cap) throw Error(ErrorCode::InvalidArgument, "polynomial degree exceeds new cap");
    cap_ = cap;
}

int PolyField::degree() const {
    int d = 0;
    for (const auto& [a, c] : terms_) d = std::max(d, total_degree(a));
    return d;
}

void PolyField::add_term(const MultiIndex& alpha, double c) {
    if (static_cast<int>(alpha.size()) != n_)
        throw Error(ErrorCode::DimensionMismatch, "multi-index length differs from dimension");
    for (int e : alpha)
        if (e < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent");
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
    if (total_degree(alpha) > cap_)
        throw Error(ErrorCode::InvalidArgument,
                    "term degree " + std::to_string(total_degree(alpha)) + " exceeds cap " + std::to_string(cap_));
    if (c == 0.0) return;
    auto it = terms_.find(alpha);
    if (it == terms_.end()) {
        terms_.emplace(alpha, c);
    } else {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

double PolyField::operator()(const Vec& x) const {
    if (static_cast<int>(x.size()) != n_) throw Error(ErrorCode::DimensionMismatch, "point length differs");
    double s = 0;
    for (const auto& [a, c] : terms_) {
        double m = c;
        for (int i = 0; i < n_; ++i)
            for (int e = 0; e < a[i]; ++e) m *= x[i];
        s += m;
    }
    return s;
}

PolyField& PolyField::operator+=(const PolyField& o) {
    if (o.n_ != n_) throw Error(ErrorCode::DimensionMismatch, "adding polynomials of different dimension");
    cap_ = std::max(cap_, o.cap_);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
}

PolyField& PolyField::operator-=(const PolyField& o) {
    if (o.n_ != n_) throw Error(ErrorCode::DimensionMismatch, "subtracting polynomials of different dimension");
    cap_ = std::max(cap_, o.cap_);
    for (const auto& [a, c] : o.terms_) add_term(a, -c);
    return *this;
}

PolyField& PolyField::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [a, c] : terms_) c *= s;
    return *this;
}

PolyField PolyField::homogeneous_part(int k) const {
    PolyField p(n_, cap_);
    for (const auto& [a, c] : terms_)
        if (total_degree(a) == k) p.add_term(a, c);
    return p;
}

PolyField operator+(PolyField a, const PolyField& b) { return a += b; }
PolyField operator-(PolyField a, const PolyField& b) { return a -= b; }
PolyField operator*(double s, PolyField a) { return a *= s; }

PolyField operator*(const PolyField& a, const PolyField& b) {
    if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "multiplying polynomials of different dimension");
    const int n = a.dim();
    PolyField p(n, std::max({a.degree_cap(), b.degree_cap(), a.degree() + b.degree()}));
    MultiIndex g(static_cast<std::size_t>(n));
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) {
            for (int i = 0; i < n; ++i) g[i] = ea[i] + eb[i];
            p.add_term(g, ca * cb);
        }
    return p;
}

double eval(const PolyField& f, const Vec& q) { return f(q); }

PolyField partial(const PolyField& f, const MultiIndex& alpha) {
    const int n = f.dim();
    if (static_cast<int>(alpha.size()) != n) throw Error(ErrorCode::DimensionMismatch, "multi-index length differs");
    PolyField p(n, f.degree_cap());
    MultiIndex b(static_cast<std::size_t>(n));
    for (const auto& [a, c] : f.terms()) {
        double coef = c;
        bool vanish = false;
        for (int i = 0; i < n && !vanish; ++i) {
            if (alpha[i] > a[i]) {
                vanish = true;
                break;
            }
            for (int k = 0; k < alpha[i]; ++k) coef *= a[i] - k;
            b[i] = a[i] - alpha[i];
        }
        if (!vanish) p.add_term(b, coef);
    }
    return p;
}

PolyField gradient_component(const PolyField& f, int i) {
    MultiIndex a(static_cast<std::size_t>(f.dim()), 0);
    a[static_cast<std::size_t>(i)] = 1;
    return partial(f, a);
}

PolyField compose_linear(const PolyField& f, const std::vector<double>& M) {
    const int n = f.dim();
    if (static_cast<int>(M.size()) != n * n) throw Error(ErrorCode::DimensionMismatch, "matrix size");
    std::vector<PolyField> rows;
    for (int i = 0; i < n; ++i) {
        PolyField r(n, f.degree_cap());
        for (int k = 0; k < n; ++k) r += PolyField::coordinate(n, k, M[i * n + k]);
        rows.push_back(r);
    }
    PolyField out(n, f.degree_cap());
    for (const auto& [a, c] : f.terms()) {
        PolyField t = PolyField::constant(n, c);
        for (int i = 0; i < n; ++i)
            for (int e = 0; e < a[i]; ++e) t = t * rows[i];
        out += t;
    }
    out.set_degree_cap(f.degree_cap());
    return out;
}

PolyField shift(const PolyField& f, const Vec& center) {
    const int n = f.dim();
    if (static_cast<int>(center.size()) != n) throw Error(ErrorCode::DimensionMismatch, "shift center length");
    PolyField out(n, f.degree_cap());
    MultiIndex b(static_cast<std::size_t>(n));
    for (const auto& [a, c] : f.terms()) {
        std::function<void(int, double)> rec = [&](int i, double coef) {
            if (i == n) {
                out.add_term(b, coef);
                return;
            }
            for (int k = 0; k <= a[i]; ++k) {
                b[i] = k;
                rec(i + 1, coef * binomial(a[i], k) * std::pow(center[i], a[i] - k));
            }
        };
        rec(0, c);
    }
    return out;
}

void require_on_sphere(const Vec& xi, int n) {
    if (static_cast<int>(xi.size()) != n) throw Error(ErrorCode::DimensionMismatch, "sphere point length");
    if (std::abs(norm(xi) - 1.0) > kSphereTol) throw Error(ErrorCode::NotOnSphere, "|xi| != 1");
}

double normal_derivative(const PolyField& f, const Vec& xi, int j) {
    require_on_sphere(xi, f.dim());
    if (j < 0) throw Error(ErrorCode::InvalidArgument, "negative derivative order");
    double s = 0;
    for (const auto& [a, c] : f.terms()) {
        const int d = total_degree(a);
        if (d < j) continue;
        double m = c;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (int e = 0; e < a[i]; ++e) m *= xi[i];
        s += m * binomial(d, j);
    }
    return s * factorial(j);
}

PolyField ambient_laplacian(const PolyField& f, int power) {
    if (power < 0) throw Error(ErrorCode::InvalidArgument, "negative Laplacian power");
    const int n = f.dim();
    PolyField g = f;
    for (int p = 0; p < power; ++p) {
        PolyField h(n, f.degree_cap());
        for (int i = 0; i < n; ++i) {
            MultiIndex a(static_cast<std::size_t>(n), 0);
            a[static_cast<std::size_t>(i)] = 2;
            h += partial(g, a);
        }
        g = h;
    }
    return g;
}

PolyField tangential_laplacian_poly(const PolyField& f, int power) {
    if (power < 0) throw Error(ErrorCode::InvalidArgument, "negative Laplacian power");
    const int n = f.dim();
    PolyField r2(n, f.degree_cap());
    for (int i = 0; i < n; ++i) {
        MultiIndex a(static_cast<std::size_t>(n), 0);
        a[static_cast<std::size_t>(i)] = 2;
        r2.add_term(a, 1.0);
    }
    PolyField g = f;
    for (int p = 0; p < power; ++p) {
        PolyField h(n, f.degree_cap());
        for (int k = 0; k <= g.degree(); ++k) {
            PolyField gk = g.homogeneous_part(k);
            if (gk.is_zero()) continue;
            if (k >= 2) h += r2 * ambient_laplacian(gk, 1);
            h -= static_cast<double>(k * (k + n - 2)) * gk;
        }
        h.set_degree_cap(f.degree_cap());
        g = h;
    }
    return g;
}

double tangential_laplacian(const PolyField& f, const Vec& xi, int power) {
    require_on_sphere(xi, f.dim());
    return tangential_laplacian_poly(f, power)(xi);
}

CircleSeries circle_series(const PolyField& f) {
    if (f.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "circle series needs n = 2");
    using C = std::complex<double>;
    const int d = f.degree();
    const std::size_t width = static_cast<std::size_t>(2 * d + 1);
    std::vector<C> acc(width, C(0, 0));
    for (const auto& [a, c] : f.terms()) {
        // Laurent polynomial in E = e^{it}, stored with offset d.
        std::vector<C> poly(width, C(0, 0));
        poly[static_cast<std::size_t>(d)] = C(c, 0);
        auto mul = [&](C lo, C hi) {
            std::vector<C> next(width, C(0, 0));
            for (std::size_t k = 0; k < width; ++k) {
                if (poly[k] == C(0, 0)) continue;
                if (k > 0) next[k - 1] += poly[k] * lo;
                if (k + 1 < width) next[k + 1] += poly[k] * hi;
            }
            poly.swap(next);
        };
        for (int e = 0; e < a[0]; ++e) mul(C(0.5, 0), C(0.5, 0));
        for (int e = 0; e < a[1]; ++e) mul(C(0, 0.5), C(0, -0.5));
        for (std::size_t k = 0; k < width; ++k) acc[k] += poly[k];
    }
    CircleSeries s;
    s.degree = d;
    for (const C& z : acc) {
        s.re.push_back(z.real());
        s.im.push_back(z.imag());
    }
    return s;
}

double half_laplacian_circle(const SphereFunction& h, const Vec& xi) {
    if (h.ambient.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "half Laplacian is defined on S^1 only");
    require_on_sphere(xi, 2);
    const CircleSeries s = circle_series(h.ambient);
    const double t = std::atan2(xi[1], xi[0]);
    double v = 0;
    for (int k = 1; k <= s.degree; ++k) {
        // c_k e^{ikt} + conj: 2 Re(c_k e^{ikt})
        v += 2.0 * k * (s.re_at(k) * std::cos(k * t) - s.im_at(k) * std::sin(k * t));
    }
    return v;
}

PolyField harmonic_extension_circle(const PolyField& f) {
    const CircleSeries s = circle_series(f);
    PolyField out(2, std::max(f.degree_cap(), s.degree));
    out.add_term({0, 0}, s.degree >= 0 ? s.re_at(0) : 0.0);
    for (int k = 1; k <= s.degree; ++k) {
        const std::complex<double> ck(s.re_at(k), s.im_at(k));
        // 2 Re(c_k (x1 + i x2)^k)
        std::complex<double> ipow(1, 0);
        for (int j = 0; j <= k; ++j) {
            const double coef = 2.0 * binomial(k, j) * (ck * ipow).real();
            out.add_term({k - j, j}, coef);
            ipow *= std::complex<double>(0, 1);
        }
    }
    return out;
}

}  // namespace pcurv
