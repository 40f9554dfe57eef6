#include "pcurv/expansion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcurv/errors.hpp"

namespace pcurv {

namespace {

constexpr double kPi = std::numbers::pi;

double binom(int a, int b) {
    if (b < 0 || b > a) return 0.0;
    return std::round(std::exp(std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0)));
}

std::string key_text(const std::string& s, const std::vector<int>& idx) {
    std::string t = s + "_{";
    for (std::size_t i = 0; i < idx.size(); ++i) t += (i ? "," : "") + std::to_string(idx[i]);
    return t + "}";
}

void require_order_dimension(int n) {
    require_dimension(n);
    if (n > 5) throw Error(ErrorCode::InvalidArgument, "expansion supports n <= 5");
}

// Taylor remainder of f about xi beyond total degree m, as a polynomial in h = z - xi.
PolyField taylor_remainder(const PolyField& f, const Vec& xi, int m) {
    const PolyField g = shift(f, xi);
    PolyField r(f.dim(), f.degree_cap());
    for (const auto& [a, c] : g.terms()) {
        int d = 0;
        for (int e : a) d += e;
        if (d > m) r.add_term(a, c);
    }
    return r;
}

// d_nu^p Delta_tau^i f (xi)
double nu_tau(const PolyField& f, const Vec& xi, int p, int i) {
    const PolyField g = i == 0 ? f : tangential_laplacian_poly(f, i);
    return normal_derivative(g, xi, p);
}

double lap_at(const PolyField& f, const Vec& xi, int power) { return ambient_laplacian(f, power)(xi); }

struct Assembly {
    double sum = 0;
    double scale = 0;
    void add(double v) {
        sum += v;
        scale = std::max(scale, std::abs(v));
    }
};

}  // namespace

const char* method_name(ConstantMethod m) {
    switch (m) {
    case ConstantMethod::ClosedForm: return "closed_form";
    case ConstantMethod::Quadrature: return "quadrature";
    case ConstantMethod::ExactCombinatorial: return "exact_combinatorial";
    }
    return "unknown";
}

void ConstantsTable::add(const ConstantEntry& e) {
    const auto key = std::make_pair(e.symbol, e.indices);
    auto it = index_.find(key);
    if (it != index_.end()) {
        entries_[it->second] = e;
        return;
    }
    index_[key] = entries_.size();
    entries_.push_back(e);
}

bool ConstantsTable::has(const std::string& symbol, const std::vector<int>& indices) const {
    return index_.count({symbol, indices}) != 0;
}

const ConstantEntry& ConstantsTable::entry(const std::string& symbol, const std::vector<int>& indices) const {
    auto it = index_.find({symbol, indices});
    if (it == index_.end())
        throw Error(ErrorCode::InvalidArgument, "constant " + key_text(symbol, indices) + " not in table");
    return entries_[it->second];
}

double ConstantsTable::value(const std::string& symbol, const std::vector<int>& indices) const {
    return entry(symbol, indices).value;
}

double double_factorial(int k) {
    if (k < -1) throw Error(ErrorCode::InvalidArgument, "double factorial of k < -1");
    double r = 1.0;
    for (int i = k; i > 1; i -= 2) r *= i;
    return r;
}

double factorial(int k) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "factorial of negative integer");
    return std::round(std::tgamma(k + 1.0));
}

double comb_A(int n, int i, int j) {
    if (i < 0 || j - 2 * i < 0) throw Error(ErrorCode::InvalidArgument, "A_{n,i,j} needs 0 <= 2i <= j");
    return 1.0 / (factorial(j - 2 * i) * factorial(2 * i)) * double_factorial(n - 3) /
           (double_factorial(2 * i) * double_factorial(n + 2 * i - 3));
}

double comb_B(int n, int j) {
    if (j < 0) throw Error(ErrorCode::InvalidArgument, "B_{n,j} needs j >= 0");
    return double_factorial(n - 3) / (factorial(2 * j) * double_factorial(2 * j) * double_factorial(n + 2 * j - 3));
}

double comb_C(int n, int m, int i, double D) {
    if (i < 0 || m - n - 2 * i < 0 || m - i - 1 < 0)
        throw Error(ErrorCode::InvalidArgument, "C_{n,m,i} needs 0 <= 2i <= m - n");
    return factorial(m - i - 1) / (factorial(n - 1) * factorial(i) * factorial(m - n - 2 * i)) *
           std::pow(D * D - 1.0, i) * std::pow(D, m - n - 2 * i);
}

double comb_D(int n, int m, double D) {
    if ((n + m) % 2 == 0 || m < n - 1) throw Error(ErrorCode::InvalidArgument, "D_{n,m} needs n + m odd, m >= n - 1");
    const int top = (n + m + 1) / 2 - 2;
    const int bot = (m - n + 1) / 2;
    return factorial(top) / (factorial(bot) * factorial(n - 2)) * std::pow(D * D - 1.0, bot);
}

double const_d(int n, int j) {
    if (j < 0) throw Error(ErrorCode::InvalidArgument, "d_{n,j} needs j >= 0");
    const double integral = std::sqrt(kPi) * std::tgamma((j + 1) / 2.0) / std::tgamma(j / 2.0 + 1.0);
    return std::pow(big_lambda(n), n / 2.0) * sphere_area(n - 2) * integral;
}

double const_e(int n, double D) {
    return std::pow(big_lambda(n), (n - 1) / 2.0) * small_beta(n) * D * sphere_area(n - 2);
}

double b_closed_form(int n, int j, double D) {
    if (2 * j >= n - 1) throw Error(ErrorCode::InvalidArgument, "b_{n,j} diverges for j >= (n-1)/2");
    const double x = j + (n - 1) / 2.0, y = (n - 1) / 2.0 - j;
    const double beta = std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
    return std::pow(big_lambda(n), (n - 1) / 2.0) * small_beta(n) * D / std::pow(D * D - 1.0, (n - 2 * j - 1) / 2.0) *
           sphere_area(n - 2) * beta / 2.0;
}

IntegralResult b_quadrature(int n, int j, double D, const QuadratureSpec& spec) {
    if (2 * j >= n - 1) throw Error(ErrorCode::InvalidArgument, "b_{n,j} diverges for j >= (n-1)/2");
    const double pre = std::pow(big_lambda(n), (n - 1) / 2.0) * small_beta(n) * D /
                       std::pow(D * D - 1.0, (n - 2 * j - 1) / 2.0) * sphere_area(n - 2) / 2.0;
    QuadratureSpec s = spec;
    s.decay_order = n - 2 * j;
    IntegralResult r = integrate_boundary_hyperplane(
        [&](const Vec& y) {
            const double r2 = y[0] * y[0];
            return std::pow(r2, j + (n - 2) / 2.0) / std::pow(r2 + 1.0, n - 1);
        },
        2, s);
    r.value *= pre;
    r.error_estimate *= pre;
    return r;
}

IntegralResult a_quadrature(int n, int i, int j, double D, const QuadratureSpec& spec) {
    require_order_dimension(n);
    if (i < 0 || 2 * i > j) throw Error(ErrorCode::InvalidArgument, "a_{n,i,j} needs 0 <= 2i <= j");
    if (j > n - 1) throw Error(ErrorCode::InvalidArgument, "a_{n,i,j} diverges for j >= n");
    const double pre = std::pow(big_lambda(n), n / 2.0) * sphere_area(n - 2) / 2.0;
    QuadratureSpec s = spec;
    s.decay_order = n + 2 - j;
    IntegralResult r = integrate_half_space(
        [&](const Vec& y) {
            const double r2 = y[0] * y[0];
            const double t = y[1] + D;
            const double num = std::pow(r2, i + (n - 2) / 2.0) * std::pow(y[1], j - 2 * i);
            return num / std::pow(r2 + t * t - 1.0, n);
        },
        2, s);
    r.value *= pre;
    r.error_estimate *= pre;
    return r;
}

IntegralResult c_quadrature(int n, int m, double D, const QuadratureSpec& spec) {
    if (n % 2 != 0 || m % 2 != 0 || m < n) throw Error(ErrorCode::InvalidArgument, "c_{n,m} needs n, m even, m >= n");
    const double pre = std::pow(big_lambda(n), (n - 1) / 2.0) * small_beta(n) * D *
                       std::pow(D * D - 1.0, (m - n + 1) / 2.0) * sphere_area(n - 2);
    // int_0^2 of the plain part, then the expansion of (r^2+1)^{1-n} integrated termwise:
    // subtracted terms on [0, 2] and the tail series on [2, inf) combine into one sum.
    IntegralResult r = integrate_box(
        [&](const Vec& t) { return std::pow(t[0], m + n - 2) / std::pow(t[0] * t[0] + 1.0, n - 1); }, {0.0}, {2.0},
        spec);
    double series = 0;
    for (int j = 0; j < 400; ++j) {
        const int p = m - n - 2 * j;
        const double term = (j % 2 ? -1.0 : 1.0) * binom(n + j - 2, j) * std::pow(2.0, p + 1) / (p + 1);
        series += term;
        if (p < 0 && std::abs(term) < 1e-18 * std::max(1.0, std::abs(series))) break;
    }
    r.value = pre * (r.value - series);
    r.error_estimate *= pre;
    return r;
}

double a200_closed_form(double D) {
    const double s = std::sqrt(D * D - 1.0);
    return 2.0 * kPi / s * (D - s);
}

double b20_closed_form(double D) { return 4.0 * kPi * D / std::sqrt(D * D - 1.0); }

IntegralResult first_order_integral(double D, const QuadratureSpec& spec) {
    QuadratureSpec s = spec;
    s.decay_order = 3;
    return integrate_half_space(
        [&](const Vec& y) {
            const double t = y[1] + D;
            const double den = y[0] * y[0] + t * t - 1.0;
            return y[1] / (den * den);
        },
        2, s);
}

ConstantsTable constants_table(int n, double D, int max_order, const QuadratureSpec& spec) {
    require_order_dimension(n);
    if (!(D > 1.0) || !std::isfinite(D)) throw Error(ErrorCode::InvalidArgument, "D must be > 1");
    if (max_order < 1 || max_order > kMaxSupportedOrder)
        throw Error(ErrorCode::UnsupportedOrder, "max_order must be in [1, " + std::to_string(kMaxSupportedOrder) + "]");
    ConstantsTable t;
    t.n = n;
    t.D = D;
    t.max_order = max_order;
    using M = ConstantMethod;
    auto closed = [&](const std::string& s, std::vector<int> idx, double v, M m = M::ClosedForm) {
        t.add({s, std::move(idx), v, 0.0, m});
    };
    auto quad = [&](const std::string& s, std::vector<int> idx, const IntegralResult& r) {
        t.add({s, std::move(idx), r.value, r.error_estimate, M::Quadrature});
    };

    closed("Lambda", {n}, big_lambda(n));
    closed("alpha", {n}, small_alpha(n));
    closed("beta", {n}, small_beta(n));
    closed("e", {n}, const_e(n, D));

    const int jmax = std::min(n - 1, max_order);
    for (int j = 0; j <= jmax; ++j)
        for (int i = 0; 2 * i <= j; ++i) quad("a", {n, i, j}, a_quadrature(n, i, j, D, spec));
    for (int j = 0; 2 * j < n - 1 && 2 * j <= max_order; ++j) quad("b", {n, j}, b_quadrature(n, j, D, spec));
    for (int m = n; 2 * m - n + 1 <= max_order; ++m) {
        if (n % 2 == 0 && m % 2 == 0 && 2 * m - n + 2 <= max_order) quad("c", {n, m}, c_quadrature(n, m, D, spec));
        for (int i = 0; 2 * i <= m - n; ++i) closed("C", {n, m, i}, comb_C(n, m, i, D), M::ExactCombinatorial);
        if ((n + m) % 2 == 1) closed("D", {n, m}, comb_D(n, m, D), M::ExactCombinatorial);
    }
    for (int k = 0; k <= max_order; ++k) closed("d", {n, k}, const_d(n, k));
    const int amax = std::max(n - 1, (max_order + n) / 2 + 1);
    for (int j = 0; j <= amax; ++j)
        for (int i = 0; 2 * i <= j; ++i) closed("A", {n, i, j}, comb_A(n, i, j), M::ExactCombinatorial);
    for (int j = 0; j <= amax / 2 + 1; ++j) closed("B", {n, j}, comb_B(n, j), M::ExactCombinatorial);
    return t;
}

double psi(const Vec& xi, const EnergyInput& in, const ConstantsTable& tab) {
    validate(in);
    require_on_sphere(xi, in.n);
    if (tab.n != in.n || tab.D != in.D) throw Error(ErrorCode::InvalidArgument, "constants table does not match input");
    return tab.a_big() * in.K(xi) - tab.b_big() * in.H.ambient(xi);
}

double psi_theorem_2d(const Vec& xi, const EnergyInput& in) {
    validate(in);
    if (in.n != 2) throw Error(ErrorCode::DimensionMismatch, "two-dimensional normalization");
    require_on_sphere(xi, 2);
    const double s = std::sqrt(in.D * in.D - 1.0);
    return 2.0 * kPi / s * ((in.D - s) * in.K(xi) - 2.0 * in.D * in.H.ambient(xi));
}

namespace {

Assembly phi1_assembly(const Vec& xi, const EnergyInput& in) {
    Assembly a;
    if (in.n == 2) {
        const double s = std::sqrt(in.D * in.D - 1.0);
        a.add((in.D - s) * normal_derivative(in.K, xi, 1));
        a.add(-2.0 * in.D * half_laplacian_circle(in.H, xi));
    } else {
        a.add(normal_derivative(in.K, xi, 1));
    }
    return a;
}

}  // namespace

double phi_1(const Vec& xi, const EnergyInput& in, const ConstantsTable& tab) {
    validate(in);
    require_on_sphere(xi, in.n);
    if (tab.n != in.n) throw Error(ErrorCode::InvalidArgument, "constants table does not match input");
    return phi1_assembly(xi, in).sum;
}

std::pair<int, bool> phi_slot(int n, int q) {
    require_dimension(n);
    if (q < 1) throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
    if (q <= n - 2) return {q, false};
    const int t = q - (n - 1);
    return {n - 1 + t / 2, t % 2 == 0};
}

IntegralResult nonlocal_I(const Vec& xi, int m, int i, const EnergyInput& in, const QuadratureSpec& spec) {
    validate(in);
    const int n = in.n;
    require_on_sphere(xi, n);
    if (i < 0 || m - n - 2 * i < 0) throw Error(ErrorCode::InvalidArgument, "I_{n,m,i} needs 0 <= 2i <= m - n");
    const PolyField rem = taylor_remainder(in.K, xi, m);
    if (rem.is_zero()) return {};
    const double pre = std::pow(big_lambda(n), n / 2.0);
    return integrate_regularized(
        [&](const Vec&, const Vec& h) {
            const double h2 = dot(h, h);
            const double one_minus = -(2.0 * dot(xi, h) + h2);
            double plus2 = 0;
            for (int k = 0; k < n; ++k) plus2 += (2.0 * xi[k] + h[k]) * (2.0 * xi[k] + h[k]);
            return pre * rem(h) * std::pow(plus2, i) * std::pow(one_minus, m - n - 2 * i) / std::pow(h2, m);
        },
        RegDomain::Ball, xi, spec);
}

IntegralResult nonlocal_J(const Vec& xi, int m, const EnergyInput& in, const QuadratureSpec& spec) {
    validate(in);
    const int n = in.n;
    require_on_sphere(xi, n);
    if (m < n - 1) throw Error(ErrorCode::InvalidArgument, "J_{n,m} needs m >= n - 1");
    const PolyField rem = taylor_remainder(in.H.ambient, xi, m - 1);
    if (rem.is_zero()) return {};
    const double pre = std::pow(big_lambda(n), (n - 1) / 2.0) * small_beta(n) * in.D;
    return integrate_regularized(
        [&](const Vec&, const Vec& h) {
            const double h2 = dot(h, h);
            double plus2 = 0;
            for (int k = 0; k < n; ++k) plus2 += (2.0 * xi[k] + h[k]) * (2.0 * xi[k] + h[k]);
            return pre * rem(h) * std::pow(plus2, (m - n + 1) / 2.0) / std::pow(h2, (n + m - 1) / 2.0);
        },
        RegDomain::Sphere, xi, spec);
}

PhiValue phi_literal(const Vec& xi, int q, const EnergyInput& in, const ConstantsTable& tab,
                     const QuadratureSpec& spec) {
    validate(in);
    const int n = in.n;
    require_on_sphere(xi, n);
    if (tab.n != n || tab.D != in.D) throw Error(ErrorCode::InvalidArgument, "constants table does not match input");
    if (q < 1 || q > tab.max_order || q > kMaxSupportedOrder)
        throw Error(ErrorCode::UnsupportedOrder, "order " + std::to_string(q) + " exceeds the configured cap " +
                                                     std::to_string(std::min(tab.max_order, kMaxSupportedOrder)));
    const PolyField& K = in.K;
    const PolyField& H = in.H.ambient;
    const double D = in.D;
    const double w = 1.0 + xi[n - 1];
    Assembly a;
    double factor = 1.0;

    if (q <= n - 2) {
        const int j = q;
        factor = std::pow(w, j);
        const double sign = j % 2 == 0 ? -1.0 : 1.0;
        for (int i = 0; 2 * i <= j; ++i)
            a.add(sign * tab.value("a", {n, i, j}) * comb_A(n, i, j) * nu_tau(K, xi, j - 2 * i, i));
        if (j % 2 == 0) a.add(tab.value("b", {n, j / 2}) * comb_B(n, j / 2) * lap_at(H, xi, j / 2));
    } else if (q == n - 1) {
        factor = std::pow(w, n - 1);
        if (n % 2 == 1)
            a.add(tab.value("e", {n}) * comb_B(n, (n - 1) / 2) * lap_at(H, xi, (n - 1) / 2));
    } else if (q == n) {
        factor = std::pow(w, n - 1);
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        for (int i = 0; 2 * i <= n - 1; ++i)
            a.add(sign * tab.value("a", {n, i, n - 1}) * comb_A(n, i, n - 1) * nu_tau(K, xi, n - 1 - 2 * i, i));
        a.add(nonlocal_J(xi, n - 1, in, spec).value);
    } else if ((q + n) % 2 == 1) {
        const int m = (q + n - 1) / 2;
        factor = std::pow(w, m);
        for (int i = 0; 2 * i <= m - n; ++i) {
            const double sign = (m - n - i - 1) % 2 == 0 ? 1.0 : -1.0;
            for (int j = 0; 2 * j <= m; ++j)
                a.add(sign * comb_A(n, j, m) * comb_C(n, m, i, D) * const_d(n, 2 * m - n - 2 * i - 2 * j) *
                      nu_tau(K, xi, m - 2 * j, j));
        }
        if (n % 2 == 1 && m % 2 == 0) {
            const double sign = ((m - n + 1) / 2) % 2 == 0 ? 1.0 : -1.0;
            a.add(sign * tab.value("e", {n}) * comb_B(n, m / 2) * comb_D(n, m, D) * lap_at(H, xi, m / 2));
        }
    } else {
        const int m = (q + n - 2) / 2;
        factor = std::pow(w, m);
        for (int i = 0; 2 * i <= m - n; ++i) {
            const double sign = (m - n - i - 1) % 2 == 0 ? 1.0 : -1.0;
            a.add(sign * comb_C(n, m, i, D) * nonlocal_I(xi, m, i, in, spec).value);
        }
        if (n % 2 == 0 && m % 2 == 0) {
            a.add(tab.value("c", {n, m}) * comb_B(n, m / 2) * lap_at(H, xi, m / 2));
        } else if (n % 2 == 1 && m % 2 == 1) {
            // no boundary term
        } else {
            const double sign = ((m - n + 1) / 2) % 2 == 0 ? 1.0 : -1.0;
            a.add(sign * comb_D(n, m, D) * nonlocal_J(xi, m, in, spec).value);
        }
    }
    const auto [power, log_flag] = phi_slot(n, q);
    return {q, factor * a.sum, log_flag, power, std::abs(factor) * a.scale};
}

PhiValue phi_m(const Vec& xi, int m, const EnergyInput& in, const ConstantsTable& tab, const QuadratureSpec& spec) {
    if (m == 1 && in.n == 2) {
        validate(in);
        require_on_sphere(xi, 2);
        if (tab.max_order < 1) throw Error(ErrorCode::UnsupportedOrder, "order 1 exceeds the configured cap");
        const Assembly a = phi1_assembly(xi, in);
        return {1, a.sum, false, 1, a.scale};
    }
    return phi_literal(xi, m, in, tab, spec);
}

PhiTable phi_table(const Vec& xi, const EnergyInput& in, const ConstantsTable& tab, const QuadratureSpec& spec,
                   int max_order) {
    PhiTable t;
    t.xi = xi;
    t.psi = psi(xi, in, tab);
    for (int m = 1; m <= max_order; ++m) {
        PhiTableEntry e;
        try {
            e.phi = phi_m(xi, m, in, tab, spec);
        } catch (const Error& err) {
            if (err.code() != ErrorCode::SingularityDetected) throw;
            e.available = false;
            e.phi.order = m;
            std::tie(e.phi.power, e.phi.log_flag) = phi_slot(in.n, m);
            e.note = err.what();
        }
        t.phi.push_back(e);
    }
    return t;
}

double predicted_lambda_coefficient(const Vec& xi, const EnergyInput& in, const ConstantsTable& tab) {
    const double w = 1.0 + xi[in.n - 1];
    if (in.n == 2) return -2.0 * kPi * w * phi_1(xi, in, tab);
    return -tab.value("a", {in.n, 0, 1}) * w * normal_derivative(in.K, xi, 1);
}

Vec center_for(const Vec& xi) {
    const int n = static_cast<int>(xi.size());
    const HalfSpacePoint p = inversion_inverse(xi, n);
    return Vec(p.begin(), p.begin() + (n - 1));
}

ExpansionReport expansion_validate(const Vec& xi, const EnergyInput& in, const ConstantsTable& tab,
                                   const std::vector<double>& lambdas, const QuadratureSpec& spec,
                                   const ExpansionOptions& opt) {
    validate(in);
    require_on_sphere(xi, in.n);
    if (lambdas.size() < 3) throw Error(ErrorCode::InvalidArgument, "need at least three lambda values");
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas[k] > 0)) throw Error(ErrorCode::InvalidArgument, "lambda values must be positive");
        if (k > 0 && !(lambdas[k] < lambdas[k - 1]))
            throw Error(ErrorCode::InvalidArgument, "lambda values must be strictly decreasing");
    }
    ExpansionReport r;
    r.xi = xi;
    r.psi = psi(xi, in, tab);
    r.lambdas = lambdas;
    r.predicted_lambda = predicted_lambda_coefficient(xi, in, tab);
    const PhiTable pt = phi_table(xi, in, tab, spec, std::min(opt.max_order, tab.max_order));
    r.predicted = pt.phi;

    const Vec x0 = center_for(xi);
    for (double lam : lambdas) {
        const BubbleParams b = make_bubble(in.n, in.D, x0, lam);
        const IntegralResult g = gamma_deviation(b, in, xi, spec);
        r.deviations.push_back(g.value);
        r.errors.push_back(g.error_estimate);
        r.remainders.push_back(g.value - r.predicted_lambda * lam);
    }

    // Least squares of deviation / lambda on {1, lambda log(1/lambda), lambda}.
    const int rows = static_cast<int>(lambdas.size());
    Eigen::MatrixXd A(rows, 3);
    Eigen::VectorXd y(rows);
    for (int k = 0; k < rows; ++k) {
        const double l = lambdas[k];
        A(k, 0) = 1.0;
        A(k, 1) = l * std::log(1.0 / l);
        A(k, 2) = l;
        y(k) = r.deviations[k] / l;
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    r.fitted_lambda = c(0);
    r.fitted_lambda2_log = c(1);
    r.fitted_lambda2 = c(2);
    const double denom = std::abs(r.predicted_lambda);
    r.relative_error = denom > 0 ? std::abs(r.fitted_lambda - r.predicted_lambda) / denom
                                 : std::abs(r.fitted_lambda - r.predicted_lambda);

    double floor = 1e-11;
    for (double e : r.errors) floor = std::max(floor, 10.0 * e);
    bool all_small = true;
    for (double v : r.remainders) all_small = all_small && std::abs(v) <= floor;
    r.flat = all_small;
    if (!r.flat) {
        for (int k = 0; k + 1 < rows; ++k) {
            const double a0 = std::abs(r.remainders[k]), a1 = std::abs(r.remainders[k + 1]);
            if (a0 <= floor || a1 <= floor) continue;
            r.slopes.push_back(std::log(a1 / a0) / std::log(lambdas[k + 1] / lambdas[k]));
        }
        if (!r.slopes.empty()) {
            std::vector<double> s = r.slopes;
            std::sort(s.begin(), s.end());
            r.order = s[s.size() / 2];
            const double spread = (s.back() - s.front()) / std::max(1e-12, std::abs(r.order));
            r.unstable = spread > opt.slope_spread;
        }
        if (r.unstable && opt.throw_on_unstable)
            throw Error(ErrorCode::FitUnstable, "remainder slopes vary by more than " +
                                                    std::to_string(static_cast<int>(opt.slope_spread * 100)) + "%");
    }
    return r;
}

}  // namespace pcurv
