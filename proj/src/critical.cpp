#include "pcurv/critical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pcurv/bubbles.hpp"
#include "pcurv/errors.hpp"

namespace pcurv {

namespace {

double coefficient_scale(const PolyField& f) {
    double s = 0;
    for (const auto& [a, c] : f.terms()) s = std::max(s, std::abs(c));
    return s;
}

struct PsiCalculus {
    int n;
    PolyField f;
    std::vector<PolyField> grad;
    std::vector<std::vector<PolyField>> hess;

    explicit PsiCalculus(const PolyField& p) : n(p.dim()), f(p) {
        for (int i = 0; i < n; ++i) grad.push_back(gradient_component(f, i));
        hess.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) hess[i].push_back(gradient_component(grad[i], j));
    }

    Vec gradient(const Vec& x) const {
        Vec g(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) g[i] = grad[i](x);
        return g;
    }

    // Tangential gradient coordinates and Riemannian Hessian in the basis tb.
    void tangent_system(const Vec& x, const std::vector<Vec>& tb, Eigen::VectorXd& rhs, Eigen::MatrixXd& T) const {
        const Vec g = gradient(x);
        const double radial = dot(x, g);
        const int k = n - 1;
        std::vector<double> H(static_cast<std::size_t>(n * n));
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) H[i * n + j] = H[j * n + i] = hess[i][j](x);
        rhs.resize(k);
        T.resize(k, k);
        for (int a = 0; a < k; ++a) {
            rhs(a) = dot(tb[a], g);
            for (int b = 0; b < k; ++b) {
                double s = 0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) s += tb[a][i] * H[i * n + j] * tb[b][j];
                T(a, b) = s - (a == b ? radial : 0.0);
            }
        }
    }
};

Vec normalized(Vec v) {
    const double r = norm(v);
    for (double& c : v) c /= r;
    return v;
}

double distance(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

PolyField psi_polynomial(const EnergyInput& in, const ConstantsTable& tab) {
    validate(in);
    if (tab.n != in.n || tab.D != in.D) throw Error(ErrorCode::InvalidArgument, "constants table does not match input");
    PolyField p = tab.a_big() * in.K;
    p -= tab.b_big() * in.H.ambient;
    return p;
}

CriticalSearch find_critical_points(const EnergyInput& in, const ConstantsTable& tab, const SearchOptions& opt) {
    const PolyField f = psi_polynomial(in, tab);
    const int n = in.n;
    const int count = opt.seeds > 0 ? opt.seeds : (n == 2 ? 4096 : 8192);
    const std::vector<Vec> seeds = sphere_points(n, count);
    CriticalSearch out;
    out.scale = coefficient_scale(f);
    out.euler_expected = 1 - (n % 2 == 0 ? 1 : -1);

    double lo = 0, hi = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const double v = f.is_zero() ? 0.0 : f(seeds[s]);
        if (s == 0 || v < lo) lo = v;
        if (s == 0 || v > hi) hi = v;
    }
    if (hi - lo <= 1e-12 * std::max(1.0, std::max(std::abs(hi), std::abs(lo))))
        throw Error(ErrorCode::ConstantPsi, "psi is constant on the sphere");

    const PsiCalculus calc(f);
    const double spacing = std::pow(sphere_area(n - 1) / count, 1.0 / (n - 1));
    const double tol = opt.newton_tol * std::max(1.0, out.scale);
    Eigen::VectorXd rhs;
    Eigen::MatrixXd T;

    for (const Vec& seed : seeds) {
        Vec x = seed;
        bool converged = false, stalled = false;
        int extra = 0;
        for (int it = 0; it < opt.max_iterations; ++it) {
            const std::vector<Vec> tb = tangent_basis(x);
            calc.tangent_system(x, tb, rhs, T);
            if (rhs.norm() < tol) {
                converged = true;
                // A couple of extra steps settle the position to round-off.
                if (++extra > 2) break;
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            const Eigen::VectorXd& ev = es.eigenvalues();
            const double big = ev.cwiseAbs().maxCoeff();
            Eigen::VectorXd c = Eigen::VectorXd::Zero(n - 1);
            for (int k = 0; k < n - 1; ++k) {
                if (std::abs(ev(k)) <= 1e-14 * big) continue;
                c -= es.eigenvectors().col(k) * (es.eigenvectors().col(k).dot(rhs) / ev(k));
            }
            Vec y = x;
            for (int k = 0; k < n - 1; ++k)
                for (int i = 0; i < n; ++i) y[i] += c(k) * tb[k][i];
            x = normalized(y);
            if (distance(x, seed) > 2.0 * spacing) {
                stalled = true;
                break;
            }
        }
        if (stalled || !converged) {
            ++out.stalled_seeds;
            continue;
        }
        bool dup = false;
        for (const CriticalPoint& p : out.points)
            if (distance(p.xi, x) < opt.dedup_tol) {
                dup = true;
                break;
            }
        if (dup) continue;
        CriticalPoint cp;
        cp.xi = x;
        cp.value = f(x);
        const std::vector<Vec> tb = tangent_basis(x);
        calc.tangent_system(x, tb, rhs, T);
        cp.grad_norm = rhs.norm();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        cp.hessian_det = 1.0;
        cp.morse_index = 0;
        for (int k = 0; k < n - 1; ++k) {
            cp.hessian_det *= es.eigenvalues()(k);
            if (es.eigenvalues()(k) < 0) ++cp.morse_index;
        }
        cp.morse = std::abs(cp.hessian_det) >= 1e-8 * std::pow(out.scale, n - 1);
        if (!cp.morse) cp.note = "NonMorse: degenerate tangential Hessian";
        out.points.push_back(cp);
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.xi < b.xi; });
    for (const CriticalPoint& p : out.points) {
        out.euler_sum += p.morse_index % 2 == 0 ? 1 : -1;
        out.all_morse = out.all_morse && p.morse;
    }
    return out;
}

CriticalPoint phi_cascade(const CriticalPoint& cp, const EnergyInput& in, const ConstantsTable& tab,
                          const QuadratureSpec& spec, int max_order) {
    CriticalPoint out = cp;
    out.first_phi.reset();
    out.cascade.clear();
    const double data_scale = std::max(coefficient_scale(in.K), coefficient_scale(in.H.ambient));
    for (int m = 1; m <= max_order; ++m) {
        PhiTableEntry e;
        try {
            if (m == 1) {
                const double v = phi_1(cp.xi, in, tab);
                e.phi = {1, v, false, 1, std::abs(v)};
            } else {
                e.phi = phi_m(cp.xi, m, in, tab, spec);
            }
        } catch (const Error& err) {
            if (err.code() != ErrorCode::SingularityDetected) throw;
            e.available = false;
            e.phi.order = m;
            e.note = err.what();
            out.cascade.push_back(e);
            out.note = "cascade stopped at order " + std::to_string(m) + ": " + err.what();
            return out;
        }
        out.cascade.push_back(e);
        if (std::abs(e.phi.value) > 1e-8 * std::max(e.phi.scale, data_scale)) {
            out.first_phi = e.phi;
            return out;
        }
    }
    out.note = "all Phi_m vanish up to order " + std::to_string(max_order);
    return out;
}

DegreeResult punticrit_degree(const std::vector<IndexSign>& points, int n) {
    require_dimension(n);
    DegreeResult r;
    for (const IndexSign& p : points) {
        if (p.index < 0 || p.index > n - 1) throw Error(ErrorCode::InvalidArgument, "Morse index out of range");
        if (p.f1_sign != 1 && p.f1_sign != -1) throw Error(ErrorCode::InvalidArgument, "f1 sign must be +1 or -1");
        const int s = p.index % 2 == 0 ? 1 : -1;
        if (p.f1_sign > 0) r.positive_sum += s;
        else r.negative_sum += s;
    }
    r.chi_sphere = r.positive_sum + r.negative_sum;
    const int chi_boundary = 1 - (n % 2 == 0 ? 1 : -1);
    if (r.chi_sphere != chi_boundary)
        throw Error(ErrorCode::InconsistentInput, "sum of (-1)^index is " + std::to_string(r.chi_sphere) +
                                                      ", Euler characteristic of S^{n-1} is " +
                                                      std::to_string(chi_boundary));
    r.interior_degree_sum = 1 - r.positive_sum;
    r.chi_double = 2 * r.interior_degree_sum + r.positive_sum - r.negative_sum;
    r.consistent = r.chi_double == 1 + (n % 2 == 0 ? 1 : -1);
    r.interior_forced = r.interior_degree_sum != 0;
    return r;
}

const char* verdict_name(Verdict v) { return v == Verdict::Exists ? "exists" : "inconclusive"; }

Certificate certificate(const EnergyInput& in, const ConstantsTable& tab, const QuadratureSpec& spec, int max_order,
                        const SearchOptions& opt) {
    validate(in);
    Certificate c;
    c.n = in.n;
    c.D = in.D;
    if (in.n == 2) c.alpha_d = alpha_D(in.D);

    CriticalSearch s;
    try {
        s = find_critical_points(in, tab, opt);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ConstantPsi) throw;
        c.notes.push_back(std::string(e.what()) + "; every point is critical and all Phi_m vanish");
        return c;
    }
    if (s.stalled_seeds > 0) c.notes.push_back("NewtonStall: " + std::to_string(s.stalled_seeds) + " seeds exceeded the move bound (non-fatal)");
    c.morse = s.all_morse;
    if (s.euler_sum != s.euler_expected) {
        c.points = s.points;
        c.notes.push_back("InconsistentInput: sum of (-1)^index over found points is " + std::to_string(s.euler_sum) +
                          ", expected " + std::to_string(s.euler_expected));
        return c;
    }
    for (CriticalPoint& p : s.points) p = phi_cascade(p, in, tab, spec, max_order);
    c.points = s.points;

    double vmax = c.points.front().value, vmin = vmax;
    for (const CriticalPoint& p : c.points) {
        vmax = std::max(vmax, p.value);
        vmin = std::min(vmin, p.value);
    }
    const double band = 1e-9 * (vmax - vmin);
    c.case1 = c.case2 = true;
    bool all_phi = true;
    for (const CriticalPoint& p : c.points) {
        const bool has = p.first_phi.has_value();
        all_phi = all_phi && has;
        if (p.value >= vmax - band) c.case1 = c.case1 && has && p.first_phi->value < 0;
        if (p.value <= vmin + band) c.case2 = c.case2 && has && p.first_phi->value > 0;
    }
    if (!c.morse) c.notes.push_back("NonMorse: case (3) skipped");
    if (!all_phi) c.notes.push_back("some critical point has no nonvanishing Phi_m up to the order cap");
    if (c.morse && all_phi) {
        std::vector<IndexSign> is;
        for (const CriticalPoint& p : c.points) {
            const int sign = p.first_phi->value < 0 ? -1 : 1;
            c.degree_sum += sign < 0 ? (p.morse_index % 2 == 0 ? 1 : -1) : 0;
            is.push_back({p.morse_index, -sign});
        }
        c.notes.push_back("sign bridge: f1 = -Phi_m, so {Phi_m < 0} = {f1 > 0}");
        c.degree = punticrit_degree(is, in.n);
        c.case3 = c.degree_sum != 1;
    }
    if (c.case1) c.case_applied = 1;
    else if (c.case2) c.case_applied = 2;
    else if (c.case3) c.case_applied = 3;
    c.verdict = c.case_applied ? Verdict::Exists : Verdict::Inconclusive;
    return c;
}

}  // namespace pcurv
