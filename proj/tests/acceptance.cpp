#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pcurv/bubbles.hpp"
#include "pcurv/critical.hpp"
#include "pcurv/energy.hpp"
#include "pcurv/errors.hpp"
#include "pcurv/expansion.hpp"

using namespace pcurv;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

QuadratureSpec spec(double rel) {
    QuadratureSpec s;
    s.rel_tol = rel;
    s.abs_tol = 1e-14;
    return s;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Runs one check, enforces its time budget and prints a single PASS/FAIL line.
bool run(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.pass && dt < budget_s;
    std::printf("%s %2d %s: %s; %.1fs (budget %.0fs)\n", ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt, budget_s);
    std::fflush(stdout);
    return ok;
}

const std::vector<double> kD{1.2, 2.0, 5.0};

Outcome closed_form_constants() {
    double worst = 0;
    for (double D : kD) {
        const double a = a_quadrature(2, 0, 0, D, spec(1e-12)).value;
        const double b = b_quadrature(2, 0, D, spec(1e-12)).value;
        const double s = std::sqrt(D * D - 1);
        worst = std::max(worst, std::abs(a / (2 * M_PI / s * (D - s)) - 1));
        worst = std::max(worst, std::abs(b / (4 * M_PI * D / s) - 1));
    }
    return {worst < 1e-8, fmt("max rel err %.2e", worst)};
}

Outcome first_order_integral_check() {
    double worst = 0;
    std::string vals;
    for (double D : kD) {
        const double v = first_order_integral(D, spec(1e-12)).value;
        const double target = M_PI / 2 * (std::sqrt(D * D - 1) - D);
        worst = std::max(worst, std::abs(v - target));
        vals += fmt(", %.6f", v) + fmt(" vs %.6f", target);
    }
    return {worst < 1e-8, fmt("max abs err %.2e", worst) + vals};
}

Outcome gauss_bonnet() {
    double w1 = 0, w2 = 0;
    for (double x : {-1.0, 0.0, 1.0})
        for (double l : {0.5, 1.0, 2.0}) {
            const auto [len, diff] = gauss_bonnet_identities(make_bubble(2, 2.0, {x}, l), spec(1e-12));
            w1 = std::max(w1, std::abs(len - 2 * M_PI));
            w2 = std::max(w2, std::abs(diff - 2 * M_PI));
        }
    return {w1 < 1e-8 && w2 < 1e-8, fmt("D=2, max |len - 2pi| %.2e", w1) + fmt(", max |D len - area - 2pi| %.2e", w2)};
}

Outcome bubble_residuals() {
    double worst = 0;
    for (int n = 2; n <= 3; ++n) {
        const ResidualSamples s = default_residual_samples(n);
        const std::vector<std::pair<double, double>> params{{0.0, 1.0}, {0.7, 0.4}, {-1.5, 2.5}};
        for (std::size_t k = 0; k < params.size(); ++k) {
            const BubbleParams b = make_bubble(n, 1.5 + 0.5 * k, Vec(n - 1, params[k].first), params[k].second);
            const Residuals r = residual_unperturbed(b, s);
            worst = std::max({worst, r.interior, r.boundary});
        }
    }
    return {worst < 1e-9, fmt("max residual %.2e", worst)};
}

Outcome energy_constancy() {
    std::vector<GridPoint> g2, g3;
    for (double x : {-1.0, 0.0, 1.0})
        for (double l : {0.5, 1.0, 2.0}) {
            g2.push_back({{x}, l});
            g3.push_back({{x, -0.5 * x}, l});
        }
    const double d2 = energy_constancy_check(make_input(2, 2.0, PolyField(2), PolyField(2)), g2, spec(1e-10)).max_rel_deviation;
    const double d3 = energy_constancy_check(make_input(3, 1.5, PolyField(3), PolyField(3)), g3, spec(1e-9)).max_rel_deviation;
    return {d2 < 1e-6 && d3 < 1e-6, fmt("n=2 rel dev %.2e", d2) + fmt(", n=3 rel dev %.2e", d3)};
}

Outcome expansion_first_order() {
    struct Case {
        int n;
        double D;
        PolyField K, H;
        Vec xi;
    };
    const std::vector<Case> cases{
        {2, 2.0, PolyField::coordinate(2, 1), PolyField(2), {0.0, 1.0}},
        {2, 1.5, PolyField::coordinate(2, 0) + PolyField::monomial(2, {1, 1}, 0.5), PolyField::coordinate(2, 0, 0.7),
         {0.6, 0.8}},
        {3, 1.5, PolyField::coordinate(3, 2), PolyField(3), {0.0, 0.0, 1.0}},
        {3, 1.5, PolyField::coordinate(3, 2) + PolyField::monomial(3, {1, 1, 0}), PolyField::coordinate(3, 2, 0.3),
         {0.0, 0.6, 0.8}},
    };
    double worst = 0;
    std::string detail;
    for (const Case& c : cases) {
        const int steps = c.n == 2 ? 8 : 4;
        std::vector<double> l;
        for (int k = 0; k <= steps; ++k) l.push_back(1e-2 * std::pow(10.0, -static_cast<double>(k) / steps));
        const QuadratureSpec s = spec(c.n == 2 ? 1e-11 : 1e-9);
        const ConstantsTable t = constants_table(c.n, c.D, 1, s);
        ExpansionOptions opt;
        opt.max_order = 1;
        opt.throw_on_unstable = false;
        const ExpansionReport r = expansion_validate(c.xi, make_input(c.n, c.D, c.K, c.H), t, l, s, opt);
        worst = std::max(worst, r.relative_error);
        detail += fmt(", n=%.0f", c.n) + fmt(" fit %.5f", r.fitted_lambda) + fmt(" pred %.5f", r.predicted_lambda);
    }
    return {worst < 0.02, fmt("max rel err %.2e", worst) + detail};
}

Outcome gamma_limit() {
    const EnergyInput in = make_input(2, 2.0, PolyField::constant(2, 1) + PolyField::coordinate(2, 0), PolyField::constant(2, 1));
    const double d1 = gamma_limit_check(in, 250, spec(1e-11));
    const double d2 = gamma_limit_check(in, 500, spec(1e-11));
    const double d3 = gamma_limit_check(in, 1000, spec(1e-11));
    const double r1 = d2 / d1, r2 = d3 / d2;
    const bool ok = r1 >= 0.3 && r1 <= 0.7 && r2 >= 0.3 && r2 <= 0.7;
    return {ok, fmt("deviations %.3e", d1) + fmt(" %.3e", d2) + fmt(" %.3e", d3) + fmt(", ratios %.3f", r1) +
                    fmt(" %.3f", r2)};
}

Outcome kernel_residual_check() {
    std::mt19937 gen(41);
    std::uniform_real_distribution<double> u(-3.0, 3.0), v(0.0, 3.0);
    double worst = 0;
    for (int n = 2; n <= 3; ++n) {
        const BubbleParams b = make_bubble(n, 1.8, Vec(n - 1, 0.25), 0.9);
        for (int k = 0; k < 50; ++k) {
            Vec p(n);
            for (int i = 0; i < n - 1; ++i) p[i] = u(gen);
            p[n - 1] = v(gen);
            const KernelResidual r = kernel_residuals(p, b);
            for (double x : r.interior) worst = std::max(worst, std::abs(x));
            for (double x : r.boundary) worst = std::max(worst, std::abs(x));
        }
    }
    return {worst < 1e-8, fmt("max residual %.2e", worst)};
}

Outcome degree_logic() {
    bool identities = true;
    for (int n = 2; n <= 5; ++n) {
        const int sgn = n % 2 == 0 ? 1 : -1;
        std::vector<std::vector<IndexSign>> data{{{0, 1}, {n - 1, 1}}, {{0, -1}, {n - 1, 1}}, {{0, 1}, {n - 1, -1}}};
        if (n >= 4) data.push_back({{0, 1}, {1, -1}, {2, 1}, {n - 1, -1}});
        for (const auto& d : data) {
            const DegreeResult r = punticrit_degree(d, n);
            identities = identities && r.consistent && r.chi_sphere == 1 - sgn && r.chi_double == 1 + sgn &&
                         r.interior_degree_sum == 1 - r.positive_sum;
        }
    }
    const QuadratureSpec s = spec(1e-9);
    const Certificate c =
        certificate(make_input(2, 2.0, PolyField::coordinate(2, 0), PolyField(2)), constants_table(2, 2.0, 4, s), s, 4);
    const bool exists = c.verdict == Verdict::Exists && c.case_applied && *c.case_applied == 2;
    std::string detail = std::string("Euler identities ") + (identities ? "hold" : "fail") + "; K=x1 certificate " +
                         verdict_name(c.verdict);
    for (const CriticalPoint& p : c.points)
        if (p.first_phi)
            detail += fmt(", index %.0f", p.morse_index) + fmt(" Phi %.4f", p.first_phi->value);
    return {identities && exists, detail};
}

Outcome cross_coordinate() {
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> c(-1.0, 1.0), lam(0.5, 2.0), dd(1.2, 3.0);
    double worst = 0;
    for (int k = 0; k < 5; ++k) {
        const int n = 2 + k % 2;
        PolyField K = PolyField::constant(n, c(gen)), H = PolyField::constant(n, c(gen));
        for (int i = 0; i < n; ++i) {
            K += PolyField::coordinate(n, i, c(gen));
            H += PolyField::coordinate(n, i, c(gen));
        }
        MultiIndex a(n, 0);
        a[0] = 1;
        a[n - 1] = 1;
        K += PolyField::monomial(n, a, c(gen));
        const double D = dd(gen);
        Vec x0(n - 1);
        for (double& x : x0) x = c(gen);
        const BubbleParams b = make_bubble(n, D, x0, lam(gen));
        const EnergyInput in = make_input(n, D, K, H);
        const double hs = gamma(b, in, spec(1e-10)).value;
        const double ball = gamma_ball(b, in, spec(1e-10)).value;
        worst = std::max(worst, std::abs(hs - ball) / std::abs(hs));
    }
    return {worst < 1e-6, fmt("max rel diff %.2e", worst)};
}

}  // namespace

int main() {
    int failed = 0;
    failed += !run(1, "closed-form planar constants", 10, closed_form_constants);
    failed += !run(2, "first-order half-plane integral", 10, first_order_integral_check);
    failed += !run(3, "Gauss-Bonnet pair", 30, gauss_bonnet);
    failed += !run(4, "bubble residuals", 5, bubble_residuals);
    failed += !run(5, "unperturbed energy constancy", 60, energy_constancy);
    failed += !run(6, "first-order expansion fit", 300, expansion_first_order);
    failed += !run(7, "Gamma limit at infinity", 120, gamma_limit);
    failed += !run(8, "linearization kernels", 5, kernel_residual_check);
    failed += !run(9, "degree logic and certificate", 10, degree_logic);
    failed += !run(10, "cross-coordinate Gamma", 120, cross_coordinate);
    std::printf("%d of 10 acceptance checks failed\n", failed);
    return failed == 0 ? 0 : 1;
}
