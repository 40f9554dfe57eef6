#include "pcurv/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "pcurv/errors.hpp"

namespace pcurv {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void allow_keys(const json& j, const std::string& where, const std::set<std::string>& keys) {
    if (!j.is_object()) fail(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) fail("unknown key '" + k + "' in " + where);
}

double get_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) fail(where + "." + key + " is required");
    if (!j.at(key).is_number()) fail(where + "." + key + " must be a number");
    const double v = j.at(key).get<double>();
    if (!std::isfinite(v)) fail(where + "." + key + " must be finite");
    return v;
}

int get_int(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) fail(where + "." + key + " is required");
    if (!j.at(key).is_number_integer()) fail(where + "." + key + " must be an integer");
    return j.at(key).get<int>();
}

Vec get_vector(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where + " must be an array of numbers");
    Vec v;
    for (const auto& e : j) {
        if (!e.is_number()) fail(where + " must be an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

EnergyInput RunConfig::input() const { return make_input(n, D, K, H, eps); }

PolyField poly_from_json(const json& j) {
    allow_keys(j, "polynomial", {"n", "terms", "degree_cap"});
    const int n = get_int(j, "n", "polynomial");
    if (n < 2 || n > 5) fail("polynomial.n must be in [2, 5]");
    const int cap = j.contains("degree_cap") ? get_int(j, "degree_cap", "polynomial") : PolyField::kDefaultDegreeCap;
    if (cap < 0) fail("polynomial.degree_cap must be >= 0");
    PolyField f(n, cap);
    if (!j.contains("terms") || !j.at("terms").is_array()) fail("polynomial.terms must be an array");
    std::set<MultiIndex> seen;
    for (const auto& t : j.at("terms")) {
        allow_keys(t, "polynomial term", {"alpha", "c"});
        if (!t.contains("alpha") || !t.at("alpha").is_array()) fail("term.alpha must be an array");
        MultiIndex a;
        int deg = 0;
        for (const auto& e : t.at("alpha")) {
            if (!e.is_number_integer() || e.get<int>() < 0) fail("term.alpha entries must be non-negative integers");
            a.push_back(e.get<int>());
            deg += a.back();
        }
        if (static_cast<int>(a.size()) != n) fail("term.alpha must have length n");
        if (deg > cap) fail("term degree exceeds degree_cap");
        if (!seen.insert(a).second) fail("duplicate multi-index in polynomial terms");
        f.add_term(a, get_number(t, "c", "term"));
    }
    return f;
}

json poly_to_json(const PolyField& f) {
    json terms = json::array();
    for (const auto& [a, c] : f.terms()) terms.push_back({{"alpha", a}, {"c", c}});
    return {{"n", f.dim()}, {"degree_cap", f.degree_cap()}, {"terms", terms}};
}

RunConfig parse_config(const json& j) {
    allow_keys(j, "config", {"n", "D", "eps", "K", "H", "max_order", "quadrature", "grids", "output"});
    RunConfig c;
    c.n = get_int(j, "n", "config");
    if (c.n < 2 || c.n > 5) fail("n must be in [2, 5]");
    c.D = get_number(j, "D", "config");
    if (!(c.D > 1.0)) fail("D must be > 1");
    c.eps = j.contains("eps") ? get_number(j, "eps", "config") : 0.0;
    c.K = j.contains("K") ? poly_from_json(j.at("K")) : PolyField(c.n);
    c.H = j.contains("H") ? poly_from_json(j.at("H")) : PolyField(c.n);
    if (c.K.dim() != c.n || c.H.dim() != c.n) fail("K and H must have dimension n");
    if (j.contains("max_order")) {
        c.max_order = get_int(j, "max_order", "config");
        if (c.max_order < 1 || c.max_order > kMaxSupportedOrder)
            fail("max_order must be in [1, " + std::to_string(kMaxSupportedOrder) + "]");
    }
    if (j.contains("quadrature")) {
        const json& q = j.at("quadrature");
        allow_keys(q, "quadrature", {"rel_tol", "abs_tol", "max_subdivisions"});
        if (q.contains("rel_tol")) c.quadrature.rel_tol = get_number(q, "rel_tol", "quadrature");
        if (q.contains("abs_tol")) c.quadrature.abs_tol = get_number(q, "abs_tol", "quadrature");
        if (q.contains("max_subdivisions")) c.quadrature.max_subdivisions = get_int(q, "max_subdivisions", "quadrature");
        if (!(c.quadrature.rel_tol > 0)) fail("quadrature.rel_tol must be > 0");
        if (!(c.quadrature.abs_tol >= 0)) fail("quadrature.abs_tol must be >= 0");
        if (c.quadrature.max_subdivisions < 1) fail("quadrature.max_subdivisions must be >= 1");
    }
    if (j.contains("grids")) {
        const json& g = j.at("grids");
        allow_keys(g, "grids", {"lambdas", "x0", "xi", "R", "sphere_seeds"});
        if (g.contains("lambdas")) {
            c.grids.lambdas = get_vector(g.at("lambdas"), "grids.lambdas");
            for (double l : c.grids.lambdas)
                if (!(l > 0)) fail("grids.lambdas must be positive");
        }
        if (g.contains("x0")) {
            if (!g.at("x0").is_array()) fail("grids.x0 must be an array of points");
            for (const auto& p : g.at("x0")) {
                Vec v = get_vector(p, "grids.x0 entry");
                if (static_cast<int>(v.size()) != c.n - 1) fail("grids.x0 entries must have length n-1");
                c.grids.x0.push_back(v);
            }
        }
        if (g.contains("xi")) {
            if (!g.at("xi").is_array()) fail("grids.xi must be an array of points");
            for (const auto& p : g.at("xi")) {
                Vec v = get_vector(p, "grids.xi entry");
                if (static_cast<int>(v.size()) != c.n) fail("grids.xi entries must have length n");
                if (std::abs(norm(v) - 1.0) > kSphereTol) fail("grids.xi entries must lie on the unit sphere");
                c.grids.xi.push_back(v);
            }
        }
        if (g.contains("R")) {
            c.grids.R = get_vector(g.at("R"), "grids.R");
            for (double r : c.grids.R)
                if (!(r > 0)) fail("grids.R must be positive");
        }
        if (g.contains("sphere_seeds")) {
            c.grids.sphere_seeds = get_int(g, "sphere_seeds", "grids");
            if (c.grids.sphere_seeds < 0) fail("grids.sphere_seeds must be >= 0");
        }
    }
    if (j.contains("output")) {
        if (!j.at("output").is_string()) fail("output must be a string");
        c.output = j.at("output").get<std::string>();
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

json to_json(const ConstantsTable& t) {
    json entries = json::array();
    for (const ConstantEntry& e : t.entries())
        entries.push_back({{"symbol", e.symbol},
                           {"indices", e.indices},
                           {"value", e.value},
                           {"error_estimate", e.error_estimate},
                           {"method", method_name(e.method)}});
    return {{"n", t.n}, {"D", t.D}, {"max_order", t.max_order}, {"constants", entries}};
}

json to_json(const PhiValue& v) {
    return {{"order", v.order}, {"value", v.value}, {"log_flag", v.log_flag}, {"power", v.power}, {"scale", v.scale}};
}

json to_json(const CriticalPoint& p) {
    json cascade = json::array();
    for (const PhiTableEntry& e : p.cascade) {
        json c = to_json(e.phi);
        c["available"] = e.available;
        if (!e.note.empty()) c["note"] = e.note;
        cascade.push_back(c);
    }
    json j = {{"xi", p.xi},
              {"psi", p.value},
              {"grad_norm", p.grad_norm},
              {"morse_index", p.morse_index},
              {"hessian_det", p.hessian_det},
              {"morse", p.morse},
              {"cascade", cascade}};
    j["first_phi"] = p.first_phi ? to_json(*p.first_phi) : json(nullptr);
    if (!p.note.empty()) j["note"] = p.note;
    return j;
}

json to_json(const Certificate& c) {
    json pts = json::array();
    for (const CriticalPoint& p : c.points) pts.push_back(to_json(p));
    json j = {{"n", c.n},
              {"D", c.D},
              {"points", pts},
              {"morse", c.morse},
              {"cases", {{"1", c.case1}, {"2", c.case2}, {"3", c.case3}}},
              {"degree_sum", c.degree_sum},
              {"verdict", verdict_name(c.verdict)},
              {"notes", c.notes}};
    j["alpha_D"] = c.alpha_d ? json(*c.alpha_d) : json(nullptr);
    j["case"] = c.case_applied ? json(*c.case_applied) : json(nullptr);
    if (c.degree) {
        const DegreeResult& d = *c.degree;
        j["degree"] = {{"positive_sum", d.positive_sum},         {"negative_sum", d.negative_sum},
                       {"interior_degree_sum", d.interior_degree_sum}, {"chi_sphere", d.chi_sphere},
                       {"chi_double", d.chi_double},             {"consistent", d.consistent},
                       {"interior_forced", d.interior_forced}};
    }
    return j;
}

json to_json(const ExpansionReport& r) {
    json predicted = json::array();
    for (const PhiTableEntry& e : r.predicted) {
        json p = to_json(e.phi);
        p["available"] = e.available;
        if (!e.note.empty()) p["note"] = e.note;
        predicted.push_back(p);
    }
    return {{"xi", r.xi},
            {"psi", r.psi},
            {"lambdas", r.lambdas},
            {"deviations", r.deviations},
            {"error_estimates", r.errors},
            {"remainders", r.remainders},
            {"slopes", r.slopes},
            {"order", r.order},
            {"flat", r.flat},
            {"unstable", r.unstable},
            {"fitted", {{"lambda", r.fitted_lambda}, {"lambda2_log", r.fitted_lambda2_log}, {"lambda2", r.fitted_lambda2}}},
            {"predicted_lambda", r.predicted_lambda},
            {"relative_error", r.relative_error},
            {"phi", predicted}};
}

json run_constants(const RunConfig& cfg) {
    return to_json(constants_table(cfg.n, cfg.D, cfg.max_order, cfg.quadrature));
}

std::string run_gamma_scan(const RunConfig& cfg) {
    if (cfg.grids.lambdas.empty() || cfg.grids.x0.empty())
        fail("gamma-scan needs nonempty grids.lambdas and grids.x0");
    const EnergyInput in = cfg.input();
    const ConstantsTable tab = constants_table(cfg.n, cfg.D, 1, cfg.quadrature);
    Vec south(static_cast<std::size_t>(cfg.n), 0.0);
    south[cfg.n - 1] = -1.0;
    const double psi_s = psi(south, in, tab);

    std::ostringstream os;
    os << "kind";
    for (int i = 1; i < cfg.n; ++i) os << ",x0_" << i;
    os << ",lambda,gamma,error_estimate,converged,psi_south,deviation\r\n";
    auto row = [&](const char* kind, const Vec& x0, double lam) {
        const BubbleParams b = make_bubble(cfg.n, cfg.D, x0, lam);
        const IntegralResult g = gamma(b, in, cfg.quadrature);
        const IntegralResult dev = gamma_deviation(b, in, south, cfg.quadrature);
        os << kind;
        for (double v : x0) os << ',' << fmt(v);
        os << ',' << fmt(lam) << ',' << fmt(g.value) << ',' << fmt(g.error_estimate) << ','
           << (g.converged && dev.converged ? "true" : "false") << ',' << fmt(psi_s) << ',' << fmt(std::abs(dev.value))
           << "\r\n";
    };
    for (const Vec& x0 : cfg.grids.x0)
        for (double lam : cfg.grids.lambdas) row("grid", x0, lam);
    for (double R : cfg.grids.R) {
        Vec x0(static_cast<std::size_t>(cfg.n - 1), 0.0);
        x0[0] = R / 2.0;
        row("limit", x0, R / 2.0);
    }
    return os.str();
}

json run_expansion_check(const RunConfig& cfg) {
    const EnergyInput in = cfg.input();
    const ConstantsTable tab = constants_table(cfg.n, cfg.D, cfg.max_order, cfg.quadrature);
    std::vector<Vec> xis = cfg.grids.xi;
    if (xis.empty()) {
        Vec north(static_cast<std::size_t>(cfg.n), 0.0);
        north[cfg.n - 1] = 1.0;
        xis.push_back(north);
    }
    std::vector<double> lambdas = cfg.grids.lambdas;
    if (lambdas.empty())
        for (int k = 0; k <= 8; ++k) lambdas.push_back(1e-2 * std::pow(10.0, -k / 8.0));
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    ExpansionOptions opt;
    opt.max_order = cfg.max_order;
    json reports = json::array();
    for (const Vec& xi : xis) reports.push_back(to_json(expansion_validate(xi, in, tab, lambdas, cfg.quadrature, opt)));
    return {{"n", cfg.n}, {"D", cfg.D}, {"reports", reports}};
}

json run_certificate(const RunConfig& cfg, Certificate* out) {
    const EnergyInput in = cfg.input();
    if (cfg.n == 2) alpha_D(cfg.D);
    const ConstantsTable tab = constants_table(cfg.n, cfg.D, cfg.max_order, cfg.quadrature);
    SearchOptions opt;
    opt.seeds = cfg.grids.sphere_seeds;
    Certificate c = certificate(in, tab, cfg.quadrature, cfg.max_order, opt);
    if (out) *out = c;
    return to_json(c);
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotOnSphere:
    case ErrorCode::UnsupportedOrder: return 2;
    case ErrorCode::DegenerateD: return 4;
    default: return 5;
    }
}

}  // namespace pcurv
