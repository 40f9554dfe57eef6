#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pcurv/config.hpp"
#include "pcurv/errors.hpp"

using namespace pcurv;

namespace {

json base(int n = 2, double D = 2.0) { return {{"n", n}, {"D", D}}; }

ErrorCode code_of(const json& j) {
    try {
        parse_config(j);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

TEST_CASE("config defaults") {
    const RunConfig c = parse_config(base());
    CHECK(c.n == 2);
    CHECK(c.D == 2.0);
    CHECK(c.eps == 0.0);
    CHECK(c.max_order == kDefaultMaxOrder);
    CHECK(c.K.is_zero());
}

TEST_CASE("config schema violations") {
    CHECK(code_of(base(2, 0.5)) == ErrorCode::ConfigError);
    CHECK(code_of(base(6, 2.0)) == ErrorCode::ConfigError);
    CHECK(code_of({{"n", 2}}) == ErrorCode::ConfigError);
    json j = base();
    j["extra"] = 1;
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base();
    j["K"] = {{"n", 3}, {"terms", json::array()}};
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base();
    j["K"] = {{"n", 2}, {"terms", {{{"alpha", {1, 0}}, {"c", 1.0}}, {{"alpha", {1, 0}}, {"c", 2.0}}}}};
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base();
    j["max_order"] = 9;
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base();
    j["grids"] = {{"xi", {{0.5, 0.5}}}};
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base();
    j["grids"] = {{"x0", {{0.5, 0.5}}}};
    CHECK(code_of(j) == ErrorCode::ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("polynomial JSON round trip") {
    const PolyField f = PolyField::monomial(3, {1, 0, 2}, -0.5) + PolyField::constant(3, 2.0);
    const PolyField g = poly_from_json(poly_to_json(f));
    CHECK(g.terms() == f.terms());
}

TEST_CASE("constants payload") {
    json j = run_constants(parse_config(base()));
    bool found = false;
    for (const json& e : j["constants"])
        if (e["symbol"] == "a" && e["indices"] == json({2, 0, 0})) {
            found = true;
            CHECK(e["value"].get<double>() == doctest::Approx(0.97197).epsilon(1e-4));
            CHECK(e["method"] == "quadrature");
        }
    CHECK(found);
    json j3 = run_constants(parse_config(base(3, 2.0)));
    bool lam = false;
    for (const json& e : j3["constants"])
        if (e["symbol"] == "Lambda") lam = e["value"].get<double>() == 24.0;
    CHECK(lam);
}

TEST_CASE("gamma scan for constant data") {
    json j = base();
    j["K"] = {{"n", 2}, {"terms", {{{"alpha", {0, 0}}, {"c", 1.0}}}}};
    j["H"] = j["K"];
    j["grids"] = {{"lambdas", {0.5, 1.0, 3.0}}, {"x0", {{-1.0}, {2.0}}}, {"R", {400.0}}};
    const std::string csv = run_gamma_scan(parse_config(j));
    const std::vector<std::string> rows = split(csv, '\n');
    REQUIRE(rows.size() == 1 + 6 + 1);
    std::vector<double> g;
    for (std::size_t r = 1; r < rows.size(); ++r) g.push_back(std::stod(split(rows[r], ',')[3]));
    for (double v : g) CHECK(std::abs(v - g[0]) < 1e-7);
    CHECK(rows.back().rfind("limit", 0) == 0);
    CHECK(run_gamma_scan(parse_config(j)) == csv);

    json empty = base();
    CHECK_THROWS_AS(run_gamma_scan(parse_config(empty)), Error);
}

TEST_CASE("gamma scan limit rows reproduce the limit check") {
    json j = base();
    j["K"] = {{"n", 2}, {"terms", {{{"alpha", {0, 0}}, {"c", 1.0}}, {{"alpha", {1, 0}}, {"c", 1.0}}}}};
    j["H"] = {{"n", 2}, {"terms", {{{"alpha", {0, 0}}, {"c", 1.0}}}}};
    j["grids"] = {{"lambdas", {1.0}}, {"x0", {{0.0}}}, {"R", {500.0}}};
    const RunConfig c = parse_config(j);
    const std::vector<std::string> rows = split(run_gamma_scan(c), '\n');
    const double dev = std::stod(split(rows.back(), ',')[7]);
    CHECK(dev == doctest::Approx(gamma_limit_check(c.input(), 500.0, c.quadrature)).epsilon(1e-9));
}

TEST_CASE("expansion payload") {
    json j = base();
    j["K"] = {{"n", 2}, {"terms", {{{"alpha", {0, 1}}, {"c", 1.0}}}}};
    j["max_order"] = 1;
    j["quadrature"] = {{"rel_tol", 1e-11}, {"abs_tol", 1e-14}};
    const json r = run_expansion_check(parse_config(j));
    REQUIRE(r["reports"].size() == 1);
    CHECK(r["reports"][0]["relative_error"].get<double>() < 0.02);
}

TEST_CASE("certificate payload") {
    json j = base();
    j["K"] = {{"n", 2}, {"terms", {{{"alpha", {1, 0}}, {"c", 1.0}}}}};
    Certificate c;
    const json out = run_certificate(parse_config(j), &c);
    CHECK(out["points"].size() == 2);
    CHECK(out["verdict"] == verdict_name(c.verdict));
    CHECK(run_certificate(parse_config(j)).dump() == out.dump());
    j["D"] = 2 / std::sqrt(3.0);
    try {
        run_certificate(parse_config(j));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(exit_code_for(e.code()) == 4);
    }
}

TEST_CASE("exit codes") {
    CHECK(exit_code_for(ErrorCode::ConfigError) == 2);
    CHECK(exit_code_for(ErrorCode::DegenerateD) == 4);
    CHECK(exit_code_for(ErrorCode::ToleranceNotReached) == 5);
    CHECK(exit_code_for(ErrorCode::FitUnstable) == 5);
}
