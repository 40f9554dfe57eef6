#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pcurv/critical.hpp"
#include "pcurv/errors.hpp"
#include "pcurv/energy.hpp"
#include "pcurv/expansion.hpp"
#include "pcurv/fields.hpp"
#include "pcurv/quadrature.hpp"

namespace pcurv {

using nlohmann::json;

struct GridConfig {
    std::vector<double> lambdas;
    std::vector<Vec> x0;
    std::vector<Vec> xi;
    std::vector<double> R;
    int sphere_seeds = 0;
};

// eps is carried for bookkeeping only; no computation reads it.
struct RunConfig {
    int n = 2;
    double D = 2.0;
    double eps = 0.0;
    PolyField K{2};
    PolyField H{2};
    int max_order = kDefaultMaxOrder;
    QuadratureSpec quadrature;
    GridConfig grids;
    std::string output;

    EnergyInput input() const;
};

// Schema validation; every violation throws ConfigError.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);

PolyField poly_from_json(const json& j);
json poly_to_json(const PolyField& f);

json to_json(const ConstantsTable& t);
json to_json(const PhiValue& v);
json to_json(const CriticalPoint& p);
json to_json(const Certificate& c);
json to_json(const ExpansionReport& r);

// Subcommand payloads.
json run_constants(const RunConfig& cfg);
std::string run_gamma_scan(const RunConfig& cfg);
json run_expansion_check(const RunConfig& cfg);
json run_certificate(const RunConfig& cfg, Certificate* out = nullptr);

// 0 ok, 2 config, 3 inconclusive, 4 degenerate parameter, 5 numerical failure.
int exit_code_for(ErrorCode code);

}  // namespace pcurv
