#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pcurv/energy.hpp"
#include "pcurv/fields.hpp"
#include "pcurv/quadrature.hpp"

namespace pcurv {

constexpr int kDefaultMaxOrder = 4;
constexpr int kMaxSupportedOrder = 6;

enum class ConstantMethod { ClosedForm, Quadrature, ExactCombinatorial };
const char* method_name(ConstantMethod m);

struct ConstantEntry {
    std::string symbol;
    std::vector<int> indices;  // n first, then the remaining indices
    double value = 0;
    double error_estimate = 0;
    ConstantMethod method = ConstantMethod::ClosedForm;
};

class ConstantsTable {
public:
    int n = 2;
    double D = 2.0;
    int max_order = kDefaultMaxOrder;

    void add(const ConstantEntry& e);
    bool has(const std::string& symbol, const std::vector<int>& indices) const;
    // Throws InvalidArgument when the entry was not computed.
    double value(const std::string& symbol, const std::vector<int>& indices) const;
    const ConstantEntry& entry(const std::string& symbol, const std::vector<int>& indices) const;
    const std::vector<ConstantEntry>& entries() const { return entries_; }

    double a_big() const { return value("a", {n, 0, 0}); }
    double b_big() const { return value("b", {n, 0}); }

private:
    std::vector<ConstantEntry> entries_;
    std::map<std::pair<std::string, std::vector<int>>, std::size_t> index_;
};

ConstantsTable constants_table(int n, double D, int max_order, const QuadratureSpec& spec);

// Combinatorial constants; (-1)!! = 1.
double double_factorial(int k);
double factorial(int k);
double comb_A(int n, int i, int j);
double comb_B(int n, int j);
double comb_C(int n, int m, int i, double D);
double comb_D(int n, int m, double D);

// Closed forms and direct quadratures of the individual constants.
double const_d(int n, int j);
double const_e(int n, double D);
double b_closed_form(int n, int j, double D);
IntegralResult b_quadrature(int n, int j, double D, const QuadratureSpec& spec);
// Numerator |ȳ|^{2i} y_n^{j-2i}; finite for j <= n - 1.
IntegralResult a_quadrature(int n, int i, int j, double D, const QuadratureSpec& spec);
IntegralResult c_quadrature(int n, int m, double D, const QuadratureSpec& spec);
double a200_closed_form(double D);
double b20_closed_form(double D);
// int_{R^2_+} y_2 / (|ȳ|^2 + (y_2 + D)^2 - 1)^2, by quadrature.
IntegralResult first_order_integral(double D, const QuadratureSpec& spec);

double psi(const Vec& xi, const EnergyInput& in, const ConstantsTable& tab);
// (2 pi / sqrt(D^2 - 1)) ((D - sqrt(D^2 - 1)) K - 2 D H), n = 2.
double psi_theorem_2d(const Vec& xi, const EnergyInput& in);

// Two-dimensional: (D - sqrt(D^2 - 1)) d_nu K - 2 D (-Delta)^{1/2} H; otherwise d_nu K.
double phi_1(const Vec& xi, const EnergyInput& in, const ConstantsTable& tab);

struct PhiValue {
    int order = 0;
    double value = 0;
    bool log_flag = false;  // multiplies lambda^power log(1/lambda)
    int power = 0;
    double scale = 0;       // largest term magnitude in the assembly
};

// Power of lambda and log flag of the coefficient Phi_q in Gamma - psi.
std::pair<int, bool> phi_slot(int n, int q);

// Phi_q assembled term by term from the constants block; Gamma = psi - sum lambda-slot * Phi_q.
PhiValue phi_literal(const Vec& xi, int q, const EnergyInput& in, const ConstantsTable& tab,
                     const QuadratureSpec& spec);
// phi_literal, except that m = 1 in two dimensions returns phi_1.
PhiValue phi_m(const Vec& xi, int m, const EnergyInput& in, const ConstantsTable& tab, const QuadratureSpec& spec);

// Nonlocal functionals with Taylor-subtracted integrands.
IntegralResult nonlocal_I(const Vec& xi, int m, int i, const EnergyInput& in, const QuadratureSpec& spec);
IntegralResult nonlocal_J(const Vec& xi, int m, const EnergyInput& in, const QuadratureSpec& spec);

struct PhiTableEntry {
    PhiValue phi;
    bool available = true;
    std::string note;
};

struct PhiTable {
    Vec xi;
    double psi = 0;
    std::vector<PhiTableEntry> phi;
};

PhiTable phi_table(const Vec& xi, const EnergyInput& in, const ConstantsTable& tab, const QuadratureSpec& spec,
                   int max_order);

// lambda coefficient of Gamma - psi predicted at xi.
double predicted_lambda_coefficient(const Vec& xi, const EnergyInput& in, const ConstantsTable& tab);

// Bubble center on the boundary hyperplane with I(x0, 0) = xi.
Vec center_for(const Vec& xi);

struct ExpansionReport {
    Vec xi;
    double psi = 0;
    std::vector<double> lambdas;
    std::vector<double> deviations;  // Gamma - psi
    std::vector<double> errors;      // quadrature error estimates
    std::vector<double> remainders;  // deviations minus the predicted lambda term
    std::vector<double> slopes;      // log-log slopes of |remainder|
    double order = 0;
    bool flat = false;
    bool unstable = false;
    double fitted_lambda = 0;         // coefficient of lambda
    double fitted_lambda2_log = 0;    // coefficient of lambda^2 log(1/lambda)
    double fitted_lambda2 = 0;        // coefficient of lambda^2
    double predicted_lambda = 0;
    double relative_error = 0;        // |fitted - predicted| / |predicted|
    std::vector<PhiTableEntry> predicted;
};

struct ExpansionOptions {
    int max_order = kDefaultMaxOrder;
    bool throw_on_unstable = true;
    double slope_spread = 0.2;
};

ExpansionReport expansion_validate(const Vec& xi, const EnergyInput& in, const ConstantsTable& tab,
                                   const std::vector<double>& lambdas, const QuadratureSpec& spec,
                                   const ExpansionOptions& opt = {});

}  // namespace pcurv
