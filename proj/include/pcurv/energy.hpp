#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pcurv/bubbles.hpp"
#include "pcurv/fields.hpp"
#include "pcurv/quadrature.hpp"

namespace pcurv {

struct EnergyInput {
    int n = 2;
    double D = 2.0;
    double eps = 0.0;
    PolyField K{2};
    SphereFunction H{PolyField{2}};
};

void validate(const EnergyInput& in);
EnergyInput make_input(int n, double D, const PolyField& K, const PolyField& H, double eps = 0.0);

// alpha_n and beta_n.
double small_alpha(int n);
double small_beta(int n);

// Weight of the boundary term int_S u^2 for n >= 3. Variational uses (n-2)/4, the
// value for which bubbles are critical points; Literal uses 1/2.
enum class EnergyConvention { Variational, Literal };

// u = optional bubble V_{x0,lambda} plus a polynomial.
struct BallFunction {
    std::optional<BubbleParams> bubble;
    PolyField poly{2};

    double value(const Vec& q) const;
    Vec gradient(const Vec& q) const;
};

BallFunction bubble_function(const BubbleParams& b);

struct EnergyValue {
    double value = 0;
    double error_estimate = 0;
    bool converged = true;
};

EnergyValue energy_J(const BallFunction& u, const EnergyInput& in, const QuadratureSpec& spec,
                     EnergyConvention conv = EnergyConvention::Variational);

struct ConstancyReport {
    double reference = 0;  // J_0(V_{0,1})
    double max_abs_deviation = 0;
    double max_rel_deviation = 0;
    std::vector<double> values;
};

struct GridPoint {
    Vec x0;
    double lambda = 1.0;
};

ConstancyReport energy_constancy_check(const EnergyInput& in, const std::vector<GridPoint>& grid,
                                       const QuadratureSpec& spec,
                                       EnergyConvention conv = EnergyConvention::Variational);

// Gamma(x0, lambda) from the scaled half-space integrals.
IntegralResult gamma(const BubbleParams& b, const EnergyInput& in, const QuadratureSpec& spec);
// gamma^n(V_{x0,lambda}) by ball and sphere quadrature.
IntegralResult gamma_ball(const BubbleParams& b, const EnergyInput& in, const QuadratureSpec& spec);
// Gamma(x0, lambda) - (a K(ref) - b H(ref)), integrating the differences directly.
IntegralResult gamma_deviation(const BubbleParams& b, const EnergyInput& in, const Vec& ref,
                               const QuadratureSpec& spec);

// |Gamma - psi(south pole)| at x0 = (R/2, 0, ...), lambda = R/2.
double gamma_limit_check(const EnergyInput& in, double R, const QuadratureSpec& spec);
double gamma_limit_check_at(const EnergyInput& in, const Vec& x0, double lambda, const QuadratureSpec& spec);

// (int_{S^1} e^{V/2}, D int_{S^1} e^{V/2} - int_{B^2} e^V), n = 2 only.
std::pair<double, double> gauss_bonnet_identities(const BubbleParams& b, const QuadratureSpec& spec);

// pi (D / sqrt(D^2 - 1) - 2); DegenerateD within 1e-10 of 2 / sqrt(3).
double alpha_D(double D);

}  // namespace pcurv
