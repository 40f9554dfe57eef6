#pragma once

#include <vector>

#include "pcurv/geometry.hpp"

namespace pcurv {

struct BubbleParams {
    int n = 2;
    double D = 2.0;
    Vec x0;  // length n-1
    double lambda = 1.0;
};

void validate(const BubbleParams& b);
BubbleParams make_bubble(int n, double D, const Vec& x0, double lambda);

// Lambda_n: 4 for n = 2, 4 n (n - 1) otherwise.
double big_lambda(int n);

// |x̄ - x0|^2 + (x_n + lambda D)^2 - lambda^2
double bubble_denominator(const HalfSpacePoint& p, const BubbleParams& b);

double eval_U_halfspace(const HalfSpacePoint& p, const BubbleParams& b);

struct Jet {
    double value = 0;
    Vec gradient;
    double laplacian = 0;
};

Jet U_jet(const HalfSpacePoint& p, const BubbleParams& b);

// Ball profile P = (Lambda_n / 4) lambda^2 d(z)^2 / Q(z)^2 with z = I(q), written in
// ball coordinates as 4 Lambda_n lambda^2 / G(q)^2, G quadratic in q.
struct BallQuadratic {
    double alpha = 0, gamma = 0;
    Vec beta;
    double scale = 0;  // 4 Lambda_n lambda^2
};
BallQuadratic ball_quadratic(const BubbleParams& b);

double ball_P(const BallPoint& q, const BubbleParams& b);
double eval_V_ball(const BallPoint& q, const BubbleParams& b);
// Same value computed through z = I(q) and the half-space expression.
double eval_V_ball_pullback(const BallPoint& q, const BubbleParams& b);
Jet V_jet(const BallPoint& q, const BubbleParams& b);

struct ResidualSamples {
    std::vector<BallPoint> interior;
    std::vector<BallPoint> boundary;
};

// 20^n polar tensor grid with radius <= 1 - 1e-3, plus 64 boundary points.
ResidualSamples default_residual_samples(int n, int per_axis = 20, int boundary_count = 64);

struct Residuals {
    double interior = 0;
    double boundary = 0;
};

// Max residuals of the unperturbed ball problem; boundary_lambda_scale != 1 corrupts
// the bubble used in the boundary nonlinearity (negative control).
Residuals residual_unperturbed(const BubbleParams& b, const ResidualSamples& samples,
                               double boundary_lambda_scale = 1.0);

// (d/dx0_1 U, ..., d/dx0_{n-1} U, d/dlambda U) at p.
Vec kernel_elements(const HalfSpacePoint& p, const BubbleParams& b);

// Residuals of the linearized half-space problem for each kernel element:
// interior operator at p, and the boundary operator at (p̄, 0).
struct KernelResidual {
    Vec interior;
    Vec boundary;
};
KernelResidual kernel_residuals(const HalfSpacePoint& p, const BubbleParams& b);

// Deterministic points spread over S^{n-1}: angles (n = 2), Fibonacci (n = 3),
// normalized Gaussian samples from a fixed-seed generator (n >= 4).
std::vector<Vec> sphere_points(int n, int count);

}  // namespace pcurv
