#pragma once

#include <vector>

namespace pcurv {

using Vec = std::vector<double>;

// Points of the closed upper half-space are stored as length-n vectors whose
// last entry is x_n >= 0; ball points are plain length-n vectors.
using HalfSpacePoint = Vec;
using BallPoint = Vec;

constexpr double kSouthPoleRadius = 1e-12;
constexpr double kSphereTol = 1e-10;

void require_dimension(int n);
void require_half_space_point(const HalfSpacePoint& p, int n);

// (2 x̄, 1 - |x̄|^2 - x_n^2) / (|x̄|^2 + (x_n + 1)^2); an involution.
BallPoint inversion(const HalfSpacePoint& p, int n);
HalfSpacePoint inversion_inverse(const BallPoint& q, int n);

// |x̄|^2 + (x_n + 1)^2, the squared distance to the south pole (0,...,0,-1).
double south_distance_sq(const Vec& p);

// varrho = 4 / (|x̄|^2 + (x_n + 1)^2)^2
double conformal_factor(const HalfSpacePoint& p);

// log(varrho) for n = 2, varrho^((n-2)/4) otherwise.
double rho(const HalfSpacePoint& p, int n);

struct RhoJet {
    double value = 0;
    Vec gradient;
    double laplacian = 0;
};

// Closed-form value, gradient and Laplacian of rho.
RhoJet rho_jet(const HalfSpacePoint& p, int n);

// Row-major n x n Jacobian of the inversion map at p.
std::vector<double> inversion_jacobian(const HalfSpacePoint& p, int n);

// Unit sphere area |S^k| = 2 pi^((k+1)/2) / Gamma((k+1)/2); |S^0| = 2.
double sphere_area(int k);

double norm(const Vec& v);
double dot(const Vec& a, const Vec& b);

}  // namespace pcurv
