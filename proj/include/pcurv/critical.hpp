#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcurv/energy.hpp"
#include "pcurv/expansion.hpp"

namespace pcurv {

struct CriticalPoint {
    Vec xi;
    double value = 0;       // psi(xi)
    double grad_norm = 0;   // tangential gradient
    int morse_index = 0;    // negative eigenvalues of the tangential Hessian
    double hessian_det = 0;
    bool morse = true;
    std::optional<PhiValue> first_phi;
    std::vector<PhiTableEntry> cascade;
    std::string note;
};

struct SearchOptions {
    int seeds = 0;  // 0: 4096 on S^1, 8192 otherwise
    double newton_tol = 1e-10;
    double dedup_tol = 1e-8;
    int max_iterations = 60;
};

struct CriticalSearch {
    std::vector<CriticalPoint> points;
    int stalled_seeds = 0;
    int euler_sum = 0;       // sum of (-1)^index
    int euler_expected = 0;  // chi(S^{n-1}) = 1 - (-1)^n
    bool all_morse = true;
    double scale = 0;        // largest coefficient magnitude of psi
};

// Ambient polynomial a K - b H whose restriction to the sphere is psi.
PolyField psi_polynomial(const EnergyInput& in, const ConstantsTable& tab);

// Throws ConstantPsi when psi is constant on the sphere.
CriticalSearch find_critical_points(const EnergyInput& in, const ConstantsTable& tab, const SearchOptions& opt = {});

// Evaluates phi_1, then Phi_2, Phi_3, ..., and records the first value above
// 1e-8 * max(assembly scale, largest K/H coefficient).
CriticalPoint phi_cascade(const CriticalPoint& cp, const EnergyInput& in, const ConstantsTable& tab,
                          const QuadratureSpec& spec, int max_order);

struct DegreeResult {
    int positive_sum = 0;   // sum over f1 > 0 of (-1)^index
    int negative_sum = 0;   // sum over f1 < 0 of (-1)^index
    int interior_degree_sum = 0;  // 1 - positive_sum
    int chi_sphere = 0;     // positive_sum + negative_sum, expected 1 - (-1)^n
    int chi_double = 0;     // 2 interior + positive_sum - negative_sum, expected 1 + (-1)^n
    bool consistent = false;
    bool interior_forced = false;
};

struct IndexSign {
    int index = 0;
    int f1_sign = 1;  // +1 or -1
};

// Throws InconsistentInput when the sphere Euler characteristic check fails.
DegreeResult punticrit_degree(const std::vector<IndexSign>& points, int n);

enum class Verdict { Exists, Inconclusive };
const char* verdict_name(Verdict v);

struct Certificate {
    int n = 2;
    double D = 2.0;
    std::optional<double> alpha_d;
    std::vector<CriticalPoint> points;
    bool morse = false;
    bool case1 = false, case2 = false, case3 = false;
    std::optional<int> case_applied;
    int degree_sum = 0;  // sum over Phi_m < 0 of (-1)^index
    std::optional<DegreeResult> degree;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> notes;
};

Certificate certificate(const EnergyInput& in, const ConstantsTable& tab, const QuadratureSpec& spec, int max_order,
                        const SearchOptions& opt = {});

}  // namespace pcurv
