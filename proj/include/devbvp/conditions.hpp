#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "devbvp/grid.hpp"
#include "devbvp/model.hpp"

namespace devbvp::conditions {

/// Strict-inequality slack: a condition holds only if its margin exceeds this.
inline constexpr double eps_cond = 1e-12;

class InvalidCoefficientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Nonnegative coefficient functions (L1, L2) of the one-sided Lipschitz bound.
struct LipschitzPair {
    ScalarMap L1 = ScalarMap::constant(0.0);
    ScalarMap L2 = ScalarMap::constant(0.0);
    bool L1_singular_at_zero = false;
    bool L2_singular_at_zero = false;

    bool singular() const noexcept { return L1_singular_at_zero || L2_singular_at_zero; }
    double sum(double t) const { return L1(t) + L2(t); }
};

/// Norms of L1 + L2 on [0,T]; +infinity when the norm does not exist.
struct Norms {
    double n_inf = 0.0;
    double n_2 = 0.0;
    double n_1 = 0.0;
};

/// Quadrature used for every coefficient integral: graded midpoints at a
/// flagged singular endpoint, 8 sub-cells per mesh cell.
grid::QuadratureRule coefficient_rule(bool singular);

Norms compute_norms(const LipschitzPair& lp, const grid::Mesh& mesh);

/// n_1 <= sqrt(T) n_2 <= T n_inf, up to relative rounding slack.
bool holder_chain_ok(const Norms& n, double T);

struct ConditionEntry {
    bool holds = false;
    double lhs = 0.0;
    double threshold = 0.0;
    double margin = 0.0;
    /// |margin| <= eps_cond: reported as "boundary, not satisfied".
    bool boundary = false;
};

ConditionEntry compare(double lhs, double threshold);

enum class Cond { C1, C2, C3, C1hat, C2hat, C3hat };
inline constexpr std::array<const char*, 6> cond_names{"C1", "C2", "C3", "C1hat", "C2hat", "C3hat"};

struct ConditionReport {
    double T = 0.0;
    Norms norms;
    std::array<ConditionEntry, 6> entries{};
    bool main_rule_ok = false;
    /// 2 * int_0^T (T - s)(L1 + L2) ds, the uniqueness-proof contraction factor.
    double q = 0.0;
    /// max_t int_0^T g(t,s)(L1 + L2)(s) ds with g the Dirichlet Green's
    /// function; a sharper bound on the same contraction, q_green <= q.
    double q_green = 0.0;
    /// False when some C_i holds but q >= 1.
    bool q_bound_consistent = true;

    const ConditionEntry& operator[](Cond c) const { return entries[static_cast<std::size_t>(c)]; }
    ConditionEntry& operator[](Cond c) { return entries[static_cast<std::size_t>(c)]; }
};

/// (C1) n_inf < 1/T^2, (C2) n_2 < (3/(2T^3))^{1/2}, (C3) n_1 < 1/(2T).
void check_uniqueness(const Norms& n, double T, ConditionReport& report);
/// (C1hat) n_inf < 2/T^2, (C2hat) n_2 < sqrt(2)/T, (C3hat) n_1 < 1/T.
void check_max_principle(const Norms& n, double T, ConditionReport& report);
/// T >= 3/4: C1 or C2 or C3.  T < 3/4: C1 or C2hat or C3.
bool check_main_rule(const ConditionReport& report, double T);

double contraction_factor(const LipschitzPair& lp, const grid::Mesh& mesh);
double green_contraction_factor(const LipschitzPair& lp, const grid::Mesh& mesh);

ConditionReport evaluate(const LipschitzPair& lp, const grid::Mesh& mesh);

enum class C2Relation { c2_implies_c2hat, c2hat_implies_c2, equivalent };

/// Threshold comparisons behind C_i => C_ihat (and the reverse for C2 on short intervals).
struct ImplicationLattice {
    double T = 0.0;
    std::array<double, 3> c_thresholds{};
    std::array<double, 3> chat_thresholds{};
    bool c1_implies_c1hat = false;
    bool c3_implies_c3hat = false;
    C2Relation c2 = C2Relation::equivalent;
};

ImplicationLattice implication_lattice(double T);

}  // namespace devbvp::conditions
