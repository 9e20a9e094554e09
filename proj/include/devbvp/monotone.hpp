#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "devbvp/conditions.hpp"
#include "devbvp/contraction.hpp"
#include "devbvp/grid.hpp"
#include "devbvp/model.hpp"

namespace devbvp::monotone {

inline constexpr double default_eps_mono = 1e-7;
inline constexpr double default_eps_ord = 1e-9;

struct LowerUpperPair {
    grid::GridFunction alpha;
    grid::GridFunction beta;

    /// Throws std::invalid_argument unless alpha <= beta + eps at every node.
    LowerUpperPair(grid::GridFunction a, grid::GridFunction b, double eps = default_eps_ord);
};

struct VerifyOptions {
    double eps_ver = 1e-7;
    /// The differential test allows eps_ver + h2_factor * h^2 for the
    /// second-difference truncation error.
    double h2_factor = 1.0;
};

enum class BoundaryCheck { history_order, history_growth, endpoint };

struct VerificationReport {
    /// Interior nodes of [0,T]: amount by which the differential inequality fails (>= 0).
    grid::InteriorValues differential_defect;
    double max_differential_defect = 0.0;
    /// history_order:  alpha <= phi (beta >= phi) on [-r,0]
    /// history_growth: phi - alpha <= phi(0) - alpha(0) (beta - phi <= beta(0) - phi(0))
    /// endpoint:       alpha(T) <= B (beta(T) >= B)
    std::array<double, 3> boundary_defects{};
    double differential_tolerance = 0.0;
    double boundary_tolerance = 0.0;
    bool is_valid = false;
};

VerificationReport verify_lower(const Discretization& d, const grid::GridFunction& alpha, const VerifyOptions& o = {});
VerificationReport verify_upper(const Discretization& d, const grid::GridFunction& beta, const VerifyOptions& o = {});

class InnerSolveError : public std::runtime_error {
public:
    InnerSolveError(const std::string& what, grid::GridFunction gamma, std::vector<double> deltas)
        : std::runtime_error(what), gamma(std::move(gamma)), deltas(std::move(deltas)) {}

    grid::GridFunction gamma;
    std::vector<double> deltas;
};

/// gamma -> solution u of
///   -u'' + L1 (u(tau_x) - gamma(tau_x)) + L2 (u(tau) - gamma(tau)) = f(t, gamma(tau_x), gamma(tau)),
/// u = phi on [-r,0], u(T) = B, computed by Picard iteration.
class MonotoneOperator {
public:
    MonotoneOperator(const Discretization& d, const conditions::LipschitzPair& lp, contraction::PicardSettings s);

    contraction::PicardResult solve(const grid::GridFunction& gamma) const;
    grid::GridFunction operator()(const grid::GridFunction& gamma) const { return solve(gamma).u; }

    const Discretization& discretization() const noexcept { return d_; }

private:
    const Discretization& d_;
    std::vector<double> L1_;
    std::vector<double> L2_;
    contraction::PicardSettings settings_;
};

grid::GridFunction apply_G(const Discretization& d, const conditions::LipschitzPair& lp,
                           const grid::GridFunction& gamma, const contraction::PicardSettings& s);

/// Declared bound |f(t, x, y)| <= psi(t) on the order interval, used for the iterate slope estimate.
struct PsiBound {
    ScalarMap psi;
    bool singular_at_zero = false;
};

struct MonotoneOptions {
    double outer_tol = 1e-8;
    int max_outer = 1000;
    double eps_mono = default_eps_mono;
    /// Workers for the two sequences (1 = sequential).
    unsigned threads = 1;
    std::optional<PsiBound> psi;
};

enum class Side { lower, upper };

const char* side_name(Side s);

/// Maximum-principle violation: an iterate left the order it must keep.
class OrderingViolation : public std::runtime_error {
public:
    OrderingViolation(Side side, int step, std::size_t node, double t, double amount, const std::string& what);

    Side side;
    int step;
    std::size_t node;
    double t;
    double amount;
};

struct LogRow {
    int step = 0;
    Side side = Side::lower;
    double delta_sup = 0.0;
    double ordering_defect = 0.0;
    double residual_L1 = 0.0;
};

struct SequenceSummary {
    int steps = 0;
    bool converged = false;
    /// Stopped by the stall rule (small nonmonotone updates) rather than by outer_tol.
    bool stalled = false;
    double final_delta = 0.0;
    double residual_L1 = 0.0;
    double max_slope = 0.0;
    int inner_iterations = 0;
};

struct ExtremalBracket {
    std::vector<grid::GridFunction> lower_iterates;
    std::vector<grid::GridFunction> upper_iterates;
    grid::GridFunction u_star_low;
    grid::GridFunction u_star_high;
    grid::GridFunction gap;
    double monotonicity_defect = 0.0;
    SequenceSummary lower;
    SequenceSummary upper;
    std::vector<LogRow> log;
    std::optional<double> slope_bound;
    bool slope_bound_ok = true;

    bool converged() const noexcept { return lower.converged && upper.converged; }
};

ExtremalBracket iterate_extremal(const Discretization& d, const conditions::LipschitzPair& lp,
                                 const LowerUpperPair& lu, const contraction::PicardSettings& s,
                                 const MonotoneOptions& o);

/// Columns `t,alpha,u_star_low,u_star_high,beta`.
void write_bracket_csv(std::ostream& os, const LowerUpperPair& lu, const ExtremalBracket& b);
/// Columns `step,side,delta_sup,ordering_defect,residual_L1`.
void write_log_csv(std::ostream& os, const ExtremalBracket& b);

/// Everything needed to bracket the extremal solutions of one problem.
struct BracketProblem {
    DeviatedBVP problem;
    conditions::LipschitzPair lp;
    ScalarMap alpha;
    ScalarMap beta;
};

struct RunOptions {
    std::size_t N = 200;
    contraction::PicardSettings picard;
    MonotoneOptions monotone;
    VerifyOptions verify;
    /// Proceed even when the conditions or the lower/upper checks fail.
    bool force = false;
    /// Retry once on a doubled mesh after the first ordering violation.
    bool retry_on_violation = true;
};

class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BracketRun {
    grid::MeshPtr mesh;
    conditions::ConditionReport conditions;
    VerificationReport lower_check;
    VerificationReport upper_check;
    std::optional<LowerUpperPair> pair;
    std::optional<ExtremalBracket> bracket;
    bool refined = false;
    std::vector<std::string> warnings;
};

/// Discretize, check the conditions, verify alpha/beta, and iterate. The Picard
/// factor is taken from the Green's-function contraction estimate.
BracketRun run_bracket(const BracketProblem& bp, const RunOptions& o);

}  // namespace devbvp::monotone
