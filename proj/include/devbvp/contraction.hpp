#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "devbvp/grid.hpp"
#include "devbvp/model.hpp"

namespace devbvp::contraction {

/// Right-hand side sampled along a trajectory: (sample index, x, y) -> value,
/// where x = u(tau_x(s_i)) and y = u(tau(s_i)).
using Forcing = std::function<double(std::size_t, double, double)>;

/// The problem's own nonlinearity as a Forcing.
Forcing problem_forcing(const Discretization& d);

struct PicardSettings {
    double tol_sup = 1e-10;
    int max_iter = 10'000;
    /// Contraction factor of the integral operator; must lie in [0, 1).
    double q_estimate = 0.0;
    /// Record the residual of every iterate (for the iterate dump).
    bool record_residuals = false;
};

struct PicardResult {
    grid::GridFunction u;
    int iterations = 0;
    double final_delta = 0.0;
    double residual_L1 = 0.0;
    int predicted_iters = 0;
    std::vector<double> deltas;
    std::vector<double> residuals;
};

class ContractionRefused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, std::vector<double> deltas)
        : std::runtime_error(what), deltas_(std::move(deltas)) {}

    const std::vector<double>& deltas() const noexcept { return deltas_; }

private:
    std::vector<double> deltas_;
};

/// v = phi on [-r,0];  v(t) = phi(0) + C t - int_0^t (t-s) F(s) ds on [0,T] with
/// C = (B - phi(0) + int_0^T (T-s) F(s) ds) / T and F(s) = forcing along u.
/// Composite trapezoid via the running sums of F and sF; v(T) = B is pinned.
grid::GridFunction apply_integral_operator(const Discretization& d, const Forcing& forcing,
                                           const grid::GridFunction& u);
grid::GridFunction apply_integral_operator(const Discretization& d, const grid::GridFunction& u);

/// Affine in t between phi(0) and B on [0,T], phi on the history.
grid::GridFunction default_initial_guess(const Discretization& d);

/// sum over interior nodes of h * |-(second difference) - F|.
double residual_L1(const Discretization& d, const Forcing& forcing, const grid::GridFunction& u);
double residual_L1(const Discretization& d, const grid::GridFunction& u);

/// ceil(log(tol (1-q) / delta1) / log q), at least 1.
int predicted_iterations(double q, double tol, double delta1);

PicardResult picard_solve(const Discretization& d, const Forcing& forcing, const PicardSettings& s,
                          const grid::GridFunction& u0);
PicardResult picard_solve(const Discretization& d, const PicardSettings& s, const grid::GridFunction& u0);
PicardResult picard_solve(const Discretization& d, const PicardSettings& s);

/// Rows `n,delta_sup,residual_L1`; residual columns are empty unless recorded.
void write_iterate_log(std::ostream& os, const PicardResult& r);

}  // namespace devbvp::contraction
