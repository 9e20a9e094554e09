#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "devbvp/expr.hpp"

namespace devbvp::jumps {

inline constexpr double eps_jump = 1e-9;

/// A downward jump: the left limit exceeds the value or the value exceeds the right limit.
class CertificateRefused : public std::runtime_error {
public:
    CertificateRefused(double jump, double left, double value, double right);

    double jump, left, value, right;
};

/// The shifted function failed the monotonicity scan; the derivative was undersampled.
class InconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One-variable slice of an expression, C^1 between user-declared jump points,
/// restricted to the window [a, b].
class PiecewiseFn {
public:
    /// `fixed` supplies (t, x, y); the slice variable's entry is ignored.
    PiecewiseFn(expr::Expr e, expr::Variable var, std::vector<double> jumps, double a, double b,
                std::array<double, 3> fixed = {0.0, 0.0, 0.0});

    double operator()(double v) const;

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    /// Jump points strictly inside the window.
    const std::vector<double>& jumps() const noexcept { return jumps_; }
    /// Consecutive breakpoints a, x_1, ..., x_k, b.
    std::vector<double> breakpoints() const;

private:
    expr::Expr e_;
    expr::Variable var_;
    std::vector<double> jumps_;
    double a_, b_;
    std::array<double, 3> fixed_;
};

struct JumpLimits {
    double point = 0.0;
    double left = 0.0;
    double value = 0.0;
    double right = 0.0;
};

/// One-sided limits at every jump, extrapolated from offsets delta, delta/2, delta/4
/// with delta = 1e-4 (b - a).
std::vector<JumpLimits> jump_limits(const PiecewiseFn& pf);

/// Throws CertificateRefused at the first jump with left > value or value > right (beyond eps_jump).
void check_jump_condition(const PiecewiseFn& pf);

/// Infimum of f' over the pieces, from difference quotients at Chebyshev
/// points of each piece, refined around the smallest sample.
double derivative_infimum(const PiecewiseFn& pf, int samples_per_piece = 256);

struct ShiftCertificate {
    /// max(0, -M): f + shift * v is nondecreasing on the window.
    double shift = 0.0;
    double M = 0.0;
    /// Smallest increment of f + shift * v over the scan grid.
    double min_increment = 0.0;
    int scan_points = 10'000;
};

ShiftCertificate shift_constant(const PiecewiseFn& pf, int samples_per_piece = 256);

}  // namespace devbvp::jumps
