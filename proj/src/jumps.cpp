#include "devbvp/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace devbvp::jumps {

CertificateRefused::CertificateRefused(double jump_, double left_, double value_, double right_)
    : std::runtime_error(fmt::format("downward jump at x={}: left limit {}, value {}, right limit {}", jump_, left_,
                                     value_, right_)),
      jump(jump_), left(left_), value(value_), right(right_) {}

PiecewiseFn::PiecewiseFn(expr::Expr e, expr::Variable var, std::vector<double> jumps, double a, double b,
                         std::array<double, 3> fixed)
    : e_(std::move(e)), var_(var), a_(a), b_(b), fixed_(fixed) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw std::invalid_argument(fmt::format("invalid window [{}, {}]", a, b));
    for (std::size_t i = 1; i < jumps.size(); ++i)
        if (!(jumps[i] > jumps[i - 1])) throw std::invalid_argument("jump points must be strictly increasing");
    for (double x : jumps)
        if (x > a && x < b) jumps_.push_back(x);
}

double PiecewiseFn::operator()(double v) const {
    auto args = fixed_;
    args[static_cast<std::size_t>(var_)] = v;
    return e_(args[0], args[1], args[2]);
}

std::vector<double> PiecewiseFn::breakpoints() const {
    std::vector<double> out{a_};
    out.insert(out.end(), jumps_.begin(), jumps_.end());
    out.push_back(b_);
    return out;
}

namespace {

// f(x + s*d) = L + c1 d + c2 d^2 + ...: eliminate c1, c2 from d, d/2, d/4.
double one_sided_limit(const PiecewiseFn& f, double x, double sign, double delta) {
    const double f1 = f(x + sign * delta);
    const double f2 = f(x + sign * delta / 2);
    const double f4 = f(x + sign * delta / 4);
    return (8.0 * f4 - 6.0 * f2 + f1) / 3.0;
}

// Difference quotient inside (lo, hi), one-sided near the ends.
double slope(const PiecewiseFn& f, double x, double lo, double hi, double step) {
    if (x - step <= lo) return (f(x + step) - f(x)) / step;
    if (x + step >= hi) return (f(x) - f(x - step)) / step;
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

double refine_minimum(const PiecewiseFn& f, double lo, double hi, double a, double b, double step) {
    // Golden-section search for the smallest slope in [a, b] subset of (lo, hi).
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = slope(f, c, lo, hi, step);
    double fd = slope(f, d, lo, hi, step);
    for (int it = 0; it < 80 && (b - a) > 1e-10 * (hi - lo); ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a);
            fc = slope(f, c, lo, hi, step);
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a);
            fd = slope(f, d, lo, hi, step);
        }
    }
    return std::min(fc, fd);
}

}  // namespace

std::vector<JumpLimits> jump_limits(const PiecewiseFn& pf) {
    const double delta = 1e-4 * (pf.b() - pf.a());
    std::vector<JumpLimits> out;
    for (double x : pf.jumps())
        out.push_back({x, one_sided_limit(pf, x, -1.0, delta), pf(x), one_sided_limit(pf, x, 1.0, delta)});
    return out;
}

void check_jump_condition(const PiecewiseFn& pf) {
    for (const auto& j : jump_limits(pf))
        if (j.left > j.value + eps_jump || j.value > j.right + eps_jump)
            throw CertificateRefused(j.point, j.left, j.value, j.right);
}

double derivative_infimum(const PiecewiseFn& pf, int samples_per_piece) {
    if (samples_per_piece < 16) throw std::invalid_argument("derivative_infimum needs at least 16 samples per piece");
    const auto bp = pf.breakpoints();
    double M = std::numeric_limits<double>::infinity();
    const int n = samples_per_piece;
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
        const double lo = bp[k];
        const double hi = bp[k + 1];
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        const double step = 1e-6 * (hi - lo);
        std::vector<double> xs(n);
        for (int j = 0; j < n; ++j) xs[j] = mid - half * std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n));
        int best = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            const double s = slope(pf, xs[j], lo, hi, step);
            if (s < best_val) { best_val = s; best = j; }
        }
        const double left = best > 0 ? xs[best - 1] : lo + step;
        const double right = best + 1 < n ? xs[best + 1] : hi - step;
        M = std::min({M, best_val, refine_minimum(pf, lo, hi, left, right, step)});
    }
    return M;
}

ShiftCertificate shift_constant(const PiecewiseFn& pf, int samples_per_piece) {
    check_jump_condition(pf);
    ShiftCertificate cert;
    cert.M = derivative_infimum(pf, samples_per_piece);
    if (!std::isfinite(cert.M)) throw InconsistencyError("derivative infimum is not finite");
    cert.shift = std::max(0.0, -cert.M);

    const int n = cert.scan_points;
    const double a = pf.a();
    const double w = pf.b() - a;
    double prev = pf(a) + cert.shift * a;
    cert.min_increment = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
        const double x = i == n ? pf.b() : a + w * i / n;
        const double g = pf(x) + cert.shift * x;
        cert.min_increment = std::min(cert.min_increment, g - prev);
        if (g < prev - 1e-9)
            throw InconsistencyError(fmt::format(
                "f + {} x decreases by {} near x={}; the derivative infimum is undersampled", cert.shift, prev - g, x));
        prev = g;
    }
    return cert;
}

}  // namespace devbvp::jumps
