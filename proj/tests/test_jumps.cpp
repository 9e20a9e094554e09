#include <doctest.h>

#include <cmath>
#include <numbers>

#include "devbvp/jumps.hpp"

using namespace devbvp;
using namespace devbvp::jumps;

namespace {

PiecewiseFn slice(const char* src, std::vector<double> jumps, double a, double b) {
    return PiecewiseFn(expr::parse(src), expr::Variable::x, std::move(jumps), a, b);
}

PiecewiseFn example1_slice() {
    return PiecewiseFn(expr::parse("floor(t*x) - (1/9)*y*sin(y*pi/(2*floor(abs(y))+2))"), expr::Variable::y, {1, 2},
                       0, 3, {1, 0, 0});
}

// brute-force difference quotients on a uniform grid, skipping cells that straddle a jump
double brute_infimum(const PiecewiseFn& pf, int points) {
    const double a = pf.a(), b = pf.b(), h = (b - a) / points;
    double m = INFINITY;
    for (int i = 0; i < points; ++i) {
        const double x0 = a + i * h, x1 = x0 + h;
        bool straddles = false;
        for (double j : pf.jumps()) straddles |= (x0 <= j && j <= x1);
        if (straddles) continue;
        m = std::min(m, (pf(x1) - pf(x0)) / h);
    }
    return m;
}

}  // namespace

TEST_CASE("smooth slices") {
    CHECK(derivative_infimum(slice("x", {}, 0, 1)) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(derivative_infimum(slice("-3*x", {}, 0, 1)) == doctest::Approx(-3.0).epsilon(1e-8));
    CHECK(shift_constant(slice("-3*x", {}, 0, 1)).shift == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(shift_constant(slice("x^3", {}, 0, 1)).shift == 0.0);
    // x^3 - x on [-1, 1]: f' = 3x^2 - 1 has infimum -1 at 0
    CHECK(derivative_infimum(slice("x^3 - x", {}, -1, 1)) == doctest::Approx(-1.0).epsilon(1e-6));
    // sin on [0, 2 pi]: infimum -1 at pi
    CHECK(derivative_infimum(slice("sin(x)", {}, 0, 2 * std::numbers::pi)) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("upward jumps certify, downward jumps are refused") {
    const auto up = slice("floor(x) - 0.5*x", {1, 2}, 0, 2.5);
    const auto c = shift_constant(up);
    CHECK(c.shift == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(c.min_increment >= -1e-9);

    const auto down = slice("-floor(x)", {1}, 0, 2);
    CHECK_THROWS_AS(check_jump_condition(down), CertificateRefused);
    try {
        shift_constant(down);
        FAIL("expected refusal");
    } catch (const CertificateRefused& e) {
        CHECK(e.jump == 1.0);
        CHECK(e.left == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(e.right == doctest::Approx(-1.0).epsilon(1e-9));
    }
}

TEST_CASE("jump limits") {
    const auto pf = slice("piecewise(x < 1, x, x + 2)", {1}, 0, 2);
    const auto l = jump_limits(pf);
    REQUIRE(l.size() == 1);
    CHECK(l[0].left == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(l[0].value == 3.0);
    CHECK(l[0].right == doctest::Approx(3.0).epsilon(1e-10));
    // jumps outside the window are dropped
    CHECK(slice("x", {-1, 0.5, 7}, 0, 1).jumps().size() == 1);
    CHECK(slice("x", {0.25, 0.5}, 0, 1).breakpoints() == std::vector<double>{0, 0.25, 0.5, 1});
    CHECK_THROWS(slice("x", {0.5, 0.25}, 0, 1));
}

TEST_CASE("example 1 slice") {
    const auto pf = example1_slice();
    const double M = derivative_infimum(pf);
    // analytic infimum: -(1/9) max_a (sin a + a cos a), a in (0, pi/2)
    double best = 0;
    for (int i = 1; i < 200000; ++i) {
        const double a = i * (std::numbers::pi / 2) / 200000;
        best = std::max(best, std::sin(a) + a * std::cos(a));
    }
    CHECK(M == doctest::Approx(-best / 9).epsilon(1e-6));
    CHECK(M >= -(1 + std::numbers::pi / 2) / 9);
    CHECK(std::abs(M - brute_infimum(pf, 100000)) <= 1e-3);
    const auto c = shift_constant(pf);
    CHECK(c.shift == doctest::Approx(-M));
    CHECK(c.min_increment >= -1e-9);
}

TEST_CASE("harmonic step certificate") {
    std::vector<double> jumps;
    for (int n = 19; n >= 5; --n) jumps.push_back(1.0 / n);
    const auto pf = slice("harmonic_step(0.05, x)", jumps, 0.05, 0.25);
    CHECK(shift_constant(pf).shift == doctest::Approx(0.05).epsilon(1e-6));
}
