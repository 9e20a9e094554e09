#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "devbvp/monotone.hpp"
#include "oracles/fd_oracle.hpp"

using namespace devbvp;
using namespace devbvp::monotone;

namespace {

BracketProblem example1() {
    BracketProblem bp;
    auto& p = bp.problem;
    p.T = 2;
    p.r = 1;
    p.B = std::numbers::pi / 4;
    p.tau = ScalarMap::parse("t-1");
    p.phi = ScalarMap::parse("cos(pi*t/2)");
    p.f = TernaryMap{expr::parse("floor(t*x) - (1/9)*y*sin(y*pi/(2*floor(abs(y))+2))")};
    bp.lp = {ScalarMap::constant(0), ScalarMap::parse("(1+pi/2)/9")};
    bp.alpha = ScalarMap::constant(0);
    bp.beta = ScalarMap::parse("piecewise(t < 0, cos(pi*t/2), 1 - t*(t-2))");
    return bp;
}

BracketProblem example2(double k = 0.05) {
    BracketProblem bp;
    auto& p = bp.problem;
    p.T = 1;
    p.tau = ScalarMap::parse("sqrt(t)");
    p.tau_x = ScalarMap::parse("sqrt(1-t)");
    p.phi = ScalarMap::constant(0);
    p.f = TernaryMap{expr::parse("sin(t) + harmonic_step(" + std::to_string(k) + ", x) + y/(5*sqrt(t))"), true};
    bp.lp = {ScalarMap::constant(k), ScalarMap::parse("1/(5*sqrt(t))"), false, true};
    bp.alpha = ScalarMap::parse("t^2 - t");
    bp.beta = ScalarMap::parse("t - t^2");
    return bp;
}

BracketProblem constant_problem() {
    BracketProblem bp;
    auto& p = bp.problem;
    p.T = 1;
    p.tau = ScalarMap::parse("t");
    p.phi = ScalarMap::constant(0);
    p.f = TernaryMap{expr::parse("2")};
    bp.alpha = ScalarMap::constant(0);
    bp.beta = ScalarMap::parse("t*(1-t)");
    return bp;
}

grid::GridFunction sample(const grid::MeshPtr& m, const ScalarMap& s) {
    return grid::GridFunction::sample(m, [&](double t) { return s(t); });
}

contraction::PicardSettings settings_for(const BracketProblem& bp, const grid::Mesh& m) {
    contraction::PicardSettings s;
    s.q_estimate = conditions::green_contraction_factor(bp.lp, m);
    return s;
}

}  // namespace

TEST_CASE("lower and upper functions of the examples") {
    for (const auto& bp : {example1(), example2()}) {
        const auto m = grid::Mesh::uniform(bp.problem.T, 200, bp.problem.r);
        const auto d = discretize(bp.problem, m);
        const auto lo = verify_lower(d, sample(m, bp.alpha));
        const auto hi = verify_upper(d, sample(m, bp.beta));
        CHECK(lo.is_valid);
        CHECK(hi.is_valid);
        CHECK(lo.max_differential_defect <= 1e-7);
        CHECK(hi.max_differential_defect <= 1e-7);
        for (double b : lo.boundary_defects) CHECK(b <= 1e-7);
        for (double b : hi.boundary_defects) CHECK(b <= 1e-7);
    }
}

TEST_CASE("invalid lower and upper functions are rejected") {
    const auto bp = example1();
    const auto m = grid::Mesh::uniform(2, 200, 1);
    const auto d = discretize(bp.problem, m);
    const auto zero = grid::GridFunction::zeros(m);
    const auto up0 = verify_upper(d, zero);
    CHECK_FALSE(up0.is_valid);
    CHECK(up0.boundary_defects[static_cast<int>(BoundaryCheck::endpoint)] ==
          doctest::Approx(std::numbers::pi / 4));
    // beta + 1 as a lower function: fails on the history and at T
    const auto shifted = grid::GridFunction::sample(m, [&](double t) { return bp.beta(t) + 1; });
    CHECK_FALSE(verify_lower(d, shifted).is_valid);
    // a lower function bent the wrong way: -alpha'' = 2 > f(t, alpha, alpha(t-1)) near 0
    const auto bent = grid::GridFunction::sample(m, [](double t) { return t < 0 ? 0.0 : t * (2 - t) / 4; });
    const auto r = verify_lower(d, bent);
    CHECK_FALSE(r.is_valid);
    CHECK(r.max_differential_defect > 0.1);
    CHECK_THROWS_AS(LowerUpperPair(sample(m, bp.beta), zero), std::invalid_argument);
}

TEST_CASE("zero coefficients reduce G to one frozen sweep") {
    const auto bp = constant_problem();
    const auto m = grid::Mesh::uniform(1, 100);
    const auto d = discretize(bp.problem, m);
    const auto any = grid::GridFunction::sample(m, [](double t) { return std::cos(3 * t); });
    const auto g = apply_G(d, bp.lp, any, {});
    const auto direct = contraction::apply_integral_operator(d, any);
    CHECK(grid::sup_distance(g, direct) <= 1e-14);
}

TEST_CASE("constant problem: both sequences hit the solution in one step") {
    const auto bp = constant_problem();
    RunOptions o;
    o.N = 100;
    const auto run = run_bracket(bp, o);
    REQUIRE(run.bracket);
    const auto& b = *run.bracket;
    CHECK(b.converged());
    for (std::size_t i = 0; i <= 100; ++i) {
        const double t = run.mesh->t(i);
        CHECK(std::abs(b.lower_iterates.at(1).on_interval(i) - t * (1 - t)) <= 1e-9);
        CHECK(std::abs(b.upper_iterates.at(1).on_interval(i) - t * (1 - t)) <= 1e-9);
    }
}

TEST_CASE("example 1: G(alpha) >= alpha and the bracket") {
    const auto bp = example1();
    const auto m = grid::Mesh::uniform(2, 200, 1);
    const auto d = discretize(bp.problem, m);
    const auto ga = apply_G(d, bp.lp, sample(m, bp.alpha), settings_for(bp, *m));
    for (std::size_t i = 0; i <= 200; ++i) CHECK(ga.on_interval(i) >= -1e-12);

    RunOptions o;
    o.N = 200;
    const auto run = run_bracket(bp, o);
    REQUIRE(run.bracket);
    const auto& b = *run.bracket;
    CHECK(b.converged());
    CHECK_FALSE(run.refined);
    CHECK(b.monotonicity_defect <= default_eps_mono);
    const auto beta = sample(run.mesh, bp.beta);
    for (const auto* seq : {&b.lower_iterates, &b.upper_iterates})
        for (const auto& it : *seq) {
            CHECK(grid::max_excess(it, beta) <= default_eps_mono);
            for (std::size_t i = 0; i <= 200; ++i) CHECK(it.on_interval(i) >= -default_eps_mono);
        }
    CHECK(b.u_star_low.on_interval(200) == bp.problem.B);
    CHECK(b.u_star_high.on_interval(200) == bp.problem.B);
    for (double g : b.gap.values()) CHECK(g >= -default_eps_mono);
    CHECK(b.lower.residual_L1 <= 1e-3);
    CHECK(b.upper.residual_L1 <= 1e-3);
    CHECK(b.slope_bound_ok == true);
}

TEST_CASE("property: G preserves order on convex combinations") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (const auto& bp : {example1(), example2()}) {
        const auto m = grid::Mesh::uniform(bp.problem.T, 100, bp.problem.r);
        const auto d = discretize(bp.problem, m);
        const auto a = sample(m, bp.alpha), b = sample(m, bp.beta);
        const auto s = settings_for(bp, *m);
        for (int n = 0; n < 10; ++n) {
            double l1 = u(rng), l2 = u(rng);
            if (l1 > l2) std::swap(l1, l2);
            auto mix = [&](double l) {
                std::vector<double> v(m->size());
                for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + l * (b[i] - a[i]);
                return grid::GridFunction(m, v);
            };
            const auto g1 = apply_G(d, bp.lp, mix(l1), s);
            const auto g2 = apply_G(d, bp.lp, mix(l2), s);
            CHECK(grid::max_excess(g1, g2) <= default_eps_mono);
        }
    }
}

TEST_CASE("extremal bracket contains an independently computed solution") {
    // -u'' = 0.3 u(t/2) + 1 on [0,1], u(0) = u(1) = 0: unique solution, bracketed by 0 and t(1-t)
    BracketProblem bp;
    bp.problem.T = 1;
    bp.problem.tau = ScalarMap::parse("t/2");
    bp.problem.phi = ScalarMap::constant(0);
    bp.problem.f = TernaryMap{expr::parse("0.3*y + 1")};
    bp.alpha = ScalarMap::constant(0);
    bp.beta = ScalarMap::parse("t*(1-t)");
    oracle::LinearProblem lp;
    lp.c = [](double) { return 0.3; };
    lp.sy = [](double t) { return t / 2; };
    lp.b = [](double) { return 1.0; };
    const auto ref = oracle::solve(lp, 4000);
    RunOptions o;
    o.N = 200;
    const auto run = run_bracket(bp, o);
    REQUIRE(run.bracket);
    const double eps = o.monotone.outer_tol + 10 * run.mesh->h() * run.mesh->h();
    for (std::size_t i = 0; i <= 200; ++i) {
        const double v = ref(run.mesh->t(i));
        CHECK(run.bracket->u_star_low.on_interval(i) - eps <= v);
        CHECK(v <= run.bracket->u_star_high.on_interval(i) + eps);
    }
}

TEST_CASE("preconditions and the bracket files") {
    auto bp = example1();
    bp.beta = ScalarMap::constant(0);
    RunOptions o;
    o.N = 50;
    CHECK_THROWS_AS(run_bracket(bp, o), PreconditionError);

    const auto good = run_bracket(constant_problem(), RunOptions{});
    std::ostringstream csv, log;
    write_bracket_csv(csv, *good.pair, *good.bracket);
    write_log_csv(log, *good.bracket);
    CHECK(csv.str().rfind("t,alpha,u_star_low,u_star_high,beta\n", 0) == 0);
    CHECK(log.str().rfind("step,side,delta_sup,ordering_defect,residual_L1\n", 0) == 0);
}

TEST_CASE("threads do not change the result") {
    const auto bp = example2();
    RunOptions o;
    o.N = 100;
    o.monotone.threads = 1;
    const auto a = run_bracket(bp, o);
    o.monotone.threads = 2;
    const auto b = run_bracket(bp, o);
    CHECK(a.bracket->u_star_low == b.bracket->u_star_low);
    CHECK(a.bracket->u_star_high == b.bracket->u_star_high);
}
