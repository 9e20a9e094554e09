#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "devbvp/conditions.hpp"

using namespace devbvp;
using namespace devbvp::conditions;

namespace {

LipschitzPair constants(double l1, double l2) {
    return {ScalarMap::constant(l1), ScalarMap::constant(l2)};
}

LipschitzPair example2(double k) {
    return {ScalarMap::constant(k), ScalarMap::parse("1/(5*sqrt(t))"), false, true};
}

}  // namespace

TEST_CASE("example 1 constants") {
    const double L = (1 + std::numbers::pi / 2) / 9;
    const auto m = grid::Mesh::uniform(2, 200, 1);
    const auto r = evaluate(constants(0, L), *m);
    CHECK(r.norms.n_inf == doctest::Approx(L).epsilon(1e-12));
    CHECK(r.norms.n_2 == doctest::Approx(L * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(r.norms.n_1 == doctest::Approx(2 * L).epsilon(1e-12));
    CHECK_FALSE(r[Cond::C1].holds);
    CHECK(r[Cond::C2].holds);
    CHECK_FALSE(r[Cond::C3].holds);
    CHECK(r[Cond::C2].threshold == doctest::Approx(std::sqrt(3.0 / 16)));
    CHECK(r[Cond::C2hat].holds);
    CHECK(r[Cond::C2hat].threshold == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(r.main_rule_ok);
    // q = 2 * L * T^2 / 2
    CHECK(r.q == doctest::Approx(4 * L).epsilon(1e-12));
    // q_green = L * T^2 / 8
    CHECK(r.q_green == doctest::Approx(L / 2).epsilon(1e-6));
    CHECK_FALSE(r.q_bound_consistent);
}

TEST_CASE("example 2 constants") {
    const auto m = grid::Mesh::uniform(1, 200, 0);
    const auto r = evaluate(example2(0.05), *m);
    CHECK(std::isinf(r.norms.n_inf));
    CHECK(std::isinf(r.norms.n_2));
    CHECK(r.norms.n_1 == doctest::Approx(0.45).epsilon(1e-3));
    CHECK(r[Cond::C3].holds);
    CHECK(r[Cond::C3hat].holds);
    CHECK_FALSE(r[Cond::C1].holds);
    CHECK_FALSE(r[Cond::C2].holds);
    CHECK(r.main_rule_ok);
    CHECK(r.q < 1);

    const auto bad = evaluate(example2(0.11), *m);
    CHECK_FALSE(bad[Cond::C3].holds);
    CHECK_FALSE(bad.main_rule_ok);
    CHECK_FALSE(evaluate(example2(0.2), *m).main_rule_ok);
}

TEST_CASE("zero coefficients") {
    for (double T : {0.3, 1.0, 5.0}) {
        const auto r = evaluate(constants(0, 0), *grid::Mesh::uniform(T, 16));
        for (const auto& e : r.entries) {
            CHECK(e.holds);
            CHECK(e.margin == e.threshold);
        }
        CHECK(r.q == 0.0);
    }
}

TEST_CASE("strict thresholds report the boundary case") {
    // n_inf = 1/T^2 exactly
    const auto r = evaluate(constants(1, 0), *grid::Mesh::uniform(1, 16));
    CHECK_FALSE(r[Cond::C1].holds);
    CHECK(r[Cond::C1].boundary);
    const auto e = compare(0.5, 0.5 + 1e-13);
    CHECK_FALSE(e.holds);
    CHECK(e.boundary);
    CHECK(compare(0.5, 0.5 + 1e-11).holds);
}

TEST_CASE("short intervals use C2hat") {
    const double T = 0.5;
    // between sqrt(2)/T = 2.828 and sqrt(3/(2T^3)) = 3.464, n_2 = L sqrt(T)
    const double L = 3.2 / std::sqrt(T);
    const auto r = evaluate(constants(0, L), *grid::Mesh::uniform(T, 32));
    CHECK_FALSE(r[Cond::C1].holds);
    CHECK_FALSE(r[Cond::C3].holds);
    CHECK(r[Cond::C2].holds);
    CHECK_FALSE(r[Cond::C2hat].holds);
    CHECK_FALSE(r.main_rule_ok);

    const double L2 = 2.5 / std::sqrt(T);
    const auto ok = evaluate(constants(0, L2), *grid::Mesh::uniform(T, 32));
    CHECK(ok[Cond::C2hat].holds);
    CHECK(ok.main_rule_ok);
}

TEST_CASE("negative coefficients are rejected") {
    CHECK_THROWS_AS(compute_norms(constants(-0.1, 0), *grid::Mesh::uniform(1, 16)), InvalidCoefficientError);
    const LipschitzPair sign_change{ScalarMap::parse("t - 0.5"), ScalarMap::constant(0)};
    CHECK_THROWS_AS(compute_norms(sign_change, *grid::Mesh::uniform(1, 16)), InvalidCoefficientError);
}

TEST_CASE("implication lattice") {
    const auto one = implication_lattice(1);
    CHECK(one.c2 == C2Relation::c2_implies_c2hat);
    CHECK(one.c_thresholds[1] == doctest::Approx(std::sqrt(1.5)));
    const auto eq = implication_lattice(0.75);
    CHECK(eq.c2 == C2Relation::equivalent);
    CHECK(eq.c_thresholds[1] == doctest::Approx(4 * std::sqrt(2.0) / 3).epsilon(1e-14));
    CHECK(eq.chat_thresholds[1] == doctest::Approx(4 * std::sqrt(2.0) / 3).epsilon(1e-14));
    const auto half = implication_lattice(0.5);
    CHECK(half.c2 == C2Relation::c2hat_implies_c2);
    CHECK(half.chat_thresholds[1] == doctest::Approx(2 * std::sqrt(2.0)));
    CHECK(half.c_thresholds[1] == doctest::Approx(std::sqrt(12.0)));
}

TEST_CASE("property: C_i implies Chat_i for T >= 3/4; Hoelder chain; q below one") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uT(0.05, 4), uL(0, 2);
    for (int i = 0; i < 1000; ++i) {
        const double T = uT(rng), l1 = uL(rng) / (T * T), l2 = uL(rng) / (T * T);
        const auto m = grid::Mesh::uniform(T, 8);
        const auto r = evaluate(constants(l1, l2), *m);
        CHECK(holder_chain_ok(r.norms, T));
        CHECK(r.norms.n_inf == doctest::Approx(l1 + l2).epsilon(1e-10));
        CHECK(r.norms.n_2 == doctest::Approx((l1 + l2) * std::sqrt(T)).epsilon(1e-10));
        CHECK(r.norms.n_1 == doctest::Approx((l1 + l2) * T).epsilon(1e-10));
        if (T >= 0.75) {
            for (int c = 0; c < 3; ++c)
                if (r.entries[c].holds) CHECK(r.entries[c + 3].holds);
        }
        if (r[Cond::C1].holds || r[Cond::C3].holds) CHECK(r.q < 1);
        CHECK(r.q_green <= r.q + 1e-12);
        if (r[Cond::C1].holds || r[Cond::C2].holds || r[Cond::C3].holds) CHECK(r.q_green < 1);
    }
}

TEST_CASE("green factor for variable coefficients") {
    // L = s on [0,1]: max_t int g(t,s) s ds = max_t t(1-t^2)/6 at t = 1/sqrt(3)
    const LipschitzPair lp{ScalarMap::parse("t"), ScalarMap::constant(0)};
    const double t = 1 / std::sqrt(3.0);
    CHECK(green_contraction_factor(lp, *grid::Mesh::uniform(1, 3000)) ==
          doctest::Approx(t * (1 - t * t) / 6).epsilon(1e-5));
    CHECK(contraction_factor(lp, *grid::Mesh::uniform(1, 100)) == doctest::Approx(1.0 / 3).epsilon(1e-6));
}
