#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "devbvp/grid.hpp"

using namespace devbvp::grid;

TEST_CASE("mesh layout") {
    const auto m = Mesh::uniform(2.0, 8, 1.0);
    CHECK(m->h() == 0.25);
    CHECK(m->history_cells() == 4);
    CHECK(m->node(0) == -1.0);
    CHECK(m->t(0) == 0.0);
    CHECK(m->node(m->zero_index()) == 0.0);
    CHECK(m->t(8) == 2.0);
    CHECK(m->size() == 13);
    for (std::size_t i = 1; i < m->size(); ++i) CHECK(m->node(i) > m->node(i - 1));
    CHECK_THROWS(Mesh::uniform(1.0, 3));
    CHECK_THROWS(Mesh::uniform(-1.0, 10));
    // history radius not a multiple of h
    const auto odd = Mesh::uniform(1.0, 10, 0.25);
    CHECK(odd->node(0) == -0.25);
    CHECK(odd->history_h() <= odd->h() + 1e-15);
    const auto fine = m->refined();
    CHECK(fine->cells() == 16);
    CHECK(fine->r() == 1.0);
}

TEST_CASE("locate and interp") {
    const auto m = Mesh::uniform(1.0, 4);
    const auto id = GridFunction::sample(m, [](double t) { return t; });
    CHECK(interp(id, 0.5) == 0.5);
    CHECK(interp(id, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(interp(id, 1.0) == 1.0);
    CHECK(interp(id, 1.0 + 5e-13) == 1.0);
    CHECK_THROWS_AS(interp(id, 1.0 + 1e-9), ExtrapolationError);
    CHECK_THROWS_AS(interp(id, -1e-9), ExtrapolationError);

    const auto sq = GridFunction::sample(m, [](double t) { return t * t; });
    CHECK(interp(sq, 0.125) == 0.03125);
    CHECK(interp(sq, 0.125) - 0.125 * 0.125 == doctest::Approx(0.015625));

    const auto m1 = Mesh::uniform(2.0, 200, 1.0);
    const auto beta = GridFunction::sample(m1, [](double t) {
        return t < 0 ? std::cos(std::numbers::pi * t / 2) : 1 - t * (t - 2);
    });
    CHECK(beta(1.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("interpolation error is second order") {
    double prev = 0;
    for (std::size_t N : {50u, 100u, 200u, 400u}) {
        const auto m = Mesh::uniform(1.0, N);
        const auto u = GridFunction::sample(m, [](double t) { return t * t; });
        double err = 0;
        for (int j = 0; j <= 10 * static_cast<int>(N); ++j) {
            const double t = j / (10.0 * N);
            err = std::max(err, std::abs(u(t) - t * t));
        }
        CHECK(err <= m->h() * m->h() / 8 * 2 + 1e-15);
        if (prev > 0) CHECK(std::log2(prev / err) >= 1.9);
        prev = err;
    }
}

TEST_CASE("second differences") {
    const auto m = Mesh::uniform(1.0, 10);
    const auto p = second_difference(GridFunction::sample(m, [](double t) { return t * (1 - t); }));
    REQUIRE(p.values.size() == 9);
    for (double v : p.values) CHECK(v == doctest::Approx(-2.0).epsilon(1e-10));
    for (double v : second_difference(GridFunction::sample(m, [](double) { return 3.0; })).values) CHECK(v == 0.0);
    const auto ms = Mesh::uniform(1.0, 100);
    const auto s = second_difference(GridFunction::sample(ms, [](double t) { return std::sin(t); }));
    for (std::size_t i = 0; i < s.t.size(); ++i) CHECK(std::abs(s.values[i] + std::sin(s.t[i])) <= 1e-4);
}

TEST_CASE("grid function invariants") {
    const auto m = Mesh::uniform(1.0, 4);
    CHECK_THROWS(GridFunction(m, {1, 2, 3}));
    CHECK_THROWS(GridFunction(m, {1, 2, NAN, 4, 5}));
    const auto a = GridFunction::sample(m, [](double t) { return t; });
    const auto b = GridFunction::sample(m, [](double t) { return 2 * t; });
    CHECK(sup_distance(a, b) == 1.0);
    CHECK(max_excess(a, b) == 0.0);
    CHECK(max_excess(b, a) == 1.0);
    std::ostringstream os;
    write_csv(os, a);
    CHECK(os.str().rfind("t,value\n0,0\n", 0) == 0);
}

TEST_CASE("quadrature") {
    const auto m = Mesh::uniform(1.0, 200);
    const QuadratureRule trap{}, mid{QuadratureRule::Kind::midpoint};
    CHECK(integrate(*m, [](double s) { return (1 - s) * 0.0; }, 0, 1, trap) == 0.0);
    const auto m2 = Mesh::uniform(2.0, 200);
    const double c = 0.3;
    CHECK(integrate(*m2, [c](double s) { return (2 - s) * c; }, 0, 2, trap) == doctest::Approx(2 * c).epsilon(1e-12));
    CHECK(integrate(*m2, [c](double s) { return (2 - s) * c; }, 0, 2, mid) == doctest::Approx(2 * c).epsilon(1e-12));
    // partial range
    CHECK(integrate(*m, [](double s) { return s; }, 0.25, 0.75, trap) == doctest::Approx(0.25).epsilon(1e-13));

    const QuadratureRule sing{QuadratureRule::Kind::midpoint, true};
    CHECK(std::abs(integrate(*m, [](double s) { return 1 / (5 * std::sqrt(s)); }, 0, 1, sing) - 0.4) < 1e-3);
    CHECK(std::abs(integrate(*m, [](double s) { return 1 / std::sqrt(s); }, 0, 1, sing) - 2.0) < 1e-3);
    const auto div = integrate_checked(*m, [](double s) { return 1 / s; }, 0, 1, sing);
    CHECK(div.divergent);
    CHECK_FALSE(integrate_checked(*m, [](double s) { return 1 / std::sqrt(s); }, 0, 1, sing).divergent);

    // midpoint never touches the endpoints
    bool touched = false;
    integrate(*m, [&](double s) { touched |= (s == 0.0 || s == 1.0); return 1.0; }, 0, 1, mid);
    CHECK_FALSE(touched);

    for (auto rule : {trap, mid}) {
        double prev = 0;
        for (std::size_t N : {25u, 50u, 100u}) {
            const auto mm = Mesh::uniform(1.0, N);
            const double err = std::abs(integrate(*mm, [](double s) { return std::exp(s); }, 0, 1, rule) - (std::exp(1.0) - 1));
            if (prev > 0) CHECK(std::log2(prev / err) >= 1.9);
            prev = err;
        }
    }
}
