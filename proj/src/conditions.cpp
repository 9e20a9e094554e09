#include "devbvp/conditions.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace devbvp::conditions {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double eval_coefficient(const ScalarMap& L, const char* name, double t) {
    double v;
    try {
        v = L(t);
    } catch (const std::exception& e) {
        throw InvalidCoefficientError(fmt::format("{} cannot be evaluated at t={}: {}", name, t, e.what()));
    }
    if (!std::isfinite(v)) throw InvalidCoefficientError(fmt::format("{}({}) is not finite", name, t));
    if (v < 0.0) throw InvalidCoefficientError(fmt::format("{}({})={} is negative", name, t, v));
    return v;
}

void check_samples(const LipschitzPair& lp, const grid::Mesh& mesh) {
    for (std::size_t i = 0; i <= mesh.cells(); ++i) {
        const double t = mesh.t(i);
        if (i > 0 || !lp.L1_singular_at_zero) eval_coefficient(lp.L1, "L1", t);
        if (i > 0 || !lp.L2_singular_at_zero) eval_coefficient(lp.L2, "L2", t);
        if (i < mesh.cells()) {
            const double mid = t + 0.5 * mesh.h();
            eval_coefficient(lp.L1, "L1", mid);
            eval_coefficient(lp.L2, "L2", mid);
        }
    }
}

}  // namespace

grid::QuadratureRule coefficient_rule(bool singular) {
    grid::QuadratureRule rule;
    rule.kind = grid::QuadratureRule::Kind::midpoint;
    rule.singular_left = singular;
    rule.subdivisions = 8;
    return rule;
}

Norms compute_norms(const LipschitzPair& lp, const grid::Mesh& mesh) {
    check_samples(lp, mesh);
    Norms n;
    const double T = mesh.T();
    const auto rule = coefficient_rule(lp.singular());
    auto sum = [&](double t) { return eval_coefficient(lp.L1, "L1", t) + eval_coefficient(lp.L2, "L2", t); };

    if (lp.singular()) {
        n.n_inf = inf;
    } else {
        for (std::size_t i = 0; i <= mesh.cells(); ++i) {
            n.n_inf = std::max(n.n_inf, sum(mesh.t(i)));
            if (i < mesh.cells()) n.n_inf = std::max(n.n_inf, sum(mesh.t(i) + 0.5 * mesh.h()));
        }
    }
    const auto l1 = grid::integrate_checked(mesh, sum, 0.0, T, rule);
    n.n_1 = l1.divergent ? inf : l1.value;
    const auto l2 = grid::integrate_checked(mesh, [&](double t) { const double s = sum(t); return s * s; }, 0.0, T, rule);
    n.n_2 = l2.divergent ? inf : std::sqrt(l2.value);
    return n;
}

bool holder_chain_ok(const Norms& n, double T) {
    const double slack = 1e-12;
    const double a = n.n_1;
    const double b = std::sqrt(T) * n.n_2;
    const double c = T * n.n_inf;
    auto le = [&](double x, double y) { return std::isinf(y) || x <= y * (1.0 + slack) + slack; };
    return le(a, b) && le(b, c);
}

ConditionEntry compare(double lhs, double threshold) {
    ConditionEntry e;
    e.lhs = lhs;
    e.threshold = threshold;
    e.margin = threshold - lhs;
    e.holds = e.margin > eps_cond;
    e.boundary = std::abs(e.margin) <= eps_cond;
    return e;
}

void check_uniqueness(const Norms& n, double T, ConditionReport& report) {
    report[Cond::C1] = compare(n.n_inf, 1.0 / (T * T));
    report[Cond::C2] = compare(n.n_2, std::sqrt(3.0 / (2.0 * T * T * T)));
    report[Cond::C3] = compare(n.n_1, 1.0 / (2.0 * T));
}

void check_max_principle(const Norms& n, double T, ConditionReport& report) {
    report[Cond::C1hat] = compare(n.n_inf, 2.0 / (T * T));
    report[Cond::C2hat] = compare(n.n_2, std::sqrt(2.0) / T);
    report[Cond::C3hat] = compare(n.n_1, 1.0 / T);
}

bool check_main_rule(const ConditionReport& r, double T) {
    const bool second = T >= 0.75 ? r[Cond::C2].holds : r[Cond::C2hat].holds;
    return r[Cond::C1].holds || second || r[Cond::C3].holds;
}

double contraction_factor(const LipschitzPair& lp, const grid::Mesh& mesh) {
    const double T = mesh.T();
    return 2.0 * grid::integrate(mesh, [&](double s) { return (T - s) * lp.sum(s); }, 0.0, T,
                                 coefficient_rule(lp.singular()));
}

double green_contraction_factor(const LipschitzPair& lp, const grid::Mesh& mesh) {
    const double T = mesh.T();
    const std::size_t N = mesh.cells();
    // Per-cell moments of s*L and (T-s)*L; the Green's function
    // g(t,s) = s(T-t)/T for s <= t and t(T-s)/T for s >= t is linear on each
    // cell when t is a node.
    std::vector<double> left(N), right(N);
    for (std::size_t j = 0; j < N; ++j) {
        const auto rule = coefficient_rule(j == 0 && lp.singular());
        left[j] = grid::integrate(mesh, [&](double s) { return s * lp.sum(s); }, mesh.t(j), mesh.t(j + 1), rule);
        right[j] = grid::integrate(mesh, [&](double s) { return (T - s) * lp.sum(s); }, mesh.t(j), mesh.t(j + 1), rule);
    }
    double tail = 0.0;
    for (double v : right) tail += v;
    double head = 0.0;
    double best = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
        const double t = mesh.t(i);
        best = std::max(best, (T - t) / T * head + t / T * tail);
        if (i < N) {
            head += left[i];
            tail -= right[i];
        }
    }
    return best;
}

ConditionReport evaluate(const LipschitzPair& lp, const grid::Mesh& mesh) {
    ConditionReport r;
    r.T = mesh.T();
    r.norms = compute_norms(lp, mesh);
    if (!holder_chain_ok(r.norms, r.T))
        throw std::logic_error(fmt::format("norm chain n1 <= sqrt(T) n2 <= T ninf violated: {} {} {}", r.norms.n_1,
                                           r.norms.n_2, r.norms.n_inf));
    check_uniqueness(r.norms, r.T, r);
    check_max_principle(r.norms, r.T, r);
    r.main_rule_ok = check_main_rule(r, r.T);
    r.q = contraction_factor(lp, mesh);
    r.q_green = green_contraction_factor(lp, mesh);
    const bool any_c = r[Cond::C1].holds || r[Cond::C2].holds || r[Cond::C3].holds;
    r.q_bound_consistent = !any_c || r.q < 1.0;
    return r;
}

ImplicationLattice implication_lattice(double T) {
    if (!(T > 0.0)) throw std::invalid_argument("implication lattice needs T > 0");
    ImplicationLattice lat;
    lat.T = T;
    lat.c_thresholds = {1.0 / (T * T), std::sqrt(3.0 / (2.0 * T * T * T)), 1.0 / (2.0 * T)};
    lat.chat_thresholds = {2.0 / (T * T), std::sqrt(2.0) / T, 1.0 / T};
    lat.c1_implies_c1hat = lat.c_thresholds[0] < lat.chat_thresholds[0];
    lat.c3_implies_c3hat = lat.c_thresholds[2] < lat.chat_thresholds[2];
    const double a = lat.c_thresholds[1];
    const double b = lat.chat_thresholds[1];
    if (std::abs(a - b) <= 1e-12 * std::max(a, b)) lat.c2 = C2Relation::equivalent;
    else if (a < b) lat.c2 = C2Relation::c2_implies_c2hat;
    else lat.c2 = C2Relation::c2hat_implies_c2;
    return lat;
}

}  // namespace devbvp::conditions
