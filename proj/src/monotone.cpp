#include "devbvp/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>

#include <fmt/format.h>

namespace devbvp::monotone {

LowerUpperPair::LowerUpperPair(grid::GridFunction a, grid::GridFunction b, double eps)
    : alpha(std::move(a)), beta(std::move(b)) {
    if (alpha.values().size() != beta.values().size())
        throw std::invalid_argument("alpha and beta live on different meshes");
    for (std::size_t i = 0; i < alpha.values().size(); ++i)
        if (alpha[i] > beta[i] + eps)
            throw std::invalid_argument(fmt::format("alpha > beta at t={} ({} > {})", alpha.mesh().node(i), alpha[i], beta[i]));
}

namespace {

VerificationReport verify(const Discretization& d, const grid::GridFunction& w, const VerifyOptions& o, bool lower) {
    const auto& mesh = *d.mesh;
    if (w.values().size() != mesh.size()) throw std::invalid_argument("candidate lives on a different mesh");
    VerificationReport rep;
    rep.differential_defect = grid::second_difference(w);
    for (std::size_t k = 0; k < rep.differential_defect.values.size(); ++k) {
        const std::size_t i = k + 1;
        const double minus_w2 = -rep.differential_defect.values[k];
        const double f = d.problem.f(mesh.t(i), w.at(d.loc_x[i]), w.at(d.loc_y[i]));
        const double defect = std::max(0.0, lower ? minus_w2 - f : f - minus_w2);
        rep.differential_defect.values[k] = defect;
        rep.max_differential_defect = std::max(rep.max_differential_defect, defect);
    }

    const std::size_t z = mesh.zero_index();
    const double phi0 = d.phi_nodes[z];
    const double w0 = w[z];
    for (std::size_t j = 0; j <= z; ++j) {
        const double phi = d.phi_nodes[j];
        const double order = lower ? w[j] - phi : phi - w[j];
        const double growth = lower ? (phi - w[j]) - (phi0 - w0) : (w[j] - phi) - (w0 - phi0);
        rep.boundary_defects[0] = std::max(rep.boundary_defects[0], order);
        rep.boundary_defects[1] = std::max(rep.boundary_defects[1], growth);
    }
    const double wT = w.on_interval(mesh.cells());
    rep.boundary_defects[2] = std::max(0.0, lower ? wT - d.problem.B : d.problem.B - wT);

    rep.differential_tolerance = o.eps_ver + o.h2_factor * mesh.h() * mesh.h();
    rep.boundary_tolerance = o.eps_ver;
    rep.is_valid = rep.max_differential_defect <= rep.differential_tolerance &&
                   std::all_of(rep.boundary_defects.begin(), rep.boundary_defects.end(),
                               [&](double v) { return v <= rep.boundary_tolerance; });
    return rep;
}

}  // namespace

VerificationReport verify_lower(const Discretization& d, const grid::GridFunction& alpha, const VerifyOptions& o) {
    return verify(d, alpha, o, true);
}

VerificationReport verify_upper(const Discretization& d, const grid::GridFunction& beta, const VerifyOptions& o) {
    return verify(d, beta, o, false);
}

MonotoneOperator::MonotoneOperator(const Discretization& d, const conditions::LipschitzPair& lp,
                                   contraction::PicardSettings s)
    : d_(d), L1_(d.samples()), L2_(d.samples()), settings_(s) {
    for (std::size_t i = 0; i < d.samples(); ++i) {
        // Sample 0 sits at t=0 unless f is singular there; coefficients
        // singular at 0 are read at h/4 like the shifted sample.
        const double t = d.sample_t[i];
        const double tc = t == 0.0 ? 0.25 * d.mesh->h() : t;
        L1_[i] = lp.L1(lp.L1_singular_at_zero ? tc : t);
        L2_[i] = lp.L2(lp.L2_singular_at_zero ? tc : t);
    }
}

contraction::PicardResult MonotoneOperator::solve(const grid::GridFunction& gamma) const {
    std::vector<double> frozen(d_.samples());
    for (std::size_t i = 0; i < frozen.size(); ++i) {
        const double gx = gamma.at(d_.loc_x[i]);
        const double gy = gamma.at(d_.loc_y[i]);
        frozen[i] = d_.problem.f(d_.sample_t[i], gx, gy) + L1_[i] * gx + L2_[i] * gy;
    }
    const contraction::Forcing forcing = [&](std::size_t i, double x, double y) {
        return frozen[i] - L1_[i] * x - L2_[i] * y;
    };
    try {
        return contraction::picard_solve(d_, forcing, settings_, gamma);
    } catch (const contraction::NonConvergenceError& e) {
        throw InnerSolveError(e.what(), gamma, e.deltas());
    }
}

grid::GridFunction apply_G(const Discretization& d, const conditions::LipschitzPair& lp,
                           const grid::GridFunction& gamma, const contraction::PicardSettings& s) {
    return MonotoneOperator(d, lp, s)(gamma);
}

const char* side_name(Side s) { return s == Side::lower ? "lower" : "upper"; }

OrderingViolation::OrderingViolation(Side side_, int step_, std::size_t node_, double t_, double amount_,
                                     const std::string& what)
    : std::runtime_error(what), side(side_), step(step_), node(node_), t(t_), amount(amount_) {}

namespace {

struct SequenceRun {
    std::vector<grid::GridFunction> iterates;
    std::vector<LogRow> log;
    SequenceSummary summary;
    double ordering_defect = 0.0;
};

double max_slope(const grid::GridFunction& u) {
    const auto& m = u.mesh();
    double s = 0.0;
    for (std::size_t i = 0; i < m.cells(); ++i)
        s = std::max(s, std::abs(u.on_interval(i + 1) - u.on_interval(i)) / m.h());
    return s;
}

[[noreturn]] void violation(Side side, int step, const grid::GridFunction& u, std::size_t node, double amount,
                            const char* what) {
    throw OrderingViolation(side, step, node, u.mesh().node(node), amount,
                            fmt::format("maximum-principle violation on the {} sequence at step {}: {} by {} at t={}",
                                        side_name(side), step, what, amount, u.mesh().node(node)));
}

SequenceRun run_sequence(const MonotoneOperator& G, const LowerUpperPair& lu, Side side, const MonotoneOptions& o) {
    const Discretization& d = G.discretization();
    SequenceRun run;
    run.iterates.push_back(side == Side::lower ? lu.alpha : lu.beta);
    int quiet_steps = 0;
    bool quiet_increase = false;
    double prev_delta = std::numeric_limits<double>::infinity();

    for (int step = 1; step <= o.max_outer; ++step) {
        const auto& cur = run.iterates.back();
        auto inner = G.solve(cur);
        grid::GridFunction next = std::move(inner.u);
        run.summary.inner_iterations += inner.iterations;

        double ordering = 0.0;
        std::size_t ordering_node = 0;
        double outside = 0.0;
        std::size_t outside_node = 0;
        for (std::size_t i = 0; i < next.values().size(); ++i) {
            const double back = side == Side::lower ? cur[i] - next[i] : next[i] - cur[i];
            if (back > ordering) { ordering = back; ordering_node = i; }
            const double out = std::max(lu.alpha[i] - next[i], next[i] - lu.beta[i]);
            if (out > outside) { outside = out; outside_node = i; }
        }
        if (ordering > o.eps_mono)
            violation(side, step, next, ordering_node, ordering, "iterates lost monotonicity");
        if (outside > o.eps_mono) violation(side, step, next, outside_node, outside, "iterate left [alpha, beta]");

        const double delta = grid::sup_distance(next, cur);
        run.ordering_defect = std::max(run.ordering_defect, ordering);
        run.log.push_back({step, side, delta, ordering, contraction::residual_L1(d, next)});
        run.summary.max_slope = std::max(run.summary.max_slope, max_slope(next));
        run.iterates.push_back(std::move(next));
        run.summary.steps = step;
        run.summary.final_delta = delta;

        if (delta <= o.outer_tol) {
            run.summary.converged = true;
            break;
        }
        if (delta < 10.0 * o.outer_tol) {
            ++quiet_steps;
            if (delta >= prev_delta) quiet_increase = true;
            if (quiet_steps >= 5 && quiet_increase) {
                run.summary.converged = true;
                run.summary.stalled = true;
                break;
            }
        } else {
            quiet_steps = 0;
            quiet_increase = false;
        }
        prev_delta = delta;
    }
    run.summary.residual_L1 = run.log.empty() ? contraction::residual_L1(d, run.iterates.back()) : run.log.back().residual_L1;
    return run;
}

}  // namespace

ExtremalBracket iterate_extremal(const Discretization& d, const conditions::LipschitzPair& lp,
                                 const LowerUpperPair& lu, const contraction::PicardSettings& s,
                                 const MonotoneOptions& o) {
    const MonotoneOperator G(d, lp, s);
    SequenceRun low, high;
    if (o.threads >= 2) {
        auto fut = std::async(std::launch::async, [&] { return run_sequence(G, lu, Side::upper, o); });
        low = run_sequence(G, lu, Side::lower, o);
        high = fut.get();
    } else {
        low = run_sequence(G, lu, Side::lower, o);
        high = run_sequence(G, lu, Side::upper, o);
    }

    // alpha_n <= beta_n for every step, holding the shorter sequence at its limit.
    const std::size_t steps = std::max(low.iterates.size(), high.iterates.size());
    for (std::size_t k = 0; k < steps; ++k) {
        const auto& a = low.iterates[std::min(k, low.iterates.size() - 1)];
        const auto& b = high.iterates[std::min(k, high.iterates.size() - 1)];
        for (std::size_t i = 0; i < a.values().size(); ++i)
            if (a[i] - b[i] > o.eps_mono)
                violation(Side::lower, static_cast<int>(k), a, i, a[i] - b[i], "lower iterate exceeds upper iterate");
    }

    const auto& u_low = low.iterates.back();
    const auto& u_high = high.iterates.back();
    std::vector<double> gap(u_low.values().size());
    for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = u_high[i] - u_low[i];

    ExtremalBracket b{std::move(low.iterates), std::move(high.iterates), u_low, u_high,
                      grid::GridFunction(d.mesh, std::move(gap)), std::max(low.ordering_defect, high.ordering_defect),
                      low.summary, high.summary, std::move(low.log), std::nullopt, true};
    b.log.insert(b.log.end(), high.log.begin(), high.log.end());

    if (o.psi) {
        const auto& mesh = *d.mesh;
        const auto rule = conditions::coefficient_rule(o.psi->singular_at_zero);
        const double psi_l1 = grid::integrate(mesh, [&](double t) { return std::abs(o.psi->psi(t)); }, 0.0, mesh.T(), rule);
        const double l1 = grid::integrate(mesh, [&](double t) { return lp.sum(t); }, 0.0, mesh.T(),
                                          conditions::coefficient_rule(lp.singular()));
        const double phi0 = d.phi_nodes[mesh.zero_index()];
        const double width = grid::sup_distance(lu.beta, lu.alpha);
        b.slope_bound = std::abs(d.problem.B - phi0) / mesh.T() + psi_l1 + l1 * width + 0.1;
        b.slope_bound_ok = std::max(b.lower.max_slope, b.upper.max_slope) <= *b.slope_bound;
    }
    return b;
}

void write_bracket_csv(std::ostream& os, const LowerUpperPair& lu, const ExtremalBracket& b) {
    os << "t,alpha,u_star_low,u_star_high,beta\n";
    const auto& mesh = b.u_star_low.mesh();
    for (std::size_t i = 0; i < mesh.size(); ++i)
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", mesh.node(i), lu.alpha[i], b.u_star_low[i],
                          b.u_star_high[i], lu.beta[i]);
}

void write_log_csv(std::ostream& os, const ExtremalBracket& b) {
    os << "step,side,delta_sup,ordering_defect,residual_L1\n";
    for (const auto& r : b.log)
        os << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", r.step, side_name(r.side), r.delta_sup, r.ordering_defect,
                          r.residual_L1);
}

BracketRun run_bracket(const BracketProblem& bp, const RunOptions& o) {
    BracketRun run;
    std::size_t N = o.N;
    for (int attempt = 0;; ++attempt) {
        run.mesh = grid::Mesh::uniform(bp.problem.T, N, bp.problem.r);
        const Discretization d = discretize(bp.problem, run.mesh);
        run.conditions = conditions::evaluate(bp.lp, *run.mesh);
        run.pair.emplace(grid::GridFunction::sample(run.mesh, [&](double t) { return bp.alpha(t); }),
                         grid::GridFunction::sample(run.mesh, [&](double t) { return bp.beta(t); }));
        run.lower_check = verify_lower(d, run.pair->alpha, o.verify);
        run.upper_check = verify_upper(d, run.pair->beta, o.verify);

        std::vector<std::string> problems;
        if (!run.conditions.main_rule_ok) problems.emplace_back("smallness conditions of the main rule do not hold");
        if (!run.lower_check.is_valid) problems.emplace_back("alpha is not a lower solution");
        if (!run.upper_check.is_valid) problems.emplace_back("beta is not an upper solution");
        for (auto& p : problems) {
            if (!o.force) throw PreconditionError(p);
            if (attempt == 0) run.warnings.push_back("forced: " + p);
        }

        auto picard = o.picard;
        picard.q_estimate = run.conditions.q_green;
        try {
            run.bracket = iterate_extremal(d, bp.lp, *run.pair, picard, o.monotone);
            return run;
        } catch (const OrderingViolation& v) {
            if (!o.retry_on_violation || attempt > 0) throw;
            run.warnings.push_back(fmt::format("{}; retrying with N={}", v.what(), 2 * N));
            run.refined = true;
            N *= 2;
        }
    }
}

}  // namespace devbvp::monotone
