#include "devbvp/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

namespace devbvp::cli {

using nlohmann::json;

namespace {

json real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

ProblemConfig effective(const ProblemConfig& c, const CommandOptions& o) {
    ProblemConfig e = c;
    if (o.N) {
        if (*o.N < 4) throw ConfigError(fmt::format("--n must be at least 4, got {}", *o.N));
        e.N = *o.N;
    }
    if (o.tol) {
        if (!(*o.tol > 0.0)) throw ConfigError("--tol must be positive");
        e.outer_tol = *o.tol;
    }
    return e;
}

struct Prepared {
    monotone::BracketProblem bp;
    grid::MeshPtr mesh;
};

Prepared prepare(const ProblemConfig& c) {
    Prepared p{build_problem(c), nullptr};
    p.mesh = grid::Mesh::uniform(c.T, c.N, c.r);
    return p;
}

const char* relation_name(conditions::C2Relation r) {
    switch (r) {
        case conditions::C2Relation::c2_implies_c2hat: return "C2 => C2hat";
        case conditions::C2Relation::c2hat_implies_c2: return "C2hat => C2";
        case conditions::C2Relation::equivalent: return "C2 <=> C2hat";
    }
    return "?";
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const ProblemError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return exit_error;
}

}  // namespace

unsigned threads_from_env() {
    unsigned n = 2;
    if (const char* v = std::getenv("DEVBVP_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(v, &end, 10);
        if (end != v && parsed >= 1) n = static_cast<unsigned>(parsed);
        else n = 1;
    }
    return std::max(1u, n);
}

json to_json(const conditions::ConditionReport& r) {
    json j;
    j["T"] = r.T;
    j["n_inf"] = real(r.norms.n_inf);
    j["n_2"] = real(r.norms.n_2);
    j["n_1"] = real(r.norms.n_1);
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        const std::string k = conditions::cond_names[i];
        const auto& e = r.entries[i];
        j[k + ".holds"] = e.holds;
        j[k + ".lhs"] = real(e.lhs);
        j[k + ".threshold"] = real(e.threshold);
        j[k + ".margin"] = real(e.margin);
        j[k + ".boundary"] = e.boundary;
    }
    j["q"] = real(r.q);
    j["q_green"] = real(r.q_green);
    j["q_bound_consistent"] = r.q_bound_consistent;
    j["main_rule_ok"] = r.main_rule_ok;
    return j;
}

json to_json(const monotone::VerificationReport& r) {
    return json{{"is_valid", r.is_valid},
                {"max_differential_defect", r.max_differential_defect},
                {"differential_tolerance", r.differential_tolerance},
                {"history_order_defect", r.boundary_defects[0]},
                {"history_growth_defect", r.boundary_defects[1]},
                {"endpoint_defect", r.boundary_defects[2]},
                {"boundary_tolerance", r.boundary_tolerance}};
}

int cmd_check(const ProblemConfig& c0, const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto c = effective(c0, o);
        const auto p = prepare(c);
        const auto report = conditions::evaluate(p.bp.lp, *p.mesh);
        out << to_json(report).dump(2) << '\n';
        return report.main_rule_ok ? exit_ok : exit_conditions;
    });
}

int cmd_verify(const ProblemConfig& c0, const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto c = effective(c0, o);
        const auto p = prepare(c);
        const auto d = discretize(p.bp.problem, p.mesh);
        const auto alpha = grid::GridFunction::sample(p.mesh, [&](double t) { return p.bp.alpha(t); });
        const auto beta = grid::GridFunction::sample(p.mesh, [&](double t) { return p.bp.beta(t); });
        const auto lo = monotone::verify_lower(d, alpha);
        const auto hi = monotone::verify_upper(d, beta);
        double ordering = 0.0;
        for (std::size_t i = 0; i < alpha.values().size(); ++i) ordering = std::max(ordering, alpha[i] - beta[i]);
        out << json{{"lower", to_json(lo)}, {"upper", to_json(hi)}, {"alpha_minus_beta_max", ordering}}.dump(2) << '\n';
        return lo.is_valid && hi.is_valid ? exit_ok : exit_conditions;
    });
}

int cmd_solve(const ProblemConfig& c0, const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const auto start = std::chrono::steady_clock::now();
        const auto c = effective(c0, o);
        const auto bp = build_problem(c);
        auto ro = run_options(c);
        ro.force = o.force;
        ro.monotone.threads = o.threads;

        monotone::BracketRun run;
        try {
            run = monotone::run_bracket(bp, ro);
        } catch (const monotone::PreconditionError& e) {
            err << "refusing to solve: " << e.what() << " (use --force to override)\n";
            return exit_conditions;
        } catch (const monotone::OrderingViolation& e) {
            err << "error: " << e.what() << '\n';
            return exit_ordering;
        } catch (const monotone::InnerSolveError& e) {
            err << "error: inner solve failed: " << e.what() << '\n';
            return exit_nonconvergence;
        } catch (const contraction::ContractionRefused& e) {
            err << "error: " << e.what() << '\n';
            return exit_nonconvergence;
        }
        for (const auto& w : run.warnings) err << "warning: " << w << '\n';

        const auto& b = *run.bracket;
        std::filesystem::create_directories(o.out_dir);
        {
            std::ofstream f(o.out_dir / "bracket.csv");
            monotone::write_bracket_csv(f, *run.pair, b);
        }
        {
            std::ofstream f(o.out_dir / "convergence.csv");
            monotone::write_log_csv(f, b);
        }
        auto seq = [](const monotone::SequenceSummary& s) {
            return json{{"steps", s.steps},           {"converged", s.converged},
                        {"stalled", s.stalled},       {"final_delta", s.final_delta},
                        {"residual_L1", s.residual_L1}, {"inner_iterations", s.inner_iterations},
                        {"max_slope", s.max_slope}};
        };
        double max_gap = 0.0;
        for (double g : b.gap.values()) max_gap = std::max(max_gap, g);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json summary{{"name", c.name},
                     {"N", run.mesh->cells()},
                     {"refined", run.refined},
                     {"lower", seq(b.lower)},
                     {"upper", seq(b.upper)},
                     {"monotonicity_defect", b.monotonicity_defect},
                     {"max_gap", max_gap},
                     {"u_star_low_T", b.u_star_low.on_interval(run.mesh->cells())},
                     {"u_star_high_T", b.u_star_high.on_interval(run.mesh->cells())},
                     {"slope_bound", b.slope_bound ? json(*b.slope_bound) : json(nullptr)},
                     {"slope_bound_ok", b.slope_bound_ok},
                     {"conditions", to_json(run.conditions)},
                     {"warnings", run.warnings},
                     {"wall_time_s", wall}};
        {
            std::ofstream f(o.out_dir / "summary.json");
            f << summary.dump(2) << '\n';
        }
        out << fmt::format("bracket written to {} ({} + {} outer steps, gap {:.3g})\n", o.out_dir.string(),
                           b.lower.steps, b.upper.steps, max_gap);
        return b.converged() ? exit_ok : exit_nonconvergence;
    });
}

int cmd_certify(const ProblemConfig& c, const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (!c.certify && !(o.certify_window && o.certify_var))
            throw ConfigError("no certify section in the configuration; pass --var and --window");
        CertifySpec s;
        s.expression = c.f;
        if (c.certify) s = *c.certify;
        if (o.certify_var) s.variable = *o.certify_var;
        if (o.certify_window) s.window = *o.certify_window;
        if (o.certify_jumps) s.jumps = *o.certify_jumps;
        const auto pf = build_certify(s);
        try {
            const auto cert = jumps::shift_constant(pf);
            out << fmt::format("{:.17g}\n", cert.shift);
            err << fmt::format("derivative infimum M = {:.17g} on [{}, {}] ({} jump points, window-local)\n", cert.M,
                               pf.a(), pf.b(), pf.jumps().size());
            return exit_ok;
        } catch (const jumps::CertificateRefused& e) {
            err << "certificate refused: " << e.what() << '\n';
            return exit_conditions;
        }
    });
}

int cmd_report(const ProblemConfig& c0, const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto c = effective(c0, o);
        const auto p = prepare(c);
        json j;
        j["name"] = c.name;
        j["config"] = to_json(c);
        json violations = json::array();
        for (const auto& v : validate_problem(p.bp.problem, *p.mesh)) violations.push_back(v.message);
        j["violations"] = violations;
        const auto lat = conditions::implication_lattice(c.T);
        j["implications"] = {{"C1 => C1hat", lat.c1_implies_c1hat},
                             {"C3 => C3hat", lat.c3_implies_c3hat},
                             {"C2 relation", relation_name(lat.c2)}};
        if (violations.empty()) {
            j["conditions"] = to_json(conditions::evaluate(p.bp.lp, *p.mesh));
            const auto d = discretize(p.bp.problem, p.mesh);
            const auto alpha = grid::GridFunction::sample(p.mesh, [&](double t) { return p.bp.alpha(t); });
            const auto beta = grid::GridFunction::sample(p.mesh, [&](double t) { return p.bp.beta(t); });
            j["lower"] = to_json(monotone::verify_lower(d, alpha));
            j["upper"] = to_json(monotone::verify_upper(d, beta));
        }
        out << j.dump(2) << '\n';
        return exit_ok;
    });
}

}  // namespace devbvp::cli
