#include "devbvp/config.hpp"

#include <fstream>
#include <numbers>

#include <fmt/format.h>

namespace devbvp::cli {

namespace {

using nlohmann::json;

expr::Expr parse_field(const std::string& field, const std::string& source) {
    try {
        return expr::parse(source);
    } catch (const expr::SyntaxError& e) {
        throw ConfigError(fmt::format("field '{}': {}", field, e.what()));
    }
}

double number_field(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto e = parse_field(key, v.get<std::string>());
        if (e.uses(expr::Variable::t) || e.uses(expr::Variable::x) || e.uses(expr::Variable::y))
            throw ConfigError(fmt::format("field '{}' must be a constant expression", key));
        return e(0.0);
    }
    throw ConfigError(fmt::format("field '{}' must be a number or a constant expression", key));
}

std::string expr_field(const json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return fmt::format("{:.17g}", v.get<double>());
    throw ConfigError(fmt::format("field '{}' must be an expression string", key));
}

expr::Variable variable_from(const std::string& s) {
    if (s == "t") return expr::Variable::t;
    if (s == "x") return expr::Variable::x;
    if (s == "y") return expr::Variable::y;
    throw ConfigError(fmt::format("unknown slice variable '{}' (expected t, x or y)", s));
}

const char* variable_name(expr::Variable v) {
    return v == expr::Variable::t ? "t" : v == expr::Variable::x ? "x" : "y";
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

ProblemConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    ProblemConfig c;
    try {
        c.name = j.value("name", c.name);
        c.T = number_field(j, "T", c.T);
        c.r = number_field(j, "r", c.r);
        c.B = number_field(j, "B", c.B);
        c.f = expr_field(j, "f", c.f);
        c.tau = expr_field(j, "tau", c.tau);
        if (j.contains("tau_x")) c.tau_x = expr_field(j, "tau_x", "t");
        c.phi = expr_field(j, "phi", c.phi);
        c.alpha = expr_field(j, "alpha", c.alpha);
        c.beta = expr_field(j, "beta", c.beta);
        c.L1 = expr_field(j, "L1", c.L1);
        c.L2 = expr_field(j, "L2", c.L2);
        if (j.contains("psi")) c.psi = expr_field(j, "psi", "0");
        if (j.contains("singular_at_zero")) {
            const auto& s = j.at("singular_at_zero");
            c.f_singular = s.value("f", false);
            c.L1_singular = s.value("L1", false);
            c.L2_singular = s.value("L2", false);
            c.psi_singular = s.value("psi", false);
        }
        if (j.contains("mesh")) c.N = j.at("mesh").value("N", c.N);
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            c.tol_sup = t.value("tol_sup", c.tol_sup);
            c.outer_tol = t.value("outer_tol", c.outer_tol);
            c.eps_mono = t.value("eps_mono", c.eps_mono);
            c.max_outer = t.value("max_outer", c.max_outer);
        }
        if (j.contains("certify")) {
            const auto& s = j.at("certify");
            CertifySpec spec;
            spec.expression = expr_field(s, "expr", c.f);
            spec.variable = variable_from(s.value("variable", std::string("y")));
            if (s.contains("fixed")) {
                const auto& fx = s.at("fixed");
                spec.fixed = {fx.value("t", 0.0), fx.value("x", 0.0), fx.value("y", 0.0)};
            }
            const auto w = s.at("window").get<std::vector<double>>();
            if (w.size() != 2) throw ConfigError("certify.window must have two entries");
            spec.window = {w[0], w[1]};
            spec.jumps = s.value("jumps", std::vector<double>{});
            c.certify = spec;
        }
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("malformed configuration: {}", e.what()));
    }

    if (c.N < 4) throw ConfigError(fmt::format("mesh.N must be at least 4, got {}", c.N));
    if (!(c.tol_sup > 0.0) || !(c.outer_tol > 0.0) || !(c.eps_mono > 0.0) || c.max_outer < 1)
        throw ConfigError("tolerances must be positive");
    // Surface syntax errors at load time.
    build_problem(c);
    if (c.certify) parse_field("certify.expr", c.certify->expression);
    return c;
}

ProblemConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError(fmt::format("cannot open configuration file {}", file.string()));
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", file.string(), e.what()));
    }
    return parse_config(j);
}

json to_json(const ProblemConfig& c) {
    json j{{"name", c.name}, {"T", c.T}, {"r", c.r}, {"B", c.B}, {"f", c.f}, {"tau", c.tau}, {"phi", c.phi},
           {"alpha", c.alpha}, {"beta", c.beta}, {"L1", c.L1}, {"L2", c.L2}};
    if (c.tau_x) j["tau_x"] = *c.tau_x;
    if (c.psi) j["psi"] = *c.psi;
    j["singular_at_zero"] = {{"f", c.f_singular}, {"L1", c.L1_singular}, {"L2", c.L2_singular}, {"psi", c.psi_singular}};
    j["mesh"] = {{"N", c.N}};
    j["tolerances"] = {{"tol_sup", c.tol_sup}, {"outer_tol", c.outer_tol}, {"eps_mono", c.eps_mono},
                       {"max_outer", c.max_outer}};
    if (c.certify) {
        const auto& s = *c.certify;
        j["certify"] = {{"expr", s.expression},
                        {"variable", variable_name(s.variable)},
                        {"fixed", {{"t", s.fixed[0]}, {"x", s.fixed[1]}, {"y", s.fixed[2]}}},
                        {"window", {s.window[0], s.window[1]}},
                        {"jumps", s.jumps}};
    }
    return j;
}

std::vector<std::string> builtin_names() { return {"example1", "example2", "trivial_constant", "trivial_linear"}; }

ProblemConfig builtin_config(const std::string& name, double k) {
    ProblemConfig c;
    c.name = name;
    if (name == "example1") {
        // Delay problem with integer-part nonlinearity on [0,2], history cos(pi t/2) on [-1,0].
        c.T = 2.0;
        c.r = 1.0;
        c.B = std::numbers::pi / 4.0;
        c.f = "floor(t*x) - (1/9)*y*sin(y*pi/(2*floor(abs(y))+2))";
        c.tau = "t-1";
        c.phi = "cos(pi*t/2)";
        c.alpha = "0";
        c.beta = "piecewise(t < 0, cos(pi*t/2), 1 - t*(t-2))";
        c.L1 = "0";
        c.L2 = "(1+pi/2)/9";
        c.psi = "4";
        c.certify = CertifySpec{c.f, expr::Variable::y, {1.0, 0.0, 0.0}, {0.0, 3.0}, {1.0, 2.0}};
        return c;
    }
    if (name == "example2") {
        // Delay and advance on [0,1]; f blows up like 1/sqrt(t) at t = 0.
        if (!(k > 0.0)) throw ConfigError(fmt::format("example2 needs k > 0, got {}", k));
        c.name = fmt::format("example2(k={})", k);
        c.T = 1.0;
        c.r = 0.0;
        c.B = 0.0;
        c.f = fmt::format("sin(t) + harmonic_step({}, x) + y/(5*sqrt(t))", num(k));
        c.tau = "sqrt(t)";
        c.tau_x = "sqrt(1-t)";
        c.phi = "0";
        c.alpha = "t^2 - t";
        c.beta = "t - t^2";
        c.L1 = num(k);
        c.L2 = "1/(5*sqrt(t))";
        c.psi = fmt::format("sin(t) + {}/2 + 1/(20*sqrt(t))", num(k));
        c.f_singular = true;
        c.L2_singular = true;
        c.psi_singular = true;
        CertifySpec s;
        s.expression = fmt::format("harmonic_step({}, x)", num(k));
        s.variable = expr::Variable::x;
        s.window = {0.05, 0.25};
        for (int n = 19; n >= 5; --n) s.jumps.push_back(1.0 / n);
        c.certify = s;
        return c;
    }
    if (name == "trivial_constant") {
        // -u'' = 2, u(0) = u(1) = 0: u = t(1-t).
        c.f = "2";
        c.alpha = "0";
        c.beta = "t*(1-t)";
        c.psi = "2";
        return c;
    }
    if (name == "trivial_linear") {
        // -u'' = 0 with a delayed argument reaching into a zero history, u(1) = 1: u = t.
        c.r = 1.0;
        c.B = 1.0;
        c.f = "0";
        c.tau = "t-1";
        c.alpha = "0";
        c.beta = "1";
        c.psi = "0";
        return c;
    }
    throw ConfigError(fmt::format("unknown builtin '{}'", name));
}

monotone::BracketProblem build_problem(const ProblemConfig& c) {
    monotone::BracketProblem bp;
    bp.problem.T = c.T;
    bp.problem.r = c.r;
    bp.problem.B = c.B;
    bp.problem.tau = ScalarMap(parse_field("tau", c.tau));
    if (c.tau_x) bp.problem.tau_x = ScalarMap(parse_field("tau_x", *c.tau_x));
    bp.problem.phi = ScalarMap(parse_field("phi", c.phi));
    bp.problem.f = TernaryMap{parse_field("f", c.f), c.f_singular};
    bp.lp.L1 = ScalarMap(parse_field("L1", c.L1));
    bp.lp.L2 = ScalarMap(parse_field("L2", c.L2));
    bp.lp.L1_singular_at_zero = c.L1_singular;
    bp.lp.L2_singular_at_zero = c.L2_singular;
    bp.alpha = ScalarMap(parse_field("alpha", c.alpha));
    bp.beta = ScalarMap(parse_field("beta", c.beta));
    return bp;
}

jumps::PiecewiseFn build_certify(const CertifySpec& s) {
    return jumps::PiecewiseFn(parse_field("certify.expr", s.expression), s.variable, s.jumps, s.window[0],
                              s.window[1], s.fixed);
}

monotone::RunOptions run_options(const ProblemConfig& c) {
    monotone::RunOptions o;
    o.N = c.N;
    o.picard.tol_sup = c.tol_sup;
    o.monotone.outer_tol = c.outer_tol;
    o.monotone.eps_mono = c.eps_mono;
    o.monotone.max_outer = c.max_outer;
    if (c.psi) o.monotone.psi = monotone::PsiBound{ScalarMap(parse_field("psi", *c.psi)), c.psi_singular};
    return o;
}

}  // namespace devbvp::cli
