#include "devbvp/model.hpp"

#include <cmath>

#include <fmt/format.h>

namespace devbvp {

ScalarMap ScalarMap::constant(double c) {
    auto n = std::make_shared<expr::Node>();
    n->value = c;
    return ScalarMap(expr::Expr(std::move(n)));
}

double ScalarMap::operator()(double t) const {
    return std::visit([t](const auto& impl) -> double { return impl(t); }, impl_);
}

double TernaryMap::operator()(double t, double x, double y) const {
    try {
        return e(t, x, y);
    } catch (const expr::DomainError& err) {
        throw NonlinearityError(t, x, y, err.what());
    }
}

NonlinearityError::NonlinearityError(double t_, double x_, double y_, const std::string& cause)
    : std::runtime_error(fmt::format("nonlinearity undefined at (t={}, x={}, y={}): {}", t_, x_, y_, cause)),
      t(t_), x(x_), y(y_) {}

namespace {

std::string join_violations(const std::vector<Violation>& v) {
    std::string out = "invalid problem:";
    for (const auto& item : v) out += "\n  " + item.message;
    return out;
}

void check_deviation(const char* name, const ScalarMap& map, double t, double r, double T,
                     std::vector<Violation>& out) {
    double v;
    try {
        v = map(t);
    } catch (const std::exception& e) {
        out.push_back({t, fmt::format("{}({}) cannot be evaluated: {}", name, t, e.what())});
        return;
    }
    if (!std::isfinite(v)) out.push_back({t, fmt::format("{}({}) is not finite", name, t)});
    else if (v < -r) out.push_back({t, fmt::format("{}({})={} < -r={}", name, t, v, -r)});
    else if (v > T) out.push_back({t, fmt::format("{}({})={} > T={}", name, t, v, T)});
}

}  // namespace

ProblemError::ProblemError(std::vector<Violation> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

std::vector<Violation> validate_problem(const DeviatedBVP& p, const grid::Mesh& mesh) {
    std::vector<Violation> out;
    if (!(p.T > 0.0)) out.push_back({0.0, fmt::format("T={} must be positive", p.T)});
    if (!(p.r >= 0.0)) out.push_back({0.0, fmt::format("r={} must be nonnegative", p.r)});
    if (!std::isfinite(p.B)) out.push_back({p.T, "B is not finite"});
    if (!out.empty()) return out;

    if (std::abs(mesh.T() - p.T) > 1e-12 * p.T || mesh.r() + 1e-12 < p.r)
        out.push_back({0.0, fmt::format("mesh covers [{}, {}] but the problem needs [{}, {}]", -mesh.r(), mesh.T(),
                                         -p.r, p.T)});

    for (std::size_t i = 0; i <= mesh.cells(); ++i) {
        const double t = mesh.t(i);
        check_deviation("tau", p.tau, t, p.r, p.T, out);
        if (p.tau_x) check_deviation("tau_x", *p.tau_x, t, p.r, p.T, out);
    }
    for (std::size_t j = 0; j <= mesh.zero_index(); ++j) {
        const double t = mesh.node(j);
        if (t < -p.r - 1e-12) continue;
        try {
            if (!std::isfinite(p.phi(t))) out.push_back({t, fmt::format("phi({}) is not finite", t)});
        } catch (const std::exception& e) {
            out.push_back({t, fmt::format("phi({}) cannot be evaluated: {}", t, e.what())});
        }
    }
    return out;
}

grid::GridFunction history_extend(const grid::GridFunction& u_on_I, const ScalarMap& phi, double r, double tol) {
    const auto& src = u_on_I.mesh();
    const double phi0 = phi(0.0);
    if (std::abs(u_on_I.on_interval(0) - phi0) > tol)
        throw GluingError(fmt::format("u(0)={} does not match phi(0)={} (tolerance {})", u_on_I.on_interval(0), phi0, tol));

    auto mesh = src.r() == r ? u_on_I.mesh_ptr() : src.with_history(r);
    std::vector<double> v(mesh->size());
    for (std::size_t j = 0; j < mesh->zero_index(); ++j) v[j] = phi(mesh->node(j));
    for (std::size_t i = 0; i <= mesh->cells(); ++i) v[mesh->zero_index() + i] = u_on_I.on_interval(i);
    return grid::GridFunction(std::move(mesh), std::move(v));
}

SolutionClassMember make_solution_member(const grid::GridFunction& u, const ScalarMap& phi, double tol) {
    const auto& m = u.mesh();
    for (std::size_t j = 0; j <= m.zero_index(); ++j) {
        const double d = std::abs(u[j] - phi(m.node(j)));
        if (d > tol) throw GluingError(fmt::format("u differs from phi by {} at t={}", d, m.node(j)));
    }
    return {u, grid::second_difference(u)};
}

Discretization discretize(const DeviatedBVP& p, grid::MeshPtr mesh) {
    if (auto v = validate_problem(p, *mesh); !v.empty()) throw ProblemError(std::move(v));

    Discretization d{p, mesh, {}, {}, {}, {}};
    const std::size_t n = mesh->cells() + 1;
    d.sample_t.resize(n);
    d.loc_x.resize(n);
    d.loc_y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = mesh->t(i);
        if (i == 0 && p.f.singular_at_zero) s = 0.25 * mesh->h();
        d.sample_t[i] = s;
        d.loc_x[i] = mesh->locate(p.tau_x_at(s));
        d.loc_y[i] = mesh->locate(p.tau(s));
    }
    d.phi_nodes.resize(mesh->zero_index() + 1);
    for (std::size_t j = 0; j <= mesh->zero_index(); ++j) d.phi_nodes[j] = p.phi(mesh->node(j));
    return d;
}

double Discretization::eval_f(const grid::GridFunction& u, std::size_t i) const {
    return problem.f(sample_t[i], u.at(loc_x[i]), u.at(loc_y[i]));
}

}  // namespace devbvp
