#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "devbvp/expr.hpp"
#include "devbvp/grid.hpp"

namespace devbvp {

/// A function of t given either in closed form or by grid values.
class ScalarMap {
public:
    ScalarMap() = default;
    explicit ScalarMap(expr::Expr e) : impl_(std::move(e)) {}
    explicit ScalarMap(grid::GridFunction g) : impl_(std::move(g)) {}

    static ScalarMap parse(std::string_view source) { return ScalarMap(expr::parse(source)); }
    static ScalarMap constant(double c);

    double operator()(double t) const;

    bool is_expression() const noexcept { return std::holds_alternative<expr::Expr>(impl_); }
    const expr::Expr* expression() const noexcept { return std::get_if<expr::Expr>(&impl_); }

private:
    std::variant<expr::Expr, grid::GridFunction> impl_;
};

/// f(t, x, y); may be flagged singular at t = 0.
struct TernaryMap {
    expr::Expr e;
    bool singular_at_zero = false;

    double operator()(double t, double x, double y) const;
};

/// Evaluation failure of f along a trajectory, with the offending point.
class NonlinearityError : public std::runtime_error {
public:
    NonlinearityError(double t, double x, double y, const std::string& cause);

    double t, x, y;
};

/// -u''(t) = f(t, u(tau_x(t)), u(tau(t))) on [0,T], u = phi on [-r,0], u(T) = B.
/// tau_x defaults to the identity.
struct DeviatedBVP {
    double T = 1.0;
    double r = 0.0;
    double B = 0.0;
    ScalarMap tau;
    std::optional<ScalarMap> tau_x;
    ScalarMap phi;
    TernaryMap f;

    double tau_x_at(double t) const { return tau_x ? (*tau_x)(t) : t; }
};

struct Violation {
    double t = 0.0;
    std::string message;
};

std::vector<Violation> validate_problem(const DeviatedBVP& p, const grid::Mesh& mesh);

class ProblemError : public std::runtime_error {
public:
    explicit ProblemError(std::vector<Violation> violations);

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

class GluingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Glue phi on [-r,0] to the [0,T] part of u. Only the [0,T] values of u are
/// read, so the operation is idempotent.
grid::GridFunction history_extend(const grid::GridFunction& u_on_I, const ScalarMap& phi, double r,
                                  double tol = 1e-9);

/// A grid function over [-r,T] that agrees with phi on the history segment,
/// with its second differences on [0,T].
struct SolutionClassMember {
    grid::GridFunction u;
    grid::InteriorValues second_difference;
};

SolutionClassMember make_solution_member(const grid::GridFunction& u, const ScalarMap& phi, double tol = 1e-9);

/// A problem bound to a mesh. Deviated points are located once; sample i is
/// the i-th node of [0,T], except that node 0 is shifted to h/4 when f is
/// singular at t = 0.
struct Discretization {
    DeviatedBVP problem;
    grid::MeshPtr mesh;
    std::vector<double> sample_t;
    std::vector<grid::CellLocation> loc_x;
    std::vector<grid::CellLocation> loc_y;
    std::vector<double> phi_nodes;  // phi at the history nodes and at 0

    std::size_t samples() const noexcept { return sample_t.size(); }
    double eval_f(const grid::GridFunction& u, std::size_t i) const;
};

/// Throws ProblemError when validate_problem reports violations.
Discretization discretize(const DeviatedBVP& p, grid::MeshPtr mesh);

}  // namespace devbvp
