#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace devbvp::expr {

/// Raised by parse(); carries the byte offset of the offending token and
/// the set of tokens the parser would have accepted there.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& what);

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Division by zero, sqrt of a negative, log of a nonpositive number, or any
/// other operation producing a non-finite value.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Variable { t, x, y };

enum class BinaryOp { add, sub, mul, div, pow, lt, le, gt, ge, eq, ne };

enum class Function {
    sin, cos, sqrt, abs, floor, exp, log, min, max, piecewise, harmonic_step
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { number, variable, negate, binary, call };

    Kind kind = Kind::number;
    double value = 0.0;
    Variable var = Variable::t;
    BinaryOp op = BinaryOp::add;
    Function fn = Function::sin;
    std::vector<NodePtr> args;
};

/// Immutable expression over the variables t, x, y.
class Expr {
public:
    Expr();
    explicit Expr(NodePtr root);

    double operator()(double t, double x = 0.0, double y = 0.0) const;

    const Node& root() const noexcept { return *root_; }
    bool uses(Variable v) const;

private:
    NodePtr root_;
};

Expr parse(std::string_view source);

double eval(const Expr& e, double t, double x, double y);

/// Fully parenthesised source text; parse(unparse(e)) evaluates identically.
std::string unparse(const Expr& e);

/// phi(x) = k/n - k*x for |x| in (1/(n+1), 1/n] or (n, n+1], phi(0) = 0.
double harmonic_step(double k, double x);

}  // namespace devbvp::expr
