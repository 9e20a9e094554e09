#include "devbvp/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

namespace devbvp::expr {

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
    : std::runtime_error(what), offset_(offset), expected_(std::move(expected)) {}

namespace {

constexpr int max_depth = 200;

enum class Tok { number, ident, lparen, rparen, comma, plus, minus, star, slash, caret,
                 lt, le, gt, ge, eq, ne, end };

struct Token {
    Tok kind = Tok::end;
    std::size_t offset = 0;
    std::string_view text;
    double number = 0.0;
};

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

[[noreturn]] void fail(std::size_t offset, std::vector<std::string> expected, std::string_view found) {
    auto msg = fmt::format("syntax error at byte {}: found '{}', expected one of: {}", offset, found, join(expected));
    throw SyntaxError(offset, std::move(expected), msg);
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        Token tok;
        tok.offset = pos_;
        if (pos_ >= src_.size()) {
            tok.kind = Tok::end;
            return tok;
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
                ++end;
            tok.kind = Tok::ident;
            tok.text = src_.substr(pos_, end - pos_);
            pos_ = end;
            return tok;
        }
        auto two = [&](char second) { return pos_ + 1 < src_.size() && src_[pos_ + 1] == second; };
        std::size_t len = 1;
        switch (c) {
            case '(': tok.kind = Tok::lparen; break;
            case ')': tok.kind = Tok::rparen; break;
            case ',': tok.kind = Tok::comma; break;
            case '+': tok.kind = Tok::plus; break;
            case '-': tok.kind = Tok::minus; break;
            case '*': tok.kind = Tok::star; break;
            case '/': tok.kind = Tok::slash; break;
            case '^': tok.kind = Tok::caret; break;
            case '<':
                if (two('=')) { tok.kind = Tok::le; len = 2; } else tok.kind = Tok::lt;
                break;
            case '>':
                if (two('=')) { tok.kind = Tok::ge; len = 2; } else tok.kind = Tok::gt;
                break;
            case '=':
                if (!two('=')) fail(pos_, {"=="}, src_.substr(pos_, 1));
                tok.kind = Tok::eq; len = 2;
                break;
            case '!':
                if (!two('=')) fail(pos_, {"!="}, src_.substr(pos_, 1));
                tok.kind = Tok::ne; len = 2;
                break;
            default:
                fail(pos_, {"number", "identifier", "operator", "(", ")", ","}, src_.substr(pos_, 1));
        }
        tok.text = src_.substr(pos_, len);
        pos_ += len;
        return tok;
    }

private:
    Token number() {
        Token tok;
        tok.kind = Tok::number;
        tok.offset = pos_;
        std::size_t end = pos_;
        bool digits = false;
        while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) { ++end; digits = true; }
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) { ++end; digits = true; }
        }
        if (!digits) fail(pos_, {"digit"}, src_.substr(pos_, 1));
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t exp = end + 1;
            if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
            if (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) {
                end = exp;
                while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
            }
        }
        tok.text = src_.substr(pos_, end - pos_);
        // from_chars rejects a leading '.', so parse via a padded copy.
        std::string buf = tok.text.front() == '.' ? "0" + std::string(tok.text) : std::string(tok.text);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), value);
        if (ec != std::errc() || ptr != buf.data() + buf.size() || !std::isfinite(value))
            fail(pos_, {"finite number"}, tok.text);
        tok.number = value;
        pos_ = end;
        return tok;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

struct FunctionInfo {
    std::string_view name;
    Function fn;
    std::size_t arity;
};

constexpr FunctionInfo functions[] = {
    {"sin", Function::sin, 1},        {"cos", Function::cos, 1},     {"sqrt", Function::sqrt, 1},
    {"abs", Function::abs, 1},        {"floor", Function::floor, 1}, {"exp", Function::exp, 1},
    {"log", Function::log, 1},        {"min", Function::min, 2},     {"max", Function::max, 2},
    {"piecewise", Function::piecewise, 3}, {"harmonic_step", Function::harmonic_step, 2},
};

NodePtr make_number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::number;
    n->value = v;
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { advance(); }

    NodePtr parse_all() {
        auto root = comparison(0);
        if (cur_.kind != Tok::end) fail(cur_.offset, {"operator", "end of input"}, cur_.text);
        return root;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    void guard(int depth) {
        if (depth > max_depth) fail(cur_.offset, {"shallower nesting"}, cur_.text);
    }

    NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::binary;
        n->op = op;
        n->args = {std::move(lhs), std::move(rhs)};
        return n;
    }

    NodePtr comparison(int depth) {
        guard(depth);
        auto lhs = additive(depth + 1);
        BinaryOp op;
        switch (cur_.kind) {
            case Tok::lt: op = BinaryOp::lt; break;
            case Tok::le: op = BinaryOp::le; break;
            case Tok::gt: op = BinaryOp::gt; break;
            case Tok::ge: op = BinaryOp::ge; break;
            case Tok::eq: op = BinaryOp::eq; break;
            case Tok::ne: op = BinaryOp::ne; break;
            default: return lhs;
        }
        advance();
        return binary(op, std::move(lhs), additive(depth + 1));
    }

    NodePtr additive(int depth) {
        guard(depth);
        auto lhs = term(depth + 1);
        while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
            const auto op = cur_.kind == Tok::plus ? BinaryOp::add : BinaryOp::sub;
            advance();
            lhs = binary(op, std::move(lhs), term(depth + 1));
        }
        return lhs;
    }

    NodePtr term(int depth) {
        guard(depth);
        auto lhs = unary(depth + 1);
        while (cur_.kind == Tok::star || cur_.kind == Tok::slash) {
            const auto op = cur_.kind == Tok::star ? BinaryOp::mul : BinaryOp::div;
            advance();
            lhs = binary(op, std::move(lhs), unary(depth + 1));
        }
        return lhs;
    }

    NodePtr unary(int depth) {
        guard(depth);
        if (cur_.kind == Tok::minus) {
            advance();
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::negate;
            n->args = {unary(depth + 1)};
            return n;
        }
        if (cur_.kind == Tok::plus) {
            advance();
            return unary(depth + 1);
        }
        return power(depth + 1);
    }

    NodePtr power(int depth) {
        guard(depth);
        auto base = primary(depth + 1);
        if (cur_.kind == Tok::caret) {
            advance();
            return binary(BinaryOp::pow, std::move(base), unary(depth + 1));
        }
        return base;
    }

    NodePtr primary(int depth) {
        guard(depth);
        const Token tok = cur_;
        switch (tok.kind) {
            case Tok::number:
                advance();
                return make_number(tok.number);
            case Tok::lparen: {
                advance();
                auto inner = comparison(depth + 1);
                if (cur_.kind != Tok::rparen) fail(cur_.offset, {")", "operator"}, cur_.text);
                advance();
                return inner;
            }
            case Tok::ident:
                advance();
                return identifier(tok, depth);
            default:
                fail(tok.offset, {"number", "identifier", "(", "-"}, tok.kind == Tok::end ? "end of input" : tok.text);
        }
    }

    NodePtr identifier(const Token& tok, int depth) {
        const auto name = tok.text;
        if (cur_.kind != Tok::lparen) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::variable;
            if (name == "t") n->var = Variable::t;
            else if (name == "x") n->var = Variable::x;
            else if (name == "y") n->var = Variable::y;
            else if (name == "pi") return make_number(std::numbers::pi);
            else if (name == "e") return make_number(std::numbers::e);
            else fail(tok.offset, {"t", "x", "y", "pi", "e", "function call"}, name);
            return n;
        }
        const FunctionInfo* info = nullptr;
        for (const auto& f : functions)
            if (f.name == name) info = &f;
        if (!info) {
            std::vector<std::string> names;
            for (const auto& f : functions) names.emplace_back(f.name);
            fail(tok.offset, names, name);
        }
        advance();  // '('
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::call;
        n->fn = info->fn;
        if (cur_.kind != Tok::rparen) {
            n->args.push_back(comparison(depth + 1));
            while (cur_.kind == Tok::comma) {
                advance();
                n->args.push_back(comparison(depth + 1));
            }
        }
        if (cur_.kind != Tok::rparen) fail(cur_.offset, {",", ")"}, cur_.kind == Tok::end ? "end of input" : cur_.text);
        if (n->args.size() != info->arity)
            fail(tok.offset, {fmt::format("{} with {} argument(s)", name, info->arity)},
                 fmt::format("{} with {} argument(s)", name, n->args.size()));
        advance();
        return n;
    }

    Lexer lexer_;
    Token cur_;
};

[[noreturn]] void domain(const char* what, double a) {
    throw DomainError(fmt::format("{} (argument {})", what, a));
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(fmt::format("{} produced a non-finite value", what));
    return v;
}

double eval_node(const Node& n, double t, double x, double y) {
    switch (n.kind) {
        case Node::Kind::number:
            return n.value;
        case Node::Kind::variable:
            return n.var == Variable::t ? t : n.var == Variable::x ? x : y;
        case Node::Kind::negate:
            return -eval_node(*n.args[0], t, x, y);
        case Node::Kind::binary: {
            const double a = eval_node(*n.args[0], t, x, y);
            const double b = eval_node(*n.args[1], t, x, y);
            switch (n.op) {
                case BinaryOp::add: return checked(a + b, "addition");
                case BinaryOp::sub: return checked(a - b, "subtraction");
                case BinaryOp::mul: return checked(a * b, "multiplication");
                case BinaryOp::div:
                    if (b == 0.0) domain("division by zero", a);
                    return checked(a / b, "division");
                case BinaryOp::pow: return checked(std::pow(a, b), "power");
                case BinaryOp::lt: return a < b ? 1.0 : 0.0;
                case BinaryOp::le: return a <= b ? 1.0 : 0.0;
                case BinaryOp::gt: return a > b ? 1.0 : 0.0;
                case BinaryOp::ge: return a >= b ? 1.0 : 0.0;
                case BinaryOp::eq: return a == b ? 1.0 : 0.0;
                case BinaryOp::ne: return a != b ? 1.0 : 0.0;
            }
            break;
        }
        case Node::Kind::call: {
            if (n.fn == Function::piecewise) {
                const double c = eval_node(*n.args[0], t, x, y);
                return eval_node(*n.args[c != 0.0 ? 1 : 2], t, x, y);
            }
            const double a = eval_node(*n.args[0], t, x, y);
            switch (n.fn) {
                case Function::sin: return std::sin(a);
                case Function::cos: return std::cos(a);
                case Function::sqrt:
                    if (a < 0.0) domain("sqrt of a negative number", a);
                    return std::sqrt(a);
                case Function::abs: return std::abs(a);
                case Function::floor: return std::floor(a);
                case Function::exp: return checked(std::exp(a), "exp");
                case Function::log:
                    if (a <= 0.0) domain("log of a nonpositive number", a);
                    return std::log(a);
                case Function::min: return std::min(a, eval_node(*n.args[1], t, x, y));
                case Function::max: return std::max(a, eval_node(*n.args[1], t, x, y));
                case Function::harmonic_step: return harmonic_step(a, eval_node(*n.args[1], t, x, y));
                case Function::piecewise: break;
            }
            break;
        }
    }
    throw std::logic_error("malformed expression node");
}

bool uses_node(const Node& n, Variable v) {
    if (n.kind == Node::Kind::variable) return n.var == v;
    for (const auto& a : n.args)
        if (uses_node(*a, v)) return true;
    return false;
}

const char* op_text(BinaryOp op) {
    switch (op) {
        case BinaryOp::add: return "+";
        case BinaryOp::sub: return "-";
        case BinaryOp::mul: return "*";
        case BinaryOp::div: return "/";
        case BinaryOp::pow: return "^";
        case BinaryOp::lt: return "<";
        case BinaryOp::le: return "<=";
        case BinaryOp::gt: return ">";
        case BinaryOp::ge: return ">=";
        case BinaryOp::eq: return "==";
        case BinaryOp::ne: return "!=";
    }
    return "?";
}

void unparse_node(const Node& n, std::string& out) {
    switch (n.kind) {
        case Node::Kind::number:
            if (n.value < 0.0) out += fmt::format("(0-{:.17g})", -n.value);
            else out += fmt::format("{:.17g}", n.value);
            return;
        case Node::Kind::variable:
            out += n.var == Variable::t ? "t" : n.var == Variable::x ? "x" : "y";
            return;
        case Node::Kind::negate:
            out += "(-";
            unparse_node(*n.args[0], out);
            out += ")";
            return;
        case Node::Kind::binary:
            out += "(";
            unparse_node(*n.args[0], out);
            out += op_text(n.op);
            unparse_node(*n.args[1], out);
            out += ")";
            return;
        case Node::Kind::call:
            for (const auto& f : functions)
                if (f.fn == n.fn) out += f.name;
            out += "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ", ";
                unparse_node(*n.args[i], out);
            }
            out += ")";
            return;
    }
}

}  // namespace

Expr::Expr() : root_(make_number(0.0)) {}

Expr::Expr(NodePtr root) : root_(std::move(root)) {
    if (!root_) throw std::invalid_argument("null expression root");
}

double Expr::operator()(double t, double x, double y) const { return eval_node(*root_, t, x, y); }

bool Expr::uses(Variable v) const { return uses_node(*root_, v); }

Expr parse(std::string_view source) { return Expr(Parser(source).parse_all()); }

double eval(const Expr& e, double t, double x, double y) { return e(t, x, y); }

std::string unparse(const Expr& e) {
    std::string out;
    unparse_node(e.root(), out);
    return out;
}

double harmonic_step(double k, double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.0;
    double n;
    if (ax <= 1.0) {
        n = std::floor(1.0 / ax);
        if (!std::isfinite(n) || n > 1e15) return -k * x;  // n -> infinity piece
        while (n > 1.0 && !(ax <= 1.0 / n)) n -= 1.0;
        while (ax <= 1.0 / (n + 1.0)) n += 1.0;
    } else {
        n = std::ceil(ax) - 1.0;
        if (!std::isfinite(n)) return -k * x;
    }
    return checked(k / n - k * x, "harmonic_step");
}

}  // namespace devbvp::expr
