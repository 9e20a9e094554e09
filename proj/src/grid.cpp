#include "devbvp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace devbvp::grid {

namespace {
constexpr double range_tol = 1e-12;
}

std::shared_ptr<const Mesh> Mesh::uniform(double T, std::size_t N, double r) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument(fmt::format("mesh needs T > 0, got {}", T));
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument(fmt::format("mesh needs r >= 0, got {}", r));
    if (N < 4) throw std::invalid_argument(fmt::format("mesh needs N >= 4 cells on [0,T], got {}", N));

    auto m = std::shared_ptr<Mesh>(new Mesh());
    m->T_ = T;
    m->r_ = r;
    m->N_ = N;
    m->h_ = T / static_cast<double>(N);
    m->M_ = r > 0.0 ? static_cast<std::size_t>(std::ceil(r / m->h_ - 1e-9)) : 0;
    if (r > 0.0 && m->M_ == 0) m->M_ = 1;
    m->hist_h_ = m->M_ > 0 ? r / static_cast<double>(m->M_) : 0.0;

    m->nodes_.reserve(m->M_ + N + 1);
    for (std::size_t j = 0; j < m->M_; ++j) m->nodes_.push_back(-r + static_cast<double>(j) * m->hist_h_);
    for (std::size_t i = 0; i < N; ++i) m->nodes_.push_back(static_cast<double>(i) * m->h_);
    m->nodes_.push_back(T);
    return m;
}

CellLocation Mesh::locate(double t) const {
    if (!(t >= -r_ - range_tol && t <= T_ + range_tol))
        throw ExtrapolationError(fmt::format("point {} lies outside the mesh range [{}, {}]", t, -r_, T_));
    std::size_t left;
    if (t < 0.0 && M_ > 0) {
        const double pos = (t + r_) / hist_h_;
        left = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(M_ - 1)));
    } else {
        const double pos = std::max(t, 0.0) / h_;
        left = M_ + static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(N_ - 1)));
    }
    const double a = nodes_[left];
    const double b = nodes_[left + 1];
    const double w = std::clamp((t - a) / (b - a), 0.0, 1.0);
    return {left, w};
}

std::shared_ptr<const Mesh> Mesh::with_history(double r) const { return uniform(T_, N_, r); }

std::shared_ptr<const Mesh> Mesh::refined() const { return uniform(T_, 2 * N_, r_); }

GridFunction::GridFunction(MeshPtr mesh, std::vector<double> values) : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_) throw std::invalid_argument("grid function without mesh");
    if (values_.size() != mesh_->size())
        throw std::invalid_argument(
            fmt::format("grid function has {} values for {} nodes", values_.size(), mesh_->size()));
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument(fmt::format("non-finite value at node {} (t={})", i, mesh_->node(i)));
}

GridFunction GridFunction::sample(MeshPtr mesh, const std::function<double(double)>& fn) {
    std::vector<double> v(mesh->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(mesh->node(i));
    return GridFunction(std::move(mesh), std::move(v));
}

GridFunction GridFunction::zeros(MeshPtr mesh) {
    std::vector<double> v(mesh->size(), 0.0);
    return GridFunction(std::move(mesh), std::move(v));
}

double GridFunction::at(const CellLocation& loc) const {
    return (1.0 - loc.weight) * values_[loc.left] + loc.weight * values_[loc.left + 1];
}

double GridFunction::operator()(double t) const { return at(mesh_->locate(t)); }

bool operator==(const GridFunction& a, const GridFunction& b) {
    if (a.mesh_ != b.mesh_) {
        const auto na = a.mesh_->nodes();
        const auto nb = b.mesh_->nodes();
        if (!std::equal(na.begin(), na.end(), nb.begin(), nb.end())) return false;
    }
    return a.values_ == b.values_;
}

double interp(const GridFunction& u, double t) { return u(t); }

InteriorValues second_difference(const GridFunction& u) {
    const auto& m = u.mesh();
    const double h2 = m.h() * m.h();
    InteriorValues out;
    out.t.reserve(m.cells() - 1);
    out.values.reserve(m.cells() - 1);
    for (std::size_t i = 1; i < m.cells(); ++i) {
        out.t.push_back(m.t(i));
        out.values.push_back((u.on_interval(i - 1) - 2.0 * u.on_interval(i) + u.on_interval(i + 1)) / h2);
    }
    return out;
}

double sup_distance(const GridFunction& u, const GridFunction& v) {
    if (u.values().size() != v.values().size()) throw std::invalid_argument("sup_distance on different meshes");
    double d = 0.0;
    for (std::size_t i = 0; i < u.values().size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
    return d;
}

double max_excess(const GridFunction& u, const GridFunction& v) {
    if (u.values().size() != v.values().size()) throw std::invalid_argument("max_excess on different meshes");
    double d = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.values().size(); ++i) d = std::max(d, u[i] - v[i]);
    return d;
}

namespace {

double composite(const Integrand& g, double lo, double hi, QuadratureRule::Kind kind, int m) {
    const double d = (hi - lo) / m;
    double sum = 0.0;
    if (kind == QuadratureRule::Kind::midpoint) {
        for (int i = 0; i < m; ++i) sum += g(lo + (i + 0.5) * d);
        return sum * d;
    }
    sum = 0.5 * (g(lo) + g(hi));
    for (int i = 1; i < m; ++i) sum += g(lo + i * d);
    return sum * d;
}

}  // namespace

IntegralEstimate integrate_checked(const Mesh& mesh, const Integrand& g, double a, double b,
                                   const QuadratureRule& rule) {
    if (!(a <= b)) throw std::invalid_argument(fmt::format("integration bounds out of order: [{}, {}]", a, b));
    if (a < -mesh.r() - range_tol || b > mesh.T() + range_tol)
        throw ExtrapolationError(fmt::format("integration range [{}, {}] leaves the mesh", a, b));
    if (rule.subdivisions < 1 || rule.depth < 2) throw std::invalid_argument("invalid quadrature rule");

    IntegralEstimate est;
    if (a == b) return est;
    // s^{-1/2}-type integrands need finer cells next to the graded one as well
    const int sub = rule.singular_left ? std::max(rule.subdivisions, 8) : rule.subdivisions;
    bool first = true;
    const auto nodes = mesh.nodes();
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
        const double lo = std::max(a, nodes[j]);
        const double hi = std::min(b, nodes[j + 1]);
        if (!(hi > lo)) continue;
        if (first && rule.singular_left) {
            const double w = hi - lo;
            double prev = 0.0;
            double last = 0.0;
            for (int k = 0; k < rule.depth; ++k) {
                const double s_hi = lo + std::ldexp(w, -k);
                const double s_lo = lo + std::ldexp(w, -(k + 1));
                const double c = composite(g, s_lo, s_hi, QuadratureRule::Kind::midpoint, sub);
                est.value += c;
                prev = last;
                last = c;
            }
            est.value += composite(g, lo, lo + std::ldexp(w, -rule.depth), QuadratureRule::Kind::midpoint, sub);
            if (std::abs(prev) > 0.0 && std::abs(last) > 0.95 * std::abs(prev)) est.divergent = true;
        } else {
            est.value += composite(g, lo, hi, rule.kind, sub);
        }
        first = false;
    }
    return est;
}

double integrate(const Mesh& mesh, const Integrand& g, double a, double b, const QuadratureRule& rule) {
    return integrate_checked(mesh, g, a, b, rule).value;
}

void write_csv(std::ostream& os, const GridFunction& u) {
    os << "t,value\n";
    for (std::size_t i = 0; i < u.values().size(); ++i)
        os << fmt::format("{:.17g},{:.17g}\n", u.mesh().node(i), u[i]);
}

}  // namespace devbvp::grid
