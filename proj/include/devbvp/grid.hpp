#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace devbvp::grid {

class ExtrapolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Position of a point inside the mesh: the left node of its cell and the
/// barycentric weight of the right node.
struct CellLocation {
    std::size_t left = 0;
    double weight = 0.0;
};

/// Nodes over [-r, T]: N uniform cells of width h = T/N on [0, T] and
/// ceil(r/h) uniform history cells on [-r, 0]. 0 and T are always nodes.
class Mesh {
public:
    static std::shared_ptr<const Mesh> uniform(double T, std::size_t N, double r = 0.0);

    double T() const noexcept { return T_; }
    double r() const noexcept { return r_; }
    double h() const noexcept { return h_; }
    double history_h() const noexcept { return hist_h_; }
    std::size_t cells() const noexcept { return N_; }
    std::size_t history_cells() const noexcept { return M_; }

    std::size_t size() const noexcept { return nodes_.size(); }
    /// Index of the node t = 0.
    std::size_t zero_index() const noexcept { return M_; }
    double node(std::size_t i) const { return nodes_[i]; }
    /// The i-th node of [0, T], i = 0..N.
    double t(std::size_t i) const { return nodes_[M_ + i]; }
    std::span<const double> nodes() const noexcept { return nodes_; }

    /// Throws ExtrapolationError when t lies outside [-r, T] by more than 1e-12.
    CellLocation locate(double t) const;

    /// A mesh with the same [0, T] nodes and a history segment of radius r.
    std::shared_ptr<const Mesh> with_history(double r) const;
    std::shared_ptr<const Mesh> refined() const;

private:
    Mesh() = default;

    double T_ = 0.0;
    double r_ = 0.0;
    double h_ = 0.0;
    double hist_h_ = 0.0;
    std::size_t N_ = 0;
    std::size_t M_ = 0;
    std::vector<double> nodes_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Nodal values on a mesh, read as the piecewise-linear interpolant.
class GridFunction {
public:
    GridFunction(MeshPtr mesh, std::vector<double> values);

    static GridFunction sample(MeshPtr mesh, const std::function<double(double)>& fn);
    static GridFunction zeros(MeshPtr mesh);

    const Mesh& mesh() const noexcept { return *mesh_; }
    const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t node) const { return values_[node]; }
    /// Value at the i-th node of [0, T].
    double on_interval(std::size_t i) const { return values_[mesh_->zero_index() + i]; }

    double operator()(double t) const;
    double at(const CellLocation& loc) const;

    friend bool operator==(const GridFunction& a, const GridFunction& b);

private:
    MeshPtr mesh_;
    std::vector<double> values_;
};

double interp(const GridFunction& u, double t);

/// Interior nodes t_1..t_{N-1} of [0, T] and (u_{i-1} - 2u_i + u_{i+1}) / h^2.
struct InteriorValues {
    std::vector<double> t;
    std::vector<double> values;
};

InteriorValues second_difference(const GridFunction& u);

/// max |u - v| over the nodes; the meshes must coincide.
double sup_distance(const GridFunction& u, const GridFunction& v);
/// max over the nodes of (u - v), possibly negative.
double max_excess(const GridFunction& u, const GridFunction& v);

struct QuadratureRule {
    enum class Kind { trapezoid, midpoint };

    Kind kind = Kind::trapezoid;
    /// Integrable singularity at the left end: the first cell is bisected
    /// `depth` times toward the endpoint and handled with graded midpoints.
    bool singular_left = false;
    int depth = 20;
    /// Equal sub-cells per mesh cell (and per graded cell); at least 8 when singular_left.
    int subdivisions = 1;
};

struct IntegralEstimate {
    double value = 0.0;
    /// Set when the graded contributions near a singular endpoint stop
    /// decaying, i.e. the integral does not exist.
    bool divergent = false;
};

using Integrand = std::function<double(double)>;

IntegralEstimate integrate_checked(const Mesh& mesh, const Integrand& g, double a, double b,
                                   const QuadratureRule& rule);
double integrate(const Mesh& mesh, const Integrand& g, double a, double b, const QuadratureRule& rule);

/// `t,value` rows with 17 significant digits.
void write_csv(std::ostream& os, const GridFunction& u);

}  // namespace devbvp::grid
