#include "devbvp/contraction.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace devbvp::contraction {

Forcing problem_forcing(const Discretization& d) {
    return [&d](std::size_t i, double x, double y) { return d.problem.f(d.sample_t[i], x, y); };
}

namespace {

std::vector<double> sample_forcing(const Discretization& d, const Forcing& forcing, const grid::GridFunction& u) {
    std::vector<double> F(d.samples());
    for (std::size_t i = 0; i < F.size(); ++i) {
        const double x = u.at(d.loc_x[i]);
        const double y = u.at(d.loc_y[i]);
        F[i] = forcing(i, x, y);
        if (!std::isfinite(F[i])) throw NonlinearityError(d.sample_t[i], x, y, "non-finite value");
    }
    return F;
}

}  // namespace

grid::GridFunction apply_integral_operator(const Discretization& d, const Forcing& forcing,
                                           const grid::GridFunction& u) {
    const auto& mesh = *d.mesh;
    const std::size_t N = mesh.cells();
    const std::size_t z = mesh.zero_index();
    const double T = mesh.T();
    const double h = mesh.h();
    const auto F = sample_forcing(d, forcing, u);

    // I(t_i) = t_i * int_0^{t_i} F - int_0^{t_i} s F
    std::vector<double> I(N + 1, 0.0);
    double A = 0.0;
    double S = 0.0;
    for (std::size_t i = 1; i <= N; ++i) {
        A += 0.5 * h * (F[i - 1] + F[i]);
        S += 0.5 * h * (mesh.t(i - 1) * F[i - 1] + mesh.t(i) * F[i]);
        I[i] = mesh.t(i) * A - S;
    }
    const double phi0 = d.phi_nodes[z];
    const double C = (d.problem.B - phi0 + I[N]) / T;

    std::vector<double> v(mesh.size());
    for (std::size_t j = 0; j <= z; ++j) v[j] = d.phi_nodes[j];
    for (std::size_t i = 1; i < N; ++i) v[z + i] = phi0 + C * mesh.t(i) - I[i];
    v[z + N] = d.problem.B;
    return grid::GridFunction(d.mesh, std::move(v));
}

grid::GridFunction apply_integral_operator(const Discretization& d, const grid::GridFunction& u) {
    return apply_integral_operator(d, problem_forcing(d), u);
}

grid::GridFunction default_initial_guess(const Discretization& d) {
    const auto& mesh = *d.mesh;
    const std::size_t z = mesh.zero_index();
    const double phi0 = d.phi_nodes[z];
    std::vector<double> v(mesh.size());
    for (std::size_t j = 0; j <= z; ++j) v[j] = d.phi_nodes[j];
    for (std::size_t i = 1; i <= mesh.cells(); ++i)
        v[z + i] = phi0 + (d.problem.B - phi0) * mesh.t(i) / mesh.T();
    v[z + mesh.cells()] = d.problem.B;
    return grid::GridFunction(d.mesh, std::move(v));
}

double residual_L1(const Discretization& d, const Forcing& forcing, const grid::GridFunction& u) {
    const auto& mesh = *d.mesh;
    const auto F = sample_forcing(d, forcing, u);
    const auto dd = grid::second_difference(u);
    double sum = 0.0;
    for (std::size_t k = 0; k < dd.values.size(); ++k) sum += std::abs(-dd.values[k] - F[k + 1]);
    return sum * mesh.h();
}

double residual_L1(const Discretization& d, const grid::GridFunction& u) {
    return residual_L1(d, problem_forcing(d), u);
}

int predicted_iterations(double q, double tol, double delta1) {
    if (delta1 <= tol || q <= 0.0) return 1;
    const double k = std::ceil(std::log(tol * (1.0 - q) / delta1) / std::log(q));
    return std::max(1, static_cast<int>(k));
}

PicardResult picard_solve(const Discretization& d, const Forcing& forcing, const PicardSettings& s,
                          const grid::GridFunction& u0) {
    if (!(s.q_estimate >= 0.0 && s.q_estimate < 1.0))
        throw ContractionRefused(fmt::format(
            "contraction factor estimate q={} is not below 1; the smallness conditions do not hold", s.q_estimate));
    if (!(s.tol_sup > 0.0) || s.max_iter < 1) throw std::invalid_argument("invalid Picard settings");
    if (u0.values().size() != d.mesh->size()) throw std::invalid_argument("initial iterate on a different mesh");

    grid::GridFunction u = u0;
    std::vector<double> deltas;
    std::vector<double> residuals;
    for (int n = 1; n <= s.max_iter; ++n) {
        auto next = apply_integral_operator(d, forcing, u);
        const double delta = grid::sup_distance(next, u);
        deltas.push_back(delta);
        u = std::move(next);
        if (s.record_residuals) residuals.push_back(residual_L1(d, forcing, u));
        if (delta <= s.tol_sup) {
            PicardResult r{u, n, delta, 0.0, predicted_iterations(s.q_estimate, s.tol_sup, deltas.front()),
                           std::move(deltas), std::move(residuals)};
            r.residual_L1 = s.record_residuals ? r.residuals.back() : residual_L1(d, forcing, r.u);
            return r;
        }
    }
    auto msg = fmt::format("Picard iteration did not reach {} in {} sweeps (last update {})", s.tol_sup, s.max_iter,
                           deltas.back());
    throw NonConvergenceError(msg, std::move(deltas));
}

PicardResult picard_solve(const Discretization& d, const PicardSettings& s, const grid::GridFunction& u0) {
    return picard_solve(d, problem_forcing(d), s, u0);
}

PicardResult picard_solve(const Discretization& d, const PicardSettings& s) {
    return picard_solve(d, s, default_initial_guess(d));
}

void write_iterate_log(std::ostream& os, const PicardResult& r) {
    os << "n,delta_sup,residual_L1\n";
    for (std::size_t n = 0; n < r.deltas.size(); ++n) {
        os << fmt::format("{},{:.17g},", n + 1, r.deltas[n]);
        if (n < r.residuals.size()) os << fmt::format("{:.17g}", r.residuals[n]);
        os << '\n';
    }
}

}  // namespace devbvp::contraction
