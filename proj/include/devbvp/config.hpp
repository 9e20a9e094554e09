#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "devbvp/expr.hpp"
#include "devbvp/jumps.hpp"
#include "devbvp/monotone.hpp"

namespace devbvp::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CertifySpec {
    std::string expression;
    expr::Variable variable = expr::Variable::y;
    std::array<double, 3> fixed{0.0, 0.0, 0.0};
    std::array<double, 2> window{0.0, 1.0};
    std::vector<double> jumps;
};

/// One problem with its lower/upper pair, coefficients, mesh, and tolerances.
/// T, r, B may be given as numbers or as constant expressions ("pi/4").
struct ProblemConfig {
    std::string name = "problem";
    double T = 1.0;
    double r = 0.0;
    double B = 0.0;
    std::string f = "0";
    std::string tau = "t";
    std::optional<std::string> tau_x;
    std::string phi = "0";
    std::string alpha = "0";
    std::string beta = "0";
    std::string L1 = "0";
    std::string L2 = "0";
    std::optional<std::string> psi;
    bool f_singular = false;
    bool L1_singular = false;
    bool L2_singular = false;
    bool psi_singular = false;
    std::size_t N = 200;
    double tol_sup = 1e-10;
    double outer_tol = 1e-8;
    double eps_mono = monotone::default_eps_mono;
    int max_outer = 1000;
    std::optional<CertifySpec> certify;
};

ProblemConfig parse_config(const nlohmann::json& j);
ProblemConfig load_config(const std::filesystem::path& file);
nlohmann::json to_json(const ProblemConfig& c);

/// example1, example2 (parameter k), trivial_constant, trivial_linear.
ProblemConfig builtin_config(const std::string& name, double k = 0.05);
std::vector<std::string> builtin_names();

/// Parses every expression; throws ConfigError naming the offending field.
monotone::BracketProblem build_problem(const ProblemConfig& c);
jumps::PiecewiseFn build_certify(const CertifySpec& s);

monotone::RunOptions run_options(const ProblemConfig& c);

}  // namespace devbvp::cli
