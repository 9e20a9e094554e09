#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "devbvp/conditions.hpp"
#include "devbvp/config.hpp"
#include "devbvp/monotone.hpp"

namespace devbvp::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_error = 1,
    exit_conditions = 2,
    exit_ordering = 3,
    exit_nonconvergence = 4,
};

struct CommandOptions {
    std::optional<std::size_t> N;
    /// Outer (monotone) stopping tolerance.
    std::optional<double> tol;
    std::filesystem::path out_dir = ".";
    bool force = false;
    unsigned threads = 1;
    std::optional<expr::Variable> certify_var;
    std::optional<std::array<double, 2>> certify_window;
    std::optional<std::vector<double>> certify_jumps;
};

/// Worker cap from DEVBVP_THREADS (default 2, at least 1).
unsigned threads_from_env();

nlohmann::json to_json(const conditions::ConditionReport& r);
nlohmann::json to_json(const monotone::VerificationReport& r);

int cmd_check(const ProblemConfig& c, const CommandOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const ProblemConfig& c, const CommandOptions& o, std::ostream& out, std::ostream& err);
/// Writes bracket.csv, convergence.csv and summary.json into o.out_dir.
int cmd_solve(const ProblemConfig& c, const CommandOptions& o, std::ostream& out, std::ostream& err);
int cmd_certify(const ProblemConfig& c, const CommandOptions& o, std::ostream& out, std::ostream& err);
/// Problem validation, conditions, implication lattice and lower/upper checks as one JSON document.
int cmd_report(const ProblemConfig& c, const CommandOptions& o, std::ostream& out, std::ostream& err);

}  // namespace devbvp::cli
