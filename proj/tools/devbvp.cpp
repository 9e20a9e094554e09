// Command-line front end: check, verify, solve, certify, report.
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "devbvp/commands.hpp"

using namespace devbvp;

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet BVPs with deviated arguments: conditions, lower/upper brackets, jump certificates"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string builtin;
    double k = 0.05;
    cli::CommandOptions opts;
    std::size_t n = 0;
    double tol = 0.0;
    std::string out_dir = ".";
    std::string var;
    std::vector<double> window;
    std::vector<double> jump_points;

    auto* source = app.add_option_group("source");
    source->add_option("--config", config_path, "problem file (JSON)")->check(CLI::ExistingFile);
    source->add_option("--builtin", builtin, "built-in problem")
        ->check(CLI::IsMember(cli::builtin_names()));
    source->require_option(1);
    app.add_option("--k", k, "parameter of example2")->capture_default_str();
    auto* n_opt = app.add_option("--n", n, "cells on [0,T]");
    auto* tol_opt = app.add_option("--tol", tol, "outer stopping tolerance");

    auto* check = app.add_subcommand("check", "evaluate the uniqueness and maximum-principle conditions");
    auto* verify = app.add_subcommand("verify", "check the lower and upper functions");
    auto* solve = app.add_subcommand("solve", "iterate the monotone sequences and write the bracket");
    solve->add_option("--out", out_dir, "output directory")->capture_default_str();
    solve->add_flag("--force", opts.force, "iterate even when a precondition fails");
    auto* certify = app.add_subcommand("certify", "shift constant for a function with upward jumps");
    certify->add_option("--var", var, "slice variable")->check(CLI::IsMember({"t", "x", "y"}));
    certify->add_option("--window", window, "a b")->expected(2);
    certify->add_option("--jumps", jump_points, "jump points");
    auto* report = app.add_subcommand("report", "validation, conditions and checks as one JSON document");

    CLI11_PARSE(app, argc, argv);

    try {
        const cli::ProblemConfig cfg =
            config_path.empty() ? cli::builtin_config(builtin, k) : cli::load_config(config_path);
        if (*n_opt) opts.N = n;
        if (*tol_opt) opts.tol = tol;
        opts.out_dir = out_dir;
        opts.threads = std::min(cli::threads_from_env(), std::max(1u, std::thread::hardware_concurrency()));
        if (!var.empty()) opts.certify_var = var == "t" ? expr::Variable::t : var == "x" ? expr::Variable::x : expr::Variable::y;
        if (window.size() == 2) opts.certify_window = std::array<double, 2>{window[0], window[1]};
        if (!jump_points.empty()) opts.certify_jumps = jump_points;

        if (*check) return cli::cmd_check(cfg, opts, std::cout, std::cerr);
        if (*verify) return cli::cmd_verify(cfg, opts, std::cout, std::cerr);
        if (*solve) return cli::cmd_solve(cfg, opts, std::cout, std::cerr);
        if (*certify) return cli::cmd_certify(cfg, opts, std::cout, std::cerr);
        if (*report) return cli::cmd_report(cfg, opts, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_error;
    }
    return cli::exit_error;
}
