#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "betlab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"betlab: expected-utility analysis of repeated monetary bets"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_path;

    auto* solve_cmd =
        app.add_subcommand("solve-sequential", "Solve a sequential bet problem by backward induction");
    solve_cmd->add_option("spec", spec_path, "problem spec file (JSON)")->required();
    solve_cmd->add_option("--out", out_path, "write structured JSON report here");

    bool with_approx = false;
    std::optional<double> alpha_override;
    auto* analyze_cmd = app.add_subcommand(
        "analyze-simultaneous", "Per-allocation utilities for n pre-committed bets (A/B shape)");
    analyze_cmd->add_option("spec", spec_path, "problem spec file (JSON)")->required();
    analyze_cmd->add_option("--out", out_path, "write the CSV report here");
    analyze_cmd->add_flag("--with-approx", with_approx, "include the plug-the-mean approximation column");
    analyze_cmd->add_option("--alpha", alpha_override,
                            "calibration alpha for the additive column (overrides the spec)");

    betlab::AlphaCurveArgs curve;
    std::string curve_csv;
    auto* curve_cmd =
        app.add_subcommand("alpha-curve", "Indifference probability alpha(x) over a wealth range");
    curve_cmd->add_option("--utility", curve.family,
                          "utility family: log_shifted|normalized_log|linear|power|exponential|tabulated")
        ->required();
    curve_cmd->add_option("--param", curve.param,
                          "family parameter (linear scale, power exponent, exponential rate, normalized_log n)");
    curve_cmd->add_option("--csv", curve_csv, "sample file for a tabulated utility");
    curve_cmd->add_option("--a", curve.a, "low lottery outcome a")->required();
    curve_cmd->add_option("--c", curve.c, "sure amount c")->required();
    curve_cmd->add_option("--b", curve.b, "high lottery outcome b")->required();
    curve_cmd->add_option("--x-min", curve.x_min, "wealth offset range start")->required();
    curve_cmd->add_option("--x-max", curve.x_max, "wealth offset range end")->required();
    curve_cmd->add_option("--points", curve.points, "grid points (>= 3)")->required();
    curve_cmd->add_option("--domain-max", curve.domain_max, "utility domain bound (default b + x_max)");
    curve_cmd->add_option("--out", out_path, "write the CSV here");

    std::optional<std::int64_t> n_max;
    auto* threshold_cmd = app.add_subcommand(
        "find-threshold", "Smallest N from which the all-lottery plan beats the all-sure plan");
    threshold_cmd->add_option("spec", spec_path, "problem spec file (JSON)")->required();
    threshold_cmd->add_option("--n-max", n_max, "sweep bound (default: spec sweep.n_max, else 60)");
    threshold_cmd->add_option("--out", out_path, "write the sweep table here");

    auto* oracle_cmd =
        app.add_subcommand("oracle-check", "Cross-check the DP value against brute-force enumeration");
    oracle_cmd->add_option("spec", spec_path, "problem spec file (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    if (solve_cmd->parsed()) {
        return betlab::cmd_solve_sequential(spec_path, out_path, std::cout, std::cerr);
    }
    if (analyze_cmd->parsed()) {
        return betlab::cmd_analyze_simultaneous(spec_path, out_path, with_approx, alpha_override,
                                                std::cout, std::cerr);
    }
    if (curve_cmd->parsed()) {
        if (!curve_csv.empty()) curve.csv = curve_csv;
        return betlab::cmd_alpha_curve(curve, out_path, std::cout, std::cerr);
    }
    if (threshold_cmd->parsed()) {
        return betlab::cmd_find_threshold(spec_path, n_max, out_path, std::cout, std::cerr);
    }
    return betlab::cmd_oracle_check(spec_path, std::cout, std::cerr);
}
