#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "betlab/errors.hpp"
#include "betlab/money.hpp"
#include "betlab/oracle.hpp"
#include "betlab/problem_spec.hpp"
#include "betlab/sequential.hpp"
#include "betlab/simultaneous.hpp"
#include "betlab/utility.hpp"

namespace betlab {

/// Fixed CSV float format: 6 significant decimals, '.' decimal point.
inline std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Full-precision format for structured/verification output.
inline std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace climpl {

inline void write_report(const std::string& out_path, const std::string& content,
                         std::ostream& fallback) {
    if (out_path.empty()) {
        fallback << content;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error("cannot write output file: " + out_path);
    f << content;
}

template <typename Fn>
int run_command(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

/// "A;A" style summary: decision names used per stage along the tree,
/// deduplicated in state order, '|'-joined within a stage.
inline std::string policy_summary(const BetProblem& p, const PolicyTree& tree) {
    std::vector<std::vector<std::string>> per_stage(static_cast<std::size_t>(tree.stages));
    auto walk = [&](auto&& self, const PolicyNode& node) -> void {
        auto& names = per_stage[static_cast<std::size_t>(node.stage - 1)];
        const std::string& name = p.decisions()[node.decision].name;
        bool seen = false;
        for (const auto& existing : names) {
            if (existing == name) {
                seen = true;
                break;
            }
        }
        if (!seen) names.push_back(name);
        for (const auto& [m, child] : node.children) self(self, child);
    };
    walk(walk, tree.root);
    std::string summary;
    for (std::size_t k = 0; k < per_stage.size(); ++k) {
        if (k > 0) summary += ";";
        for (std::size_t i = 0; i < per_stage[k].size(); ++i) {
            if (i > 0) summary += "|";
            summary += per_stage[k][i];
        }
    }
    return summary;
}

inline bool uniform_policy_per_stage(const DPTable& table) {
    for (const auto& level : table.values) {
        std::optional<std::size_t> chosen;
        for (const auto& [state, entry] : level) {
            if (!chosen) chosen = entry.decision;
            else if (*chosen != entry.decision) return false;
        }
    }
    return true;
}

inline json policy_tree_to_json(const BetProblem& p, const PolicyNode& node) {
    json j = json::object();
    j["stage"] = node.stage;
    j["cumulative"] = node.cumulative.amount();
    j["decision"] = p.decisions()[node.decision].name;
    j["value"] = node.value;
    if (!node.children.empty()) {
        json children = json::array();
        for (const auto& [m, child] : node.children) {
            json c = json::object();
            c["reward"] = m.amount();
            c["node"] = policy_tree_to_json(p, child);
            children.push_back(std::move(c));
        }
        j["children"] = std::move(children);
    }
    return j;
}

/// Per-n problem used by the threshold sweep (NormalizedLog re-normalized).
inline SimultaneousProblem sweep_instance(const SimultaneousProblem& tmpl, std::int64_t n) {
    UtilityFunction u = tmpl.u.normalized_log_stages() > 0 ? UtilityFunction::normalized_log(n)
                                                           : tmpl.u;
    return SimultaneousProblem(n, tmpl.sure_amount, tmpl.prize, tmpl.win_prob, std::move(u));
}

}  // namespace climpl

/// Solves the sequential bet problem in a spec file. Text report (root value,
/// policy summary, DP table, policy tree) goes to `out`; when out_path is
/// non-empty a machine-readable JSON document is written there as well.
inline int cmd_solve_sequential(const std::string& spec_path, const std::string& out_path,
                                std::ostream& out, std::ostream& err) {
    return climpl::run_command(err, [&]() {
        const ProblemSpec spec = load_problem_spec(spec_path);
        const BetProblem problem = to_bet_problem(spec);
        const SolveResult result = solve(problem);

        out << "root value: " << fmt6(result.root_value) << "\n";
        out << "optimal policy: " << climpl::policy_summary(problem, result.tree) << "\n";
        out << "uniform policy across states: "
            << (climpl::uniform_policy_per_stage(result.table) ? "yes" : "no") << "\n";
        out << "dp table:\n";
        out << "stage,state,value,decision\n";
        for (std::size_t k = 0; k < result.table.values.size(); ++k) {
            for (const auto& [state, entry] : result.table.values[k]) {
                out << (k + 1) << "," << state.amount() << "," << fmt6(entry.value) << ","
                    << problem.decisions()[entry.decision].name << "\n";
            }
        }
        out << "policy tree:\n" << render_policy_tree(problem, result.tree);

        if (!out_path.empty()) {
            json doc = json::object();
            doc["root_value"] = result.root_value;
            json table = json::array();
            for (std::size_t k = 0; k < result.table.values.size(); ++k) {
                for (const auto& [state, entry] : result.table.values[k]) {
                    json row = json::object();
                    row["stage"] = static_cast<std::int64_t>(k + 1);
                    row["state"] = state.amount();
                    row["value"] = entry.value;
                    row["decision"] = problem.decisions()[entry.decision].name;
                    table.push_back(std::move(row));
                }
            }
            doc["dp_table"] = std::move(table);
            doc["policy_tree"] = climpl::policy_tree_to_json(problem, result.tree.root);
            climpl::write_report(out_path, doc.dump(2) + "\n", out);
        }
        return 0;
    });
}

/// Writes the allocation report CSV (k, exact[, approx], additive) plus
/// best-k summary lines for an A/B-shaped spec.
inline int cmd_analyze_simultaneous(const std::string& spec_path, const std::string& out_path,
                                    bool with_approx, std::optional<double> alpha_override,
                                    std::ostream& out, std::ostream& err) {
    return climpl::run_command(err, [&]() {
        const ProblemSpec spec = load_problem_spec(spec_path);
        const SimultaneousShape shape = to_simultaneous_problem(spec);
        std::optional<double> alpha_cal = alpha_override ? alpha_override : spec.calibration_alpha;
        if (!alpha_cal) {
            throw ParseError(
                "calibration_alpha: missing; set it in the spec or pass --alpha");
        }
        const AllocationReport report = allocation_report(shape.problem, *alpha_cal, with_approx);

        out << "best_k_exact=" << report.best_k_exact << "\n";
        out << "best_k_additive=" << report.best_k_additive << "\n";
        out << "additive_exact_agree="
            << (report.best_k_exact == report.best_k_additive ? "yes" : "no") << "\n";

        std::string csv = with_approx ? "k,exact,approx,additive\n" : "k,exact,additive\n";
        for (const AllocationRow& row : report.per_k) {
            csv += std::to_string(row.k) + "," + fmt6(row.exact);
            if (with_approx) csv += "," + fmt6(*row.approx);
            csv += "," + fmt6(row.additive) + "\n";
        }
        climpl::write_report(out_path, csv, out);
        return 0;
    });
}

struct AlphaCurveArgs {
    std::string family;                 // log_shifted | normalized_log | linear | power |
                                        // exponential | tabulated
    std::optional<double> param;        // scale / exponent / rate / n, per family
    std::optional<std::string> csv;     // tabulated sample file
    std::int64_t a = 0;
    std::int64_t c = 0;
    std::int64_t b = 0;
    double x_min = 0.0;
    double x_max = 0.0;
    std::int64_t points = 0;
    std::optional<double> domain_max;   // default: b + x_max
};

/// CSV of (x, alpha(x)) over an even grid plus a trailing classification
/// line (Decreasing/Increasing/Constant/Mixed).
inline int cmd_alpha_curve(const AlphaCurveArgs& args, const std::string& out_path,
                           std::ostream& out, std::ostream& err) {
    return climpl::run_command(err, [&]() {
        if (args.points < 3) throw ParseError("points: must be >= 3");
        const double m = args.domain_max.value_or(static_cast<double>(args.b) + args.x_max);
        auto need_param = [&](const char* what) -> double {
            if (!args.param) {
                throw ParseError(std::string("--param: missing (") + what + " for family '" +
                                 args.family + "')");
            }
            return *args.param;
        };
        UtilityFunction u = [&]() {
            try {
                if (args.family == "log_shifted") return UtilityFunction::log_shifted(m);
                if (args.family == "normalized_log") {
                    return UtilityFunction::normalized_log(
                        static_cast<std::int64_t>(need_param("n")));
                }
                if (args.family == "linear") {
                    return UtilityFunction::linear(args.param.value_or(1.0), m);
                }
                if (args.family == "power") return UtilityFunction::power(need_param("exponent"), m);
                if (args.family == "exponential") {
                    return UtilityFunction::exponential(need_param("rate"), m);
                }
                if (args.family == "tabulated") {
                    if (!args.csv) throw ParseError("--csv: missing for tabulated utility");
                    return load_tabulated_utility_file(*args.csv);
                }
            } catch (const std::invalid_argument& e) {
                throw ParseError("utility: " + std::string(e.what()));
            }
            throw ParseError("utility family: unknown '" + args.family + "'");
        }();

        const AlphaSpec spec(Money(args.a), Money(args.c), Money(args.b), args.x_min, args.x_max);
        std::string csv = "x,alpha\n";
        const double step =
            (args.x_max - args.x_min) / static_cast<double>(args.points - 1);
        for (std::int64_t i = 0; i < args.points; ++i) {
            const double x =
                (i == args.points - 1) ? args.x_max : args.x_min + static_cast<double>(i) * step;
            csv += fmt6(x) + "," + fmt6(alpha(u, spec, x)) + "\n";
        }
        csv += std::string("classification,") +
               to_string(alpha_monotonicity_report(u, spec, args.points)) + "\n";
        climpl::write_report(out_path, csv, out);
        return 0;
    });
}

/// Sweeps n = 1..n_max, prints the per-n all-lottery vs all-sure utility gap
/// table and the smallest N from which the lottery plan stays preferred.
inline int cmd_find_threshold(const std::string& spec_path, std::optional<std::int64_t> n_max_flag,
                              const std::string& out_path, std::ostream& out, std::ostream& err) {
    return climpl::run_command(err, [&]() {
        const ProblemSpec spec = load_problem_spec(spec_path);
        const SimultaneousShape shape = to_simultaneous_problem(spec);
        const std::int64_t n_max = n_max_flag ? *n_max_flag : spec.sweep_n_max.value_or(60);

        const std::optional<std::int64_t> n_flip = find_preference_flip(shape.problem, n_max);

        std::string table = "n,all_" + shape.lottery_name + ",all_" + shape.sure_name + ",gap\n";
        for (std::int64_t n = 1; n <= n_max; ++n) {
            const SimultaneousProblem pn = climpl::sweep_instance(shape.problem, n);
            const double all_lottery = exact_allocation_utility(pn, 0);
            const double all_sure = exact_allocation_utility(pn, n);
            table += std::to_string(n) + "," + fmt6(all_lottery) + "," + fmt6(all_sure) + "," +
                     fmt6(all_lottery - all_sure) + "\n";
        }
        const std::string verdict =
            n_flip ? "N=" + std::to_string(*n_flip) : std::string("N=NotFound");
        climpl::write_report(out_path, table + verdict + "\n", out);
        if (!out_path.empty()) out << verdict << "\n";
        return 0;
    });
}

inline constexpr double kOracleCheckTolerance = 1e-9;

/// Runs the DP solver and the brute-force policy enumeration on the same
/// spec; PASS iff they agree within 1e-9. Exit 0 on PASS, 3 on FAIL.
inline int cmd_oracle_check(const std::string& spec_path, std::ostream& out, std::ostream& err) {
    return climpl::run_command(err, [&]() {
        const ProblemSpec spec = load_problem_spec(spec_path);
        const BetProblem problem = to_bet_problem(spec);
        const double dp_value = solve(problem).root_value;
        const double oracle_value = best_policy_by_enumeration(problem).value;
        const double gap = std::abs(dp_value - oracle_value);
        const bool pass = gap < kOracleCheckTolerance;
        out << "dp_value=" << fmt_full(dp_value) << "\n";
        out << "oracle_value=" << fmt_full(oracle_value) << "\n";
        out << "gap=" << fmt_full(gap) << "\n";
        out << "verdict=" << (pass ? "PASS" : "FAIL") << " (tolerance 1e-09)\n";
        return pass ? 0 : 3;
    });
}

}  // namespace betlab
