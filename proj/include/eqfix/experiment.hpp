#pragma once

#include "eqfix/algorithms.hpp"
#include "eqfix/errors.hpp"
#include "eqfix/problem_io.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace eqfix {

/// Run configuration (JSON):
///
///   {
///     "problem": "relative/or/absolute/path.json",
///     "algorithm": "extragradient" | "linesearch",
///     "params": {"rho", "alpha", "beta", "gamma", "eta", "mu", "m_max", "tol_stop", "max_outer_iters"},
///     "check_invariants": "all" | "none" | "fejer,monotone,...",
///     "seed": 0,
///     "output": "out/run-name"
///   }
///
/// rho, alpha, beta and gamma given here are constant sequences; omitted
/// entries keep their defaults. A problem file passed where a config is
/// expected runs with all defaults.
struct RunConfig {
    std::filesystem::path problem;
    Algorithm algorithm = Algorithm::Extragradient;
    std::optional<double> rho, alpha, beta, gamma, eta, mu, tol_stop;
    std::optional<int> m_max;
    std::optional<std::size_t> max_outer_iters;
    InvariantSelection invariants = InvariantSelection::all();
    std::uint64_t seed = 0;
    std::filesystem::path output = "out";
};

/// Throws ParseError.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

SolverParams resolve_params(const RunConfig& config, const ProblemInstance& problem);

/// Columns: k, res_xy, res_ux, step, dist_xg, sigma_w, eta_k, m_k, then one
/// per evaluated invariant. Absent values are empty cells.
void write_trace_csv(std::ostream& out, const SolveResult& result);
nlohmann::json summary_json(const ProblemInstance& problem, const RunConfig& config, const SolveResult& result);

struct ExperimentOutcome {
    ExitCode code = ExitCode::Success;
    std::string message;
    std::optional<SolveResult> result;
};

/// Loads, validates and solves, then writes trace.csv and summary.json under
/// config.output. Never throws for library errors; they become the exit code.
ExperimentOutcome run_experiment(const RunConfig& config);

/// Runs independent configs on up to `threads` workers. Outcomes keep the
/// order of `configs`.
std::vector<ExperimentOutcome> run_batch(const std::vector<RunConfig>& configs, unsigned threads);

}  // namespace eqfix
