#include "eqfix/experiment.hpp"

#include "eqfix/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

namespace eqfix {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::optional<T> optional_field(const json& obj, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    try {
        return obj[key].get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string("params.") + key, "wrong type");
    }
}

}  // namespace

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ParseError("", "run config must be a JSON object");
    RunConfig c;
    if (!doc.contains("problem")) throw ParseError("problem", "missing");
    if (!doc["problem"].is_string()) throw ParseError("problem", "expected a path");
    c.problem = doc["problem"].get<std::string>();
    if (c.problem.is_relative()) c.problem = base_dir / c.problem;

    if (doc.contains("algorithm")) {
        const auto& a = doc["algorithm"];
        auto parsed = a.is_string() ? parse_algorithm(a.get<std::string>()) : std::nullopt;
        if (!parsed) throw ParseError("algorithm", "expected 'extragradient' or 'linesearch'");
        c.algorithm = *parsed;
    }
    if (doc.contains("params")) {
        const auto& p = doc["params"];
        if (!p.is_object()) throw ParseError("params", "expected an object");
        c.rho = optional_field<double>(p, "rho");
        c.alpha = optional_field<double>(p, "alpha");
        c.beta = optional_field<double>(p, "beta");
        c.gamma = optional_field<double>(p, "gamma");
        c.eta = optional_field<double>(p, "eta");
        c.mu = optional_field<double>(p, "mu");
        c.tol_stop = optional_field<double>(p, "tol_stop");
        c.m_max = optional_field<int>(p, "m_max");
        c.max_outer_iters = optional_field<std::size_t>(p, "max_outer_iters");
    }
    if (doc.contains("check_invariants")) {
        if (!doc["check_invariants"].is_string()) throw ParseError("check_invariants", "expected a string");
        c.invariants = InvariantSelection::parse(doc["check_invariants"].get<std::string>());
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ParseError("seed", "expected a nonnegative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("output")) {
        if (!doc["output"].is_string()) throw ParseError("output", "expected a path");
        c.output = doc["output"].get<std::string>();
        if (c.output.is_relative()) c.output = base_dir / c.output;
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    if (doc.is_object() && doc.contains("dimension") && !doc.contains("problem")) {
        RunConfig c;
        c.problem = path;
        return c;
    }
    return parse_run_config(doc, path.parent_path());
}

SolverParams resolve_params(const RunConfig& config, const ProblemInstance& problem) {
    SolverParams p = SolverParams::defaults(config.algorithm, problem.lipschitz);
    if (config.rho) p.rho = Schedule::constant(*config.rho);
    if (config.alpha) p.alpha = Schedule::constant(*config.alpha);
    if (config.beta) p.beta = Schedule::constant(*config.beta);
    if (config.gamma) p.gamma = Schedule::constant(*config.gamma);
    if (config.eta) p.eta = *config.eta;
    if (config.mu) p.mu = *config.mu;
    if (config.tol_stop) p.tol_stop = *config.tol_stop;
    if (config.m_max) p.m_max = *config.m_max;
    if (config.max_outer_iters) p.max_outer_iters = *config.max_outer_iters;
    return p;
}

void write_trace_csv(std::ostream& out, const SolveResult& result) {
    out << "k,res_xy,res_ux,step,dist_xg,sigma_w,eta_k,m_k";
    for (Invariant inv : result.invariants) out << ',' << to_string(inv);
    out << '\n';
    auto cell = [&](const std::optional<double>& v) {
        out << ',';
        if (v) out << format_double(*v);
    };
    for (const auto& row : result.trace) {
        out << row.k << ',' << format_double(row.res_xy) << ',' << format_double(row.res_ux) << ','
            << format_double(row.step) << ',' << format_double(row.dist_xg);
        cell(row.sigma_w);
        cell(row.eta_k);
        out << ',';
        if (row.m_k) out << *row.m_k;
        for (const auto& r : row.invariants) cell(r);
        out << '\n';
    }
}

json summary_json(const ProblemInstance& problem, const RunConfig& config, const SolveResult& result) {
    json counts = json::object();
    json worst = json::object();
    for (std::size_t i = 0; i < result.invariants.size(); ++i) {
        const std::string name(to_string(result.invariants[i]));
        counts[name] = result.violations[i];
        worst[name] = result.worst[i];
    }
    json s;
    s["problem"] = problem.name;
    s["algorithm"] = std::string(to_string(config.algorithm));
    s["seed"] = config.seed;
    s["stop_reason"] = std::string(to_string(result.stop_reason));
    s["iterations"] = result.iterations;
    s["solution"] = to_json(result.solution);
    s["invariant_violations"] = result.total_violations();
    s["violations_by_invariant"] = counts;
    s["worst_residual"] = worst;
    if (problem.known_solution) s["distance_to_known_solution"] = (result.solution - *problem.known_solution).norm();
    return s;
}

ExperimentOutcome run_experiment(const RunConfig& config) {
    ExperimentOutcome outcome;
    std::optional<ProblemInstance> problem;
    try {
        problem = load_problem(config.problem, config.seed);
        const SolverParams params = resolve_params(config, *problem);
        RunOptions options;
        options.invariants = config.invariants;
        options.seed = config.seed;
        outcome.result = run(*problem, params, config.algorithm, options);
    } catch (const Error& e) {
        outcome.code = e.exit_code();
        outcome.message = e.what();
    }

    std::error_code ec;
    std::filesystem::create_directories(config.output, ec);
    if (ec) {
        outcome.code = ExitCode::Usage;
        outcome.message = "cannot create output directory '" + config.output.string() + "': " + ec.message();
        return outcome;
    }

    json summary;
    if (outcome.result) {
        const auto& r = *outcome.result;
        std::ofstream trace(config.output / "trace.csv", std::ios::binary);
        write_trace_csv(trace, r);
        summary = summary_json(*problem, config, r);
        if (r.total_violations() > 0) {
            outcome.code = ExitCode::Numerical;
            outcome.message = std::to_string(r.total_violations()) + " invariant violation(s)";
        } else if (r.stop_reason == StopReason::MaxIters) {
            outcome.code = ExitCode::NoConvergence;
            outcome.message = "iteration cap reached after " + std::to_string(r.iterations) + " iterations";
        }
    } else {
        summary["problem"] = config.problem.string();
        summary["algorithm"] = std::string(to_string(config.algorithm));
        summary["seed"] = config.seed;
    }
    summary["exit_code"] = static_cast<int>(outcome.code);
    if (!outcome.message.empty()) summary["message"] = outcome.message;
    std::ofstream(config.output / "summary.json", std::ios::binary) << summary.dump(2) << '\n';
    return outcome;
}

std::vector<ExperimentOutcome> run_batch(const std::vector<RunConfig>& configs, unsigned threads) {
    std::vector<ExperimentOutcome> outcomes(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) outcomes[i] = run_experiment(configs[i]);
    };
    const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    }
    return outcomes;
}

}  // namespace eqfix
