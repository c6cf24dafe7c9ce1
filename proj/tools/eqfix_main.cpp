// Command-line front end: validate, run, certify-mapping, estimate-lipschitz, batch.

#include "eqfix/errors.hpp"
#include "eqfix/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <thread>

namespace {

using namespace eqfix;
using nlohmann::json;

struct Overrides {
    std::string algorithm;
    std::optional<double> tol;
    std::optional<std::size_t> max_iters;
    std::optional<std::uint64_t> seed;
    std::string invariants;
    std::string output;

    void attach(CLI::App* cmd) {
        cmd->add_option("--algorithm", algorithm, "extragradient or linesearch")
            ->check(CLI::IsMember({"extragradient", "linesearch"}));
        cmd->add_option("--tol", tol, "stopping tolerance on the residuals")->check(CLI::NonNegativeNumber);
        cmd->add_option("--max-iters", max_iters, "outer iteration cap");
        cmd->add_option("--seed", seed, "seed for the sampling-based checks");
        cmd->add_option("--check-invariants", invariants, "all, none, or a comma-separated list");
        cmd->add_option("--output", output, "output directory");
    }

    void apply(RunConfig& c) const {
        if (!algorithm.empty()) c.algorithm = *parse_algorithm(algorithm);
        if (tol) c.tol_stop = *tol;
        if (max_iters) c.max_outer_iters = *max_iters;
        if (seed) c.seed = *seed;
        if (!invariants.empty()) c.invariants = InvariantSelection::parse(invariants);
        if (!output.empty()) c.output = output;
    }
};

json lipschitz_json(const LipschitzConstants& L) { return {{"L1", L.L1}, {"L2", L.L2}}; }

json hybrid_json(const HybridParams& h) { return json::array({h.alpha, h.beta, h.gamma, h.delta}); }

int report(const ExperimentOutcome& o, const RunConfig& c) {
    if (o.result) {
        std::cout << c.output.string() << ": " << to_string(o.result->stop_reason) << " after "
                  << o.result->iterations << " iterations, " << o.result->total_violations()
                  << " invariant violations\n";
    }
    if (!o.message.empty()) std::cerr << c.problem.string() << ": " << o.message << '\n';
    return static_cast<int>(o.code);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid extragradient solver for equilibrium and fixed-point problems"};
    app.require_subcommand(1);

    std::string file;
    std::uint64_t seed = 0;
    std::size_t samples = 0;

    auto* validate = app.add_subcommand("validate", "parse and check a problem file");
    validate->add_option("file", file, "problem file")->required();
    validate->add_option("--seed", seed, "seed for the sampling-based checks");

    Overrides run_flags;
    auto* run = app.add_subcommand("run", "run one experiment");
    run->add_option("config", file, "run config or problem file")->required();
    run_flags.attach(run);

    std::vector<double> params;
    auto* certify = app.add_subcommand("certify-mapping", "sample the hybrid inequality for the problem's T");
    certify->add_option("file", file, "problem file")->required();
    certify->add_option("--params", params, "alpha beta gamma delta (default: file's, else 1 0 -1 0)")->expected(4);
    certify->add_option("--samples", samples, "number of sampled pairs")->default_val(10000);
    certify->add_option("--seed", seed, "sampling seed");

    auto* lipschitz = app.add_subcommand("estimate-lipschitz", "estimate Lipschitz-type constants of f on C");
    lipschitz->add_option("file", file, "problem file")->required();
    lipschitz->add_option("--samples", samples, "number of sampled triples")->default_val(1000);
    lipschitz->add_option("--seed", seed, "sampling seed");

    std::vector<std::string> batch_files;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    Overrides batch_flags;
    auto* batch = app.add_subcommand("batch", "run several configs in parallel");
    batch->add_option("configs", batch_files, "run configs")->required();
    batch->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    batch_flags.attach(batch);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::Usage);
    }

    try {
        if (*validate) {
            ValidationReport r;
            const auto problem = load_problem(file, seed, &r);
            json out{{"name", problem.name},
                     {"dimension", problem.dimension},
                     {"lipschitz", lipschitz_json(*problem.lipschitz)},
                     {"lipschitz_source", r.lipschitz_source},
                     {"hybrid_params", hybrid_json(*r.hybrid)},
                     {"self_map_violation", r.self_map_violation},
                     {"known_solution", problem.known_solution.has_value()}};
            std::cout << out.dump(2) << '\n';
            return 0;
        }
        if (*run) {
            RunConfig c = load_run_config(file);
            run_flags.apply(c);
            return report(run_experiment(c), c);
        }
        if (*certify) {
            const auto problem = parse_problem(read_json_file(file));
            HybridParams h = HybridParams::nonexpansive();
            if (!params.empty()) h = {params[0], params[1], params[2], params[3]};
            else if (problem.T.hybrid_params()) h = *problem.T.hybrid_params();
            Rng rng(seed);
            const auto r = certify_hybrid(problem.T, h, problem.set, samples, rng);
            json out{{"params", hybrid_json(h)},
                     {"passed", r.passed()},
                     {"max_lhs", r.max_lhs},
                     {"conditions", {r.condition1, r.condition2, r.condition3}},
                     {"pairs", r.pairs},
                     {"max_pair_distance_sq", r.max_pair_distance_sq},
                     {"worst_x", to_json(r.worst_x)},
                     {"worst_y", to_json(r.worst_y)}};
            std::cout << out.dump(2) << '\n';
            return r.passed() ? 0 : static_cast<int>(ExitCode::Validation);
        }
        if (*lipschitz) {
            const auto problem = parse_problem(read_json_file(file));
            Rng rng(seed);
            const auto e = estimate_lipschitz(problem.f, problem.set, samples, rng);
            json out{{"estimate", lipschitz_json(e.constants)},
                     {"grid_value", e.grid_value},
                     {"sampled_ratio", e.sampled_ratio},
                     {"triples", e.triples}};
            out["analytic"] = e.analytic ? lipschitz_json(*e.analytic) : json(nullptr);
            std::cout << out.dump(2) << '\n';
            return 0;
        }
        if (*batch) {
            std::vector<RunConfig> configs;
            for (const auto& f : batch_files) {
                RunConfig c = load_run_config(f);
                batch_flags.apply(c);
                if (!batch_flags.output.empty()) c.output = std::filesystem::path(batch_flags.output) / std::filesystem::path(f).stem();
                configs.push_back(std::move(c));
            }
            const auto outcomes = run_batch(configs, threads);
            int worst = 0;
            for (std::size_t i = 0; i < outcomes.size(); ++i) worst = std::max(worst, report(outcomes[i], configs[i]));
            return worst;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    }
    return 0;
}
