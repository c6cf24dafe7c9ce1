#pragma once

#include "eqfix/algorithms.hpp"

#include <random>

namespace eqfix::detail {

/// Evaluates the selected invariants on each IterateState. Checks that need
/// a known solution, the Lipschitz constants or a particular algorithm are
/// silently dropped when their inputs are missing.
class InvariantMonitor {
public:
    InvariantMonitor(const ProblemInstance& problem, const SolverParams& params, Algorithm algorithm,
                     const InvariantSelection& selection, std::uint64_t seed);

    const std::vector<Invariant>& active() const { return active_; }

    /// One residual per active invariant; nullopt when the check does not
    /// apply to this iteration (e.g. Armijo after the y = x shortcut).
    std::vector<std::optional<double>> measure(const IterateState& s);

private:
    std::optional<double> residual(Invariant inv, const IterateState& s);

    const ProblemInstance& problem_;
    const SolverParams& params_;
    std::vector<Invariant> active_;
    std::vector<Vector> probes_;
    Rng rng_;
};

}  // namespace eqfix::detail
