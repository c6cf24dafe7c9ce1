#include "monitor.hpp"

#include <algorithm>
#include <cmath>

namespace eqfix::detail {

namespace {

constexpr std::size_t kProbePool = 64;
constexpr std::size_t kProbesPerIteration = 4;

double halfspace_distance(const Halfspace& h, const Vector& x) {
    const double nn = h.normal.norm();
    return nn == 0.0 ? 0.0 : std::max(0.0, h.residual(x)) / nn;
}

}  // namespace

InvariantMonitor::InvariantMonitor(const ProblemInstance& problem, const SolverParams& params,
                                   Algorithm algorithm, const InvariantSelection& selection, std::uint64_t seed)
    : problem_(problem), params_(params), rng_(seed) {
    const bool has_q = problem.known_solution.has_value();
    const bool extragradient = algorithm == Algorithm::Extragradient;
    for (Invariant inv : kAllInvariants) {
        if (!selection.includes(inv)) continue;
        bool applies = true;
        switch (inv) {
            case Invariant::Fejer: applies = extragradient && has_q && problem.lipschitz.has_value(); break;
            case Invariant::Descent: applies = !extragradient && has_q; break;
            case Invariant::QuasiNonexpansive:
            case Invariant::Containment: applies = has_q; break;
            case Invariant::Armijo:
            case Invariant::LinesearchSign: applies = !extragradient; break;
            case Invariant::FastPath: applies = problem.f.is_vi(); break;
            default: break;
        }
        if (applies) active_.push_back(inv);
    }
    if (std::find(active_.begin(), active_.end(), Invariant::ProxOptimality) != active_.end()) {
        probes_ = sample_points(problem.set, kProbePool, rng_);
        if (has_q) probes_.push_back(*problem.known_solution);
    }
}

std::vector<std::optional<double>> InvariantMonitor::measure(const IterateState& s) {
    std::vector<std::optional<double>> out;
    out.reserve(active_.size());
    for (Invariant inv : active_) out.push_back(residual(inv, s));
    return out;
}

std::optional<double> InvariantMonitor::residual(Invariant inv, const IterateState& s) {
    const auto& f = problem_.f;
    const Vector& xg = problem_.start;
    switch (inv) {
        case Invariant::Fejer: {
            const Vector& q = *problem_.known_solution;
            const auto& L = *problem_.lipschitz;
            const double bound = (s.x - q).squaredNorm() - (1.0 - 2.0 * s.rho * L.L1) * (s.x - s.y).squaredNorm() -
                                 (1.0 - 2.0 * s.rho * L.L2) * (s.y - s.z).squaredNorm();
            return (s.z - q).squaredNorm() - bound;
        }
        case Invariant::Descent: {
            const Vector& q = *problem_.known_solution;
            const double g = s.gamma.value_or(1.0);
            const double sw = (s.sigma && s.w) ? *s.sigma * s.w->norm() : 0.0;
            return (*s.v - q).squaredNorm() - (s.x - q).squaredNorm() + g * (2.0 - g) * sw * sw;
        }
        case Invariant::QuasiNonexpansive: {
            const Vector& q = *problem_.known_solution;
            const double base = (s.x - q).norm();
            return std::max((s.t - q).norm() - base, (s.u - q).norm() - base);
        }
        case Invariant::Containment: {
            const Vector& q = *problem_.known_solution;
            return std::max(s.Ck.residual(q), s.Qk.residual(q));
        }
        case Invariant::Monotone: return (s.x - xg).norm() - (s.x_next - xg).norm();
        case Invariant::Feasibility:
            return std::max({halfspace_distance(s.Ck, s.x_next), halfspace_distance(s.Qk, s.x_next),
                             infeasibility(problem_.set, s.x_next)});
        case Invariant::ProxOptimality: {
            std::uniform_int_distribution<std::size_t> pick(0, probes_.size() - 1);
            const double fy = f.evaluate(s.x, s.y);
            double worst = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < kProbesPerIteration; ++i) {
                const Vector& p = probes_[pick(rng_)];
                worst = std::max(worst, (s.y - s.x).dot(s.y - p) - s.rho * (f.evaluate(s.x, p) - fy));
            }
            if (problem_.known_solution) {
                const Vector& q = *problem_.known_solution;
                worst = std::max(worst, (s.y - s.x).dot(s.y - q) - s.rho * (f.evaluate(s.x, q) - fy));
            }
            return worst;
        }
        case Invariant::Armijo: {
            if (!s.m_k) return std::nullopt;
            const int m = *s.m_k;
            double r = -armijo_gap(f, s.x, s.y, std::pow(params_.eta, m), s.rho, params_.mu);
            if (m > 1) r = std::max(r, armijo_gap(f, s.x, s.y, std::pow(params_.eta, m - 1), s.rho, params_.mu));
            return r;
        }
        case Invariant::LinesearchSign: {
            if (!s.m_k || !s.w) return std::nullopt;
            return std::max(-f.evaluate(s.z, s.x), 1e-14 - s.w->norm());
        }
        case Invariant::FastPath: {
            const Vector slope = f.partial_subgradient(s.x, s.x);
            const Vector reference = project(problem_.set, Vector(s.x - s.rho * slope));
            return (s.y - reference).norm();
        }
        case Invariant::Boundedness: {
            const Vector w0 = f.partial_subgradient(s.x, s.x);
            return (s.y - s.x).norm() - 2.0 * s.rho * w0.norm();
        }
    }
    return std::nullopt;
}

}  // namespace eqfix::detail
