#include "eqfix/invariants.hpp"

#include "eqfix/errors.hpp"

#include <algorithm>

namespace eqfix {

std::string_view to_string(Invariant i) {
    switch (i) {
        case Invariant::Fejer: return "fejer";
        case Invariant::Descent: return "descent";
        case Invariant::QuasiNonexpansive: return "quasi_nonexpansive";
        case Invariant::Containment: return "containment";
        case Invariant::Monotone: return "monotone";
        case Invariant::Feasibility: return "feasibility";
        case Invariant::ProxOptimality: return "prox_optimality";
        case Invariant::Armijo: return "armijo";
        case Invariant::LinesearchSign: return "linesearch_sign";
        case Invariant::FastPath: return "fast_path";
        case Invariant::Boundedness: return "boundedness";
    }
    return "unknown";
}

std::optional<Invariant> parse_invariant(std::string_view name) {
    for (Invariant i : kAllInvariants)
        if (to_string(i) == name) return i;
    return std::nullopt;
}

double tolerance(Invariant i) {
    switch (i) {
        case Invariant::Fejer: return 1e-8;
        case Invariant::Descent: return 1e-8;
        case Invariant::QuasiNonexpansive: return 1e-10;
        case Invariant::Containment: return 1e-9;
        case Invariant::Monotone: return 1e-10;
        case Invariant::Feasibility: return 1e-9;
        case Invariant::ProxOptimality: return 1e-6;
        case Invariant::Armijo: return 0.0;
        case Invariant::LinesearchSign: return 0.0;
        case Invariant::FastPath: return 1e-10;
        case Invariant::Boundedness: return 1e-9;
    }
    return 0.0;
}

InvariantSelection InvariantSelection::parse(std::string_view spec) {
    if (spec == "all") return all();
    if (spec == "none" || spec.empty()) return none();
    std::vector<Invariant> list;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = std::min(spec.find(',', pos), spec.size());
        const std::string_view name = spec.substr(pos, comma - pos);
        const auto inv = parse_invariant(name);
        if (!inv) throw ParseError("check-invariants", "unknown invariant '" + std::string(name) + "'");
        if (std::find(list.begin(), list.end(), *inv) == list.end()) list.push_back(*inv);
        pos = comma + 1;
    }
    return only(std::move(list));
}

bool InvariantSelection::includes(Invariant i) const {
    return all_ || std::find(list_.begin(), list_.end(), i) != list_.end();
}

std::string InvariantSelection::describe() const {
    if (all_) return "all";
    if (list_.empty()) return "none";
    std::string out;
    for (Invariant i : list_) {
        if (!out.empty()) out += ',';
        out += to_string(i);
    }
    return out;
}

}  // namespace eqfix
