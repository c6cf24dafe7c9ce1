#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eqfix {

/// Runtime checks evaluated once per outer iteration. Each produces a
/// residual that must stay at or below its tolerance.
enum class Invariant {
    Fejer,              // extragradient: |z-q|^2 <= |x-q|^2 - (1-2 rho L1)|x-y|^2 - (1-2 rho L2)|y-z|^2
    Descent,            // linesearch: |v-q|^2 <= |x-q|^2 - gamma (2-gamma) (sigma |w|)^2
    QuasiNonexpansive,  // |t-q| <= |x-q| and |u-q| <= |x-q|
    Containment,        // q in Ck and q in Qk
    Monotone,           // |x^{k+1} - x^g| >= |x^k - x^g|
    Feasibility,        // x^{k+1} in Ck ∩ Qk ∩ C
    ProxOptimality,     // rho [f(x,y') - f(x,y)] >= <y-x, y-y'> on sampled y' in C
    Armijo,             // accepted at m_k, rejected at m_k - 1
    LinesearchSign,     // f(z,x) > 0 and |w| > 1e-14 after a linesearch
    FastPath,           // VI bifunctions: y == P_C(x - rho F(x))
    Boundedness,        // |y-x| <= 2 rho |w~|, w~ in ∂2 f(x, x)
};

inline constexpr Invariant kAllInvariants[] = {
    Invariant::Fejer,          Invariant::Descent,        Invariant::QuasiNonexpansive, Invariant::Containment,
    Invariant::Monotone,       Invariant::Feasibility,    Invariant::ProxOptimality,    Invariant::Armijo,
    Invariant::LinesearchSign, Invariant::FastPath,       Invariant::Boundedness,
};

std::string_view to_string(Invariant i);
std::optional<Invariant> parse_invariant(std::string_view name);
/// Violation threshold on the residual.
double tolerance(Invariant i);

/// Which invariants to evaluate: "all", "none", or a comma-separated list.
class InvariantSelection {
public:
    static InvariantSelection all() { return InvariantSelection(true, {}); }
    static InvariantSelection none() { return InvariantSelection(false, {}); }
    static InvariantSelection only(std::vector<Invariant> list) { return InvariantSelection(false, std::move(list)); }
    /// Throws ParseError on an unknown name.
    static InvariantSelection parse(std::string_view spec);

    bool includes(Invariant i) const;
    std::string describe() const;

private:
    InvariantSelection(bool all, std::vector<Invariant> list) : all_(all), list_(std::move(list)) {}
    bool all_ = false;
    std::vector<Invariant> list_;
};

}  // namespace eqfix
