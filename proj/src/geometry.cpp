#include "eqfix/geometry.hpp"

#include "eqfix/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace eqfix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw ValidationError("set", std::string(what) + " has non-finite entries");
}

void require_dim(const Vector& x, std::size_t n, const char* where) {
    if (static_cast<std::size_t>(x.size()) != n) throw DimensionMismatch(where, n, static_cast<std::size_t>(x.size()));
}

}  // namespace

// ── Construction ────────────────────────────────────────────────────

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
    if (lower.size() == 0) throw ValidationError("set", "box of dimension 0");
    if (lower.size() != upper.size())
        throw DimensionMismatch("box bounds", static_cast<std::size_t>(lower.size()),
                                static_cast<std::size_t>(upper.size()));
    require_finite(lower, "box lower bound");
    require_finite(upper, "box upper bound");
    if ((lower.array() > upper.array()).any()) throw ValidationError("set", "box lower bound exceeds upper bound");
    return ConvexSet(Box{std::move(lower), std::move(upper)});
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
    if (center.size() == 0) throw ValidationError("set", "ball of dimension 0");
    require_finite(center, "ball center");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("set", "ball radius must be positive");
    return ConvexSet(Ball{std::move(center), radius});
}

ConvexSet ConvexSet::halfspace(Vector normal, double offset) {
    if (normal.size() == 0) throw ValidationError("set", "halfspace of dimension 0");
    require_finite(normal, "halfspace normal");
    if (!std::isfinite(offset)) throw ValidationError("set", "halfspace offset is not finite");
    if (normal.isZero(0.0) && offset < 0.0)
        throw ValidationError("set", "halfspace with zero normal and negative offset is empty");
    return ConvexSet(Halfspace{std::move(normal), offset});
}

ConvexSet ConvexSet::whole_space(std::size_t n) {
    if (n == 0) throw ValidationError("set", "space of dimension 0");
    return ConvexSet(Halfspace::whole_space(n));
}

ConvexSet ConvexSet::simplex(std::size_t n, double scale) {
    if (n == 0) throw ValidationError("set", "simplex of dimension 0");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("set", "simplex scale must be positive");
    return ConvexSet(Simplex{n, scale});
}

ConvexSet ConvexSet::intersection(std::vector<ConvexSet> members, Vector interior_point) {
    if (members.empty()) throw ValidationError("set", "intersection needs at least one member");
    for (const auto& m : members) require_dim(interior_point, m.dimension(), "intersection member");
    require_finite(interior_point, "intersection interior point");
    const ProjectionTolerances tol;
    for (const auto& m : members)
        if (infeasibility(m, interior_point) > tol.tol_feas)
            throw ValidationError("set", "intersection interior point lies outside a member");
    return ConvexSet(Intersection{std::move(members), std::move(interior_point)});
}

std::size_t ConvexSet::dimension() const {
    return std::visit(overloaded{
                          [](const Box& b) { return static_cast<std::size_t>(b.lower.size()); },
                          [](const Ball& b) { return static_cast<std::size_t>(b.center.size()); },
                          [](const Halfspace& h) { return static_cast<std::size_t>(h.normal.size()); },
                          [](const Simplex& s) { return s.dim; },
                          [](const Intersection& i) { return static_cast<std::size_t>(i.interior_point.size()); },
                      },
                      v_);
}

bool ConvexSet::is_bounded() const {
    return std::visit(overloaded{
                          [](const Halfspace&) { return false; },
                          [](const Intersection& i) {
                              return std::any_of(i.members.begin(), i.members.end(),
                                                 [](const ConvexSet& m) { return m.is_bounded(); });
                          },
                          [](const auto&) { return true; },
                      },
                      v_);
}

// ── Closed-form projections ─────────────────────────────────────────

Vector project_box(const Box& b, const Vector& x) {
    return x.cwiseMax(b.lower).cwiseMin(b.upper);
}

Vector project_ball(const Ball& b, const Vector& x) {
    const Vector d = x - b.center;
    const double r = d.norm();
    if (r <= b.radius) return x;
    return b.center + (b.radius / r) * d;
}

Vector project_halfspace(const Halfspace& h, const Vector& x) {
    const double excess = h.residual(x);
    if (excess <= 0.0) return x;
    const double nn = h.normal.squaredNorm();
    if (nn == 0.0) return x;
    return x - (excess / nn) * h.normal;
}

Vector project_simplex(const Vector& x, double scale) {
    const Eigen::Index n = x.size();
    std::vector<double> u(x.data(), x.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());

    // Largest j with u_j - (sum_{i<=j} u_i - scale)/j > 0.
    double cumsum = 0.0;
    double theta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumsum += u[static_cast<std::size_t>(j)];
        const double t = (cumsum - scale) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] - t > 0.0) theta = t;
    }
    return (x.array() - theta).max(0.0).matrix();
}

// ── Dispatch ────────────────────────────────────────────────────────

Vector project(const ConvexSet& set, const Vector& x, const ProjectionTolerances& tol) {
    require_dim(x, set.dimension(), "project");
    return std::visit(overloaded{
                          [&](const Box& b) { return project_box(b, x); },
                          [&](const Ball& b) { return project_ball(b, x); },
                          [&](const Halfspace& h) { return project_halfspace(h, x); },
                          [&](const Simplex& s) { return project_simplex(x, s.scale); },
                          [&](const Intersection& i) {
                              try {
                                  return project_intersection_dykstra(i.members, x, tol);
                              } catch (const NoConvergence& e) {
                                  throw EmptyIntersection(std::string("projection onto intersection: ") + e.what());
                              }
                          },
                      },
                      set.variant());
}

Vector project_intersection_dykstra(std::span<const ConvexSet> members, const Vector& x,
                                    const ProjectionTolerances& tol) {
    if (members.empty()) return x;
    for (const auto& m : members) require_dim(x, m.dimension(), "dykstra member");
    if (members.size() == 1) return project(members.front(), x, tol);

    const Eigen::Index n = x.size();
    std::vector<Vector> increments(members.size(), Vector::Zero(n));
    Vector current = x;
    double change = 0.0;
    double violation = 0.0;

    for (std::size_t iter = 0; iter < tol.max_iters; ++iter) {
        const Vector cycle_start = current;
        // The iterate can sit still for a cycle while the increments are
        // still moving, so both enter the change measure.
        double increment_change_sq = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const Vector shifted = current + increments[i];
            current = project(members[i], shifted, tol);
            Vector next = shifted - current;
            increment_change_sq += (next - increments[i]).squaredNorm();
            increments[i] = std::move(next);
        }
        change = std::max((current - cycle_start).norm(), std::sqrt(increment_change_sq));
        if (change >= tol.tol_proj) continue;

        violation = 0.0;
        for (const auto& m : members) violation = std::max(violation, infeasibility(m, current));
        if (violation < tol.tol_feas) return current;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, " cycles (last change %.3g, violation %.3g)", change, violation);
    throw NoConvergence("dykstra: no convergence after " + std::to_string(tol.max_iters) + detail);
}

namespace {

void split_members(const ConvexSet& set, std::vector<Halfspace>& cuts, std::vector<ConvexSet>& rest) {
    std::visit(overloaded{
                   [&](const Halfspace& h) {
                       if (!h.is_whole_space()) cuts.push_back(h);
                   },
                   [&](const Intersection& i) {
                       for (const auto& m : i.members) split_members(m, cuts, rest);
                   },
                   [&](const auto&) { rest.push_back(set); },
               },
               set.variant());
}

// J * M, where J is the (generalized) Jacobian of the projection onto `base`
// at v; null base means the whole space.
Matrix projection_jacobian_times(const ConvexSet* base, const Vector& v, const Matrix& M) {
    if (!base) return M;
    return std::visit(overloaded{
                          [&](const Box& b) -> Matrix {
                              Matrix out = M;
                              for (Eigen::Index i = 0; i < v.size(); ++i)
                                  if (!(v[i] > b.lower[i] && v[i] < b.upper[i])) out.row(i).setZero();
                              return out;
                          },
                          [&](const Ball& b) -> Matrix {
                              const Vector d = v - b.center;
                              const double r = d.norm();
                              if (r <= b.radius) return M;
                              const Vector e = d / r;
                              return (b.radius / r) * (M - e * (e.transpose() * M));
                          },
                          [&](const Simplex& s) -> Matrix {
                              const Vector p = project_simplex(v, s.scale);
                              Matrix out = Matrix::Zero(M.rows(), M.cols());
                              const auto free = (p.array() > 0.0).cast<double>().matrix();
                              const double count = free.sum();
                              if (count == 0.0) return out;
                              const Eigen::RowVectorXd mean = (free.transpose() * M) / count;
                              for (Eigen::Index i = 0; i < v.size(); ++i)
                                  if (free[i] > 0.0) out.row(i) = M.row(i) - mean;
                              return out;
                          },
                          [&](const auto&) -> Matrix { return M; },
                      },
                      base->variant());
}

// Maximizer of <g, d> - 1/2 d^T H d subject to lam + d >= 0, H positive
// definite. The active set is found by enumeration, so m must stay small.
Vector newton_model_step(const Matrix& H, const Vector& g, const Vector& lam) {
    const auto m = g.size();
    Vector best = Vector::Zero(m);
    double best_value = 0.0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<Eigen::Index> free, fixed;
        for (Eigen::Index i = 0; i < m; ++i) ((mask >> i) & 1u ? fixed : free).push_back(i);
        Vector d(m);
        for (auto i : fixed) d[i] = -lam[i];
        if (!free.empty()) {
            const auto f = static_cast<Eigen::Index>(free.size());
            Matrix Hf(f, f);
            Vector rhs(f);
            for (Eigen::Index r = 0; r < f; ++r) {
                rhs[r] = g[free[static_cast<std::size_t>(r)]];
                for (auto j : fixed) rhs[r] -= H(free[static_cast<std::size_t>(r)], j) * d[j];
                for (Eigen::Index c = 0; c < f; ++c)
                    Hf(r, c) = H(free[static_cast<std::size_t>(r)], free[static_cast<std::size_t>(c)]);
            }
            const Vector df = Hf.ldlt().solve(rhs);
            for (Eigen::Index r = 0; r < f; ++r) d[free[static_cast<std::size_t>(r)]] = df[r];
        }
        if (!d.allFinite() || ((lam + d).array() < 0.0).any()) continue;
        const double value = g.dot(d) - 0.5 * d.dot(H * d);
        if (value > best_value) {
            best_value = value;
            best = d;
        }
    }
    return best;
}

}  // namespace

Vector project_with_cuts(const ConvexSet& base, std::span<const Halfspace> cuts, const Vector& x,
                         const ProjectionTolerances& tol) {
    require_dim(x, base.dimension(), "project_with_cuts");
    std::vector<Halfspace> hs;
    std::vector<ConvexSet> rest;
    for (const auto& c : cuts) {
        require_dim(c.normal, base.dimension(), "cut");
        if (!c.is_whole_space()) hs.push_back(c);
    }
    split_members(base, hs, rest);

    auto dykstra = [&] {
        std::vector<ConvexSet> members;
        for (const auto& h : hs) members.push_back(ConvexSet::halfspace(h.normal, h.offset));
        members.insert(members.end(), rest.begin(), rest.end());
        return project_intersection_dykstra(members, x, tol);
    };
    if (hs.empty()) return rest.empty() ? x : (rest.size() == 1 ? project(rest.front(), x, tol) : dykstra());
    if (rest.size() > 1 || hs.size() > 12) return dykstra();

    // Unit normals, so multipliers and constraint values are distances.
    const ConvexSet* K = rest.empty() ? nullptr : &rest.front();
    const auto m = static_cast<Eigen::Index>(hs.size());
    Matrix A(m, x.size());
    Vector b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double nn = hs[static_cast<std::size_t>(i)].normal.norm();
        if (nn == 0.0) throw EmptyIntersection("cut with zero normal and negative offset");
        A.row(i) = hs[static_cast<std::size_t>(i)].normal.transpose() / nn;
        b[i] = hs[static_cast<std::size_t>(i)].offset / nn;
    }
    const Matrix At = A.transpose();

    // Dual: maximize g(lam) = 1/2 |p - x|^2 + <lam, A p - b> over lam >= 0,
    // p = P_K(x - A^T lam); grad g = A p - b.
    auto primal = [&](const Vector& lam) -> Vector {
        const Vector v = x - At * lam;
        return K ? project(*K, v, tol) : v;
    };

    const double scale = 1.0 + x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
    const double kkt_tol = std::max(1e-3 * tol.tol_proj, 1e-15 * scale);
    Vector lam = Vector::Zero(m);
    Vector p = primal(lam);
    bool converged = false;

    for (int it = 0; it < 100 && lam.lpNorm<Eigen::Infinity>() < 1e15; ++it) {
        const Vector grad = A * p - b;
        if ((lam - (lam + grad).cwiseMax(0.0)).lpNorm<Eigen::Infinity>() <= kkt_tol) {
            converged = true;
            break;
        }
        Matrix H = A * projection_jacobian_times(K, x - At * lam, At);
        H.diagonal().array() += 1e-12 * (1.0 + H.trace());
        const Vector d = newton_model_step(H, grad, lam);

        // Exact line search on the segment: phi'(t) = <d, grad g(lam + t d)>
        // is nonincreasing, so locate its sign change.
        auto slope = [&](double t) { return d.dot(A * primal(lam + t * d) - b); };
        const double s0 = d.dot(grad);
        if (!(s0 > 0.0)) break;
        double t = 1.0;
        double s1 = slope(1.0);
        if (s1 < 0.0) {
            double lo = 0.0, hi = 1.0, slo = s0, shi = s1;
            int side = 0;
            for (int j = 0; j < 100 && hi - lo > 1e-16 * hi; ++j) {
                t = (lo * shi - hi * slo) / (shi - slo);
                if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
                const double st = slope(t);
                if (st == 0.0) break;
                if (st > 0.0) {
                    lo = t;
                    slo = st;
                    if (side == 1) shi *= 0.5;  // Illinois correction
                    side = 1;
                } else {
                    hi = t;
                    shi = st;
                    if (side == -1) slo *= 0.5;
                    side = -1;
                }
            }
        }
        const Vector next = (lam + t * d).cwiseMax(0.0);
        if (next == lam) break;
        lam = next;
        p = primal(lam);
    }
    if (converged && ((A * p - b).maxCoeff() <= tol.tol_feas)) return p;
    return dykstra();
}

// ── Feasibility ─────────────────────────────────────────────────────

double infeasibility(const ConvexSet& set, const Vector& x) {
    require_dim(x, set.dimension(), "infeasibility");
    return std::visit(overloaded{
                          [&](const Box& b) { return (x - project_box(b, x)).norm(); },
                          [&](const Ball& b) { return std::max(0.0, (x - b.center).norm() - b.radius); },
                          [&](const Halfspace& h) {
                              const double nn = h.normal.norm();
                              if (nn == 0.0) return 0.0;
                              return std::max(0.0, h.residual(x)) / nn;
                          },
                          [&](const Simplex& s) { return (x - project_simplex(x, s.scale)).norm(); },
                          [&](const Intersection& i) {
                              double worst = 0.0;
                              for (const auto& m : i.members) worst = std::max(worst, infeasibility(m, x));
                              return worst;
                          },
                      },
                      set.variant());
}

bool contains(const ConvexSet& set, const Vector& x, double tol) { return infeasibility(set, x) <= tol; }

bool check_projection_optimality(const ConvexSet& set, const Vector& x, const Vector& p,
                                 std::span<const Vector> probes, double tol_vi, double tol_feas) {
    if (infeasibility(set, p) > tol_feas) return false;
    const Vector r = x - p;
    for (const auto& probe : probes) {
        const Vector y = contains(set, probe, 0.0) ? probe : project(set, probe);
        if (r.dot(y - p) > tol_vi) return false;
    }
    return true;
}

// ── Sampling ────────────────────────────────────────────────────────

namespace {

Vector gaussian(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
}

Vector unit_direction(Eigen::Index n, Rng& rng) {
    Vector v = gaussian(n, rng);
    double nv = v.norm();
    while (nv == 0.0) {
        v = gaussian(n, rng);
        nv = v.norm();
    }
    return v / nv;
}

}  // namespace

Vector sample_point(const ConvexSet& set, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return std::visit(
        overloaded{
            [&](const Box& b) {
                Vector v(b.lower.size());
                for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = b.lower[i] + unit(rng) * (b.upper[i] - b.lower[i]);
                return v;
            },
            [&](const Ball& b) {
                const auto n = b.center.size();
                const double r = b.radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
                return Vector(b.center + r * unit_direction(n, rng));
            },
            [&](const Halfspace& h) {
                const auto n = h.normal.size();
                const double nn = h.normal.norm();
                // Cloud around the boundary point closest to the origin.
                Vector anchor = Vector::Zero(n);
                double spread = 1.0;
                if (nn > 0.0) {
                    anchor = (h.offset / (nn * nn)) * h.normal;
                    spread += std::abs(h.offset) / nn;
                }
                return project_halfspace(h, Vector(anchor + spread * gaussian(n, rng)));
            },
            [&](const Simplex& s) {
                std::exponential_distribution<double> expo(1.0);
                Vector v(static_cast<Eigen::Index>(s.dim));
                for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = expo(rng);
                return Vector(s.scale * v / v.sum());
            },
            [&](const Intersection& in) {
                for (const auto& m : in.members) {
                    if (!m.is_bounded()) continue;
                    try {
                        return project(set, sample_point(m, rng));
                    } catch (const EmptyIntersection&) {
                        return in.interior_point;
                    }
                }
                try {
                    return project(set, Vector(in.interior_point + gaussian(in.interior_point.size(), rng)));
                } catch (const EmptyIntersection&) {
                    return in.interior_point;
                }
            },
        },
        set.variant());
}

std::vector<Vector> extreme_points(const ConvexSet& set, Rng& rng, std::size_t limit) {
    std::vector<Vector> out;
    std::visit(overloaded{
                   [&](const Box& b) {
                       const auto n = static_cast<std::size_t>(b.lower.size());
                       auto vertex = [&](auto bit) {
                           Vector v(b.lower.size());
                           for (std::size_t i = 0; i < n; ++i)
                               v[static_cast<Eigen::Index>(i)] = bit(i) ? b.upper[static_cast<Eigen::Index>(i)]
                                                                        : b.lower[static_cast<Eigen::Index>(i)];
                           return v;
                       };
                       if (n <= 10 && (std::size_t{1} << n) <= limit) {
                           for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask)
                               out.push_back(vertex([mask](std::size_t i) { return (mask >> i) & 1U; }));
                       } else {
                           std::bernoulli_distribution coin(0.5);
                           for (std::size_t k = 0; k < limit; ++k) {
                               std::vector<bool> bits(n);
                               for (std::size_t i = 0; i < n; ++i) bits[i] = coin(rng);
                               out.push_back(vertex([&bits](std::size_t i) { return bits[i]; }));
                           }
                       }
                   },
                   [&](const Ball& b) {
                       const auto n = b.center.size();
                       for (Eigen::Index i = 0; i < n && out.size() < limit; ++i) {
                           out.push_back(b.center + b.radius * Vector::Unit(n, i));
                           out.push_back(b.center - b.radius * Vector::Unit(n, i));
                       }
                       const std::size_t extra = std::min<std::size_t>(limit, 2 * static_cast<std::size_t>(n) + 16);
                       while (out.size() < extra) out.push_back(b.center + b.radius * unit_direction(n, rng));
                   },
                   [&](const Halfspace&) {},
                   [&](const Simplex& s) {
                       const auto n = static_cast<Eigen::Index>(s.dim);
                       for (Eigen::Index i = 0; i < n && out.size() < limit; ++i) out.push_back(s.scale * Vector::Unit(n, i));
                   },
                   [&](const Intersection& in) {
                       for (const auto& m : in.members) {
                           for (const auto& e : extreme_points(m, rng, limit)) {
                               if (out.size() >= limit) return;
                               try {
                                   out.push_back(project(set, e));
                               } catch (const EmptyIntersection&) {
                               }
                           }
                       }
                   },
               },
               set.variant());
    return out;
}

std::vector<Vector> sample_points(const ConvexSet& set, std::size_t count, Rng& rng) {
    std::vector<Vector> out;
    out.reserve(count);
    auto extremes = extreme_points(set, rng, std::max<std::size_t>(count / 4, 1));
    for (auto& e : extremes) {
        if (out.size() >= count / 4) break;
        out.push_back(std::move(e));
    }
    while (out.size() < count) out.push_back(sample_point(set, rng));
    return out;
}

}  // namespace eqfix
