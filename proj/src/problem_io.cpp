#include "eqfix/problem_io.hpp"

#include "eqfix/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace eqfix {

using nlohmann::json;

namespace {

constexpr std::size_t kCertifySamples = 1000;
constexpr std::size_t kSelfMapSamples = 256;
constexpr std::size_t kSolutionSamples = 256;
constexpr std::size_t kLipschitzSamples = 1000;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

double parse_number(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError(field, "'" + text + "' is not a number");
    }
}

class Parser {
public:
    explicit Parser(const json& doc) : doc_(doc) {
        if (!doc.is_object()) throw ParseError("", "problem file must be a JSON object");
        if (!doc.contains("dimension")) throw ParseError("dimension", "missing");
        const auto& d = doc["dimension"];
        if (!d.is_number_integer() || d.get<long long>() < 1) throw ParseError("dimension", "must be a positive integer");
        n_ = d.get<std::size_t>();
    }

    std::size_t dimension() const { return n_; }

    const json& require(const json& obj, const std::string& key, const std::string& path) const {
        if (!obj.is_object() || !obj.contains(key)) throw ParseError(path + key, "missing");
        return obj[key];
    }

    double number(const json& j, const std::string& field) const {
        if (!j.is_number()) throw ParseError(field, "expected a number");
        return j.get<double>();
    }

    const json& registry_entry(const char* registry, const std::string& id, const std::string& field) const {
        if (!doc_.contains(registry) || !doc_[registry].is_object() || !doc_[registry].contains(id))
            throw ParseError(field, std::string("unknown ") + registry + " id '" + id + "'");
        return doc_[registry][id];
    }

    Vector vector(const json& j, const std::string& field, std::optional<std::size_t> len = {}) const {
        if (j.is_string()) return vector(registry_entry("vectors", j.get<std::string>(), field), field, len);
        if (!j.is_array()) throw ParseError(field, "expected an array of numbers");
        Vector v(static_cast<Eigen::Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i)
            v[static_cast<Eigen::Index>(i)] = number(j[i], field + "[" + std::to_string(i) + "]");
        const std::size_t want = len.value_or(n_);
        if (j.size() != want) throw DimensionMismatch(field, want, j.size());
        return v;
    }

    Matrix matrix(const json& j, const std::string& field) const {
        if (j.is_string()) return matrix(registry_entry("matrices", j.get<std::string>(), field), field);
        if (!j.is_array()) throw ParseError(field, "expected a row-major array of rows");
        if (j.size() != n_) throw DimensionMismatch(field + " rows", n_, j.size());
        Matrix m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (std::size_t r = 0; r < n_; ++r) {
            const Vector row = vector(j[r], field + "[" + std::to_string(r) + "]");
            m.row(static_cast<Eigen::Index>(r)) = row.transpose();
        }
        return m;
    }

    ConvexSet set(const json& j, const std::string& field) const {
        if (j.is_string()) return set(registry_entry("sets", j.get<std::string>(), field), field);
        if (!j.is_object()) throw ParseError(field, "expected a set object or a set id");
        const auto& type_j = require(j, "type", field + ".");
        if (!type_j.is_string()) throw ParseError(field + ".type", "expected a string");
        const auto type = type_j.get<std::string>();
        const std::string p = field + ".";
        if (type == "box") return ConvexSet::box(vector(require(j, "lower", p), p + "lower"), vector(require(j, "upper", p), p + "upper"));
        if (type == "ball")
            return ConvexSet::ball(vector(require(j, "center", p), p + "center"), number(require(j, "radius", p), p + "radius"));
        if (type == "halfspace")
            return ConvexSet::halfspace(vector(require(j, "normal", p), p + "normal"), number(require(j, "offset", p), p + "offset"));
        if (type == "whole_space") return ConvexSet::whole_space(n_);
        if (type == "simplex") return ConvexSet::simplex(n_, j.contains("scale") ? number(j["scale"], p + "scale") : 1.0);
        if (type == "intersection") {
            const auto& members_j = require(j, "members", p);
            if (!members_j.is_array() || members_j.empty()) throw ParseError(p + "members", "expected a nonempty array");
            std::vector<ConvexSet> members;
            for (std::size_t i = 0; i < members_j.size(); ++i)
                members.push_back(set(members_j[i], p + "members[" + std::to_string(i) + "]"));
            return ConvexSet::intersection(std::move(members), vector(require(j, "interior_point", p), p + "interior_point"));
        }
        throw ParseError(p + "type", "unknown set type '" + type + "'");
    }

    Operator vi_operator(const std::string& name, const json& j, const std::string& field) const {
        if (name == "identity") return IdentityOperator{};
        if (name == "rotation") return RotationOperator{number(require(j, "theta", field + "."), field + ".theta")};
        if (name == "affine") {
            Vector b = j.contains("b") ? vector(j["b"], field + ".b") : Vector::Zero(static_cast<Eigen::Index>(n_));
            return AffineOperator{matrix(require(j, "A", field + "."), field + ".A"), std::move(b)};
        }
        throw ParseError(field + ".operator", "unknown operator '" + name + "'");
    }

    Bifunction bifunction(const json& j) const {
        const std::string field = "f";
        if (j.is_string()) {
            const auto parts = split(j.get<std::string>(), ':');
            if (parts.size() < 2 || parts[0] != "vi")
                throw ParseError(field, "expected 'vi:<operator>' or an object, got '" + j.get<std::string>() + "'");
            if (parts[1] == "identity" && parts.size() == 2) return Bifunction::vi(IdentityOperator{}, n_);
            if (parts[1] == "rotation" && parts.size() == 3)
                return Bifunction::vi(RotationOperator{parse_number(parts[2], field)}, n_);
            if (parts[1] == "affine" && (parts.size() == 3 || parts.size() == 4)) {
                Vector b = parts.size() == 4 ? vector(json(parts[3]), field) : Vector::Zero(static_cast<Eigen::Index>(n_));
                return Bifunction::vi(AffineOperator{matrix(json(parts[2]), field), std::move(b)}, n_);
            }
            throw ParseError(field, "unknown operator spec '" + j.get<std::string>() + "'");
        }
        if (!j.is_object()) throw ParseError(field, "expected a string or an object");
        const auto& type = require(j, "type", "f.");
        if (type == "vi") {
            const auto& op = require(j, "operator", "f.");
            if (!op.is_string()) throw ParseError("f.operator", "expected a string");
            return Bifunction::vi(vi_operator(op.get<std::string>(), j, field), n_);
        }
        if (type == "quadratic")
            return Bifunction::quadratic(matrix(require(j, "P", "f."), "f.P"), matrix(require(j, "Q", "f."), "f.Q"),
                                         j.contains("q") ? vector(j["q"], "f.q") : Vector::Zero(static_cast<Eigen::Index>(n_)));
        throw ParseError("f.type", "unknown bifunction type");
    }

    FixedPointMap mapping(const json& j) const {
        const std::string field = "T";
        std::string type;
        json args = json::object();
        if (j.is_string()) {
            const auto parts = split(j.get<std::string>(), ':');
            if (parts.empty()) throw ParseError(field, "empty mapping spec");
            type = parts[0];
            if (type == "scaling" && parts.size() == 2) args["c"] = parse_number(parts[1], field);
            else if (type == "project" && parts.size() == 2) args["set"] = parts[1];
            else if (type == "affine" && (parts.size() == 2 || parts.size() == 3)) {
                args["A"] = parts[1];
                if (parts.size() == 3) args["b"] = parts[2];
            } else if (!(type == "identity" && parts.size() == 1))
                throw ParseError(field, "unknown mapping spec '" + j.get<std::string>() + "'");
        } else if (j.is_object()) {
            const auto& t = require(j, "type", "T.");
            if (!t.is_string()) throw ParseError("T.type", "expected a string");
            type = t.get<std::string>();
            args = j;
        } else {
            throw ParseError(field, "expected a string or an object");
        }

        if (type == "identity") return FixedPointMap::identity(n_);
        if (type == "scaling") return FixedPointMap::unchecked(ScalingMap{number(require(args, "c", "T."), "T.c")}, n_);
        if (type == "project") return FixedPointMap::projection(set(require(args, "set", "T."), "T.set"));
        if (type == "affine") {
            Vector b = args.contains("b") ? vector(args["b"], "T.b") : Vector::Zero(static_cast<Eigen::Index>(n_));
            return FixedPointMap::unchecked(AffineMap{matrix(require(args, "A", "T."), "T.A"), std::move(b)}, n_);
        }
        throw ParseError("T.type", "unknown mapping type '" + type + "'");
    }

    HybridParams hybrid(const json& j) const {
        if (j.is_array()) {
            if (j.size() != 4) throw ParseError("hybrid_params", "expected [alpha, beta, gamma, delta]");
            return {number(j[0], "hybrid_params[0]"), number(j[1], "hybrid_params[1]"), number(j[2], "hybrid_params[2]"),
                    number(j[3], "hybrid_params[3]")};
        }
        if (j.is_object())
            return {number(require(j, "alpha", "hybrid_params."), "hybrid_params.alpha"),
                    number(require(j, "beta", "hybrid_params."), "hybrid_params.beta"),
                    number(require(j, "gamma", "hybrid_params."), "hybrid_params.gamma"),
                    number(require(j, "delta", "hybrid_params."), "hybrid_params.delta")};
        throw ParseError("hybrid_params", "expected an array or an object");
    }

private:
    const json& doc_;
    std::size_t n_ = 0;
};

}  // namespace

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min(e.byte, text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
        throw ParseError("", e.what(), line);
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str());
}

ProblemInstance parse_problem(const json& doc) {
    try {
        Parser p(doc);
        const std::size_t n = p.dimension();
        ConvexSet C = p.set(p.require(doc, "set", ""), "set");
        if (C.dimension() != n) throw DimensionMismatch("set", n, C.dimension());
        Bifunction f = p.bifunction(p.require(doc, "f", ""));
        FixedPointMap T = p.mapping(p.require(doc, "T", ""));
        if (doc.contains("hybrid_params")) T.set_hybrid_params(p.hybrid(doc["hybrid_params"]));

        Vector start = doc.contains("start") ? p.vector(doc["start"], "start") : project(C, Vector::Zero(static_cast<Eigen::Index>(n)));
        ProblemInstance problem{doc.value("name", std::string{}), n, std::move(C), std::move(f), std::move(T), std::move(start),
                                std::nullopt, std::nullopt};
        if (doc.contains("known_solution")) problem.known_solution = p.vector(doc["known_solution"], "known_solution");
        if (doc.contains("lipschitz")) {
            const auto& l = doc["lipschitz"];
            problem.lipschitz = LipschitzConstants{p.number(p.require(l, "L1", "lipschitz."), "lipschitz.L1"),
                                                   p.number(p.require(l, "L2", "lipschitz."), "lipschitz.L2")};
        }
        return problem;
    } catch (const json::exception& e) {
        throw ParseError("", e.what());
    }
}

ValidationReport validate_problem(ProblemInstance& problem, std::uint64_t seed) {
    ValidationReport report;
    Rng rng(seed);
    const auto& C = problem.set;
    const auto& f = problem.f;
    const ProjectionTolerances tol;

    // Mapping: parameter ranges, self-map, hybrid inequality.
    problem.T.check_parameters();
    report.self_map_violation = self_map_violation(problem.T, C, kSelfMapSamples, rng);
    if (report.self_map_violation > tol.tol_feas)
        throw ValidationError("A5", "T does not map C into C (sampled distance " +
                                        std::to_string(report.self_map_violation) + ")");
    if (problem.T.hybrid_params()) {
        const auto params = *problem.T.hybrid_params();
        if (!params.admissible())
            throw ValidationError("A5", "hybrid parameters violate alpha+2beta+gamma >= 0, alpha+beta > 0, delta >= 0");
        const auto cert = certify_hybrid(problem.T, params, C, kCertifySamples, rng);
        if (!cert.passed())
            throw ValidationError("A5", "hybrid inequality fails on sampled pairs (max lhs " + std::to_string(cert.max_lhs) + ")");
        report.hybrid = params;
    } else {
        for (const auto& params : hybrid_probe_grid()) {
            if (certify_hybrid(problem.T, params, C, kCertifySamples, rng).passed()) {
                report.hybrid = params;
                break;
            }
        }
        if (!report.hybrid)
            throw ValidationError("A5", "no admissible (alpha, beta, gamma, delta) passes the sampled hybrid inequality");
        problem.T.set_hybrid_params(*report.hybrid);
    }

    if (infeasibility(C, problem.start) > tol.tol_feas) throw ValidationError("start", "starting point lies outside C");

    // Known solution: feasibility, equilibrium, fixed point, pseudomonotonicity.
    if (problem.known_solution) {
        const Vector& q = *problem.known_solution;
        if (infeasibility(C, q) > tol.tol_feas) throw ValidationError("known_solution", "lies outside C");
        const double fixed = (problem.T.apply(q) - q).norm();
        if (fixed > 1e-10) throw ValidationError("known_solution", "|Tq - q| = " + std::to_string(fixed) + " > 1e-10");
        for (const auto& y : sample_points(C, kSolutionSamples, rng)) {
            if (f.evaluate(q, y) < -1e-8)
                throw ValidationError("known_solution", "f(q, y) < -1e-8 at a sampled y; q does not solve EP(C, f)");
            if (f.evaluate(y, q) > 1e-10)
                throw ValidationError("A3", "f(x, q) > 1e-10 at a sampled x; f is not pseudomonotone at q");
        }
    }

    // Lipschitz-type constants: check given ones, otherwise fill them in.
    if (problem.lipschitz) {
        const auto& L = *problem.lipschitz;
        if (!(L.L1 > 0.0) || !(L.L2 > 0.0)) throw ValidationError("A4", "Lipschitz constants must be positive");
        const auto pts = sample_points(C, 3 * kLipschitzSamples, rng);
        std::vector<Vector> xs(pts.begin(), pts.begin() + kLipschitzSamples);
        std::vector<Vector> ys(pts.begin() + kLipschitzSamples, pts.begin() + 2 * kLipschitzSamples);
        std::vector<Vector> zs(pts.begin() + 2 * kLipschitzSamples, pts.end());
        std::shuffle(ys.begin(), ys.end(), rng);
        if (lipschitz_violation(f, L, xs, ys, zs) > 1e-9)
            throw ValidationError("A4", "given Lipschitz-type constants fail on sampled triples");
        report.lipschitz_source = "file";
    } else {
        const auto estimate = estimate_lipschitz(f, C, kLipschitzSamples, rng);
        if (estimate.analytic) {
            problem.lipschitz = estimate.analytic;
            report.lipschitz_source = "analytic";
        } else {
            problem.lipschitz = estimate.constants;
            report.lipschitz_source = "estimated";
        }
    }
    return report;
}

ProblemInstance load_problem(const std::filesystem::path& path, std::uint64_t seed, ValidationReport* report) {
    auto problem = parse_problem(read_json_file(path));
    if (problem.name.empty()) problem.name = path.stem().string();
    auto r = validate_problem(problem, seed);
    if (report) *report = std::move(r);
    return problem;
}

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

}  // namespace eqfix
