#include "adtnc/robust.hpp"

#include <json.hpp>

namespace adtnc {

using ordered_json = nlohmann::ordered_json;

void ErasureDistribution::check() const {
    Rational sum(0);
    for (const auto& [f, p] : patterns) {
        if (p < Rational(0)) throw UsageError("negative failure probability");
        sum += p;
    }
    if (sum != Rational(1)) throw UsageError("failure probabilities must sum to 1, got " +
                                             rational_str(sum));
}

AdtNetwork apply_failure(const AdtNetwork& net, const FailurePattern& f) {
    return net.without_edges(f.failed_edges);
}

std::string edge_ref(const AdtNetwork& net, const Edge& e) {
    return net.port_ref(e.from) + "->" + net.port_ref(e.to);
}

Edge parse_edge_ref(const AdtNetwork& net, const std::string& ref) {
    auto p = ref.find("->");
    if (p == std::string::npos) throw ParseError("bad edge reference: " + ref);
    return Edge{net.parse_port_ref(ref.substr(0, p)), net.parse_port_ref(ref.substr(p + 2))};
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw ParseError("bad rational: " + s);
    }
}

std::string rational_str(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

namespace {

FailurePattern pattern_from_json(const AdtNetwork& net, const ordered_json& j) {
    FailurePattern f;
    for (const auto& e : j.at("edges")) f.failed_edges.push_back(parse_edge_ref(net, e.get<std::string>()));
    std::sort(f.failed_edges.begin(), f.failed_edges.end());
    f.failed_edges.erase(std::unique(f.failed_edges.begin(), f.failed_edges.end()),
                         f.failed_edges.end());
    return f;
}

ordered_json parse_doc(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

ErasureDistribution distribution_from_json(const AdtNetwork& net, const std::string& text) {
    ordered_json j = parse_doc(text);
    ErasureDistribution dist;
    try {
        for (const auto& p : j.at("patterns")) {
            Rational prob = p.at("p").is_string() ? parse_rational(p.at("p").get<std::string>())
                                                  : Rational(p.at("p").get<long long>());
            dist.patterns.push_back({pattern_from_json(net, p), prob});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("distribution file: ") + e.what());
    }
    dist.check();
    return dist;
}

std::vector<FailurePattern> failure_set_from_json(const AdtNetwork& net, const std::string& text) {
    ordered_json j = parse_doc(text);
    std::vector<FailurePattern> set;
    try {
        for (const auto& p : j.at("patterns")) set.push_back(pattern_from_json(net, p));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("failure set file: ") + e.what());
    }
    return set;
}

StaticSolution find_static_solution(const AdtNetwork& net, const std::vector<Connection>& conns,
                                    const std::vector<FailurePattern>& failure_set,
                                    const Field& field, uint64_t seed, int retries) {
    if (conns.empty()) throw UsageError("static solutions need a multicast connection set");
    int src = conns[0].source;
    int mu = net.source_process_count(src);
    for (const auto& c : conns) {
        if (c.source != src) throw UsageError("static solutions are defined for a single source");
        auto d = c.process_indices;
        std::sort(d.begin(), d.end());
        if (static_cast<int>(d.size()) != mu)
            // a counterexample exists for non-multicast sets, so they are
            // rejected rather than attempted
            throw NotSupportedError("static solutions are only supported for multicast demands");
    }

    std::vector<AdtNetwork> variants;
    for (const auto& f : failure_set) variants.push_back(apply_failure(net, f));
    if (variants.empty()) variants.push_back(net);

    for (size_t v = 0; v < variants.size(); ++v)
        for (const auto& c : conns) {
            int mc = mincut_combinatorial(variants[v], src, c.destination);
            if (mc < mu) {
                std::string pat = failure_set.empty() ? "(none)" : [&] {
                    std::string s;
                    for (const auto& e : failure_set[v].failed_edges)
                        s += (s.empty() ? "" : ",") + edge_ref(net, e);
                    return s;
                }();
                throw InfeasibleUnderFailureError(
                    "connection to " + net.node(c.destination).id + " is infeasible under failure {" +
                        pat + "}: mincut " + std::to_string(mc) + " < " + std::to_string(mu),
                    pat);
            }
        }

    for (int attempt = 0; attempt < retries; ++attempt) {
        Rng rng(mix_seed(seed, attempt));
        CodingAssignment assign = random_assignment(net, field, rng);
        StaticSolution sol{assign, seed, {}, {}};
        for (const auto& c : conns) sol.demanded[c.destination] = c.process_indices;
        bool ok = true;
        for (const auto& variant : variants) {
            SystemMatrix sm = system_matrix(variant, assign);
            std::map<int, Matrix<FieldElement>> decs;
            for (const auto& c : conns) {
                std::vector<size_t> rows(mu);
                for (int p = 0; p < mu; ++p) rows[p] = p;
                Matrix<FieldElement> block =
                    sm.m.submatrix(rows, sm.destination_columns(c.destination));
                if (block.rows() != block.cols() || mat_rank(block) < block.rows()) {
                    ok = false;
                    break;
                }
                decs.emplace(c.destination, mat_inverse(block));
            }
            if (!ok) break;
            sol.decoders.push_back(std::move(decs));
        }
        if (!ok) continue;
        if (!verify_static_solution(net, conns, failure_set, sol))
            throw Error("internal: static solution failed re-verification");
        return sol;
    }
    throw RandomizationExhaustedError("no static assignment found in " + std::to_string(retries) +
                                      " draws; the field size bound q > |F|*N may be violated");
}

bool verify_static_solution(const AdtNetwork& net, const std::vector<Connection>& conns,
                            const std::vector<FailurePattern>& failure_set,
                            const StaticSolution& sol, int checks, uint64_t seed) {
    std::vector<AdtNetwork> variants;
    for (const auto& f : failure_set) variants.push_back(apply_failure(net, f));
    if (variants.empty()) variants.push_back(net);
    if (variants.size() != sol.decoders.size()) return false;
    for (size_t v = 0; v < variants.size(); ++v) {
        CodeSolution per{sol.assign, sol.decoders[v], sol.demanded, sol.seed, {}};
        if (!verify_solution(variants[v], per, checks, mix_seed(seed, v))) return false;
    }
    return true;
}

Rational time_average_mincut(const AdtNetwork& net, int source, int dest,
                             const ErasureDistribution& dist, const MincutOptions& opts) {
    dist.check();
    Rational avg(0);
    for (const auto& [f, p] : dist.patterns) {
        if (p == Rational(0)) continue;
        int mc = mincut_combinatorial(apply_failure(net, f), source, dest, opts);
        avg += p * Rational(mc);
    }
    return avg;
}

}  // namespace adtnc
