#ifndef ADTNC_ROBUST_HPP
#define ADTNC_ROBUST_HPP

#include <boost/rational.hpp>

#include "adtnc/coding.hpp"

namespace adtnc {

using Rational = boost::rational<long long>;

struct FailurePattern {
    std::vector<Edge> failed_edges;
};

struct ErasureDistribution {
    std::vector<std::pair<FailurePattern, Rational>> patterns;

    void check() const;  // probabilities >= 0 summing to exactly 1
};

// The network with the failing links deleted; their coefficients become
// structurally zero. Unknown edges are a usage error.
AdtNetwork apply_failure(const AdtNetwork& net, const FailurePattern& f);

// JSON: {"patterns": [{"edges": ["V:out:0->W:in:1", ...], "p": "1/4"}, ...]}
ErasureDistribution distribution_from_json(const AdtNetwork& net, const std::string& text);
std::vector<FailurePattern> failure_set_from_json(const AdtNetwork& net, const std::string& text);
std::string edge_ref(const AdtNetwork& net, const Edge& e);
Edge parse_edge_ref(const AdtNetwork& net, const std::string& ref);

/*
 * A single multicast code that stays decodable under every failure pattern
 * in the set. The assignment is fixed; decoders depend on the pattern (the
 * surviving transfer matrix differs), so they are reported per pattern.
 */
struct StaticSolution {
    CodingAssignment assign;
    uint64_t seed = 0;
    // per pattern (same order as the input set): decoders and demands
    std::vector<std::map<int, Matrix<FieldElement>>> decoders;
    std::map<int, std::vector<int>> demanded;
};

StaticSolution find_static_solution(const AdtNetwork& net, const std::vector<Connection>& conns,
                                    const std::vector<FailurePattern>& failure_set,
                                    const Field& field, uint64_t seed, int retries = 64);

// re-verify a static solution pattern by pattern via simulation
bool verify_static_solution(const AdtNetwork& net, const std::vector<Connection>& conns,
                            const std::vector<FailurePattern>& failure_set,
                            const StaticSolution& sol, int checks = 20, uint64_t seed = 0xADC0DE);

// sum_f p_f * mincut(G_f, S, T), exact
Rational time_average_mincut(const AdtNetwork& net, int source, int dest,
                             const ErasureDistribution& dist, const MincutOptions& opts = {});

std::string rational_str(const Rational& r);
Rational parse_rational(const std::string& s);

}  // namespace adtnc

#endif
