#ifndef ADTNC_CODING_HPP
#define ADTNC_CODING_HPP

#include <optional>

#include "adtnc/mincut.hpp"
#include "adtnc/transfer.hpp"

namespace adtnc {

enum class ConnectionKind {
    Empty,
    Unicast,
    SingleMulticast,
    MultipleMulticast,
    DisjointMulticast,
    TwoLevel,
    ThreeLevel,
    General,
};

std::string connection_kind_name(ConnectionKind k);

// Classify the connection set of a network into the traffic classes with
// dedicated solvers. Nested demand chains of depth three or more are called
// out separately because the two-level construction does not extend to them.
ConnectionKind classify_connections(const AdtNetwork& net);

/*
 * A verified network code: the coefficient assignment plus one decoder per
 * destination. The decoder maps the received process row vector Z(T) to the
 * demanded source processes: Z(T) * decoder = X restricted to the demand.
 */
struct CodeSolution {
    CodingAssignment assign;
    std::map<int, Matrix<FieldElement>> decoders;       // dest node -> nu x R(c)
    std::map<int, std::vector<int>> demanded;           // dest node -> process indices
    uint64_t seed = 0;

    // Decoders tied to specific ports rather than destination processes;
    // used by the deterministic construction, where every supernode of
    // sufficient min-cut can decode from R of its ports.
    std::map<int, std::pair<std::vector<PortId>, Matrix<FieldElement>>> port_decoders;
};

std::string solution_to_json(const AdtNetwork& net, const CodeSolution& sol);
CodeSolution solution_from_json(const AdtNetwork& net, const std::string& text);

// Re-derives decodability from scratch: simulates `checks` random source
// vectors and compares decoder output with the demanded processes.
bool verify_solution(const AdtNetwork& net, const CodeSolution& sol, int checks = 20,
                     uint64_t seed = 0xADC0DE);

struct FeasibilityResult {
    bool feasible = false;
    std::optional<CodeSolution> witness;
};

// Theorem: a unicast connection is feasible iff mincut(S,T) >= R(c) iff some
// assignment makes the R x R system block invertible. When feasible, a
// random witness assignment is found and verified.
FeasibilityResult feasible_unicast(const AdtNetwork& net, const Connection& conn,
                                   const Field& field, uint64_t seed = 1);

struct RandomCodeResult {
    std::optional<CodeSolution> solution;
    int failed_destination = -1;  // node index of the first singular destination
};

// One uniform i.i.d. draw of all free coefficients; per-destination blocks
// inverted and the result verified by simulation. Throws
// InfeasibleConnectionError if the min-cut precondition fails.
RandomCodeResult random_code(const AdtNetwork& net, const std::vector<Connection>& conns,
                             const Field& field, uint64_t seed);

// Las Vegas wrapper: redraw until success, up to `retries` draws.
CodeSolution solve_multicast(const AdtNetwork& net, const std::vector<Connection>& conns,
                             const Field& field, uint64_t seed, int retries = 64);

// Disjoint multicast: intermediate coefficients random, source encoding
// solved so the super-destination sees the identity. The block-diagonal
// structure is verified before returning.
CodeSolution solve_disjoint_multicast(const AdtNetwork& net, const std::vector<Connection>& conns,
                                      const Field& field, uint64_t seed, int retries = 64);

// Two-level multicast: disjoint receivers as above, full-rate receivers
// served by the remaining freedom in A.
CodeSolution solve_two_level(const AdtNetwork& net, const std::vector<Connection>& conns,
                             const Field& field, uint64_t seed, int retries = 64);

// Sufficiency certificate for an arbitrary connection set and a concrete
// assignment: off-connection blocks vanish and each destination's stacked
// block is nonsingular. `false` does not imply infeasibility.
bool check_general_sufficiency(const AdtNetwork& net, const std::vector<Connection>& conns,
                               const CodingAssignment& assign);

struct SuccessEstimate {
    double empirical = 0;
    double bound = 0;       // (1 - N/q)^eta, may be <= 0 (vacuous)
    int eta = 0;            // randomized coefficient positions on source->dest paths
    int num_receivers = 0;
    uint32_t q = 0;
    int trials = 0;
    int successes = 0;
};

SuccessEstimate estimate_success_probability(const AdtNetwork& net,
                                             const std::vector<Connection>& conns,
                                             const Field& field, int trials, uint64_t seed);

// Exhaustive search over all GF(2) scalar assignments, pruned to coefficient
// positions on source->destination paths. A destination can decode iff its
// input-port vectors span F_2^R; epsilon only post-processes them, so it is
// not enumerated. Returns an (alpha, beta) assignment or nullopt if no
// scalar binary code exists.
std::optional<CodingAssignment> exhaustive_binary_code_search(
    const AdtNetwork& net, const std::vector<Connection>& conns,
    uint64_t max_assignments = uint64_t(1) << 28);

// Feasibility of a multiple-multicast set checked directly on the
// multi-source cuts (every cut separating all sources from a destination).
bool multiple_multicast_feasible_direct(const AdtNetwork& net,
                                        const MincutOptions& opts = {});
// Same decision through the super-source reduction.
bool multiple_multicast_feasible_super_source(const AdtNetwork& net,
                                              const MincutOptions& opts = {});

}  // namespace adtnc

#endif
