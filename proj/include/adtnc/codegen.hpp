#ifndef ADTNC_CODEGEN_HPP
#define ADTNC_CODEGEN_HPP

#include "adtnc/coding.hpp"
#include "adtnc/symbolic.hpp"

namespace adtnc {

// Augment the network with a virtual sink attached to the port set W: output
// ports connect directly; for p input ports of a supernode, the other input
// ports of that supernode are disconnected and its upper p output ports feed
// the sink. Returns the augmented network and the sink's node index.
std::pair<AdtNetwork, int> build_virtual_sink(const AdtNetwork& net, const std::vector<PortId>& w);

// W is regular iff the min-cut from the source to its virtual sink equals R.
bool is_regular(const AdtNetwork& net, int source, const std::vector<PortId>& w, int rate,
                const MincutOptions& opts = {});

// Full GF(2) rank of the bipartite incidence between R output ports and R
// input ports of the next layer.
bool incidence_full_rank(const AdtNetwork& net, const std::vector<PortId>& w_out,
                         const std::vector<PortId>& w_in);

// Variable-by-variable search for a point where P does not vanish. Requires
// field order > max per-variable degree of P and P not identically zero.
std::map<uint32_t, uint16_t> find_nonzero_assignment(const SymPoly& p, const Field& field);

// (q^p - 1)(q^p - q)...(q^p - q^{p-1}); throws on uint64 overflow
uint64_t count_nonsingular_matrices(uint64_t q, int p);

struct CodegenOptions {
    int retries = 64;                 // redraws per coding step
    bool deterministic_input = false; // virtual coefficients via the polynomial search
    size_t deterministic_cap = 64;    // max candidate pairs for the symbolic product
    uint64_t subset_cap = 100000;     // refuse when C(n*N_layer, R) exceeds this
    bool enforce_field_bounds = false;
};

struct CodegenStep {
    int step = 0;
    int layer = 0;
    std::string kind;       // "output" or "input"
    std::string node;       // output steps only
    int boundary_size = 0;
    int list_size = 0;
    int redraws = 0;        // draws beyond the first
    // input steps: retained candidate -> first tracked partner with full-rank
    // incidence, as port lists
    std::vector<std::pair<std::string, std::string>> pairs;
};

struct CodegenResult {
    CodeSolution solution;
    std::vector<int> decodable_nodes;  // V(R)
    std::vector<CodegenStep> trace;
    double mean_output_draws = 0;      // draws per output step (1 = first try)
};

/*
 * Deterministic multicast code construction for layered networks with
 * uniform port count n. Walks the ports in topological order maintaining the
 * invariant that every tracked regular port set carries linearly independent
 * coding vectors; on termination every supernode whose min-cut from the
 * source is at least `rate` holds a decoding matrix.
 */
class CodegenState {
public:
    CodegenState(const AdtNetwork& net, int rate, Field field, uint64_t seed,
                 CodegenOptions opts = {});

    // one coding step; exposed for tests, construct_multicast_code drives them
    void code_output_ports(int node);
    void code_input_ports(int layer);

    void run();  // all layers in order

    const std::vector<std::vector<PortId>>& list() const { return list_; }
    const std::vector<uint16_t>& vector_of(const PortId& p) const {
        return port_vec_.at(net_.port_key(p));
    }
    uint16_t virtual_coefficient(const PortId& out_port) const {
        return k_.at(net_.port_key(out_port));
    }
    const std::vector<CodegenStep>& trace() const { return trace_; }

    // throws when some tracked set has dependent vectors
    void assert_invariant() const;
    int boundary_size() const;

    CodegenResult finish();  // assignment, decoders, verification

private:
    friend CodegenResult construct_multicast_code(const AdtNetwork&, int, const Field&, uint64_t,
                                                  const CodegenOptions&);
    void seed_source();
    bool vectors_independent(const std::vector<std::vector<PortId>>& sets) const;
    bool set_independent(const std::vector<PortId>& set) const;
    std::vector<std::vector<PortId>> candidate_input_sets(int layer) const;
    bool regular_memo(const std::vector<PortId>& w);

    const AdtNetwork& net_;
    int rate_;
    Field field_;
    uint64_t seed_;
    CodegenOptions opts_;
    int src_ = -1;
    int n_ = 0;
    int step_ = 0;

    std::vector<std::vector<uint16_t>> port_vec_;
    std::vector<bool> determined_;
    std::vector<bool> node_output_coded_;
    std::vector<uint16_t> k_;                        // per output port key
    std::vector<std::vector<uint16_t>> beta_;        // per node: n*n row-major (in, out)
    std::vector<std::vector<PortId>> list_;
    std::map<std::vector<PortId>, bool> regular_cache_;
    std::vector<CodegenStep> trace_;
    std::vector<int> vr_;
    int output_steps_ = 0;
    int output_draws_ = 0;
};

CodegenResult construct_multicast_code(const AdtNetwork& net, int rate, const Field& field,
                                       uint64_t seed, const CodegenOptions& opts = {});

}  // namespace adtnc

#endif
