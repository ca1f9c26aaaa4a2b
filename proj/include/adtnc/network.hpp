#ifndef ADTNC_NETWORK_HPP
#define ADTNC_NETWORK_HPP

#include <optional>
#include <string>
#include <vector>

#include "adtnc/errors.hpp"

namespace adtnc {

enum class Side { In, Out };

struct PortId {
    int node = -1;
    Side side = Side::In;
    int index = 0;

    bool operator==(const PortId& o) const {
        return node == o.node && side == o.side && index == o.index;
    }
    bool operator!=(const PortId& o) const { return !(*this == o); }
    bool operator<(const PortId& o) const {
        if (node != o.node) return node < o.node;
        if (side != o.side) return side < o.side;
        return index < o.index;
    }
};

struct Supernode {
    std::string id;
    int num_inputs = 0;
    int num_outputs = 0;
    std::optional<int> layer;
};

struct Edge {
    PortId from;  // output side
    PortId to;    // input side
    bool operator==(const Edge& o) const { return from == o.from && to == o.to; }
    bool operator<(const Edge& o) const { return from != o.from ? from < o.from : to < o.to; }
};

struct SourceDecl {
    int node = -1;
    int processes = 0;  // mu(S)
};

struct DestinationDecl {
    int node = -1;
    int processes = 0;  // nu(T)
};

struct Connection {
    int source = -1;
    int destination = -1;
    std::vector<int> process_indices;  // demanded subset of the source's processes

    int rate() const { return static_cast<int>(process_indices.size()); }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool acyclic = true;
    bool layered = false;
    int num_ports = 0;
    int num_edges = 0;
    bool valid() const { return violations.empty(); }
};

struct LayeringInfo {
    int num_layers = 0;       // lambda
    int max_per_layer = 0;    // N_layer
    int uniform_ports = 0;    // n, when every supernode has n inputs and n outputs
    bool uniform = false;
};

/*
 * The port-level network model: supernodes with ordered input/output ports
 * and directed edges from output ports to input ports of other supernodes.
 * A broadcast hyperedge is the fan-out of a single output port; interference
 * is the finite-field sum at an input port. Networks are immutable once
 * built; transforms return new networks.
 */
class AdtNetwork {
public:
    AdtNetwork(std::vector<Supernode> nodes, std::vector<Edge> edges,
               std::vector<SourceDecl> sources, std::vector<DestinationDecl> destinations,
               std::vector<Connection> connections = {}, bool allow_cycles = false);

    static AdtNetwork from_json(const std::string& text, bool allow_cycles = false);
    std::string to_json() const;  // canonical: fixed key order, edges sorted

    const std::vector<Supernode>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<SourceDecl>& sources() const { return sources_; }
    const std::vector<DestinationDecl>& destinations() const { return destinations_; }
    const std::vector<Connection>& connections() const { return connections_; }

    int node_index(const std::string& id) const;
    const Supernode& node(int idx) const { return nodes_.at(idx); }

    int num_ports() const { return num_ports_; }
    // dense port numbering in declaration order (per node: inputs then outputs)
    int port_key(const PortId& p) const;
    PortId port_at(int key) const { return port_table_.at(key); }
    std::string port_ref(const PortId& p) const;  // "V:out:1"
    PortId parse_port_ref(const std::string& ref) const;

    const std::vector<int>& in_edges(const PortId& input_port) const;   // edge indices
    const std::vector<int>& out_edges(const PortId& output_port) const;

    bool is_acyclic() const { return acyclic_; }
    bool is_layered() const;
    LayeringInfo layering() const;
    int node_depth(int node) const { return depth_.at(node); }  // longest path from any root

    ValidationReport validate() const;

    // Total port order: (depth/layer, inputs before outputs, node id, index).
    // Edge tails precede heads, a node's inputs precede its outputs, and the
    // order is a pure function of the network. Throws CyclicNetworkError on
    // cycles.
    const std::vector<PortId>& topological_port_order() const;
    // position of each port in the topological order, indexed by port_key
    const std::vector<int>& topological_position() const;
    // "e1".."eN" by topological position (1-based)
    std::string port_label(const PortId& p) const;

    int source_process_count(int node) const;
    int destination_process_count(int node) const;

    // Transforms (\"network\" module operations). Each returns a new network.
    AdtNetwork with_super_source(const std::string& super_id = "__SS") const;
    AdtNetwork with_super_destination(const std::vector<int>& dest_nodes,
                                      const std::string& super_id = "__ST") const;
    AdtNetwork without_edges(const std::vector<Edge>& removed) const;

private:
    void build_tables(bool allow_cycles);

    std::vector<Supernode> nodes_;
    std::vector<Edge> edges_;
    std::vector<SourceDecl> sources_;
    std::vector<DestinationDecl> destinations_;
    std::vector<Connection> connections_;

    int num_ports_ = 0;
    std::vector<int> port_base_;                   // first port key per node
    std::vector<PortId> port_table_;               // key -> port
    std::vector<std::vector<int>> in_edge_idx_;    // per port key
    std::vector<std::vector<int>> out_edge_idx_;   // per port key
    std::vector<int> depth_;
    bool acyclic_ = true;
    mutable std::vector<PortId> topo_;      // lazily built
    mutable std::vector<int> topo_pos_;
};

// |E(V1,V2)| = ceil(0.5 * log2(snr)), floored at zero.
int edges_from_snr(double snr);

}  // namespace adtnc

#endif
