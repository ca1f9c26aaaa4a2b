#include "adtnc/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace adtnc {

using ordered_json = nlohmann::ordered_json;

AdtNetwork::AdtNetwork(std::vector<Supernode> nodes, std::vector<Edge> edges,
                       std::vector<SourceDecl> sources, std::vector<DestinationDecl> destinations,
                       std::vector<Connection> connections, bool allow_cycles)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      sources_(std::move(sources)),
      destinations_(std::move(destinations)),
      connections_(std::move(connections)) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    build_tables(allow_cycles);
}

void AdtNetwork::build_tables(bool allow_cycles) {
    std::set<std::string> seen;
    for (const auto& n : nodes_) {
        if (n.num_inputs < 0 || n.num_outputs < 0) throw UsageError("negative port count");
        if (!seen.insert(n.id).second) throw UsageError("duplicate supernode id: " + n.id);
    }

    port_base_.resize(nodes_.size());
    num_ports_ = 0;
    for (size_t i = 0; i < nodes_.size(); ++i) {
        port_base_[i] = num_ports_;
        num_ports_ += nodes_[i].num_inputs + nodes_[i].num_outputs;
    }
    port_table_.clear();
    port_table_.reserve(num_ports_);
    for (size_t i = 0; i < nodes_.size(); ++i) {
        for (int k = 0; k < nodes_[i].num_inputs; ++k)
            port_table_.push_back({static_cast<int>(i), Side::In, k});
        for (int k = 0; k < nodes_[i].num_outputs; ++k)
            port_table_.push_back({static_cast<int>(i), Side::Out, k});
    }

    in_edge_idx_.assign(num_ports_, {});
    out_edge_idx_.assign(num_ports_, {});
    for (size_t e = 0; e < edges_.size(); ++e) {
        const Edge& ed = edges_[e];
        if (ed.from.side != Side::Out || ed.to.side != Side::In)
            throw UsageError("edge must go from an output port to an input port");
        if (ed.from.node < 0 || ed.from.node >= static_cast<int>(nodes_.size()) ||
            ed.to.node < 0 || ed.to.node >= static_cast<int>(nodes_.size()))
            throw UsageError("edge references unknown supernode");
        if (ed.from.index >= nodes_[ed.from.node].num_outputs ||
            ed.to.index >= nodes_[ed.to.node].num_inputs || ed.from.index < 0 || ed.to.index < 0)
            throw UsageError("edge references out-of-range port index");
        if (!allow_cycles && ed.from.node == ed.to.node)
            throw UsageError("edge must connect different supernodes");
        out_edge_idx_[port_key(ed.from)].push_back(static_cast<int>(e));
        in_edge_idx_[port_key(ed.to)].push_back(static_cast<int>(e));
    }

    // longest-path depth over the supernode graph; also detects cycles
    const size_t n = nodes_.size();
    std::vector<std::vector<int>> succ(n);
    std::vector<int> indeg(n, 0);
    std::set<std::pair<int, int>> node_pairs;
    for (const Edge& e : edges_) node_pairs.insert({e.from.node, e.to.node});
    for (auto [a, b] : node_pairs) {
        succ[a].push_back(b);
        ++indeg[b];
    }
    depth_.assign(n, 0);
    std::vector<int> order;
    std::vector<int> q;
    for (size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) q.push_back(static_cast<int>(i));
    while (!q.empty()) {
        int v = q.back();
        q.pop_back();
        order.push_back(v);
        for (int w : succ[v]) {
            depth_[w] = std::max(depth_[w], depth_[v] + 1);
            if (--indeg[w] == 0) q.push_back(w);
        }
    }
    acyclic_ = order.size() == n;
    if (!acyclic_ && !allow_cycles)
        throw CyclicNetworkError("network contains a directed cycle (build with allow_cycles to keep it)");

    for (const auto& s : sources_) {
        if (s.node < 0 || s.node >= static_cast<int>(n)) throw UsageError("unknown source node");
        if (s.processes > nodes_[s.node].num_outputs)
            throw UsageError("source process count exceeds its output ports: " + nodes_[s.node].id);
    }
    for (const auto& d : destinations_)
        if (d.node < 0 || d.node >= static_cast<int>(n)) throw UsageError("unknown destination node");
    for (const auto& c : connections_) {
        if (c.source < 0 || c.source >= static_cast<int>(n) || c.destination < 0 ||
            c.destination >= static_cast<int>(n))
            throw UsageError("connection references unknown node");
    }
}

int AdtNetwork::node_index(const std::string& id) const {
    for (size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].id == id) return static_cast<int>(i);
    throw UsageError("unknown supernode: " + id);
}

int AdtNetwork::port_key(const PortId& p) const {
    const Supernode& nd = nodes_.at(p.node);
    int off = p.side == Side::In ? p.index : nd.num_inputs + p.index;
    return port_base_[p.node] + off;
}

std::string AdtNetwork::port_ref(const PortId& p) const {
    return nodes_.at(p.node).id + (p.side == Side::In ? ":in:" : ":out:") + std::to_string(p.index);
}

PortId AdtNetwork::parse_port_ref(const std::string& ref) const {
    auto a = ref.find(':');
    auto b = ref.rfind(':');
    if (a == std::string::npos || b == a) throw ParseError("bad port reference: " + ref);
    PortId p;
    p.node = node_index(ref.substr(0, a));
    std::string side = ref.substr(a + 1, b - a - 1);
    if (side == "in")
        p.side = Side::In;
    else if (side == "out")
        p.side = Side::Out;
    else
        throw ParseError("port side must be 'in' or 'out': " + ref);
    try {
        p.index = std::stoi(ref.substr(b + 1));
    } catch (const std::exception&) {
        throw ParseError("bad port index: " + ref);
    }
    const Supernode& nd = nodes_.at(p.node);
    int count = p.side == Side::In ? nd.num_inputs : nd.num_outputs;
    if (p.index < 0 || p.index >= count) throw ParseError("port index out of range: " + ref);
    return p;
}

const std::vector<int>& AdtNetwork::in_edges(const PortId& p) const {
    return in_edge_idx_.at(port_key(p));
}
const std::vector<int>& AdtNetwork::out_edges(const PortId& p) const {
    return out_edge_idx_.at(port_key(p));
}

bool AdtNetwork::is_layered() const {
    for (const auto& n : nodes_)
        if (!n.layer.has_value()) return false;
    for (const Edge& e : edges_)
        if (*nodes_[e.to.node].layer != *nodes_[e.from.node].layer + 1) return false;
    return acyclic_;
}

LayeringInfo AdtNetwork::layering() const {
    LayeringInfo info;
    if (!is_layered() || nodes_.empty()) return info;
    int lo = *nodes_[0].layer, hi = *nodes_[0].layer;
    std::map<int, int> per_layer;
    for (const auto& n : nodes_) {
        lo = std::min(lo, *n.layer);
        hi = std::max(hi, *n.layer);
        per_layer[*n.layer]++;
    }
    info.num_layers = hi - lo + 1;
    for (auto& [l, c] : per_layer) info.max_per_layer = std::max(info.max_per_layer, c);
    info.uniform = true;
    info.uniform_ports = nodes_[0].num_inputs;
    for (const auto& n : nodes_)
        if (n.num_inputs != info.uniform_ports || n.num_outputs != info.uniform_ports)
            info.uniform = false;
    if (!info.uniform) info.uniform_ports = 0;
    return info;
}

ValidationReport AdtNetwork::validate() const {
    ValidationReport rep;
    rep.num_ports = num_ports_;
    rep.num_edges = static_cast<int>(edges_.size());
    rep.acyclic = acyclic_;
    if (!acyclic_) rep.violations.push_back("network contains a directed cycle");

    bool any_layer = false, all_layers = true;
    for (const auto& n : nodes_) {
        if (n.layer.has_value())
            any_layer = true;
        else
            all_layers = false;
    }
    if (any_layer && !all_layers)
        rep.violations.push_back("layer metadata must be given for all supernodes or none");
    if (any_layer && all_layers) {
        rep.layered = true;
        for (const Edge& e : edges_) {
            if (*nodes_[e.to.node].layer != *nodes_[e.from.node].layer + 1) {
                rep.layered = false;
                rep.violations.push_back("edge " + port_ref(e.from) + "->" + port_ref(e.to) +
                                         " does not go from layer l to layer l+1");
            }
        }
    }

    for (const auto& s : sources_)
        if (s.processes < 0) rep.violations.push_back("negative process count at source");
    for (const auto& c : connections_) {
        int mu = source_process_count(c.source);
        for (int idx : c.process_indices)
            if (idx < 0 || idx >= mu)
                rep.violations.push_back("connection demands unknown process index " +
                                         std::to_string(idx) + " of " + nodes_[c.source].id);
    }
    return rep;
}

const std::vector<PortId>& AdtNetwork::topological_port_order() const {
    if (!topo_.empty()) return topo_;
    if (!acyclic_) throw CyclicNetworkError("no topological port order: network has cycles");
    std::vector<PortId> ports = port_table_;
    // (depth or layer, inputs before outputs, node id, port index); the
    // layer-wide input-then-output grouping is what makes edge tails precede
    // heads while keeping the conventional top-to-bottom reading.
    const bool layered = is_layered();
    auto rank = [&](const PortId& p) {
        const Supernode& nd = nodes_[p.node];
        return layered && nd.layer.has_value() ? *nd.layer : depth_[p.node];
    };
    std::stable_sort(ports.begin(), ports.end(), [&](const PortId& a, const PortId& b) {
        int ra = rank(a), rb = rank(b);
        if (ra != rb) return ra < rb;
        if (a.side != b.side) return a.side == Side::In;
        if (a.node != b.node) return nodes_[a.node].id < nodes_[b.node].id;
        return a.index < b.index;
    });
    topo_ = std::move(ports);
    topo_pos_.assign(num_ports_, -1);
    for (size_t i = 0; i < topo_.size(); ++i) topo_pos_[port_key(topo_[i])] = static_cast<int>(i);
    return topo_;
}

const std::vector<int>& AdtNetwork::topological_position() const {
    topological_port_order();
    return topo_pos_;
}

std::string AdtNetwork::port_label(const PortId& p) const {
    return "e" + std::to_string(topological_position().at(port_key(p)) + 1);
}

int AdtNetwork::source_process_count(int node) const {
    for (const auto& s : sources_)
        if (s.node == node) return s.processes;
    return 0;
}

int AdtNetwork::destination_process_count(int node) const {
    for (const auto& d : destinations_)
        if (d.node == node) return d.processes;
    return 0;
}

AdtNetwork AdtNetwork::with_super_source(const std::string& super_id) const {
    if (sources_.size() <= 1) return *this;  // nothing to merge
    std::vector<Supernode> nodes = nodes_;
    std::vector<Edge> edges = edges_;
    int total_out = 0;
    for (const auto& s : sources_) total_out += nodes_[s.node].num_outputs;

    Supernode ss;
    ss.id = super_id;
    ss.num_inputs = 0;
    ss.num_outputs = total_out;
    if (is_layered()) {
        int min_layer = *nodes_[sources_[0].node].layer;
        for (const auto& s : sources_) min_layer = std::min(min_layer, *nodes_[s.node].layer);
        ss.layer = min_layer - 1;
    }
    int ss_idx = static_cast<int>(nodes.size());
    nodes.push_back(ss);

    // the j-th super-source output feeds the j-th original source output port
    // through a fresh relay input appended to that source
    int j = 0;
    for (const auto& s : sources_) {
        int base = nodes[s.node].num_inputs;
        for (int k = 0; k < nodes_[s.node].num_outputs; ++k, ++j) {
            nodes[s.node].num_inputs++;
            edges.push_back({{ss_idx, Side::Out, j}, {s.node, Side::In, base + k}});
        }
    }

    int total_proc = 0;
    for (const auto& s : sources_) total_proc += s.processes;
    std::vector<SourceDecl> new_sources{{ss_idx, std::min(total_proc, total_out)}};
    return AdtNetwork(std::move(nodes), std::move(edges), std::move(new_sources), destinations_,
                      connections_);
}

AdtNetwork AdtNetwork::with_super_destination(const std::vector<int>& dest_nodes,
                                              const std::string& super_id) const {
    if (dest_nodes.empty()) throw UsageError("super-destination needs at least one destination");
    std::vector<Supernode> nodes = nodes_;
    std::vector<Edge> edges = edges_;
    int total_in = 0;
    for (int d : dest_nodes) total_in += nodes_.at(d).num_inputs;

    Supernode st;
    st.id = super_id;
    st.num_inputs = total_in;
    st.num_outputs = 0;
    if (is_layered()) {
        int max_layer = *nodes_[dest_nodes[0]].layer;
        for (int d : dest_nodes) max_layer = std::max(max_layer, *nodes_[d].layer);
        st.layer = max_layer + 1;
    }
    int st_idx = static_cast<int>(nodes.size());
    nodes.push_back(st);

    int j = 0;
    for (int d : dest_nodes) {
        int need = nodes_[d].num_inputs;
        if (nodes_[d].num_outputs < need)
            throw UsageError("destination " + nodes_[d].id +
                             " lacks output ports for the super-destination construction");
        for (int k = 0; k < need; ++k, ++j)
            edges.push_back({{d, Side::Out, k}, {st_idx, Side::In, j}});
    }

    std::vector<DestinationDecl> new_dests{{st_idx, total_in}};
    return AdtNetwork(std::move(nodes), std::move(edges), sources_, std::move(new_dests),
                      connections_);
}

AdtNetwork AdtNetwork::without_edges(const std::vector<Edge>& removed) const {
    std::vector<Edge> edges;
    for (const Edge& e : edges_) {
        bool gone = false;
        for (const Edge& r : removed)
            if (e == r) {
                gone = true;
                break;
            }
        if (!gone) edges.push_back(e);
    }
    if (edges.size() + removed.size() != edges_.size())
        throw UsageError("failure pattern names an edge that is not in the network");
    return AdtNetwork(nodes_, std::move(edges), sources_, destinations_, connections_,
                      !acyclic_);
}

AdtNetwork AdtNetwork::from_json(const std::string& text, bool allow_cycles) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    try {
        std::vector<Supernode> nodes;
        for (const auto& n : j.at("supernodes")) {
            Supernode s;
            s.id = n.at("id").get<std::string>();
            s.num_inputs = n.at("inputs").get<int>();
            s.num_outputs = n.at("outputs").get<int>();
            if (n.contains("layer")) s.layer = n.at("layer").get<int>();
            nodes.push_back(std::move(s));
        }
        auto index_of = [&](const std::string& id) {
            for (size_t i = 0; i < nodes.size(); ++i)
                if (nodes[i].id == id) return static_cast<int>(i);
            throw ParseError("unknown supernode: " + id);
        };
        auto parse_port = [&](const std::string& ref) {
            auto a = ref.find(':');
            auto b = ref.rfind(':');
            if (a == std::string::npos || b == a) throw ParseError("bad port reference: " + ref);
            PortId p;
            p.node = index_of(ref.substr(0, a));
            std::string side = ref.substr(a + 1, b - a - 1);
            if (side != "in" && side != "out") throw ParseError("bad port side in: " + ref);
            p.side = side == "in" ? Side::In : Side::Out;
            p.index = std::stoi(ref.substr(b + 1));
            return p;
        };
        std::vector<Edge> edges;
        if (j.contains("edges"))
            for (const auto& e : j.at("edges"))
                edges.push_back({parse_port(e.at("from").get<std::string>()),
                                 parse_port(e.at("to").get<std::string>())});
        std::vector<SourceDecl> sources;
        if (j.contains("sources"))
            for (const auto& s : j.at("sources"))
                sources.push_back({index_of(s.at("node").get<std::string>()),
                                   s.at("processes").get<int>()});
        std::vector<DestinationDecl> dests;
        if (j.contains("destinations"))
            for (const auto& d : j.at("destinations"))
                dests.push_back({index_of(d.at("node").get<std::string>()),
                                 d.at("processes").get<int>()});
        std::vector<Connection> conns;
        if (j.contains("connections"))
            for (const auto& c : j.at("connections")) {
                Connection cc;
                cc.source = index_of(c.at("source").get<std::string>());
                cc.destination = index_of(c.at("destination").get<std::string>());
                for (const auto& p : c.at("process_indices")) cc.process_indices.push_back(p.get<int>());
                conns.push_back(std::move(cc));
            }
        return AdtNetwork(std::move(nodes), std::move(edges), std::move(sources), std::move(dests),
                          std::move(conns), allow_cycles);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network file: ") + e.what());
    }
}

std::string AdtNetwork::to_json() const {
    ordered_json j;
    j["supernodes"] = ordered_json::array();
    for (const auto& n : nodes_) {
        ordered_json nd;
        nd["id"] = n.id;
        nd["inputs"] = n.num_inputs;
        nd["outputs"] = n.num_outputs;
        if (n.layer.has_value()) nd["layer"] = *n.layer;
        j["supernodes"].push_back(nd);
    }
    j["edges"] = ordered_json::array();
    for (const Edge& e : edges_) {
        ordered_json ed;
        ed["from"] = port_ref(e.from);
        ed["to"] = port_ref(e.to);
        j["edges"].push_back(ed);
    }
    j["sources"] = ordered_json::array();
    for (const auto& s : sources_)
        j["sources"].push_back({{"node", nodes_[s.node].id}, {"processes", s.processes}});
    j["destinations"] = ordered_json::array();
    for (const auto& d : destinations_)
        j["destinations"].push_back({{"node", nodes_[d.node].id}, {"processes", d.processes}});
    j["connections"] = ordered_json::array();
    for (const auto& c : connections_) {
        ordered_json cc;
        cc["source"] = nodes_[c.source].id;
        cc["destination"] = nodes_[c.destination].id;
        cc["process_indices"] = c.process_indices;
        j["connections"].push_back(cc);
    }
    return j.dump(2) + "\n";
}

int edges_from_snr(double snr) {
    if (!(snr > 0))
        throw UsageError("SNR must be positive");
    double v = 0.5 * std::log2(snr);
    int n = static_cast<int>(std::ceil(v));
    return std::max(n, 0);
}

}  // namespace adtnc
