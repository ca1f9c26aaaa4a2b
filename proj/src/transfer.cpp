#include "adtnc/transfer.hpp"

#include <algorithm>
#include <sstream>

namespace adtnc {

uint16_t CodingAssignment::alpha_at(int process, int port_key) const {
    auto it = alpha.find({process, port_key});
    return it == alpha.end() ? 0 : it->second;
}
uint16_t CodingAssignment::beta_at(int in_key, int out_key) const {
    auto it = beta.find({in_key, out_key});
    return it == beta.end() ? 0 : it->second;
}
uint16_t CodingAssignment::epsilon_at(int dest_node, int process, int in_key) const {
    auto it = epsilon.find({{dest_node, process}, in_key});
    return it == epsilon.end() ? 0 : it->second;
}
void CodingAssignment::set_alpha(int process, int port_key, uint16_t v) {
    if (v == 0)
        alpha.erase({process, port_key});
    else
        alpha[{process, port_key}] = v;
}
void CodingAssignment::set_beta(int in_key, int out_key, uint16_t v) {
    if (v == 0)
        beta.erase({in_key, out_key});
    else
        beta[{in_key, out_key}] = v;
}
void CodingAssignment::set_epsilon(int dest_node, int process, int in_key, uint16_t v) {
    if (v == 0)
        epsilon.erase({{dest_node, process}, in_key});
    else
        epsilon[{{dest_node, process}, in_key}] = v;
}

CoefficientSlots coefficient_slots(const AdtNetwork& net, int mu_override, int nu_override) {
    CoefficientSlots slots;
    for (const auto& s : net.sources()) {
        const Supernode& nd = net.node(s.node);
        int mu = mu_override >= 0 ? std::min(mu_override, nd.num_outputs) : s.processes;
        for (int i = 0; i < mu; ++i)
            for (int k = 0; k < nd.num_outputs; ++k)
                slots.alpha.push_back({i, net.port_key({s.node, Side::Out, k})});
    }
    for (int n = 0; n < static_cast<int>(net.nodes().size()); ++n) {
        const Supernode& nd = net.node(n);
        for (int i = 0; i < nd.num_inputs; ++i)
            for (int j = 0; j < nd.num_outputs; ++j)
                slots.beta.push_back({net.port_key({n, Side::In, i}), net.port_key({n, Side::Out, j})});
    }
    for (const auto& d : net.destinations()) {
        const Supernode& nd = net.node(d.node);
        int nu = nu_override >= 0 ? nu_override : d.processes;
        for (int k = 0; k < nu; ++k)
            for (int i = 0; i < nd.num_inputs; ++i)
                slots.epsilon.push_back({{d.node, k}, net.port_key({d.node, Side::In, i})});
    }
    return slots;
}

CodingAssignment random_assignment(const AdtNetwork& net, const Field& field, Rng& rng,
                                   int mu_override, int nu_override) {
    CoefficientSlots slots = coefficient_slots(net, mu_override, nu_override);
    CodingAssignment a(field);
    for (auto [i, key] : slots.alpha) a.set_alpha(i, key, field.random(rng));
    for (auto [in, out] : slots.beta) a.set_beta(in, out, field.random(rng));
    for (auto [dp, in] : slots.epsilon) a.set_epsilon(dp.first, dp.second, in, field.random(rng));
    return a;
}

std::vector<size_t> SystemMatrix::destination_columns(int dest_node) const {
    std::vector<size_t> cols;
    for (size_t c = 0; c < col_labels.size(); ++c)
        if (col_labels[c].first == dest_node) cols.push_back(c);
    return cols;
}

Matrix<FieldElement> build_F(const AdtNetwork& net, const CodingAssignment& assign) {
    const Field& f = assign.field;
    const auto& topo = net.topological_port_order();
    const auto& pos = net.topological_position();
    const size_t p = topo.size();
    Matrix<FieldElement> F(p, p, fe(0, f));
    for (const Edge& e : net.edges())
        F.at(pos[net.port_key(e.from)], pos[net.port_key(e.to)]) = fe(1, f);
    for (const auto& [key, v] : assign.beta) {
        auto [in_key, out_key] = key;
        F.at(pos[in_key], pos[out_key]) = fe(v, f);
    }
    return F;
}

Matrix<FieldElement> build_A(const AdtNetwork& net, const CodingAssignment& assign) {
    const Field& f = assign.field;
    const auto& pos = net.topological_position();
    std::vector<std::pair<int, int>> rows;
    for (const auto& s : net.sources())
        for (int i = 0; i < s.processes; ++i) rows.push_back({s.node, i});
    // rows may exceed declared processes when the assignment carries extra
    // alpha entries (e.g. full free dimension for rank probing)
    for (const auto& [key, v] : assign.alpha) {
        auto [i, port_key] = key;
        int node = net.port_at(port_key).node;
        if (std::find(rows.begin(), rows.end(), std::make_pair(node, i)) == rows.end())
            rows.push_back({node, i});
    }
    std::sort(rows.begin(), rows.end());
    Matrix<FieldElement> A(rows.size(), net.num_ports(), fe(0, f));
    for (const auto& [key, v] : assign.alpha) {
        auto [i, port_key] = key;
        int node = net.port_at(port_key).node;
        auto it = std::find(rows.begin(), rows.end(), std::make_pair(node, i));
        A.at(it - rows.begin(), pos[port_key]) = fe(v, f);
    }
    return A;
}

namespace {

std::vector<std::pair<int, int>> destination_process_labels(const AdtNetwork& net,
                                                            const CodingAssignment& assign) {
    std::vector<std::pair<int, int>> labels;
    for (const auto& d : net.destinations())
        for (int k = 0; k < d.processes; ++k) labels.push_back({d.node, k});
    for (const auto& [key, v] : assign.epsilon) {
        auto [np, in_key] = key;
        if (std::find(labels.begin(), labels.end(), np) == labels.end()) labels.push_back(np);
    }
    std::sort(labels.begin(), labels.end());
    return labels;
}

}  // namespace

Matrix<FieldElement> build_B(const AdtNetwork& net, const CodingAssignment& assign) {
    const Field& f = assign.field;
    const auto& pos = net.topological_position();
    auto labels = destination_process_labels(net, assign);
    Matrix<FieldElement> B(labels.size(), net.num_ports(), fe(0, f));
    for (const auto& [key, v] : assign.epsilon) {
        auto [np, in_key] = key;
        auto it = std::find(labels.begin(), labels.end(), np);
        B.at(it - labels.begin(), pos[in_key]) = fe(v, f);
    }
    return B;
}

Matrix<FieldElement> unit_triangular_inverse(const Matrix<FieldElement>& f) {
    const size_t n = f.rows();
    const FieldElement zero = f.zero();
    const Field& fld = zero.field();
    // inv = sum F^k accumulated by back-substitution: inv[i][j] of (I-F)^{-1}
    // satisfies inv = I + F * inv
    Matrix<FieldElement> inv = Matrix<FieldElement>::identity(n, zero, fe(1, fld));
    for (size_t i = n; i-- > 0;) {
        for (size_t k = i + 1; k < n; ++k) {
            const FieldElement& fik = f.at(i, k);
            if (fik == zero) continue;
            for (size_t j = i + 1; j < n; ++j)
                inv.at(i, j) = inv.at(i, j) + fik * inv.at(k, j);
        }
    }
    return inv;
}

SystemMatrix system_matrix(const AdtNetwork& net, const CodingAssignment& assign) {
    Matrix<FieldElement> F = build_F(net, assign);
    Matrix<FieldElement> A = build_A(net, assign);
    Matrix<FieldElement> B = build_B(net, assign);
    Matrix<FieldElement> inv = unit_triangular_inverse(F);
    SystemMatrix sm{A * inv * B.transpose(), {}, {}};
    for (const auto& s : net.sources())
        for (int i = 0; i < s.processes; ++i) sm.row_labels.push_back({s.node, i});
    for (const auto& [key, v] : assign.alpha) {
        int node = net.port_at(key.second).node;
        if (std::find(sm.row_labels.begin(), sm.row_labels.end(),
                      std::make_pair(node, key.first)) == sm.row_labels.end())
            sm.row_labels.push_back({node, key.first});
    }
    std::sort(sm.row_labels.begin(), sm.row_labels.end());
    sm.col_labels = destination_process_labels(net, assign);
    return sm;
}

Matrix<SymPoly> build_F_symbolic(const AdtNetwork& net, const Field& field,
                                 const SymContextPtr& ctx) {
    const auto& topo = net.topological_port_order();
    const auto& pos = net.topological_position();
    const size_t p = topo.size();
    Matrix<SymPoly> F(p, p, SymPoly::zero(field, ctx));
    for (const Edge& e : net.edges())
        F.at(pos[net.port_key(e.from)], pos[net.port_key(e.to)]) =
            SymPoly::constant(field, ctx, 1);
    for (int n = 0; n < static_cast<int>(net.nodes().size()); ++n) {
        const Supernode& nd = net.node(n);
        for (int i = 0; i < nd.num_inputs; ++i) {
            PortId in{n, Side::In, i};
            if (net.in_edges(in).empty()) continue;  // unused port: coefficient forced to 0
            for (int j = 0; j < nd.num_outputs; ++j) {
                PortId out{n, Side::Out, j};
                if (net.out_edges(out).empty()) continue;
                std::string name = "b(" + net.port_label(in) + "," + net.port_label(out) + ")";
                F.at(pos[net.port_key(in)], pos[net.port_key(out)]) =
                    SymPoly::variable(field, ctx, name);
            }
        }
    }
    return F;
}

Matrix<SymPoly> symbolic_series_inverse(const Matrix<SymPoly>& f, unsigned truncate_degree,
                                        bool with_delay) {
    const size_t n = f.rows();
    const SymPoly zero = f.zero();
    SymPoly one = SymPoly::constant(zero.field(), zero.context(), 1);
    Matrix<SymPoly> hop = f;
    if (with_delay) {
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < n; ++c) hop.at(r, c) = hop.at(r, c).times_d(1);
    }
    Matrix<SymPoly> acc = Matrix<SymPoly>::identity(n, zero, one);
    Matrix<SymPoly> power = acc;
    for (unsigned k = 1; k <= truncate_degree; ++k) {
        power = power * hop;
        if (power.is_zero()) break;  // nilpotent: series already exact
        acc = acc + power;
    }
    return acc;
}

SimulationResult simulate_ports(const AdtNetwork& net, const CodingAssignment& assign,
                                const std::map<int, std::vector<uint16_t>>& source_symbols) {
    const Field& f = assign.field;
    const auto& topo = net.topological_port_order();
    SimulationResult res;
    res.port_values.assign(net.num_ports(), 0);
    for (const PortId& p : topo) {
        int key = net.port_key(p);
        if (p.side == Side::In) {
            uint16_t acc = 0;
            for (int e : net.in_edges(p))
                acc = f.add(acc, res.port_values[net.port_key(net.edges()[e].from)]);
            res.port_values[key] = acc;
        } else {
            uint16_t acc = 0;
            const Supernode& nd = net.node(p.node);
            for (int i = 0; i < nd.num_inputs; ++i) {
                uint16_t b = assign.beta_at(net.port_key({p.node, Side::In, i}), key);
                if (b) acc = f.add(acc, f.mul(b, res.port_values[net.port_key({p.node, Side::In, i})]));
            }
            auto sit = source_symbols.find(p.node);
            if (sit != source_symbols.end()) {
                for (size_t i = 0; i < sit->second.size(); ++i) {
                    uint16_t a = assign.alpha_at(static_cast<int>(i), key);
                    if (a) acc = f.add(acc, f.mul(a, sit->second[i]));
                }
            }
            res.port_values[key] = acc;
        }
    }
    for (const auto& d : net.destinations()) {
        std::vector<uint16_t> z(d.processes, 0);
        const Supernode& nd = net.node(d.node);
        for (int k = 0; k < d.processes; ++k) {
            uint16_t acc = 0;
            for (int i = 0; i < nd.num_inputs; ++i) {
                int in_key = net.port_key({d.node, Side::In, i});
                uint16_t eps = assign.epsilon_at(d.node, k, in_key);
                if (eps) acc = f.add(acc, f.mul(eps, res.port_values[in_key]));
            }
            z[k] = acc;
        }
        res.destination[d.node] = std::move(z);
    }
    return res;
}

std::map<int, std::vector<uint16_t>> simulate(const AdtNetwork& net,
                                              const CodingAssignment& assign,
                                              const std::vector<uint16_t>& source_symbols) {
    if (net.sources().size() != 1)
        throw UsageError("simulate() wants exactly one source; use simulate_ports");
    return simulate_ports(net, assign, {{net.sources()[0].node, source_symbols}}).destination;
}

std::string dump_matrix_csv(const AdtNetwork& net, const Matrix<FieldElement>& m) {
    std::ostringstream os;
    const auto& topo = net.topological_port_order();
    for (size_t i = 0; i < topo.size(); ++i) os << (i ? "," : "") << net.port_label(topo[i]);
    os << "\n";
    for (size_t r = 0; r < m.rows(); ++r) {
        for (size_t c = 0; c < m.cols(); ++c) os << (c ? "," : "") << m.at(r, c).value();
        os << "\n";
    }
    return os.str();
}

std::string dump_matrix_symbolic(const AdtNetwork& net, const Matrix<SymPoly>& m) {
    std::ostringstream os;
    const auto& topo = net.topological_port_order();
    for (size_t i = 0; i < topo.size(); ++i) os << (i ? "\t" : "") << net.port_label(topo[i]);
    os << "\n";
    for (size_t r = 0; r < m.rows(); ++r) {
        for (size_t c = 0; c < m.cols(); ++c) os << (c ? "\t" : "") << m.at(r, c).str();
        os << "\n";
    }
    return os.str();
}

}  // namespace adtnc
