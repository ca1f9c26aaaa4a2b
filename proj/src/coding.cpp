#include "adtnc/coding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace adtnc {

using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

int single_source_of(const AdtNetwork& net, const std::vector<Connection>& conns) {
    if (conns.empty()) throw UsageError("empty connection set");
    int s = conns[0].source;
    for (const auto& c : conns)
        if (c.source != s)
            throw UsageError("connection set spans multiple sources; apply the super-source transform first");
    return s;
}

void require_consistent_demands(const AdtNetwork& net, const std::vector<Connection>& conns) {
    std::set<int> dests;
    for (const auto& c : conns) {
        if (!dests.insert(c.destination).second)
            throw UsageError("destination appears in more than one connection");
        int mu = net.source_process_count(c.source);
        for (int p : c.process_indices)
            if (p < 0 || p >= mu) throw UsageError("connection demands an unknown source process");
        if (net.destination_process_count(c.destination) != c.rate())
            throw UsageError("destination " + net.node(c.destination).id +
                             " must declare exactly R(c) processes");
    }
}

// forward reachability from source output ports / backward from destination
// input ports, over edges and structural in->out pairs inside supernodes
struct Liveness {
    std::vector<bool> reach, coreach;
};

Liveness port_liveness(const AdtNetwork& net, const std::vector<Connection>& conns) {
    Liveness lv;
    lv.reach.assign(net.num_ports(), false);
    lv.coreach.assign(net.num_ports(), false);
    std::vector<int> stack;
    for (const auto& s : net.sources())
        for (int k = 0; k < net.node(s.node).num_outputs; ++k) {
            int key = net.port_key({s.node, Side::Out, k});
            lv.reach[key] = true;
            stack.push_back(key);
        }
    while (!stack.empty()) {
        int key = stack.back();
        stack.pop_back();
        PortId p = net.port_at(key);
        if (p.side == Side::Out) {
            for (int e : net.out_edges(p)) {
                int to = net.port_key(net.edges()[e].to);
                if (!lv.reach[to]) {
                    lv.reach[to] = true;
                    stack.push_back(to);
                }
            }
        } else {
            for (int j = 0; j < net.node(p.node).num_outputs; ++j) {
                int out = net.port_key({p.node, Side::Out, j});
                if (!lv.reach[out]) {
                    lv.reach[out] = true;
                    stack.push_back(out);
                }
            }
        }
    }
    std::set<int> dest_nodes;
    for (const auto& c : conns) dest_nodes.insert(c.destination);
    if (conns.empty())
        for (const auto& d : net.destinations()) dest_nodes.insert(d.node);
    for (int d : dest_nodes)
        for (int k = 0; k < net.node(d).num_inputs; ++k) {
            int key = net.port_key({d, Side::In, k});
            lv.coreach[key] = true;
            stack.push_back(key);
        }
    while (!stack.empty()) {
        int key = stack.back();
        stack.pop_back();
        PortId p = net.port_at(key);
        if (p.side == Side::In) {
            for (int e : net.in_edges(p)) {
                int from = net.port_key(net.edges()[e].from);
                if (!lv.coreach[from]) {
                    lv.coreach[from] = true;
                    stack.push_back(from);
                }
            }
        } else {
            for (int i = 0; i < net.node(p.node).num_inputs; ++i) {
                int in = net.port_key({p.node, Side::In, i});
                if (!lv.coreach[in]) {
                    lv.coreach[in] = true;
                    stack.push_back(in);
                }
            }
        }
    }
    return lv;
}

}  // namespace

std::string connection_kind_name(ConnectionKind k) {
    switch (k) {
        case ConnectionKind::Empty: return "empty";
        case ConnectionKind::Unicast: return "unicast";
        case ConnectionKind::SingleMulticast: return "multicast";
        case ConnectionKind::MultipleMulticast: return "multiple_multicast";
        case ConnectionKind::DisjointMulticast: return "disjoint_multicast";
        case ConnectionKind::TwoLevel: return "two_level";
        case ConnectionKind::ThreeLevel: return "three_level";
        case ConnectionKind::General: return "general";
    }
    return "unknown";
}

ConnectionKind classify_connections(const AdtNetwork& net) {
    const auto& conns = net.connections();
    if (conns.empty()) return ConnectionKind::Empty;
    std::set<int> sources;
    for (const auto& c : conns) sources.insert(c.source);
    if (sources.size() > 1) {
        for (const auto& c : conns) {
            int mu = net.source_process_count(c.source);
            auto d = sorted_unique(c.process_indices);
            if (static_cast<int>(d.size()) != mu) return ConnectionKind::General;
        }
        return ConnectionKind::MultipleMulticast;
    }
    if (conns.size() == 1) return ConnectionKind::Unicast;

    int mu = net.source_process_count(conns[0].source);
    std::vector<std::vector<int>> demands;
    for (const auto& c : conns) demands.push_back(sorted_unique(c.process_indices));

    // strict inclusion chains of depth three are out of reach of the
    // two-level construction
    for (size_t a = 0; a < demands.size(); ++a)
        for (size_t b = 0; b < demands.size(); ++b)
            for (size_t c = 0; c < demands.size(); ++c) {
                if (a == b || b == c || a == c) continue;
                auto incl = [](const std::vector<int>& x, const std::vector<int>& y) {
                    return x.size() < y.size() &&
                           std::includes(y.begin(), y.end(), x.begin(), x.end());
                };
                if (incl(demands[a], demands[b]) && incl(demands[b], demands[c]))
                    return ConnectionKind::ThreeLevel;
            }

    bool all_full = true;
    for (const auto& d : demands)
        if (static_cast<int>(d.size()) != mu) all_full = false;
    if (all_full) return ConnectionKind::SingleMulticast;

    auto disjoint = [](const std::vector<int>& a, const std::vector<int>& b) {
        std::vector<int> inter;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
        return inter.empty();
    };
    std::vector<size_t> partial;
    bool any_full = false;
    for (size_t i = 0; i < demands.size(); ++i) {
        if (static_cast<int>(demands[i].size()) == mu)
            any_full = true;
        else
            partial.push_back(i);
    }
    for (size_t i = 0; i < partial.size(); ++i)
        for (size_t j = i + 1; j < partial.size(); ++j)
            if (!disjoint(demands[partial[i]], demands[partial[j]])) return ConnectionKind::General;
    return any_full ? ConnectionKind::TwoLevel : ConnectionKind::DisjointMulticast;
}

bool verify_solution(const AdtNetwork& net, const CodeSolution& sol, int checks, uint64_t seed) {
    const Field& f = sol.assign.field;
    int src = net.sources().empty() ? -1 : net.sources()[0].node;
    int mu = src >= 0 ? net.source_process_count(src) : 0;
    Rng rng(seed);
    for (int t = 0; t < checks; ++t) {
        std::vector<uint16_t> x(mu);
        for (auto& v : x) v = f.random(rng);
        SimulationResult sim = simulate_ports(net, sol.assign, {{src, x}});
        for (const auto& [node, dec] : sol.decoders) {
            auto zit = sim.destination.find(node);
            if (zit == sim.destination.end()) return false;
            const std::vector<uint16_t>& z = zit->second;
            const auto& want = sol.demanded.at(node);
            if (dec.rows() != z.size() || dec.cols() != want.size()) return false;
            for (size_t c = 0; c < want.size(); ++c) {
                uint16_t acc = 0;
                for (size_t r = 0; r < z.size(); ++r)
                    acc = f.add(acc, f.mul(z[r], dec.at(r, c).value()));
                if (acc != x.at(want[c])) return false;
            }
        }
        for (const auto& [node, pd] : sol.port_decoders) {
            const auto& [ports, dec] = pd;
            for (size_t c = 0; c < dec.cols(); ++c) {
                uint16_t acc = 0;
                for (size_t r = 0; r < ports.size(); ++r)
                    acc = f.add(acc, f.mul(sim.port_values[net.port_key(ports[r])],
                                           dec.at(r, c).value()));
                if (acc != x.at(c)) return false;
            }
        }
    }
    return true;
}

RandomCodeResult random_code(const AdtNetwork& net, const std::vector<Connection>& conns,
                             const Field& field, uint64_t seed) {
    int src = single_source_of(net, conns);
    require_consistent_demands(net, conns);
    for (const auto& c : conns) {
        int mc = mincut_combinatorial(net, c.source, c.destination);
        if (mc < c.rate())
            throw InfeasibleConnectionError(
                "connection to " + net.node(c.destination).id + " demands rate " +
                std::to_string(c.rate()) + " but mincut is " + std::to_string(mc));
    }

    Rng rng(seed);
    CodingAssignment assign = random_assignment(net, field, rng);
    SystemMatrix sm = system_matrix(net, assign);

    CodeSolution sol{assign, {}, {}, seed, {}};
    for (const auto& c : conns) {
        std::vector<size_t> rows;
        for (int p : c.process_indices) {
            auto it = std::find(sm.row_labels.begin(), sm.row_labels.end(),
                                std::make_pair(src, p));
            rows.push_back(it - sm.row_labels.begin());
        }
        std::vector<size_t> cols = sm.destination_columns(c.destination);
        Matrix<FieldElement> block = sm.m.submatrix(rows, cols);
        if (mat_rank(block) < block.rows()) return {std::nullopt, c.destination};
        sol.decoders.emplace(c.destination, mat_inverse(block));
        sol.demanded[c.destination] = c.process_indices;
    }
    if (!verify_solution(net, sol))
        throw Error("internal: decoder verification failed after invertibility check");
    return {std::move(sol), -1};
}

CodeSolution solve_multicast(const AdtNetwork& net, const std::vector<Connection>& conns,
                             const Field& field, uint64_t seed, int retries) {
    int last_fail = -1;
    for (int attempt = 0; attempt < retries; ++attempt) {
        RandomCodeResult r = random_code(net, conns, field, mix_seed(seed, attempt));
        if (r.solution) {
            r.solution->seed = seed;
            return std::move(*r.solution);
        }
        last_fail = r.failed_destination;
    }
    throw RandomizationExhaustedError(
        "no decodable draw in " + std::to_string(retries) + " attempts; last singular destination: " +
        (last_fail >= 0 ? net.node(last_fail).id : std::string("?")) +
        " (field may be too small)");
}

FeasibilityResult feasible_unicast(const AdtNetwork& net, const Connection& conn,
                                   const Field& field, uint64_t seed) {
    FeasibilityResult res;
    if (conn.rate() == 0) {
        res.feasible = true;
        CodeSolution empty{CodingAssignment(field), {}, {}, seed, {}};
        res.witness = empty;
        return res;
    }
    int mc = mincut_combinatorial(net, conn.source, conn.destination);
    res.feasible = mc >= conn.rate();
    if (res.feasible) res.witness = solve_multicast(net, {conn}, field, seed);
    return res;
}

namespace {

// Gauss-Jordan on Kt (r x c) augmented with the identity; returns pivot
// columns and the reduced matrices, or an empty pivot list if rank < r.
struct SolveLeft {
    bool full_rank = false;
    std::vector<int> pivot_col;                  // per row of the RREF
    Matrix<FieldElement> red;                    // RREF of Kt
    Matrix<FieldElement> aug;                    // the transformations applied to I
    std::vector<int> free_cols;
};

SolveLeft reduce_wide(Matrix<FieldElement> kt) {
    const Field& f = kt.zero().field();
    const size_t r = kt.rows(), c = kt.cols();
    SolveLeft out{false, {}, kt, Matrix<FieldElement>::identity(r, kt.zero(), fe(1, f)), {}};
    Matrix<FieldElement>& m = out.red;
    Matrix<FieldElement>& aug = out.aug;
    size_t row = 0;
    std::vector<bool> is_pivot(c, false);
    for (size_t col = 0; col < c && row < r; ++col) {
        size_t p = row;
        while (p < r && m.at(p, col).is_zero()) ++p;
        if (p == r) continue;
        for (size_t j = 0; j < c; ++j) std::swap(m.at(row, j), m.at(p, j));
        for (size_t j = 0; j < r; ++j) std::swap(aug.at(row, j), aug.at(p, j));
        FieldElement inv = m.at(row, col).inverse();
        for (size_t j = 0; j < c; ++j) m.at(row, j) = m.at(row, j) * inv;
        for (size_t j = 0; j < r; ++j) aug.at(row, j) = aug.at(row, j) * inv;
        for (size_t rr = 0; rr < r; ++rr) {
            if (rr == row || m.at(rr, col).is_zero()) continue;
            FieldElement factor = m.at(rr, col);
            for (size_t j = 0; j < c; ++j) m.at(rr, j) = m.at(rr, j) - factor * m.at(row, j);
            for (size_t j = 0; j < r; ++j) aug.at(rr, j) = aug.at(rr, j) - factor * aug.at(row, j);
        }
        out.pivot_col.push_back(static_cast<int>(col));
        is_pivot[col] = true;
        ++row;
    }
    out.full_rank = row == r;
    for (size_t col = 0; col < c; ++col)
        if (!is_pivot[col]) out.free_cols.push_back(static_cast<int>(col));
    return out;
}

struct DisjointPlan {
    int src;
    std::vector<int> dest_nodes;
    std::vector<int> block_sizes;
    std::vector<int> global_process;  // demanded process per super-destination slot
    int r_total = 0;
};

DisjointPlan plan_disjoint(const AdtNetwork& net, const std::vector<Connection>& conns) {
    DisjointPlan plan;
    plan.src = single_source_of(net, conns);
    std::set<int> used;
    for (const auto& c : conns) {
        for (int p : c.process_indices)
            if (!used.insert(p).second)
                throw UsageError("disjoint multicast demands overlap on process " + std::to_string(p));
        plan.dest_nodes.push_back(c.destination);
        plan.block_sizes.push_back(c.rate());
        for (int p : c.process_indices) plan.global_process.push_back(p);
        plan.r_total += c.rate();
    }
    return plan;
}

void check_disjoint_mincut(const AdtNetwork& net, const std::vector<Connection>& conns, int src) {
    const size_t k = conns.size();
    for (uint64_t mask = 1; mask < (uint64_t(1) << k); ++mask) {
        std::set<int> subset;
        int need = 0;
        for (size_t i = 0; i < k; ++i)
            if (mask >> i & 1) {
                subset.insert(conns[i].destination);
                need += conns[i].rate();
            }
        int mc = mincut_combinatorial_sets(net, {src}, subset);
        if (mc < need) {
            std::ostringstream os;
            os << "min-cut to destination subset {";
            bool first = true;
            for (int d : subset) {
                os << (first ? "" : ",") << net.node(d).id;
                first = false;
            }
            os << "} is " << mc << " < demanded " << need;
            throw InfeasibleConnectionError(os.str());
        }
    }
}

}  // namespace

CodeSolution solve_disjoint_multicast(const AdtNetwork& net, const std::vector<Connection>& conns,
                                      const Field& field, uint64_t seed, int retries) {
    require_consistent_demands(net, conns);
    DisjointPlan plan = plan_disjoint(net, conns);
    check_disjoint_mincut(net, conns, plan.src);

    AdtNetwork aug = net.with_super_destination(plan.dest_nodes);
    const int st = aug.node_index("__ST");
    const int mu = net.source_process_count(plan.src);
    const Supernode& src_node = net.node(plan.src);

    // super-destination slot of block i, local index j
    std::vector<int> slot_base(plan.dest_nodes.size());
    {
        int off = 0;
        for (size_t i = 0; i < plan.dest_nodes.size(); ++i) {
            slot_base[i] = off;
            off += net.node(plan.dest_nodes[i]).num_inputs;
        }
    }

    for (int attempt = 0; attempt < retries; ++attempt) {
        Rng rng(mix_seed(seed, attempt));
        CodingAssignment full(field);
        // random internal mixing everywhere; the source encoding is solved below
        for (auto [in, out] : coefficient_slots(aug).beta)
            full.set_beta(in, out, field.random(rng));
        // the super-destination reads its demanded slots one-to-one
        {
            int r = 0;
            for (size_t i = 0; i < plan.dest_nodes.size(); ++i)
                for (int j = 0; j < plan.block_sizes[i]; ++j, ++r)
                    full.set_epsilon(st, r, aug.port_key({st, Side::In, slot_base[i] + j}), 1);
        }

        // K = rows of (I-F)^{-1} B^T belonging to the source's output ports
        Matrix<FieldElement> F = build_F(aug, full);
        Matrix<FieldElement> B = build_B(aug, full);
        Matrix<FieldElement> K = unit_triangular_inverse(F) * B.transpose();
        const auto& pos = aug.topological_position();
        Matrix<FieldElement> k_sub(src_node.num_outputs, plan.r_total, fe(0, field));
        for (int o = 0; o < src_node.num_outputs; ++o) {
            int prow = pos[aug.port_key({plan.src, Side::Out, o})];
            for (int r = 0; r < plan.r_total; ++r) k_sub.at(o, r) = K.at(prow, r);
        }

        SolveLeft red = reduce_wide(k_sub.transpose());
        if (!red.full_rank) continue;  // unlucky draw; redraw

        // row a_p of A with a_p * k_sub = e_r, non-pivot components zero
        for (int r = 0; r < plan.r_total; ++r) {
            int p = plan.global_process[r];
            for (size_t i = 0; i < red.pivot_col.size(); ++i) {
                uint16_t v = red.aug.at(i, r).value();
                if (v)
                    full.set_alpha(p, aug.port_key({plan.src, Side::Out, red.pivot_col[i]}), v);
            }
        }

        // the block structure is exact by construction; keep the check as a
        // guard against assembly mistakes
        SystemMatrix sm = system_matrix(aug, full);
        bool identity_ok = true;
        for (int r = 0; r < plan.r_total && identity_ok; ++r)
            for (size_t row = 0; row < sm.row_labels.size() && identity_ok; ++row) {
                uint16_t want = sm.row_labels[row].second == plan.global_process[r] ? 1 : 0;
                if (sm.m.at(row, r).value() != want) identity_ok = false;
            }
        if (!identity_ok) throw Error("internal: super-destination system matrix is not the identity");

        // map back to the original network; destination epsilon re-derives the
        // symbols its forwarding ports would have carried
        CodingAssignment out(field);
        for (const auto& [key, v] : full.alpha) out.alpha[key] = v;
        for (const auto& [key, v] : full.beta) {
            PortId in = aug.port_at(key.first);
            if (in.node < static_cast<int>(net.nodes().size()))
                out.set_beta(net.port_key(in), net.port_key(aug.port_at(key.second)), v);
        }
        CodeSolution sol{out, {}, {}, seed, {}};
        for (size_t i = 0; i < plan.dest_nodes.size(); ++i) {
            int d = plan.dest_nodes[i];
            int di = plan.block_sizes[i];
            for (int k = 0; k < di; ++k)
                for (int in = 0; in < net.node(d).num_inputs; ++in) {
                    uint16_t b = out.beta_at(net.port_key({d, Side::In, in}),
                                             net.port_key({d, Side::Out, k}));
                    if (b) sol.assign.set_epsilon(d, k, net.port_key({d, Side::In, in}), b);
                }
            sol.decoders.emplace(d, Matrix<FieldElement>::identity(di, fe(0, field), fe(1, field)));
            sol.demanded[d] = conns[i].process_indices;
        }
        if (!verify_solution(net, sol)) continue;
        return sol;
    }
    throw RandomizationExhaustedError("disjoint multicast: no successful draw in " +
                                      std::to_string(retries) + " attempts");
}

CodeSolution solve_two_level(const AdtNetwork& net, const std::vector<Connection>& conns,
                             const Field& field, uint64_t seed, int retries) {
    require_consistent_demands(net, conns);
    int src = single_source_of(net, conns);
    const int mu = net.source_process_count(src);
    std::vector<Connection> disjoint_part, multicast_part;
    for (const auto& c : conns) {
        auto d = sorted_unique(c.process_indices);
        if (static_cast<int>(d.size()) == mu)
            multicast_part.push_back(c);
        else
            disjoint_part.push_back(c);
    }
    if (disjoint_part.empty()) return solve_multicast(net, conns, field, seed);
    if (multicast_part.empty()) return solve_disjoint_multicast(net, conns, field, seed);

    DisjointPlan plan = plan_disjoint(net, disjoint_part);
    check_disjoint_mincut(net, disjoint_part, src);
    for (const auto& c : multicast_part) {
        int mc = mincut_combinatorial(net, src, c.destination);
        if (mc < mu)
            throw InfeasibleConnectionError("multicast receiver " + net.node(c.destination).id +
                                            " has mincut " + std::to_string(mc) + " < " +
                                            std::to_string(mu));
    }

    AdtNetwork aug = net.with_super_destination(plan.dest_nodes);
    const int st = aug.node_index("__ST");
    const Supernode& src_node = net.node(src);
    const int n_out = src_node.num_outputs;

    std::vector<int> slot_base(plan.dest_nodes.size());
    {
        int off = 0;
        for (size_t i = 0; i < plan.dest_nodes.size(); ++i) {
            slot_base[i] = off;
            off += net.node(plan.dest_nodes[i]).num_inputs;
        }
    }

    for (int attempt = 0; attempt < retries; ++attempt) {
        Rng rng(mix_seed(seed, attempt));
        CodingAssignment full(field);
        for (auto [in, out] : coefficient_slots(aug).beta)
            full.set_beta(in, out, field.random(rng));
        {
            int r = 0;
            for (size_t i = 0; i < plan.dest_nodes.size(); ++i)
                for (int j = 0; j < plan.block_sizes[i]; ++j, ++r)
                    full.set_epsilon(st, r, aug.port_key({st, Side::In, slot_base[i] + j}), 1);
        }
        // random decoding coefficients at the full-rate receivers
        for (const auto& c : multicast_part)
            for (int k = 0; k < mu; ++k)
                for (int in = 0; in < net.node(c.destination).num_inputs; ++in)
                    full.set_epsilon(c.destination, k,
                                     aug.port_key({c.destination, Side::In, in}),
                                     field.random(rng));

        Matrix<FieldElement> F = build_F(aug, full);
        Matrix<FieldElement> B = build_B(aug, full);
        Matrix<FieldElement> K = unit_triangular_inverse(F) * B.transpose();
        const auto& pos = aug.topological_position();
        auto k_block = [&](const std::vector<size_t>& cols) {
            Matrix<FieldElement> kb(n_out, cols.size(), fe(0, field));
            for (int o = 0; o < n_out; ++o) {
                int prow = pos[aug.port_key({src, Side::Out, o})];
                for (size_t c = 0; c < cols.size(); ++c) kb.at(o, c) = K.at(prow, cols[c]);
            }
            return kb;
        };
        // column labels of B: declared destination processes plus any extra
        // epsilon targets, in (node, process) sorted order (mirrors build_B)
        std::vector<std::pair<int, int>> blabels;
        for (const auto& d : aug.destinations())
            for (int k = 0; k < d.processes; ++k) blabels.push_back({d.node, k});
        for (const auto& [key, v] : full.epsilon)
            if (std::find(blabels.begin(), blabels.end(), key.first) == blabels.end())
                blabels.push_back(key.first);
        std::sort(blabels.begin(), blabels.end());
        auto columns_of = [&](int node) {
            std::vector<size_t> cols;
            for (size_t i = 0; i < blabels.size(); ++i)
                if (blabels[i].first == node) cols.push_back(i);
            return cols;
        };

        // only the demanded super-destination slots (the first r_total
        // process labels) constrain A
        std::vector<size_t> st_cols = columns_of(st);
        st_cols.resize(plan.r_total);
        Matrix<FieldElement> k_star = k_block(st_cols);
        SolveLeft red = reduce_wide(k_star.transpose());
        if (!red.full_rank) continue;

        // affine freedom: particular solution on the pivot columns plus the
        // nullspace of k_star^T spanned by the free columns
        std::vector<std::vector<uint16_t>> nullbasis;
        for (int fc : red.free_cols) {
            std::vector<uint16_t> v(n_out, 0);
            v[fc] = 1;
            for (size_t i = 0; i < red.pivot_col.size(); ++i)
                v[red.pivot_col[i]] = red.red.at(i, fc).value();  // char 2: -x = x
            nullbasis.push_back(std::move(v));
        }

        bool solved = false;
        for (int inner = 0; inner < 16 && !solved; ++inner) {
            Matrix<FieldElement> A(mu, n_out, fe(0, field));
            for (int p = 0; p < mu; ++p) {
                // particular row: demanded slots of process p
                for (int r = 0; r < plan.r_total; ++r) {
                    if (plan.global_process[r] != p) continue;
                    for (size_t i = 0; i < red.pivot_col.size(); ++i)
                        A.at(p, red.pivot_col[i]) =
                            A.at(p, red.pivot_col[i]) + fe(red.aug.at(i, r).value(), field);
                }
                for (const auto& nb : nullbasis) {
                    uint16_t c = field.random(rng);
                    if (!c) continue;
                    for (int o = 0; o < n_out; ++o)
                        A.at(p, o) = A.at(p, o) + fe(field.mul(c, nb[o]), field);
                }
            }
            bool ok = true;
            for (const auto& c : multicast_part) {
                Matrix<FieldElement> m_j = A * k_block(columns_of(c.destination));
                if (mat_rank(m_j) < static_cast<size_t>(mu)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;

            CodingAssignment out(field);
            for (int p = 0; p < mu; ++p)
                for (int o = 0; o < n_out; ++o)
                    if (!A.at(p, o).is_zero())
                        out.set_alpha(p, net.port_key({src, Side::Out, o}), A.at(p, o).value());
            for (const auto& [key, v] : full.beta) {
                PortId in = aug.port_at(key.first);
                if (in.node < static_cast<int>(net.nodes().size()))
                    out.set_beta(net.port_key(in), net.port_key(aug.port_at(key.second)), v);
            }
            CodeSolution sol{out, {}, {}, seed, {}};
            for (size_t i = 0; i < plan.dest_nodes.size(); ++i) {
                int d = plan.dest_nodes[i];
                int di = plan.block_sizes[i];
                for (int k = 0; k < di; ++k)
                    for (int in = 0; in < net.node(d).num_inputs; ++in) {
                        uint16_t b = out.beta_at(net.port_key({d, Side::In, in}),
                                                 net.port_key({d, Side::Out, k}));
                        if (b) sol.assign.set_epsilon(d, k, net.port_key({d, Side::In, in}), b);
                    }
                sol.decoders.emplace(d,
                                     Matrix<FieldElement>::identity(di, fe(0, field), fe(1, field)));
                sol.demanded[d] = disjoint_part[i].process_indices;
            }
            for (const auto& c : multicast_part) {
                for (int k = 0; k < mu; ++k)
                    for (int in = 0; in < net.node(c.destination).num_inputs; ++in) {
                        uint16_t e = full.epsilon_at(c.destination, k,
                                                     aug.port_key({c.destination, Side::In, in}));
                        if (e)
                            sol.assign.set_epsilon(c.destination, k,
                                                   net.port_key({c.destination, Side::In, in}), e);
                    }
            }
            // decoders for the full-rate receivers from the original network
            SystemMatrix sm = system_matrix(net, sol.assign);
            for (const auto& c : multicast_part) {
                std::vector<size_t> rows(mu);
                for (int p = 0; p < mu; ++p) rows[p] = p;
                Matrix<FieldElement> block = sm.m.submatrix(rows, sm.destination_columns(c.destination));
                sol.decoders.emplace(c.destination, mat_inverse(block));
                sol.demanded[c.destination] = c.process_indices;
            }
            if (!verify_solution(net, sol)) continue;
            return sol;
        }
    }
    throw RandomizationExhaustedError("two-level multicast: no successful draw in " +
                                      std::to_string(retries) + " attempts");
}

bool check_general_sufficiency(const AdtNetwork& net, const std::vector<Connection>& conns,
                               const CodingAssignment& assign) {
    SystemMatrix sm = system_matrix(net, assign);
    std::set<std::pair<int, int>> connected;
    for (const auto& c : conns) connected.insert({c.source, c.destination});

    // condition 1: blocks of unconnected (source, destination) pairs vanish
    for (const auto& s : net.sources())
        for (const auto& d : net.destinations()) {
            if (connected.count({s.node, d.node})) continue;
            for (size_t r = 0; r < sm.row_labels.size(); ++r) {
                if (sm.row_labels[r].first != s.node) continue;
                for (size_t c = 0; c < sm.col_labels.size(); ++c)
                    if (sm.col_labels[c].first == d.node && !sm.m.at(r, c).is_zero()) return false;
            }
        }

    // condition 2: each receiver's stacked connected block is square nonsingular
    std::set<int> dests;
    for (const auto& c : conns) dests.insert(c.destination);
    for (int d : dests) {
        std::vector<size_t> rows, cols;
        for (size_t r = 0; r < sm.row_labels.size(); ++r)
            if (connected.count({sm.row_labels[r].first, d})) rows.push_back(r);
        for (size_t c = 0; c < sm.col_labels.size(); ++c)
            if (sm.col_labels[c].first == d) cols.push_back(c);
        if (rows.size() != cols.size()) return false;
        if (rows.empty()) continue;
        Matrix<FieldElement> block = sm.m.submatrix(rows, cols);
        if (mat_rank(block) < rows.size()) return false;
    }
    return true;
}

SuccessEstimate estimate_success_probability(const AdtNetwork& net,
                                             const std::vector<Connection>& conns,
                                             const Field& field, int trials, uint64_t seed) {
    SuccessEstimate est;
    est.q = field.order();
    est.trials = trials;
    std::set<int> dests;
    for (const auto& c : conns) dests.insert(c.destination);
    est.num_receivers = static_cast<int>(dests.size());

    // eta: randomized coefficient positions lying on a source->destination
    // path (this operationalizes "links carrying random combinations")
    Liveness lv = port_liveness(net, conns);
    CoefficientSlots slots = coefficient_slots(net);
    for (auto [i, key] : slots.alpha)
        if (lv.coreach[key]) ++est.eta;
    for (auto [in, out] : slots.beta)
        if (lv.reach[in] && lv.coreach[out]) ++est.eta;
    for (auto [dp, in] : slots.epsilon)
        if (lv.reach[in] && dests.count(dp.first)) ++est.eta;

    double base = 1.0 - static_cast<double>(est.num_receivers) / est.q;
    est.bound = base <= 0 ? base : std::pow(base, est.eta);

    for (int t = 0; t < trials; ++t) {
        try {
            RandomCodeResult r = random_code(net, conns, field, mix_seed(seed, t));
            if (r.solution) ++est.successes;
        } catch (const InfeasibleConnectionError&) {
            est.successes = 0;
            est.empirical = 0;
            return est;
        }
    }
    est.empirical = trials > 0 ? static_cast<double>(est.successes) / trials : 0.0;
    return est;
}

std::optional<CodingAssignment> exhaustive_binary_code_search(const AdtNetwork& net,
                                                              const std::vector<Connection>& conns,
                                                              uint64_t max_assignments) {
    const Field f2 = Field::gf(1);
    int src = single_source_of(net, conns);
    const int R = net.source_process_count(src);
    if (R > 16) throw ComplexityRefusalError("exhaustive search supports rate <= 16");
    Liveness lv = port_liveness(net, conns);

    const auto& topo = net.topological_port_order();
    struct Column {
        int out_key;
        std::vector<int> alpha_rows;  // contributes unit vectors
        std::vector<int> in_keys;     // contributes the input-port vectors
    };
    std::vector<Column> cols;
    std::vector<int> depth_of_port(net.num_ports(), -1);
    for (const PortId& p : topo) {
        if (p.side != Side::Out) continue;
        int key = net.port_key(p);
        if (!lv.reach[key] || !lv.coreach[key]) continue;
        Column col;
        col.out_key = key;
        if (p.node == src)
            for (int i = 0; i < R; ++i) col.alpha_rows.push_back(i);
        for (int i = 0; i < net.node(p.node).num_inputs; ++i) {
            int in_key = net.port_key({p.node, Side::In, i});
            if (lv.reach[in_key]) col.in_keys.push_back(in_key);
        }
        depth_of_port[key] = static_cast<int>(cols.size());
        cols.push_back(std::move(col));
    }

    double log2_total = 0;
    for (const auto& c : cols) log2_total += c.alpha_rows.size() + c.in_keys.size();
    if (log2_total > 63 || (uint64_t(1) << static_cast<unsigned>(log2_total)) > max_assignments)
        throw ComplexityRefusalError("exhaustive binary search would visit 2^" +
                                     std::to_string(static_cast<int>(log2_total)) + " assignments");

    // destination checks become possible once the last column feeding them is
    // chosen
    struct Check {
        int dest;
        std::vector<int> in_keys;
        uint32_t demand_mask;
    };
    std::vector<std::vector<Check>> checks_at(cols.size() + 1);
    for (const auto& c : conns) {
        Check ck;
        ck.dest = c.destination;
        ck.demand_mask = 0;
        for (int p : c.process_indices) ck.demand_mask |= uint32_t(1) << p;
        int ready = 0;
        bool reachable = false;
        for (int i = 0; i < net.node(c.destination).num_inputs; ++i) {
            PortId in{c.destination, Side::In, i};
            int in_key = net.port_key(in);
            if (!lv.reach[in_key]) continue;
            ck.in_keys.push_back(in_key);
            for (int e : net.in_edges(in)) {
                int tail = net.port_key(net.edges()[e].from);
                if (depth_of_port[tail] >= 0) {
                    ready = std::max(ready, depth_of_port[tail] + 1);
                    reachable = true;
                }
            }
        }
        if (!reachable && c.rate() > 0) return std::nullopt;  // nothing ever arrives
        checks_at[ready].push_back(std::move(ck));
    }

    std::vector<uint32_t> vec(net.num_ports(), 0);
    std::vector<uint32_t> choice(cols.size(), 0);

    auto in_vector = [&](int in_key) {
        uint32_t acc = 0;
        for (int e : net.in_edges(net.port_at(in_key)))
            acc ^= vec[net.port_key(net.edges()[e].from)];
        return acc;
    };

    // a destination decodes iff every demanded unit vector lies in the span
    // of its input-port vectors; the free epsilon stage realizes any such map
    auto decodes = [&](const Check& ck) {
        uint32_t basis[17] = {0};
        auto reduce = [&](uint32_t v) {
            for (int b = 16; b >= 0; --b)
                if ((v >> b & 1) && basis[b]) v ^= basis[b];
            return v;
        };
        for (int in_key : ck.in_keys) {
            uint32_t v = reduce(in_vector(in_key));
            if (v) {
                int h = 31 - __builtin_clz(v);
                basis[h] = v;
            }
        }
        for (int p = 0; p < R; ++p)
            if ((ck.demand_mask >> p & 1) && reduce(uint32_t(1) << p)) return false;
        return true;
    };

    std::function<bool(size_t)> dfs = [&](size_t depth) -> bool {
        for (const Check& ck : checks_at[depth])
            if (!decodes(ck)) return false;
        if (depth == cols.size()) return true;
        const Column& col = cols[depth];
        std::vector<uint32_t> contrib;
        contrib.reserve(col.alpha_rows.size() + col.in_keys.size());
        for (int row : col.alpha_rows) contrib.push_back(uint32_t(1) << row);
        for (int in_key : col.in_keys) contrib.push_back(in_vector(in_key));
        const uint32_t limit = uint32_t(1) << contrib.size();
        for (uint32_t bits = 0; bits < limit; ++bits) {
            uint32_t v = 0;
            for (size_t b = 0; b < contrib.size(); ++b)
                if (bits >> b & 1) v ^= contrib[b];
            vec[col.out_key] = v;
            choice[depth] = bits;
            if (dfs(depth + 1)) return true;
        }
        return false;
    };

    if (!dfs(0)) return std::nullopt;

    CodingAssignment a(f2);
    for (size_t d = 0; d < cols.size(); ++d) {
        const Column& col = cols[d];
        uint32_t bits = choice[d];
        size_t b = 0;
        for (; b < col.alpha_rows.size(); ++b)
            if (bits >> b & 1) a.set_alpha(col.alpha_rows[b], col.out_key, 1);
        for (size_t i = 0; i < col.in_keys.size(); ++i, ++b)
            if (bits >> b & 1) a.set_beta(col.in_keys[i], col.out_key, 1);
    }
    return a;
}

bool multiple_multicast_feasible_direct(const AdtNetwork& net, const MincutOptions& opts) {
    std::set<int> sources;
    int total = 0;
    for (const auto& s : net.sources()) {
        sources.insert(s.node);
        total += s.processes;
    }
    for (const auto& d : net.destinations()) {
        if (sources.count(d.node)) continue;
        if (mincut_combinatorial_sets(net, sources, {d.node}, opts) < total) return false;
    }
    return true;
}

bool multiple_multicast_feasible_super_source(const AdtNetwork& net, const MincutOptions& opts) {
    AdtNetwork aug = net.with_super_source();
    int ss = aug.node_index(net.sources().size() > 1 ? "__SS" : net.node(net.sources()[0].node).id);
    int total = 0;
    for (const auto& s : net.sources()) total += s.processes;
    for (const auto& d : net.destinations()) {
        if (d.node == ss) continue;
        if (mincut_combinatorial(aug, ss, d.node, opts) < total) return false;
    }
    return true;
}

std::string solution_to_json(const AdtNetwork& net, const CodeSolution& sol) {
    ordered_json j;
    j["field"] = {{"m", sol.assign.field.degree()}, {"polynomial", sol.assign.field.polynomial()}};
    j["seed"] = sol.seed;
    ordered_json alpha = ordered_json::object();
    for (const auto& [key, v] : sol.assign.alpha)
        alpha[std::to_string(key.first) + "->" + net.port_ref(net.port_at(key.second))] = v;
    j["alpha"] = alpha;
    ordered_json beta = ordered_json::object();
    for (const auto& [key, v] : sol.assign.beta)
        beta[net.port_ref(net.port_at(key.first)) + "->" + net.port_ref(net.port_at(key.second))] = v;
    j["beta"] = beta;
    ordered_json eps = ordered_json::object();
    for (const auto& [key, v] : sol.assign.epsilon)
        eps[net.port_ref(net.port_at(key.second)) + "->" + net.node(key.first.first).id + "[" +
            std::to_string(key.first.second) + "]"] = v;
    j["epsilon"] = eps;
    ordered_json decs = ordered_json::object();
    for (const auto& [node, m] : sol.decoders) {
        ordered_json grid = ordered_json::array();
        for (size_t r = 0; r < m.rows(); ++r) {
            ordered_json row = ordered_json::array();
            for (size_t c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c).value());
            grid.push_back(row);
        }
        decs[net.node(node).id] = grid;
    }
    j["decoders"] = decs;
    ordered_json dem = ordered_json::object();
    for (const auto& [node, idx] : sol.demanded) dem[net.node(node).id] = idx;
    j["demanded"] = dem;
    if (!sol.port_decoders.empty()) {
        ordered_json pd = ordered_json::object();
        for (const auto& [node, entry] : sol.port_decoders) {
            ordered_json e;
            ordered_json ports = ordered_json::array();
            for (const PortId& p : entry.first) ports.push_back(net.port_ref(p));
            e["ports"] = ports;
            ordered_json grid = ordered_json::array();
            for (size_t r = 0; r < entry.second.rows(); ++r) {
                ordered_json row = ordered_json::array();
                for (size_t c = 0; c < entry.second.cols(); ++c)
                    row.push_back(entry.second.at(r, c).value());
                grid.push_back(row);
            }
            e["matrix"] = grid;
            pd[net.node(node).id] = e;
        }
        j["port_decoders"] = pd;
    }
    return j.dump(2) + "\n";
}

CodeSolution solution_from_json(const AdtNetwork& net, const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid solution JSON: ") + e.what());
    }
    try {
        Field f = Field::with_polynomial(j.at("field").at("m").get<unsigned>(),
                                         j.at("field").at("polynomial").get<uint32_t>());
        CodeSolution sol{CodingAssignment(f), {}, {}, j.value("seed", uint64_t(0)), {}};
        auto split_arrow = [](const std::string& s) {
            auto p = s.find("->");
            if (p == std::string::npos) throw ParseError("bad coefficient key: " + s);
            return std::make_pair(s.substr(0, p), s.substr(p + 2));
        };
        for (const auto& [key, v] : j.at("alpha").items()) {
            auto [proc, port] = split_arrow(key);
            sol.assign.set_alpha(std::stoi(proc), net.port_key(net.parse_port_ref(port)),
                                 v.get<uint16_t>());
        }
        for (const auto& [key, v] : j.at("beta").items()) {
            auto [in, out] = split_arrow(key);
            sol.assign.set_beta(net.port_key(net.parse_port_ref(in)),
                                net.port_key(net.parse_port_ref(out)), v.get<uint16_t>());
        }
        for (const auto& [key, v] : j.at("epsilon").items()) {
            auto [in, target] = split_arrow(key);
            auto br = target.find('[');
            if (br == std::string::npos || target.back() != ']')
                throw ParseError("bad epsilon key: " + key);
            int node = net.node_index(target.substr(0, br));
            int proc = std::stoi(target.substr(br + 1, target.size() - br - 2));
            sol.assign.set_epsilon(node, proc, net.port_key(net.parse_port_ref(in)),
                                   v.get<uint16_t>());
        }
        for (const auto& [id, grid] : j.at("decoders").items()) {
            size_t rows = grid.size();
            size_t cols = rows ? grid.at(0).size() : 0;
            Matrix<FieldElement> m(rows, cols, fe(0, f));
            for (size_t r = 0; r < rows; ++r)
                for (size_t c = 0; c < cols; ++c)
                    m.at(r, c) = fe(grid.at(r).at(c).get<uint16_t>(), f);
            sol.decoders.emplace(net.node_index(id), std::move(m));
        }
        for (const auto& [id, idx] : j.at("demanded").items())
            sol.demanded[net.node_index(id)] = idx.get<std::vector<int>>();
        if (j.contains("port_decoders"))
            for (const auto& [id, entry] : j.at("port_decoders").items()) {
                std::vector<PortId> ports;
                for (const auto& p : entry.at("ports"))
                    ports.push_back(net.parse_port_ref(p.get<std::string>()));
                const auto& grid = entry.at("matrix");
                size_t rows = grid.size();
                size_t cols = rows ? grid.at(0).size() : 0;
                Matrix<FieldElement> m(rows, cols, fe(0, f));
                for (size_t r = 0; r < rows; ++r)
                    for (size_t c = 0; c < cols; ++c)
                        m.at(r, c) = fe(grid.at(r).at(c).get<uint16_t>(), f);
                sol.port_decoders.emplace(net.node_index(id), std::make_pair(ports, std::move(m)));
            }
        return sol;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("solution file: ") + e.what());
    }
}

}  // namespace adtnc
