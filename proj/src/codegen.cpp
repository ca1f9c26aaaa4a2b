#include "adtnc/codegen.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace adtnc {

std::pair<AdtNetwork, int> build_virtual_sink(const AdtNetwork& net, const std::vector<PortId>& w) {
    std::map<int, std::vector<int>> in_members, out_members;  // node -> port indices
    for (const PortId& p : w) {
        if (p.side == Side::In)
            in_members[p.node].push_back(p.index);
        else
            out_members[p.node].push_back(p.index);
        if (in_members.count(p.node) && out_members.count(p.node))
            throw UsageError("virtual sink set mixes input and output ports of one supernode");
    }

    std::vector<Supernode> nodes(net.nodes().begin(), net.nodes().end());
    Supernode sink;
    sink.id = "__TW";
    sink.num_inputs = 0;
    sink.num_outputs = 0;
    int sink_idx = static_cast<int>(nodes.size());

    std::vector<Edge> edges;
    for (const Edge& e : net.edges()) {
        // input-port members disconnect their supernode's other input ports
        auto it = in_members.find(e.to.node);
        if (it != in_members.end() &&
            std::find(it->second.begin(), it->second.end(), e.to.index) == it->second.end())
            continue;
        edges.push_back(e);
    }
    // wire members top to bottom, one sink input each
    for (int node = 0; node < static_cast<int>(net.nodes().size()); ++node) {
        auto oit = out_members.find(node);
        if (oit != out_members.end()) {
            std::sort(oit->second.begin(), oit->second.end());
            for (int idx : oit->second) {
                edges.push_back({{node, Side::Out, idx}, {sink_idx, Side::In, sink.num_inputs}});
                ++sink.num_inputs;
            }
        }
        auto iit = in_members.find(node);
        if (iit != in_members.end()) {
            int p = static_cast<int>(iit->second.size());
            if (p > net.node(node).num_outputs)
                throw UsageError("virtual sink set holds more input ports than the supernode has outputs");
            for (int j = 0; j < p; ++j) {
                edges.push_back({{node, Side::Out, j}, {sink_idx, Side::In, sink.num_inputs}});
                ++sink.num_inputs;
            }
        }
    }
    // strip the layer tags; the augmented edges are not layer-consecutive
    for (auto& nd : nodes) nd.layer.reset();
    nodes.push_back(sink);
    return {AdtNetwork(std::move(nodes), std::move(edges), net.sources(), {{sink_idx, 0}}, {}),
            sink_idx};
}

bool is_regular(const AdtNetwork& net, int source, const std::vector<PortId>& w, int rate,
                const MincutOptions& opts) {
    if (static_cast<int>(w.size()) != rate) return false;
    auto [aug, sink] = build_virtual_sink(net, w);
    return mincut_combinatorial(aug, source, sink, opts) == rate;
}

bool incidence_full_rank(const AdtNetwork& net, const std::vector<PortId>& w_out,
                         const std::vector<PortId>& w_in) {
    if (w_out.size() != w_in.size()) throw UsageError("incidence check needs equal-size sets");
    const size_t r = w_out.size();
    std::vector<std::vector<uint64_t>> rows(r, std::vector<uint64_t>(1, 0));
    for (size_t i = 0; i < r; ++i)
        for (int e : net.in_edges(w_in[i])) {
            const Edge& ed = net.edges()[e];
            for (size_t j = 0; j < r; ++j)
                if (ed.from == w_out[j]) rows[i][0] |= uint64_t(1) << j;
        }
    return binary_rank(std::move(rows)) == r;
}

std::map<uint32_t, uint16_t> find_nonzero_assignment(const SymPoly& p, const Field& field) {
    if (p.is_zero()) throw UsageError("polynomial is identically zero");
    unsigned d = p.max_degree_any_variable();
    if (field.order() <= d)
        throw UsageError("field order " + std::to_string(field.order()) +
                         " must exceed the maximal per-variable degree " + std::to_string(d));
    std::map<uint32_t, uint16_t> assignment;
    SymPoly cur = p;
    for (uint32_t var : p.variables()) {
        bool placed = false;
        for (uint32_t v = 0; v < field.order() && !placed; ++v) {
            SymPoly next = cur.substituted(var, static_cast<uint16_t>(v));
            if (!next.is_zero()) {
                assignment[var] = static_cast<uint16_t>(v);
                cur = std::move(next);
                placed = true;
            }
        }
        if (!placed) throw Error("internal: no substitution kept the polynomial nonzero");
    }
    return assignment;
}

uint64_t count_nonsingular_matrices(uint64_t q, int p) {
    if (p < 1) throw UsageError("matrix dimension must be positive");
    unsigned __int128 qp = 1;
    for (int i = 0; i < p; ++i) {
        qp *= q;
        if (qp > (unsigned __int128)UINT64_MAX) throw UsageError("q^p overflows 64 bits");
    }
    unsigned __int128 total = 1;
    unsigned __int128 qi = 1;
    for (int i = 0; i < p; ++i) {
        total *= qp - qi;
        qi *= q;
        if (total > (unsigned __int128)UINT64_MAX) throw UsageError("count overflows 64 bits");
    }
    return static_cast<uint64_t>(total);
}

namespace {

uint64_t binomial_capped(uint64_t n, uint64_t k, uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > cap) return cap + 1;
    }
    return static_cast<uint64_t>(r);
}

}  // namespace

CodegenState::CodegenState(const AdtNetwork& net, int rate, Field field, uint64_t seed,
                           CodegenOptions opts)
    : net_(net), rate_(rate), field_(std::move(field)), seed_(seed), opts_(opts) {
    LayeringInfo info = net.layering();
    if (!net.is_layered() || !info.uniform)
        throw UsageError("code construction requires a layered network with uniform port counts");
    n_ = info.uniform_ports;
    if (rate_ < 1 || rate_ > n_)
        throw UsageError("rate must satisfy 1 <= R <= n = " + std::to_string(n_));
    if (net.sources().size() != 1) throw UsageError("code construction expects a single source");
    src_ = net.sources()[0].node;
    int min_layer = *net.node(0).layer;
    for (const auto& nd : net.nodes()) min_layer = std::min(min_layer, *nd.layer);
    if (*net.node(src_).layer != min_layer)
        throw UsageError("the source must sit in the first layer");

    uint64_t nn = static_cast<uint64_t>(n_) * info.max_per_layer;
    uint64_t subsets = binomial_capped(nn, rate_, opts_.subset_cap);
    if (subsets > opts_.subset_cap)
        throw ComplexityRefusalError("candidate subset count C(" + std::to_string(nn) + "," +
                                     std::to_string(rate_) + ") exceeds the cap of " +
                                     std::to_string(opts_.subset_cap));
    uint64_t bound_out = static_cast<uint64_t>(n_) * subsets;
    uint64_t bound_in = 2 * subsets;
    if (opts_.enforce_field_bounds) {
        if (field_.order() <= bound_out)
            throw UsageError("field order " + std::to_string(field_.order()) +
                             " violates the output-coding bound q > n*C(n*N_layer,R) = " +
                             std::to_string(bound_out));
        if (field_.order() <= bound_in)
            throw UsageError("field order " + std::to_string(field_.order()) +
                             " violates the input-coding bound q > 2*C(n*N_layer,R) = " +
                             std::to_string(bound_in));
    }
    for (const auto& d : net.destinations()) {
        if (d.node == src_) continue;
        int mc = mincut_combinatorial(net, src_, d.node);
        if (mc < rate_)
            throw UsageError("destination " + net.node(d.node).id + " has mincut " +
                             std::to_string(mc) + " < R = " + std::to_string(rate_));
    }

    port_vec_.assign(net.num_ports(), std::vector<uint16_t>(rate_, 0));
    determined_.assign(net.num_ports(), false);
    node_output_coded_.assign(net.nodes().size(), false);
    k_.assign(net.num_ports(), 1);
    beta_.assign(net.nodes().size(), std::vector<uint16_t>(n_ * n_, 0));
    vr_ = compute_VR(net_, src_, rate_);
    seed_source();
}

void CodegenState::seed_source() {
    // upper R input ports of the source carry the standard basis, the rest
    // stay zero
    std::vector<PortId> basis_set;
    for (int i = 0; i < n_; ++i) {
        PortId p{src_, Side::In, i};
        if (i < rate_) {
            port_vec_[net_.port_key(p)][i] = 1;
            basis_set.push_back(p);
        }
        determined_[net_.port_key(p)] = true;
    }
    list_ = {basis_set};
}

bool CodegenState::set_independent(const std::vector<PortId>& set) const {
    const int r = static_cast<int>(set.size());
    std::vector<std::vector<uint16_t>> rows;
    rows.reserve(r);
    for (const PortId& p : set) rows.push_back(port_vec_[net_.port_key(p)]);
    // Gaussian elimination over the field
    int rank = 0;
    for (int col = 0; col < rate_ && rank < r; ++col) {
        int pivot = rank;
        while (pivot < r && rows[pivot][col] == 0) ++pivot;
        if (pivot == r) continue;
        std::swap(rows[rank], rows[pivot]);
        uint16_t inv = field_.inv(rows[rank][col]);
        for (int i = rank + 1; i < r; ++i) {
            if (rows[i][col] == 0) continue;
            uint16_t f = field_.mul(rows[i][col], inv);
            for (int c = col; c < rate_; ++c)
                rows[i][c] = field_.add(rows[i][c], field_.mul(f, rows[rank][c]));
        }
        ++rank;
    }
    return rank == r;
}

bool CodegenState::vectors_independent(const std::vector<std::vector<PortId>>& sets) const {
    for (const auto& s : sets)
        if (!set_independent(s)) return false;
    return true;
}

void CodegenState::assert_invariant() const {
    for (const auto& s : list_)
        if (!set_independent(s))
            throw Error("internal: code invariant violated (a tracked set lost independence)");
}

int CodegenState::boundary_size() const {
    std::set<int> q;
    for (int key = 0; key < net_.num_ports(); ++key) {
        if (!determined_[key]) continue;
        PortId p = net_.port_at(key);
        if (p.side == Side::In) {
            if (!node_output_coded_[p.node]) q.insert(key);
        } else {
            for (int e : net_.out_edges(p))
                if (!determined_[net_.port_key(net_.edges()[e].to)]) {
                    q.insert(key);
                    break;
                }
        }
    }
    return static_cast<int>(q.size());
}

bool CodegenState::regular_memo(const std::vector<PortId>& w) {
    auto it = regular_cache_.find(w);
    if (it != regular_cache_.end()) return it->second;
    bool r = is_regular(net_, src_, w, rate_);
    regular_cache_.emplace(w, r);
    return r;
}

void CodegenState::code_output_ports(int node) {
    if (node_output_coded_[node]) throw UsageError("supernode already output-coded");
    const Supernode& nd = net_.node(node);

    // split the list into untouched sets and sets whose input ports of this
    // node get replaced by every choice of p output ports
    std::vector<std::vector<PortId>> untouched;
    struct Replacement {
        std::vector<PortId> rest;  // W minus I(node)
        int p;
    };
    std::vector<Replacement> pending;
    for (const auto& w : list_) {
        Replacement rep;
        for (const PortId& port : w)
            if (!(port.node == node && port.side == Side::In)) rep.rest.push_back(port);
        rep.p = static_cast<int>(w.size() - rep.rest.size());
        if (rep.p == 0)
            untouched.push_back(w);
        else
            pending.push_back(std::move(rep));
    }

    std::vector<std::vector<PortId>> new_list = untouched;
    if (!pending.empty()) {
        std::set<std::vector<PortId>> dedup(untouched.begin(), untouched.end());
        for (const auto& rep : pending) {
            // all (n choose p) replacements enter the tracked list
            std::vector<int> choice(rep.p);
            std::function<void(int, int)> rec = [&](int start, int depth) {
                if (depth == rep.p) {
                    std::vector<PortId> w = rep.rest;
                    for (int idx : choice) w.push_back({node, Side::Out, idx});
                    std::sort(w.begin(), w.end());
                    if (dedup.insert(w).second) new_list.push_back(std::move(w));
                    return;
                }
                for (int idx = start; idx <= n_ - (rep.p - depth); ++idx) {
                    choice[depth] = idx;
                    rec(idx + 1, depth + 1);
                }
            };
            rec(0, 0);
        }
    }

    // input vectors of this node (already determined; zero for layer-1 nodes)
    std::vector<const std::vector<uint16_t>*> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = &port_vec_[net_.port_key({node, Side::In, i})];

    int draws = 0;
    bool ok = false;
    for (int attempt = 0; attempt < opts_.retries && !ok; ++attempt) {
        ++draws;
        std::vector<uint16_t>& beta = beta_[node];
        if (pending.empty() && attempt == 0) {
            // nothing tracked runs through this supernode: identity mixing
            std::fill(beta.begin(), beta.end(), 0);
            for (int i = 0; i < n_; ++i) beta[i * n_ + i] = 1;
        } else {
            Rng rng(mix_seed(seed_, (static_cast<uint64_t>(step_) << 20) + attempt));
            for (auto& b : beta) b = field_.random(rng);
        }
        for (int j = 0; j < n_; ++j) {
            std::vector<uint16_t> y(rate_, 0);
            for (int i = 0; i < n_; ++i) {
                uint16_t b = beta[i * n_ + j];
                if (!b) continue;
                for (int c = 0; c < rate_; ++c)
                    y[c] = field_.add(y[c], field_.mul(b, (*x[i])[c]));
            }
            port_vec_[net_.port_key({node, Side::Out, j})] = std::move(y);
        }
        ok = vectors_independent(new_list);
    }
    if (!ok)
        throw RandomizationExhaustedError(
            "output coding at " + nd.id + " found no good mixing in " +
            std::to_string(opts_.retries) + " draws; the sufficient bound is q > n*C(n*N_layer,R)");

    for (int j = 0; j < n_; ++j) determined_[net_.port_key({node, Side::Out, j})] = true;
    node_output_coded_[node] = true;
    list_ = std::move(new_list);
    assert_invariant();

    output_steps_ += 1;
    output_draws_ += draws;
    CodegenStep st;
    st.step = step_++;
    st.layer = *nd.layer;
    st.kind = "output";
    st.node = nd.id;
    st.boundary_size = boundary_size();
    st.list_size = static_cast<int>(list_.size());
    st.redraws = draws - 1;
    trace_.push_back(st);
}

std::vector<std::vector<PortId>> CodegenState::candidate_input_sets(int layer) const {
    std::vector<PortId> inputs;
    for (int node = 0; node < static_cast<int>(net_.nodes().size()); ++node)
        if (*net_.node(node).layer == layer)
            for (int i = 0; i < n_; ++i) inputs.push_back({node, Side::In, i});
    std::vector<std::vector<PortId>> sets;
    std::vector<int> choice(rate_);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == rate_) {
            std::vector<PortId> w;
            for (int idx : choice) w.push_back(inputs[idx]);
            sets.push_back(std::move(w));
            return;
        }
        for (int idx = start; idx <= static_cast<int>(inputs.size()) - (rate_ - depth); ++idx) {
            choice[depth] = idx;
            rec(idx + 1, depth + 1);
        }
    };
    if (static_cast<int>(inputs.size()) >= rate_) rec(0, 0);
    return sets;
}

void CodegenState::code_input_ports(int layer) {
    // boundary is now the previous layer's live output ports; drop stale sets
    list_.erase(std::remove_if(list_.begin(), list_.end(),
                               [&](const std::vector<PortId>& w) {
                                   for (const PortId& p : w) {
                                       if (p.side != Side::Out) return true;
                                       if (*net_.node(p.node).layer != layer - 1) return true;
                                       if (net_.out_edges(p).empty()) return true;
                                   }
                                   return false;
                               }),
                list_.end());

    // candidate regular sets of this layer's input ports, each needing a
    // tracked partner with full-rank incidence
    std::vector<std::vector<PortId>> retained;
    std::vector<const std::vector<PortId>*> partner;
    for (auto& w_new : candidate_input_sets(layer)) {
        std::sort(w_new.begin(), w_new.end());
        if (!const_cast<CodegenState*>(this)->regular_memo(w_new)) continue;
        const std::vector<PortId>* found = nullptr;
        for (const auto& w : list_)
            if (incidence_full_rank(net_, w, w_new)) {
                found = &w;
                break;
            }
        if (!found) continue;  // dropped, not replaced
        retained.push_back(w_new);
        partner.push_back(found);
    }

    // the virtual coefficients: one per live output port of the previous layer
    std::vector<int> var_ports;
    for (int node = 0; node < static_cast<int>(net_.nodes().size()); ++node)
        if (*net_.node(node).layer == layer - 1)
            for (int j = 0; j < n_; ++j) {
                PortId p{node, Side::Out, j};
                if (!net_.out_edges(p).empty()) var_ports.push_back(net_.port_key(p));
            }

    std::vector<PortId> layer_inputs;
    for (int node = 0; node < static_cast<int>(net_.nodes().size()); ++node)
        if (*net_.node(node).layer == layer)
            for (int i = 0; i < n_; ++i) layer_inputs.push_back({node, Side::In, i});

    auto apply_k = [&]() {
        for (const PortId& p : layer_inputs) {
            std::vector<uint16_t> v(rate_, 0);
            for (int e : net_.in_edges(p)) {
                int from_key = net_.port_key(net_.edges()[e].from);
                uint16_t kj = k_[from_key];
                if (!kj) continue;
                const auto& y = port_vec_[from_key];
                for (int c = 0; c < rate_; ++c)
                    v[c] = field_.add(v[c], field_.mul(kj, y[c]));
            }
            port_vec_[net_.port_key(p)] = std::move(v);
        }
    };

    int draws = 0;
    if (opts_.deterministic_input && retained.size() <= opts_.deterministic_cap) {
        // product of the candidate determinants, then a variable-by-variable
        // nonzero assignment
        auto ctx = std::make_shared<SymContext>();
        std::map<int, uint32_t> var_of;
        for (int key : var_ports)
            var_of[key] = ctx->var("k(" + net_.port_label(net_.port_at(key)) + ")");
        SymPoly product = SymPoly::constant(field_, ctx, 1);
        for (const auto& w_new : retained) {
            // symbolic vectors of the candidate's ports
            std::vector<std::vector<SymPoly>> rows;
            for (const PortId& p : w_new) {
                std::vector<SymPoly> row(rate_, SymPoly::zero(field_, ctx));
                for (int e : net_.in_edges(p)) {
                    int from_key = net_.port_key(net_.edges()[e].from);
                    if (!var_of.count(from_key)) continue;
                    SymPoly kvar(field_, ctx);
                    kvar = SymPoly::variable(field_, ctx, ctx->name(var_of[from_key]));
                    const auto& y = port_vec_[from_key];
                    for (int c = 0; c < rate_; ++c)
                        if (y[c]) row[c] = row[c] + kvar.scaled(y[c]);
                }
                rows.push_back(std::move(row));
            }
            // determinant by cofactor expansion (R is small at desk scale)
            std::function<SymPoly(std::vector<int>, std::vector<int>)> det =
                [&](std::vector<int> ri, std::vector<int> ci) -> SymPoly {
                if (ri.size() == 1) return rows[ri[0]][ci[0]];
                SymPoly acc = SymPoly::zero(field_, ctx);
                std::vector<int> sub_r(ri.begin() + 1, ri.end());
                for (size_t c = 0; c < ci.size(); ++c) {
                    if (rows[ri[0]][ci[c]].is_zero()) continue;
                    std::vector<int> sub_c;
                    for (size_t cc = 0; cc < ci.size(); ++cc)
                        if (cc != c) sub_c.push_back(ci[cc]);
                    acc = acc + rows[ri[0]][ci[c]] * det(sub_r, sub_c);  // char 2: no signs
                }
                return acc;
            };
            std::vector<int> all(rate_);
            for (int i = 0; i < rate_; ++i) all[i] = i;
            product = product * det(all, all);
        }
        if (!retained.empty()) {
            auto assignment = find_nonzero_assignment(product, field_);
            for (int key : var_ports) {
                auto it = assignment.find(var_of[key]);
                k_[key] = it == assignment.end() ? 1 : it->second;
                if (k_[key] == 0 && it == assignment.end()) k_[key] = 1;
            }
        } else {
            for (int key : var_ports) k_[key] = 1;
        }
        draws = 1;
        apply_k();
        for (const auto& w : retained)
            if (!set_independent(w))
                throw Error("internal: polynomial assignment left a candidate set dependent");
    } else {
        bool ok = false;
        for (int attempt = 0; attempt < opts_.retries && !ok; ++attempt) {
            ++draws;
            Rng rng(mix_seed(seed_, (static_cast<uint64_t>(step_) << 20) + 0x10000 + attempt));
            for (int key : var_ports) k_[key] = field_.random(rng);
            apply_k();
            ok = vectors_independent(retained);
        }
        if (!ok)
            throw RandomizationExhaustedError(
                "input coding at layer " + std::to_string(layer) + " found no good coefficients in " +
                std::to_string(opts_.retries) +
                " draws; the sufficient bound is q > 2*C(n*N_layer,R)");
    }

    for (const PortId& p : layer_inputs) determined_[net_.port_key(p)] = true;
    pair_of_.clear();
    for (size_t i = 0; i < retained.size(); ++i) pair_of_[retained[i]] = *partner[i];
    list_ = std::move(retained);
    assert_invariant();

    CodegenStep st;
    st.step = step_++;
    st.layer = layer;
    st.kind = "input";
    st.boundary_size = boundary_size();
    st.list_size = static_cast<int>(list_.size());
    st.redraws = draws - 1;
    trace_.push_back(st);
}

void CodegenState::run() {
    std::vector<int> layers;
    for (const auto& nd : net_.nodes()) layers.push_back(*nd.layer);
    std::sort(layers.begin(), layers.end());
    layers.erase(std::unique(layers.begin(), layers.end()), layers.end());

    auto nodes_of_layer = [&](int layer) {
        std::vector<int> nodes;
        for (int v = 0; v < static_cast<int>(net_.nodes().size()); ++v)
            if (*net_.node(v).layer == layer) nodes.push_back(v);
        std::sort(nodes.begin(), nodes.end(),
                  [&](int a, int b) { return net_.node(a).id < net_.node(b).id; });
        return nodes;
    };

    for (size_t li = 0; li < layers.size(); ++li) {
        if (li > 0) code_input_ports(layers[li]);
        for (int node : nodes_of_layer(layers[li])) code_output_ports(node);
    }
}

CodegenResult CodegenState::finish() {
    CodegenResult res{CodeSolution{CodingAssignment(field_), {}, {}, seed_, {}}, vr_, trace_,
                      output_steps_ ? static_cast<double>(output_draws_) / output_steps_ : 0.0};
    CodingAssignment& assign = res.solution.assign;

    // fold the virtual coefficient of each output port into its beta column;
    // at the source the folded column doubles as the alpha encoding operating
    // on the basis vectors of the upper input ports
    for (int node = 0; node < static_cast<int>(net_.nodes().size()); ++node) {
        if (!node_output_coded_[node]) continue;
        for (int j = 0; j < n_; ++j) {
            int out_key = net_.port_key({node, Side::Out, j});
            uint16_t kj = k_[out_key];
            for (int i = 0; i < n_; ++i) {
                uint16_t folded = field_.mul(kj, beta_[node][i * n_ + j]);
                if (!folded) continue;
                if (node == src_) {
                    if (i < rate_) assign.set_alpha(i, out_key, folded);
                } else {
                    assign.set_beta(net_.port_key({node, Side::In, i}), out_key, folded);
                }
            }
        }
    }

    // Every member of V(R) decodes from R of its input ports: the input step
    // of its layer retained a regular subset with independent vectors, so the
    // input-vector matrix has full rank. The source holds the data by
    // definition and gets no decoder artifact.
    for (int node : vr_) {
        if (node == src_) continue;
        // select R independent input rows by elimination
        std::vector<std::vector<uint16_t>> rows;
        std::vector<int> row_port(n_);
        for (int i = 0; i < n_; ++i) {
            rows.push_back(port_vec_[net_.port_key({node, Side::In, i})]);
            row_port[i] = i;
        }
        std::vector<int> chosen;
        {
            std::vector<std::vector<uint16_t>> work = rows;
            std::vector<int> label = row_port;
            int rank = 0;
            for (int col = 0; col < rate_ && rank < n_; ++col) {
                int pivot = rank;
                while (pivot < n_ && work[pivot][col] == 0) ++pivot;
                if (pivot == n_) continue;
                std::swap(work[rank], work[pivot]);
                std::swap(label[rank], label[pivot]);
                uint16_t inv = field_.inv(work[rank][col]);
                for (int i = rank + 1; i < n_; ++i) {
                    if (work[i][col] == 0) continue;
                    uint16_t fct = field_.mul(work[i][col], inv);
                    for (int c = col; c < rate_; ++c)
                        work[i][c] = field_.add(work[i][c], field_.mul(fct, work[rank][c]));
                }
                chosen.push_back(label[rank]);
                ++rank;
            }
        }
        if (static_cast<int>(chosen.size()) < rate_)
            throw Error("internal: supernode " + net_.node(node).id +
                        " is in V(R) but lacks R independent input vectors");
        std::sort(chosen.begin(), chosen.end());
        Matrix<FieldElement> m(rate_, rate_, fe(0, field_));
        std::vector<PortId> ports;
        for (int r = 0; r < rate_; ++r) {
            ports.push_back({node, Side::In, chosen[r]});
            for (int c = 0; c < rate_; ++c) m.at(r, c) = fe(rows[chosen[r]][c], field_);
        }
        Matrix<FieldElement> inv = mat_inverse(m);
        res.solution.port_decoders.emplace(node, std::make_pair(ports, inv));

        // declared destinations additionally decode through epsilon, so the
        // emitted processes equal the source symbols
        if (net_.destination_process_count(node) == rate_) {
            for (int kproc = 0; kproc < rate_; ++kproc)
                for (int r = 0; r < rate_; ++r)
                    if (!inv.at(r, kproc).is_zero())
                        assign.set_epsilon(node, kproc, net_.port_key(ports[r]),
                                           inv.at(r, kproc).value());
            res.solution.decoders.emplace(
                node, Matrix<FieldElement>::identity(rate_, fe(0, field_), fe(1, field_)));
            std::vector<int> dem(rate_);
            for (int i = 0; i < rate_; ++i) dem[i] = i;
            res.solution.demanded[node] = dem;
        }
    }

    if (!verify_solution(net_, res.solution))
        throw Error("internal: constructed code failed simulation verification");
    return res;
}

CodegenResult construct_multicast_code(const AdtNetwork& net, int rate, const Field& field,
                                       uint64_t seed, const CodegenOptions& opts) {
    CodegenState state(net, rate, field, seed, opts);
    state.run();
    return state.finish();
}

}  // namespace adtnc
