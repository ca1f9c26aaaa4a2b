#include "adtnc/mincut.hpp"

#include <algorithm>

#include "adtnc/matrix.hpp"

namespace adtnc {

size_t cut_rank(const AdtNetwork& net, const std::vector<bool>& in_omega) {
    // columns: input ports outside omega that receive at least one crossing edge
    std::vector<int> col_of(net.num_ports(), -1);
    int ncols = 0;
    for (const Edge& e : net.edges()) {
        if (in_omega[e.from.node] && !in_omega[e.to.node]) {
            int key = net.port_key(e.to);
            if (col_of[key] < 0) col_of[key] = ncols++;
        }
    }
    if (ncols == 0) return 0;
    const size_t blocks = (ncols + 63) / 64;
    // one row per output port in omega with a crossing edge
    std::vector<std::vector<uint64_t>> rows;
    std::vector<int> row_of(net.num_ports(), -1);
    for (const Edge& e : net.edges()) {
        if (!in_omega[e.from.node] || in_omega[e.to.node]) continue;
        int fkey = net.port_key(e.from);
        if (row_of[fkey] < 0) {
            row_of[fkey] = static_cast<int>(rows.size());
            rows.emplace_back(blocks, 0);
        }
        int col = col_of[net.port_key(e.to)];
        rows[row_of[fkey]][col / 64] |= uint64_t(1) << (col % 64);
    }
    return binary_rank(std::move(rows));
}

int mincut_combinatorial_sets(const AdtNetwork& net, const std::set<int>& sources,
                              const std::set<int>& dests, const MincutOptions& opts) {
    const int n = static_cast<int>(net.nodes().size());
    for (int s : sources)
        if (dests.count(s)) throw UsageError("source and destination sets overlap");
    std::vector<int> free_nodes;
    for (int v = 0; v < n; ++v)
        if (!sources.count(v) && !dests.count(v)) free_nodes.push_back(v);
    if (free_nodes.size() >= 63 || (uint64_t(1) << free_nodes.size()) > opts.max_cuts)
        throw ComplexityRefusalError(
            "cut enumeration over 2^" + std::to_string(free_nodes.size()) +
            " cuts exceeds the configured budget; use the algebraic method");

    std::vector<bool> in_omega(n, false);
    for (int s : sources) in_omega[s] = true;
    size_t best = SIZE_MAX;
    const uint64_t total = uint64_t(1) << free_nodes.size();
    for (uint64_t mask = 0; mask < total; ++mask) {
        for (size_t i = 0; i < free_nodes.size(); ++i)
            in_omega[free_nodes[i]] = (mask >> i) & 1;
        best = std::min(best, cut_rank(net, in_omega));
        if (best == 0) break;
    }
    return static_cast<int>(best);
}

int mincut_combinatorial(const AdtNetwork& net, int source, int dest, const MincutOptions& opts) {
    if (source == dest) throw UsageError("min-cut requires distinct supernodes");
    return mincut_combinatorial_sets(net, {source}, {dest}, opts);
}

AlgebraicMincutResult mincut_algebraic(const AdtNetwork& net, int source, int dest,
                                       const Field& field, uint64_t seed,
                                       const AlgebraicMincutOptions& opts) {
    if (source == dest) throw UsageError("min-cut requires distinct supernodes");
    // full free dimensions: mu(S) = |O(S)|, nu(T) = |I(T)|
    AdtNetwork probe(net.nodes(), net.edges(), {{source, net.node(source).num_outputs}},
                     {{dest, net.node(dest).num_inputs}});
    AlgebraicMincutResult res;
    const int cap = std::min(net.node(source).num_outputs, net.node(dest).num_inputs);
    int batch_value = -1;
    for (int batch = 0; batch < (opts.strict ? opts.max_batches : 1); ++batch) {
        int value = 0;
        for (int t = 0; t < opts.trials; ++t) {
            Rng trial_rng(mix_seed(seed, static_cast<uint64_t>(batch) * opts.trials + t));
            CodingAssignment a = random_assignment(probe, field, trial_rng);
            SystemMatrix sm = system_matrix(probe, a);
            value = std::max(value, static_cast<int>(mat_rank(sm.m)));
            ++res.trials_used;
            if (value == cap) break;  // cannot do better than min(|O(S)|, |I(T)|)
        }
        res.value = std::max(res.value, value);
        if (!opts.strict) break;
        if (batch_value == res.value) break;  // two consecutive batches agree
        batch_value = res.value;
    }
    return res;
}

std::vector<int> compute_VR(const AdtNetwork& net, int source, int rate,
                            const MincutOptions& opts) {
    std::vector<int> members;
    for (int v = 0; v < static_cast<int>(net.nodes().size()); ++v) {
        if (v == source) {
            if (rate <= net.node(source).num_outputs) members.push_back(v);
            continue;
        }
        if (rate == 0 || mincut_combinatorial(net, source, v, opts) >= rate) members.push_back(v);
    }
    return members;
}

}  // namespace adtnc
