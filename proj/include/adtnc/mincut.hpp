#ifndef ADTNC_MINCUT_HPP
#define ADTNC_MINCUT_HPP

#include <set>
#include <vector>

#include "adtnc/network.hpp"
#include "adtnc/transfer.hpp"

namespace adtnc {

struct MincutOptions {
    // refuse exact enumeration beyond this many cuts (2^(free supernodes))
    uint64_t max_cuts = uint64_t(1) << 22;
};

// rank over GF(2) of the incidence matrix of the cut (omega, complement):
// rows are output ports inside omega, columns input ports outside, 1 where a
// physical edge crosses.
size_t cut_rank(const AdtNetwork& net, const std::vector<bool>& in_omega);

// Exact min-cut: minimum of cut_rank over all partitions with the sources on
// one side and the sinks on the other. Exponential in the number of free
// supernodes; throws ComplexityRefusalError beyond options.max_cuts.
int mincut_combinatorial(const AdtNetwork& net, int source, int dest,
                         const MincutOptions& opts = {});
int mincut_combinatorial_sets(const AdtNetwork& net, const std::set<int>& sources,
                              const std::set<int>& dests, const MincutOptions& opts = {});

struct AlgebraicMincutOptions {
    int trials = 200;
    // keep doubling the trial budget until two consecutive batches agree
    bool strict = false;
    int max_batches = 8;
};

struct AlgebraicMincutResult {
    int value = 0;
    int trials_used = 0;
};

// Max of rank(M) over random coefficient assignments with full free encoding
// and decoding dimensions. A lower bound on the true min-cut that is tight
// with high probability for q much larger than the port count.
AlgebraicMincutResult mincut_algebraic(const AdtNetwork& net, int source, int dest,
                                       const Field& field, uint64_t seed,
                                       const AlgebraicMincutOptions& opts = {});

// V(R): supernodes that could decode rate R, i.e. mincut(S, V) >= R; the
// source itself is a member whenever R does not exceed its output ports.
std::vector<int> compute_VR(const AdtNetwork& net, int source, int rate,
                            const MincutOptions& opts = {});

}  // namespace adtnc

#endif
