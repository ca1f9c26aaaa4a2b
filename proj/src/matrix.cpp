#include "adtnc/matrix.hpp"

namespace adtnc {

size_t binary_rank(std::vector<std::vector<uint64_t>> rows) {
    size_t rank = 0;
    if (rows.empty()) return 0;
    const size_t blocks = rows[0].size();
    for (size_t blk = 0; blk < blocks; ++blk) {
        for (unsigned bit = 0; bit < 64; ++bit) {
            uint64_t mask = uint64_t(1) << bit;
            size_t pivot = rank;
            while (pivot < rows.size() && !(rows[pivot][blk] & mask)) ++pivot;
            if (pivot == rows.size()) continue;
            std::swap(rows[rank], rows[pivot]);
            for (size_t r = 0; r < rows.size(); ++r) {
                if (r != rank && (rows[r][blk] & mask))
                    for (size_t b = 0; b < blocks; ++b) rows[r][b] ^= rows[rank][b];
            }
            if (++rank == rows.size()) return rank;
        }
    }
    return rank;
}

}  // namespace adtnc
