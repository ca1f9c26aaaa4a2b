#ifndef ADTNC_DELAY_HPP
#define ADTNC_DELAY_HPP

#include "adtnc/dpoly.hpp"
#include "adtnc/matrix.hpp"
#include "adtnc/network.hpp"
#include "adtnc/rng.hpp"
#include "adtnc/transfer.hpp"

namespace adtnc {

/*
 * Coefficients for networks with unit link delay: internal mixing stays
 * field-valued (it sits inside F), while source encoding and destination
 * decoding may be rational functions of D.
 */
struct DelayAssignment {
    Field field;
    std::map<std::pair<int, int>, DRational> alpha;    // (process, out-port key)
    std::map<std::pair<int, int>, uint16_t> beta;      // (in key, out key)
    std::map<std::pair<std::pair<int, int>, int>, DRational> epsilon;

    explicit DelayAssignment(Field f) : field(std::move(f)) {}
};

DelayAssignment delay_assignment_from(const CodingAssignment& a);

// Port order used for delay matrices: topological when acyclic, declaration
// order otherwise (cyclic networks have no topological order).
std::vector<int> delay_port_order(const AdtNetwork& net);

Matrix<FieldElement> build_F_delay(const AdtNetwork& net, const DelayAssignment& assign);

// (I - D F)^{-1} over the rational function field, by Gauss-Jordan. Always
// invertible: det(I - DF) has constant coefficient 1.
Matrix<DRational> delay_inverse(const AdtNetwork& net, const DelayAssignment& assign);

struct DelaySystemMatrix {
    Matrix<DRational> m;
    std::vector<std::pair<int, int>> row_labels;
    std::vector<std::pair<int, int>> col_labels;
};

// M(D) = A(D) (I - DF)^{-1} B(D)^T
DelaySystemMatrix delay_system_matrix(const AdtNetwork& net, const DelayAssignment& assign);

// Truncated impulse response: sum_{k<=L} D^k F^k composed with A(D), B(D),
// every entry cut at degree L. Cycles are fine; truncation absorbs them.
Matrix<DPoly> truncated_delay_inverse(const AdtNetwork& net, const DelayAssignment& assign,
                                      unsigned truncate_degree);
Matrix<DPoly> truncated_delay_response(const AdtNetwork& net, const DelayAssignment& assign,
                                       unsigned truncate_degree);

// The ff-level series helper: input must have the I - D*F shape (unit
// constant diagonal, degree <= 1 entries); returns sum_{k<=L} D^k F^k.
Matrix<DPoly> dpoly_series_inverse(const Matrix<DPoly>& p, unsigned truncate_degree);

// Symbolic (I - DF)^{-1} with named beta variables; exact for acyclic
// networks (the series terminates).
Matrix<SymPoly> delay_inverse_symbolic(const AdtNetwork& net, const Field& field,
                                       const SymContextPtr& ctx);

// det(I - DF) for invertibility reporting
DPoly delay_determinant(const AdtNetwork& net, const DelayAssignment& assign);

// Multicast feasibility over F_q(D): every destination's square submatrix of
// M(D) gets a nonzero rational-function determinant under some sampled
// assignment.
bool delay_feasible_multicast(const AdtNetwork& net, const std::vector<Connection>& conns,
                              const Field& field, int trials = 16, uint64_t seed = 1);

}  // namespace adtnc

#endif
