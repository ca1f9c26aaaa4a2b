#ifndef ADTNC_TRANSFER_HPP
#define ADTNC_TRANSFER_HPP

#include <map>
#include <string>
#include <vector>

#include "adtnc/field.hpp"
#include "adtnc/matrix.hpp"
#include "adtnc/network.hpp"
#include "adtnc/rng.hpp"
#include "adtnc/symbolic.hpp"

namespace adtnc {

// Coding coefficients: alpha maps source processes onto source output ports,
// beta mixes a supernode's inputs into its outputs, epsilon decodes a
// destination's inputs into its output processes. Unset positions are zero.
struct CodingAssignment {
    Field field;
    std::map<std::pair<int, int>, uint16_t> alpha;          // (process i, out-port key) -> coeff
    std::map<std::pair<int, int>, uint16_t> beta;           // (in-port key, out-port key) -> coeff
    std::map<std::pair<std::pair<int, int>, int>, uint16_t> epsilon;
    // ((dest node, process k), in-port key) -> coeff

    explicit CodingAssignment(Field f) : field(std::move(f)) {}

    uint16_t alpha_at(int process, int port_key) const;
    uint16_t beta_at(int in_key, int out_key) const;
    uint16_t epsilon_at(int dest_node, int process, int in_key) const;

    void set_alpha(int process, int port_key, uint16_t v);
    void set_beta(int in_key, int out_key, uint16_t v);
    void set_epsilon(int dest_node, int process, int in_key, uint16_t v);
};

// Structurally meaningful coefficient positions of a network: every
// (input, output) pair inside each supernode, alpha on source output ports,
// epsilon on destination input ports.
struct CoefficientSlots {
    std::vector<std::pair<int, int>> alpha;                    // (process, out-port key)
    std::vector<std::pair<int, int>> beta;                     // (in key, out key)
    std::vector<std::pair<std::pair<int, int>, int>> epsilon;  // ((node, proc), in key)
};

CoefficientSlots coefficient_slots(const AdtNetwork& net, int mu_override = -1,
                                   int nu_override = -1);

// uniform i.i.d. draw over all slots
CodingAssignment random_assignment(const AdtNetwork& net, const Field& field, Rng& rng,
                                   int mu_override = -1, int nu_override = -1);

// Row/column labels tie the system matrix to processes.
struct SystemMatrix {
    Matrix<FieldElement> m;
    std::vector<std::pair<int, int>> row_labels;  // (source node, process)
    std::vector<std::pair<int, int>> col_labels;  // (destination node, process)

    // column range belonging to one destination
    std::vector<size_t> destination_columns(int dest_node) const;
};

// |ports| x |ports| adjacency/coding matrix in topological port order:
// 1 on physical edges, beta inside supernodes, 0 elsewhere. Strictly upper
// triangular for acyclic networks.
Matrix<FieldElement> build_F(const AdtNetwork& net, const CodingAssignment& assign);
Matrix<FieldElement> build_A(const AdtNetwork& net, const CodingAssignment& assign);
Matrix<FieldElement> build_B(const AdtNetwork& net, const CodingAssignment& assign);

// (I - F)^{-1} by back-substitution on the unit-diagonal triangular system.
Matrix<FieldElement> unit_triangular_inverse(const Matrix<FieldElement>& f);

// M = A (I-F)^{-1} B^T
SystemMatrix system_matrix(const AdtNetwork& net, const CodingAssignment& assign);

// Symbolic F with named beta variables (e.g. "b(e3,e7)"); coefficients of
// unused ports are forced to zero. Used for golden-matrix dumps.
Matrix<SymPoly> build_F_symbolic(const AdtNetwork& net, const Field& field,
                                 const SymContextPtr& ctx);

// Truncated Neumann series sum_{k<=L} (D^delay_step * F)^k. With delay_step=0
// this is (I-F)^{-1} for nilpotent F; with delay_step=1 it is (I-DF)^{-1}.
Matrix<SymPoly> symbolic_series_inverse(const Matrix<SymPoly>& f, unsigned truncate_degree,
                                        bool with_delay);

// Forward propagation of one symbol per source process (Eqs. of the model:
// beta-mixing at output ports, finite-field sums at input ports, epsilon at
// destinations).
struct SimulationResult {
    std::vector<uint16_t> port_values;                 // indexed by port key
    std::map<int, std::vector<uint16_t>> destination;  // node -> Z(T, .)
};

SimulationResult simulate_ports(const AdtNetwork& net, const CodingAssignment& assign,
                                const std::map<int, std::vector<uint16_t>>& source_symbols);

// convenience wrapper for a single-source network
std::map<int, std::vector<uint16_t>> simulate(const AdtNetwork& net,
                                              const CodingAssignment& assign,
                                              const std::vector<uint16_t>& source_symbols);

// CSV dump (numeric entries) with a header row of port labels.
std::string dump_matrix_csv(const AdtNetwork& net, const Matrix<FieldElement>& m);
// Tab-separated symbolic dump, same header.
std::string dump_matrix_symbolic(const AdtNetwork& net, const Matrix<SymPoly>& m);

}  // namespace adtnc

#endif
