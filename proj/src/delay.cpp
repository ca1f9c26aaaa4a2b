#include "adtnc/delay.hpp"

#include <algorithm>

namespace adtnc {

DelayAssignment delay_assignment_from(const CodingAssignment& a) {
    DelayAssignment d(a.field);
    for (const auto& [key, v] : a.alpha)
        d.alpha.emplace(key, DRational(DPoly::constant(a.field, v)));
    d.beta = a.beta;
    for (const auto& [key, v] : a.epsilon)
        d.epsilon.emplace(key, DRational(DPoly::constant(a.field, v)));
    return d;
}

std::vector<int> delay_port_order(const AdtNetwork& net) {
    if (net.is_acyclic()) return net.topological_position();
    std::vector<int> id(net.num_ports());
    for (int i = 0; i < net.num_ports(); ++i) id[i] = i;
    return id;
}

Matrix<FieldElement> build_F_delay(const AdtNetwork& net, const DelayAssignment& assign) {
    const Field& f = assign.field;
    const auto pos = delay_port_order(net);
    Matrix<FieldElement> F(net.num_ports(), net.num_ports(), fe(0, f));
    for (const Edge& e : net.edges())
        F.at(pos[net.port_key(e.from)], pos[net.port_key(e.to)]) = fe(1, f);
    for (const auto& [key, v] : assign.beta) F.at(pos[key.first], pos[key.second]) = fe(v, f);
    return F;
}

// Fraction-free Bareiss elimination; exact for any integral domain entry.
static DPoly bareiss_det(Matrix<DPoly> m) {
    const size_t n = m.rows();
    const Field& f = m.zero().field();
    if (n == 0) throw UsageError("determinant of empty matrix");
    DPoly prev = DPoly::constant(f, 1);
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m.at(k, k).is_zero()) {
            size_t p = k + 1;
            while (p < n && m.at(p, k).is_zero()) ++p;
            if (p == n) return DPoly::zero(f);
            for (size_t c = 0; c < n; ++c) std::swap(m.at(k, c), m.at(p, c));  // char 2: no sign
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j)
                m.at(i, j) = (m.at(k, k) * m.at(i, j) - m.at(i, k) * m.at(k, j)) / prev;
        prev = m.at(k, k);
    }
    return m.at(n - 1, n - 1);
}

DPoly dpoly_mat_det(const Matrix<DPoly>& m) { return bareiss_det(m); }

// clear denominators row by row, then fraction-free elimination
DRational drational_det(const Matrix<DRational>& m) {
    if (m.rows() != m.cols()) throw UsageError("determinant of non-square matrix");
    const Field& f = m.zero().field();
    Matrix<DPoly> cleared(m.rows(), m.cols(), DPoly::zero(f));
    DPoly mult = DPoly::constant(f, 1);
    for (size_t r = 0; r < m.rows(); ++r) {
        DPoly lcm = DPoly::constant(f, 1);
        for (size_t c = 0; c < m.cols(); ++c) {
            const DPoly& den = m.at(r, c).den();
            lcm = lcm * (den / dpoly_gcd(lcm, den));
        }
        for (size_t c = 0; c < m.cols(); ++c)
            cleared.at(r, c) = m.at(r, c).num() * (lcm / m.at(r, c).den());
        mult = mult * lcm;
    }
    return DRational(bareiss_det(cleared), mult);
}

DPoly delay_determinant(const AdtNetwork& net, const DelayAssignment& assign) {
    Matrix<FieldElement> F = build_F_delay(net, assign);
    const Field& f = assign.field;
    const size_t n = F.rows();
    Matrix<DPoly> idf(n, n, DPoly::zero(f));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            std::vector<uint16_t> coeffs{static_cast<uint16_t>(i == j ? 1 : 0),
                                         F.at(i, j).value()};
            idf.at(i, j) = DPoly(f, coeffs);
        }
    return bareiss_det(idf);
}

Matrix<DRational> delay_inverse(const AdtNetwork& net, const DelayAssignment& assign) {
    const Field& f = assign.field;
    Matrix<FieldElement> F = build_F_delay(net, assign);
    const size_t n = F.rows();
    Matrix<DRational> idf(n, n, DRational::zero(f));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            std::vector<uint16_t> coeffs{static_cast<uint16_t>(i == j ? 1 : 0),
                                         F.at(i, j).value()};
            idf.at(i, j) = DRational(DPoly(f, coeffs));
        }
    return mat_inverse(idf);
}

DelaySystemMatrix delay_system_matrix(const AdtNetwork& net, const DelayAssignment& assign) {
    const Field& f = assign.field;
    const auto pos = delay_port_order(net);
    std::vector<std::pair<int, int>> rows, cols;
    for (const auto& s : net.sources())
        for (int i = 0; i < s.processes; ++i) rows.push_back({s.node, i});
    for (const auto& d : net.destinations())
        for (int k = 0; k < d.processes; ++k) cols.push_back({d.node, k});
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());

    Matrix<DRational> A(rows.size(), net.num_ports(), DRational::zero(f));
    for (const auto& [key, v] : assign.alpha) {
        auto [proc, port_key] = key;
        int node = net.port_at(port_key).node;
        auto it = std::find(rows.begin(), rows.end(), std::make_pair(node, proc));
        if (it == rows.end()) throw UsageError("alpha entry for an undeclared source process");
        A.at(it - rows.begin(), pos[port_key]) = v;
    }
    Matrix<DRational> B(cols.size(), net.num_ports(), DRational::zero(f));
    for (const auto& [key, v] : assign.epsilon) {
        auto [np, in_key] = key;
        auto it = std::find(cols.begin(), cols.end(), np);
        if (it == cols.end()) throw UsageError("epsilon entry for an undeclared destination process");
        B.at(it - cols.begin(), pos[in_key]) = v;
    }

    Matrix<DRational> inv = delay_inverse(net, assign);
    return {A * inv * B.transpose(), rows, cols};
}

Matrix<DPoly> dpoly_series_inverse(const Matrix<DPoly>& p, unsigned truncate_degree) {
    if (p.rows() != p.cols()) throw UsageError("series inverse needs a square matrix");
    const Field& f = p.zero().field();
    const size_t n = p.rows();
    Matrix<FieldElement> F(n, n, fe(0, f));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            const DPoly& e = p.at(i, j);
            if (e.degree() > 1 || e.coeff(0) != (i == j ? 1 : 0))
                throw UsageError("matrix does not have the I - D*F shape");
            F.at(i, j) = fe(e.coeff(1), f);  // char 2: -F = F
        }
    Matrix<DPoly> acc(n, n, DPoly::zero(f));
    for (size_t i = 0; i < n; ++i) acc.at(i, i) = DPoly::constant(f, 1);
    Matrix<FieldElement> power = Matrix<FieldElement>::identity(n, fe(0, f), fe(1, f));
    for (unsigned k = 1; k <= truncate_degree; ++k) {
        power = power * F;
        if (power.is_zero()) break;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                if (!power.at(i, j).is_zero())
                    acc.at(i, j) = acc.at(i, j) + DPoly::d_power(f, k, power.at(i, j).value());
    }
    return acc;
}

Matrix<DPoly> truncated_delay_inverse(const AdtNetwork& net, const DelayAssignment& assign,
                                      unsigned truncate_degree) {
    const Field& f = assign.field;
    Matrix<FieldElement> F = build_F_delay(net, assign);
    const size_t n = F.rows();
    Matrix<DPoly> idf(n, n, DPoly::zero(f));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            idf.at(i, j) = DPoly(f, {static_cast<uint16_t>(i == j ? 1 : 0), F.at(i, j).value()});
    return dpoly_series_inverse(idf, truncate_degree);
}

Matrix<DPoly> truncated_delay_response(const AdtNetwork& net, const DelayAssignment& assign,
                                       unsigned truncate_degree) {
    const Field& f = assign.field;
    const auto pos = delay_port_order(net);
    std::vector<std::pair<int, int>> rows, cols;
    for (const auto& s : net.sources())
        for (int i = 0; i < s.processes; ++i) rows.push_back({s.node, i});
    for (const auto& d : net.destinations())
        for (int k = 0; k < d.processes; ++k) cols.push_back({d.node, k});
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());

    auto as_poly = [](const DRational& r) {
        if (!r.is_polynomial())
            throw UsageError("truncated response needs polynomial alpha/epsilon entries");
        return r.num();
    };
    Matrix<DPoly> A(rows.size(), net.num_ports(), DPoly::zero(f));
    for (const auto& [key, v] : assign.alpha) {
        int node = net.port_at(key.second).node;
        auto it = std::find(rows.begin(), rows.end(), std::make_pair(node, key.first));
        if (it == rows.end()) throw UsageError("alpha entry for an undeclared source process");
        A.at(it - rows.begin(), pos[key.second]) = as_poly(v);
    }
    Matrix<DPoly> B(cols.size(), net.num_ports(), DPoly::zero(f));
    for (const auto& [key, v] : assign.epsilon) {
        auto it = std::find(cols.begin(), cols.end(), key.first);
        if (it == cols.end()) throw UsageError("epsilon entry for an undeclared destination process");
        B.at(it - cols.begin(), pos[key.second]) = as_poly(v);
    }
    Matrix<DPoly> series = truncated_delay_inverse(net, assign, truncate_degree);
    Matrix<DPoly> m = A * series * B.transpose();
    for (size_t r = 0; r < m.rows(); ++r)
        for (size_t c = 0; c < m.cols(); ++c) m.at(r, c) = m.at(r, c).truncated(truncate_degree);
    return m;
}

Matrix<SymPoly> delay_inverse_symbolic(const AdtNetwork& net, const Field& field,
                                       const SymContextPtr& ctx) {
    Matrix<SymPoly> F = build_F_symbolic(net, field, ctx);
    return symbolic_series_inverse(F, net.num_ports(), /*with_delay=*/true);
}

bool delay_feasible_multicast(const AdtNetwork& net, const std::vector<Connection>& conns,
                              const Field& field, int trials, uint64_t seed) {
    if (conns.empty()) throw UsageError("empty connection set");
    for (const auto& c : conns)
        if (net.destination_process_count(c.destination) != c.rate())
            throw UsageError("destination must declare R(c) processes");
    for (int t = 0; t < trials; ++t) {
        Rng rng(mix_seed(seed, t));
        DelayAssignment assign(field);
        CoefficientSlots slots = coefficient_slots(net);
        for (auto [i, key] : slots.alpha)
            assign.alpha.emplace(std::make_pair(i, key),
                                 DRational(DPoly::constant(field, field.random(rng))));
        for (auto [in, out] : slots.beta) {
            uint16_t v = field.random(rng);
            if (v) assign.beta[{in, out}] = v;
        }
        for (auto [np, in] : slots.epsilon)
            assign.epsilon.emplace(std::make_pair(np, in),
                                   DRational(DPoly::constant(field, field.random(rng))));
        DPoly det_idf = delay_determinant(net, assign);
        if (det_idf.coeff(0) != 1) throw Error("internal: det(I-DF) lost its unit constant term");

        DelaySystemMatrix sm = delay_system_matrix(net, assign);
        bool all_ok = true;
        for (const auto& c : conns) {
            std::vector<size_t> rows, cols;
            for (int p : c.process_indices) {
                auto it = std::find(sm.row_labels.begin(), sm.row_labels.end(),
                                    std::make_pair(c.source, p));
                rows.push_back(it - sm.row_labels.begin());
            }
            for (size_t i = 0; i < sm.col_labels.size(); ++i)
                if (sm.col_labels[i].first == c.destination) cols.push_back(i);
            if (rows.size() != cols.size()) return false;
            Matrix<DRational> block = sm.m.submatrix(rows, cols);
            if (drational_det(block).is_zero()) {
                all_ok = false;
                break;
            }
        }
        if (all_ok) return true;
    }
    return false;
}

}  // namespace adtnc
