#ifndef ADTNC_MATRIX_HPP
#define ADTNC_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "adtnc/errors.hpp"

namespace adtnc {

/*
 * Dense row-major matrix over an exact coefficient type E (FieldElement,
 * DPoly, DRational, SymPoly). E is not required to be default-constructible;
 * a zero prototype is supplied at construction and reused for fills, so the
 * field/context travels with the matrix.
 */
template <typename E>
class Matrix {
public:
    Matrix(size_t rows, size_t cols, E zero)
        : rows_(rows), cols_(cols), zero_(zero), data_(rows * cols, zero) {}

    static Matrix identity(size_t n, const E& zero, const E& one) {
        Matrix m(n, n, zero);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = one;
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    const E& zero() const { return zero_; }

    E& at(size_t r, size_t c) { return data_[r * cols_ + c]; }
    const E& at(size_t r, size_t c) const { return data_[r * cols_ + c]; }

    Matrix transpose() const {
        Matrix t(cols_, rows_, zero_);
        for (size_t r = 0; r < rows_; ++r)
            for (size_t c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
        return t;
    }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o);
        Matrix s(rows_, cols_, zero_);
        for (size_t i = 0; i < data_.size(); ++i) s.data_[i] = data_[i] + o.data_[i];
        return s;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw UsageError("matrix dimension mismatch in product");
        Matrix p(rows_, o.cols_, zero_);
        for (size_t r = 0; r < rows_; ++r)
            for (size_t k = 0; k < cols_; ++k) {
                const E& a = at(r, k);
                if (a == zero_) continue;
                for (size_t c = 0; c < o.cols_; ++c) p.at(r, c) = p.at(r, c) + a * o.at(k, c);
            }
        return p;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    bool is_zero() const {
        for (const E& e : data_)
            if (!(e == zero_)) return false;
        return true;
    }

    Matrix submatrix(const std::vector<size_t>& row_idx, const std::vector<size_t>& col_idx) const {
        Matrix s(row_idx.size(), col_idx.size(), zero_);
        for (size_t r = 0; r < row_idx.size(); ++r)
            for (size_t c = 0; c < col_idx.size(); ++c) s.at(r, c) = at(row_idx[r], col_idx[c]);
        return s;
    }

private:
    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw UsageError("matrix shape mismatch");
    }

    size_t rows_, cols_;
    E zero_;
    std::vector<E> data_;
};

// Row rank by Gaussian elimination; E must be a field type (exact inverses).
template <typename E>
size_t mat_rank(Matrix<E> m) {
    size_t rank = 0;
    const E zero = m.zero();
    for (size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
        size_t pivot = rank;
        while (pivot < m.rows() && m.at(pivot, col) == zero) ++pivot;
        if (pivot == m.rows()) continue;
        for (size_t c = 0; c < m.cols(); ++c) std::swap(m.at(rank, c), m.at(pivot, c));
        E inv = m.at(rank, col).inverse();
        for (size_t r = rank + 1; r < m.rows(); ++r) {
            if (m.at(r, col) == zero) continue;
            E factor = m.at(r, col) * inv;
            for (size_t c = col; c < m.cols(); ++c)
                m.at(r, c) = m.at(r, c) - factor * m.at(rank, c);
        }
        ++rank;
    }
    return rank;
}

// Determinant by pivoted elimination. Characteristic 2 everywhere in this
// library, so row swaps never flip the sign.
template <typename E>
E mat_det(Matrix<E> m) {
    if (m.rows() != m.cols()) throw UsageError("determinant of non-square matrix");
    const E zero = m.zero();
    if (m.rows() == 0) throw UsageError("determinant of empty matrix");
    E det = zero;
    bool first = true;
    for (size_t col = 0; col < m.cols(); ++col) {
        size_t pivot = col;
        while (pivot < m.rows() && m.at(pivot, col) == zero) ++pivot;
        if (pivot == m.rows()) return zero;
        if (pivot != col)
            for (size_t c = 0; c < m.cols(); ++c) std::swap(m.at(col, c), m.at(pivot, c));
        const E& p = m.at(col, col);
        det = first ? p : det * p;
        first = false;
        E inv = p.inverse();
        for (size_t r = col + 1; r < m.rows(); ++r) {
            if (m.at(r, col) == zero) continue;
            E factor = m.at(r, col) * inv;
            for (size_t c = col; c < m.cols(); ++c)
                m.at(r, c) = m.at(r, c) - factor * m.at(col, c);
        }
    }
    return det;
}

template <typename E>
Matrix<E> mat_inverse(const Matrix<E>& m) {
    if (m.rows() != m.cols()) throw UsageError("inverse of non-square matrix");
    const size_t n = m.rows();
    const E zero = m.zero();
    Matrix<E> a = m;
    // one() derived from the matrix contents would need a prototype; build it
    // from any nonzero entry's self-division instead
    Matrix<E> inv(n, n, zero);
    // seed the identity: find one = e/e from a nonzero element of m (the zero
    // matrix is singular anyway)
    const E* nz = nullptr;
    for (size_t r = 0; r < n && !nz; ++r)
        for (size_t c = 0; c < n; ++c)
            if (!(a.at(r, c) == zero)) {
                nz = &m.at(r, c);
                break;
            }
    if (!nz) throw SingularMatrixError("matrix is singular");
    E one = *nz / *nz;
    for (size_t i = 0; i < n; ++i) inv.at(i, i) = one;

    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        while (pivot < n && a.at(pivot, col) == zero) ++pivot;
        if (pivot == n) throw SingularMatrixError("matrix is singular");
        if (pivot != col)
            for (size_t c = 0; c < n; ++c) {
                std::swap(a.at(col, c), a.at(pivot, c));
                std::swap(inv.at(col, c), inv.at(pivot, c));
            }
        E pinv = a.at(col, col).inverse();
        for (size_t c = 0; c < n; ++c) {
            a.at(col, c) = a.at(col, c) * pinv;
            inv.at(col, c) = inv.at(col, c) * pinv;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == col || a.at(r, col) == zero) continue;
            E factor = a.at(r, col);
            for (size_t c = 0; c < n; ++c) {
                a.at(r, c) = a.at(r, c) - factor * a.at(col, c);
                inv.at(r, c) = inv.at(r, c) - factor * inv.at(col, c);
            }
        }
    }
    return inv;
}

// Rank of a 0/1 matrix over GF(2), rows given as bitmask blocks.
size_t binary_rank(std::vector<std::vector<uint64_t>> rows);

}  // namespace adtnc

#endif
