#ifndef ADTNC_DPOLY_HPP
#define ADTNC_DPOLY_HPP

#include <string>
#include <vector>

#include "adtnc/field.hpp"

namespace adtnc {

/*
 * Polynomials in the delay indeterminate D with coefficients in GF(2^m).
 * Coefficients are stored lowest power first with trailing zeros trimmed;
 * the zero polynomial has degree -1.
 */
class DPoly {
public:
    DPoly(Field field, std::vector<uint16_t> coeffs);

    static DPoly zero(const Field& f) { return DPoly(f, {}); }
    static DPoly constant(const Field& f, uint16_t c) { return DPoly(f, {c}); }
    static DPoly d_power(const Field& f, unsigned k, uint16_t c = 1);

    const Field& field() const { return f_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
    uint16_t coeff(size_t k) const { return k < c_.size() ? c_[k] : 0; }
    uint16_t leading() const { return c_.empty() ? 0 : c_.back(); }
    const std::vector<uint16_t>& coeffs() const { return c_; }

    DPoly operator+(const DPoly& o) const;
    DPoly operator-(const DPoly& o) const { return *this + o; }
    DPoly operator*(const DPoly& o) const;
    DPoly scaled(uint16_t s) const;
    DPoly truncated(unsigned max_degree) const;

    // quotient and remainder; divisor must be nonzero
    std::pair<DPoly, DPoly> divmod(const DPoly& divisor) const;
    DPoly operator/(const DPoly& o) const;  // exact division, throws if remainder != 0
    DPoly monic() const;

    uint16_t eval(uint16_t d_value) const;

    bool operator==(const DPoly& o) const { return f_.same(o.f_) && c_ == o.c_; }
    bool operator!=(const DPoly& o) const { return !(*this == o); }

    std::string str() const;  // e.g. "1 + 2*D + D^3"

private:
    Field f_;
    std::vector<uint16_t> c_;
};

DPoly dpoly_gcd(DPoly a, DPoly b);

/*
 * Fraction field of DPoly: the rational functions F_q(D). Kept reduced by
 * GCD with a monic denominator, so equality is plain representation
 * equality.
 */
class DRational {
public:
    DRational(DPoly num, DPoly den);
    explicit DRational(DPoly num);

    static DRational zero(const Field& f) { return DRational(DPoly::zero(f)); }
    static DRational one(const Field& f) { return DRational(DPoly::constant(f, 1)); }

    const DPoly& num() const { return num_; }
    const DPoly& den() const { return den_; }
    const Field& field() const { return num_.field(); }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_one(); }

    DRational operator+(const DRational& o) const;
    DRational operator-(const DRational& o) const { return *this + o; }
    DRational operator*(const DRational& o) const;
    DRational operator/(const DRational& o) const;
    DRational inverse() const;

    bool operator==(const DRational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const DRational& o) const { return !(*this == o); }

    std::string str() const;

private:
    DPoly num_, den_;
};

}  // namespace adtnc

#endif
