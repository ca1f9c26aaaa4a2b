#ifndef ADTNC_FIELD_HPP
#define ADTNC_FIELD_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "adtnc/errors.hpp"
#include "adtnc/rng.hpp"

namespace adtnc {

/*
 * GF(2^m) for 1 <= m <= 16, represented by polynomials over GF(2) modulo a
 * fixed irreducible reduction polynomial. Multiplication and inversion go
 * through log/antilog tables built once per field; the tables are read-only
 * afterwards, so a Field may be shared freely across threads.
 */
class Field {
public:
    // Field with the canonical reduction polynomial for degree m.
    static Field gf(unsigned m);

    // Field with a user-supplied reduction polynomial (bitmask including the
    // x^m term). Throws UsageError if the polynomial is not irreducible.
    static Field with_polynomial(unsigned m, uint32_t poly);

    static bool is_irreducible(uint32_t poly, unsigned m);
    static uint32_t canonical_polynomial(unsigned m);

    unsigned degree() const { return t_->m; }
    uint32_t order() const { return t_->q; }
    uint32_t polynomial() const { return t_->poly; }

    uint16_t add(uint16_t a, uint16_t b) const { return a ^ b; }
    uint16_t sub(uint16_t a, uint16_t b) const { return a ^ b; }

    uint16_t mul(uint16_t a, uint16_t b) const {
        if (a == 0 || b == 0) return 0;
        return t_->exp[t_->log[a] + t_->log[b]];
    }

    uint16_t inv(uint16_t a) const {
        if (a == 0) throw UsageError("inverse of zero in GF(2^m)");
        return t_->exp[t_->q - 1 - t_->log[a]];
    }

    uint16_t div(uint16_t a, uint16_t b) const { return mul(a, inv(b)); }

    uint16_t pow(uint16_t a, uint64_t e) const;

    uint16_t random(Rng& rng) const { return static_cast<uint16_t>(rng.bits(t_->m)); }
    uint16_t random_nonzero(Rng& rng) const {
        uint16_t v;
        do {
            v = random(rng);
        } while (v == 0);
        return v;
    }

    bool same(const Field& other) const {
        return t_ == other.t_ || (t_->m == other.t_->m && t_->poly == other.t_->poly);
    }

    std::string describe() const;

private:
    struct Tables {
        unsigned m;
        uint32_t q;
        uint32_t poly;
        std::vector<uint16_t> exp;  // size 2(q-1), generator powers
        std::vector<uint16_t> log;  // size q, log[0] unused
    };

    explicit Field(std::shared_ptr<const Tables> t) : t_(std::move(t)) {}

    std::shared_ptr<const Tables> t_;
};

// A field element bundled with its field, so mixed-field arithmetic can be
// rejected instead of silently producing garbage.
class FieldElement {
public:
    FieldElement(uint16_t value, Field field) : v_(value), f_(std::move(field)) {
        if (v_ >= f_.order()) throw UsageError("field element value out of range");
    }

    uint16_t value() const { return v_; }
    const Field& field() const { return f_; }
    bool is_zero() const { return v_ == 0; }

    FieldElement operator+(const FieldElement& o) const {
        check(o);
        return FieldElement(f_.add(v_, o.v_), f_);
    }
    FieldElement operator-(const FieldElement& o) const { return *this + o; }
    FieldElement operator*(const FieldElement& o) const {
        check(o);
        return FieldElement(f_.mul(v_, o.v_), f_);
    }
    FieldElement operator/(const FieldElement& o) const {
        check(o);
        return FieldElement(f_.div(v_, o.v_), f_);
    }
    FieldElement inverse() const { return FieldElement(f_.inv(v_), f_); }

    bool operator==(const FieldElement& o) const { return f_.same(o.f_) && v_ == o.v_; }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

private:
    void check(const FieldElement& o) const {
        if (!f_.same(o.f_)) throw UsageError("field elements from different GF(2^m) specs");
    }

    uint16_t v_;
    Field f_;
};

inline FieldElement fe(uint16_t v, const Field& f) { return FieldElement(v, f); }

// mul/add on raw values; slow bitwise multiply used while tables are built
uint16_t clmul_mod(uint32_t a, uint32_t b, uint32_t poly, unsigned m);

}  // namespace adtnc

#endif
