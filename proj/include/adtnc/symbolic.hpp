#ifndef ADTNC_SYMBOLIC_HPP
#define ADTNC_SYMBOLIC_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "adtnc/field.hpp"

namespace adtnc {

// Interns variable names (coding coefficients like "b(e3,e7)") to ids shared
// by all polynomials built against the same context.
class SymContext {
public:
    uint32_t var(const std::string& name);
    const std::string& name(uint32_t id) const { return names_.at(id); }
    size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::map<std::string, uint32_t> ids_;
};

using SymContextPtr = std::shared_ptr<SymContext>;

// Monomial: a power of D times a product of variables (sorted ids, with
// multiplicity).
struct SymMonomial {
    uint32_t dpow = 0;
    std::vector<uint32_t> vars;

    bool operator<(const SymMonomial& o) const {
        if (dpow != o.dpow) return dpow < o.dpow;
        return vars < o.vars;
    }
    bool operator==(const SymMonomial& o) const { return dpow == o.dpow && vars == o.vars; }
};

/*
 * Sparse multivariate polynomial over GF(2^m) in named coefficient variables,
 * with an extra formal power of D per monomial. Rich enough for the symbolic
 * transfer matrices and for the variable-by-variable nonzero-assignment
 * search; it is a ring, not a field.
 */
class SymPoly {
public:
    SymPoly(Field f, SymContextPtr ctx) : f_(std::move(f)), ctx_(std::move(ctx)) {}

    static SymPoly zero(const Field& f, const SymContextPtr& ctx) { return SymPoly(f, ctx); }
    static SymPoly constant(const Field& f, const SymContextPtr& ctx, uint16_t c);
    static SymPoly variable(const Field& f, const SymContextPtr& ctx, const std::string& name);
    static SymPoly d_power(const Field& f, const SymContextPtr& ctx, unsigned k);

    const Field& field() const { return f_; }
    const SymContextPtr& context() const { return ctx_; }
    bool is_zero() const { return terms_.empty(); }

    SymPoly operator+(const SymPoly& o) const;
    SymPoly operator-(const SymPoly& o) const { return *this + o; }
    SymPoly operator*(const SymPoly& o) const;
    SymPoly scaled(uint16_t s) const;
    SymPoly times_d(unsigned k) const;  // multiply by D^k
    SymPoly truncated_d(unsigned max_dpow) const;

    bool operator==(const SymPoly& o) const { return f_.same(o.f_) && terms_ == o.terms_; }
    bool operator!=(const SymPoly& o) const { return !(*this == o); }

    // ids of variables that appear, sorted
    std::vector<uint32_t> variables() const;
    unsigned max_degree_in(uint32_t var) const;
    unsigned max_degree_any_variable() const;

    // substitute var := value (a field constant)
    SymPoly substituted(uint32_t var, uint16_t value) const;

    // evaluate with every variable assigned; D must not appear
    uint16_t eval(const std::map<uint32_t, uint16_t>& assignment) const;

    // canonical rendering, e.g. "D^3*b(e3,e7) + D^3*b(e6,e10)"; monomials are
    // ordered by D power then variable names
    std::string str() const;

private:
    void add_term(const SymMonomial& m, uint16_t c);

    Field f_;
    SymContextPtr ctx_;
    std::map<SymMonomial, uint16_t> terms_;
};

}  // namespace adtnc

#endif
