#include "adtnc/dpoly.hpp"

#include <sstream>

namespace adtnc {

DPoly::DPoly(Field field, std::vector<uint16_t> coeffs) : f_(std::move(field)), c_(std::move(coeffs)) {
    for (uint16_t v : c_)
        if (v >= f_.order()) throw UsageError("polynomial coefficient out of field range");
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

DPoly DPoly::d_power(const Field& f, unsigned k, uint16_t c) {
    std::vector<uint16_t> v(k + 1, 0);
    v[k] = c;
    return DPoly(f, std::move(v));
}

DPoly DPoly::operator+(const DPoly& o) const {
    if (!f_.same(o.f_)) throw UsageError("polynomials over different fields");
    std::vector<uint16_t> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) ^ o.coeff(i);
    return DPoly(f_, std::move(r));
}

DPoly DPoly::operator*(const DPoly& o) const {
    if (!f_.same(o.f_)) throw UsageError("polynomials over different fields");
    if (is_zero() || o.is_zero()) return zero(f_);
    std::vector<uint16_t> r(c_.size() + o.c_.size() - 1, 0);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < o.c_.size(); ++j)
            r[i + j] ^= f_.mul(c_[i], o.c_[j]);
    }
    return DPoly(f_, std::move(r));
}

DPoly DPoly::scaled(uint16_t s) const {
    std::vector<uint16_t> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = f_.mul(c_[i], s);
    return DPoly(f_, std::move(r));
}

DPoly DPoly::truncated(unsigned max_degree) const {
    if (degree() <= static_cast<int>(max_degree)) return *this;
    return DPoly(f_, std::vector<uint16_t>(c_.begin(), c_.begin() + max_degree + 1));
}

std::pair<DPoly, DPoly> DPoly::divmod(const DPoly& divisor) const {
    if (divisor.is_zero()) throw UsageError("polynomial division by zero");
    if (degree() < divisor.degree()) return {zero(f_), *this};
    std::vector<uint16_t> rem = c_;
    std::vector<uint16_t> quot(degree() - divisor.degree() + 1, 0);
    uint16_t lead_inv = f_.inv(divisor.leading());
    for (int k = degree() - divisor.degree(); k >= 0; --k) {
        uint16_t coef = f_.mul(rem[k + divisor.degree()], lead_inv);
        quot[k] = coef;
        if (coef == 0) continue;
        for (int j = 0; j <= divisor.degree(); ++j)
            rem[k + j] ^= f_.mul(coef, divisor.c_[j]);
    }
    return {DPoly(f_, std::move(quot)), DPoly(f_, std::move(rem))};
}

DPoly DPoly::operator/(const DPoly& o) const {
    auto [q, r] = divmod(o);
    if (!r.is_zero()) throw UsageError("inexact polynomial division");
    return q;
}

DPoly DPoly::monic() const {
    if (is_zero()) return *this;
    return scaled(f_.inv(leading()));
}

uint16_t DPoly::eval(uint16_t d_value) const {
    uint16_t acc = 0;
    for (size_t i = c_.size(); i-- > 0;) acc = f_.add(f_.mul(acc, d_value), c_[i]);
    return acc;
}

std::string DPoly::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t k = 0; k < c_.size(); ++k) {
        if (c_[k] == 0) continue;
        if (!first) os << " + ";
        first = false;
        if (k == 0) {
            os << c_[k];
        } else {
            if (c_[k] != 1) os << c_[k] << "*";
            os << (k == 1 ? "D" : "D^" + std::to_string(k));
        }
    }
    return os.str();
}

DPoly dpoly_gcd(DPoly a, DPoly b) {
    while (!b.is_zero()) {
        DPoly r = a.divmod(b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

DRational::DRational(DPoly num) : num_(std::move(num)), den_(DPoly::constant(num_.field(), 1)) {}

DRational::DRational(DPoly num, DPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw UsageError("rational function with zero denominator");
    if (num_.is_zero()) {
        den_ = DPoly::constant(num_.field(), 1);
        return;
    }
    DPoly g = dpoly_gcd(num_, den_);
    if (g.degree() > 0) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
    uint16_t lead = den_.leading();
    if (lead != 1) {
        uint16_t inv = num_.field().inv(lead);
        num_ = num_.scaled(inv);
        den_ = den_.scaled(inv);
    }
}

DRational DRational::operator+(const DRational& o) const {
    return DRational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

DRational DRational::operator*(const DRational& o) const {
    return DRational(num_ * o.num_, den_ * o.den_);
}

DRational DRational::operator/(const DRational& o) const { return *this * o.inverse(); }

DRational DRational::inverse() const {
    if (is_zero()) throw UsageError("inverse of zero rational function");
    return DRational(den_, num_);
}

std::string DRational::str() const {
    if (is_polynomial()) return num_.str();
    return "(" + num_.str() + ") / (" + den_.str() + ")";
}

}  // namespace adtnc
