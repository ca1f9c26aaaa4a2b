#include "adtnc/symbolic.hpp"

#include <algorithm>
#include <sstream>

namespace adtnc {

uint32_t SymContext::var(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(names_.size());
    names_.push_back(name);
    ids_[name] = id;
    return id;
}

SymPoly SymPoly::constant(const Field& f, const SymContextPtr& ctx, uint16_t c) {
    SymPoly p(f, ctx);
    if (c != 0) p.terms_[SymMonomial{}] = c;
    return p;
}

SymPoly SymPoly::variable(const Field& f, const SymContextPtr& ctx, const std::string& name) {
    SymPoly p(f, ctx);
    p.terms_[SymMonomial{0, {ctx->var(name)}}] = 1;
    return p;
}

SymPoly SymPoly::d_power(const Field& f, const SymContextPtr& ctx, unsigned k) {
    SymPoly p(f, ctx);
    p.terms_[SymMonomial{k, {}}] = 1;
    return p;
}

void SymPoly::add_term(const SymMonomial& m, uint16_t c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second = f_.add(it->second, c);
        if (it->second == 0) terms_.erase(it);
    }
}

SymPoly SymPoly::operator+(const SymPoly& o) const {
    SymPoly r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

SymPoly SymPoly::operator*(const SymPoly& o) const {
    SymPoly r(f_, ctx_);
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) {
            SymMonomial m;
            m.dpow = ma.dpow + mb.dpow;
            m.vars.reserve(ma.vars.size() + mb.vars.size());
            std::merge(ma.vars.begin(), ma.vars.end(), mb.vars.begin(), mb.vars.end(),
                       std::back_inserter(m.vars));
            r.add_term(m, f_.mul(ca, cb));
        }
    return r;
}

SymPoly SymPoly::scaled(uint16_t s) const {
    SymPoly r(f_, ctx_);
    if (s == 0) return r;
    for (const auto& [m, c] : terms_) r.terms_[m] = f_.mul(c, s);
    return r;
}

SymPoly SymPoly::times_d(unsigned k) const {
    SymPoly r(f_, ctx_);
    for (const auto& [m, c] : terms_) {
        SymMonomial m2 = m;
        m2.dpow += k;
        r.terms_[m2] = c;
    }
    return r;
}

SymPoly SymPoly::truncated_d(unsigned max_dpow) const {
    SymPoly r(f_, ctx_);
    for (const auto& [m, c] : terms_)
        if (m.dpow <= max_dpow) r.terms_[m] = c;
    return r;
}

std::vector<uint32_t> SymPoly::variables() const {
    std::vector<uint32_t> v;
    for (const auto& [m, c] : terms_) v.insert(v.end(), m.vars.begin(), m.vars.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

unsigned SymPoly::max_degree_in(uint32_t var) const {
    unsigned best = 0;
    for (const auto& [m, c] : terms_) {
        unsigned d = static_cast<unsigned>(std::count(m.vars.begin(), m.vars.end(), var));
        best = std::max(best, d);
    }
    return best;
}

unsigned SymPoly::max_degree_any_variable() const {
    unsigned best = 0;
    for (uint32_t v : variables()) best = std::max(best, max_degree_in(v));
    return best;
}

SymPoly SymPoly::substituted(uint32_t var, uint16_t value) const {
    SymPoly r(f_, ctx_);
    for (const auto& [m, c] : terms_) {
        unsigned d = static_cast<unsigned>(std::count(m.vars.begin(), m.vars.end(), var));
        if (d == 0) {
            r.add_term(m, c);
            continue;
        }
        uint16_t scaled = f_.mul(c, f_.pow(value, d));
        if (scaled == 0) continue;
        SymMonomial m2;
        m2.dpow = m.dpow;
        for (uint32_t v : m.vars)
            if (v != var) m2.vars.push_back(v);
        r.add_term(m2, scaled);
    }
    return r;
}

uint16_t SymPoly::eval(const std::map<uint32_t, uint16_t>& assignment) const {
    uint16_t acc = 0;
    for (const auto& [m, c] : terms_) {
        if (m.dpow != 0) throw UsageError("cannot evaluate a polynomial containing D");
        uint16_t term = c;
        for (uint32_t v : m.vars) {
            auto it = assignment.find(v);
            if (it == assignment.end()) throw UsageError("missing assignment for variable");
            term = f_.mul(term, it->second);
        }
        acc = f_.add(acc, term);
    }
    return acc;
}

std::string SymPoly::str() const {
    if (terms_.empty()) return "0";
    // order by (D power, variable name sequence) for stable output
    struct Item {
        uint32_t dpow;
        std::vector<std::string> names;
        const std::pair<const SymMonomial, uint16_t>* term;
    };
    std::vector<Item> items;
    for (const auto& t : terms_) {
        Item it{t.first.dpow, {}, &t};
        for (uint32_t v : t.first.vars) it.names.push_back(ctx_->name(v));
        items.push_back(std::move(it));
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.dpow != b.dpow) return a.dpow < b.dpow;
        return a.names < b.names;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& item : items) {
        if (!first) os << " + ";
        first = false;
        const SymMonomial& m = item.term->first;
        uint16_t c = item.term->second;
        bool wrote = false;
        if (c != 1 || (m.dpow == 0 && m.vars.empty())) {
            os << c;
            wrote = true;
        }
        if (m.dpow > 0) {
            if (wrote) os << "*";
            os << (m.dpow == 1 ? "D" : "D^" + std::to_string(m.dpow));
            wrote = true;
        }
        for (uint32_t v : m.vars) {
            if (wrote) os << "*";
            os << ctx_->name(v);
            wrote = true;
        }
    }
    return os.str();
}

}  // namespace adtnc
