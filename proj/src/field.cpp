#include "adtnc/field.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace adtnc {

namespace {

// Widely used irreducible (primitive-friendly) polynomials, indexed by m.
const uint32_t kCanonical[17] = {
    0,
    0x3,      // x + 1
    0x7,      // x^2 + x + 1
    0xB,      // x^3 + x + 1
    0x13,     // x^4 + x + 1
    0x25,     // x^5 + x^2 + 1
    0x43,     // x^6 + x + 1
    0x89,     // x^7 + x^3 + 1
    0x11D,    // x^8 + x^4 + x^3 + x^2 + 1
    0x211,    // x^9 + x^4 + 1
    0x409,    // x^10 + x^3 + 1
    0x805,    // x^11 + x^2 + 1
    0x1053,   // x^12 + x^6 + x^4 + x + 1
    0x201B,   // x^13 + x^4 + x^3 + x + 1
    0x4443,   // x^14 + x^10 + x^6 + x + 1
    0x8003,   // x^15 + x + 1
    0x1100B,  // x^16 + x^12 + x^3 + x + 1
};

unsigned deg(uint32_t p) {
    unsigned d = 0;
    while (p >> (d + 1)) ++d;
    return d;
}

uint32_t polymod(uint64_t a, uint32_t mod) {
    unsigned md = deg(mod);
    for (int i = 63 - static_cast<int>(md); i >= 0; --i) {
        if (a >> (i + md) & 1) a ^= static_cast<uint64_t>(mod) << i;
    }
    return static_cast<uint32_t>(a);
}

uint64_t polymul(uint32_t a, uint32_t b) {
    uint64_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        a <<= 1;
        b >>= 1;
    }
    return r;
}

}  // namespace

uint16_t clmul_mod(uint32_t a, uint32_t b, uint32_t poly, unsigned) {
    return static_cast<uint16_t>(polymod(polymul(a, b), poly));
}

bool Field::is_irreducible(uint32_t poly, unsigned m) {
    if (m < 1 || deg(poly) != m) return false;
    if ((poly & 1) == 0) return false;  // divisible by x
    // trial division by every polynomial of degree 1..m/2
    for (unsigned d = 1; 2 * d <= m; ++d) {
        for (uint32_t f = (1u << d); f < (2u << d); ++f) {
            // long division remainder of poly by f
            uint32_t r = poly;
            while (deg(r) >= d && r >> d) {
                r ^= f << (deg(r) - d);
            }
            if (r == 0) return false;
        }
    }
    return true;
}

uint32_t Field::canonical_polynomial(unsigned m) {
    if (m < 1 || m > 16) throw UsageError("extension degree must be in [1, 16]");
    return kCanonical[m];
}

Field Field::gf(unsigned m) { return with_polynomial(m, canonical_polynomial(m)); }

Field Field::with_polynomial(unsigned m, uint32_t poly) {
    if (m < 1 || m > 16) throw UsageError("extension degree must be in [1, 16]");
    if (!is_irreducible(poly, m))
        throw UsageError("reduction polynomial is not irreducible of degree " + std::to_string(m));

    // Fields are cached; tables for GF(2^16) are 384 KiB and building them
    // repeatedly inside inner loops would dominate runtime.
    static std::mutex mu;
    static std::map<std::pair<unsigned, uint32_t>, std::shared_ptr<const Tables>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({m, poly});
        if (it != cache.end()) return Field(it->second);
    }

    auto t = std::make_shared<Tables>();
    t->m = m;
    t->q = 1u << m;
    t->poly = poly;
    t->log.assign(t->q, 0);
    t->exp.assign(2 * (t->q - 1), 0);

    // Find a generator of the multiplicative group: repeated multiplication
    // must cycle through all q-1 nonzero elements. x (= 2) works whenever the
    // polynomial is primitive; otherwise scan.
    for (uint32_t g = 2; g < t->q; ++g) {
        uint32_t v = 1;
        uint32_t count = 0;
        bool ok = true;
        std::vector<uint16_t> exps;
        exps.reserve(t->q - 1);
        do {
            exps.push_back(static_cast<uint16_t>(v));
            v = clmul_mod(v, g, poly, m);
            ++count;
            if (count > t->q) {
                ok = false;
                break;
            }
        } while (v != 1);
        if (!ok || count != t->q - 1) continue;
        for (uint32_t i = 0; i < t->q - 1; ++i) {
            t->exp[i] = exps[i];
            t->exp[i + t->q - 1] = exps[i];
            t->log[exps[i]] = static_cast<uint16_t>(i);
        }
        std::lock_guard<std::mutex> lock(mu);
        auto sp = std::shared_ptr<const Tables>(t);
        cache[{m, poly}] = sp;
        return Field(sp);
    }
    throw UsageError("no generator found; polynomial is not irreducible?");
}

uint16_t Field::pow(uint16_t a, uint64_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    uint64_t l = static_cast<uint64_t>(t_->log[a]) * (e % (t_->q - 1));
    return t_->exp[l % (t_->q - 1)];
}

std::string Field::describe() const {
    std::ostringstream os;
    os << "GF(2^" << t_->m << "), poly=0x" << std::hex << t_->poly;
    return os.str();
}

}  // namespace adtnc
