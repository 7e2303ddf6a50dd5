#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "galrep/arith.hpp"

namespace galrep {

// Dense polynomials over F_p for word-size p. Coefficients stored low-first,
// normalized so the leading coefficient is nonzero.
using FpPoly = std::vector<int64_t>;

namespace fp {

inline void trim(FpPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}
inline int deg(const FpPoly& f) { return static_cast<int>(f.size()) - 1; }
inline FpPoly x() { return {0, 1}; }
inline FpPoly cst(int64_t c, int64_t p) {
    FpPoly f{mod_i64(c, p)};
    trim(f);
    return f;
}

inline FpPoly add(const FpPoly& f, const FpPoly& g, int64_t p) {
    FpPoly r(std::max(f.size(), g.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        int64_t v = (i < f.size() ? f[i] : 0) + (i < g.size() ? g[i] : 0);
        r[i] = v % p;
    }
    trim(r);
    return r;
}

inline FpPoly sub(const FpPoly& f, const FpPoly& g, int64_t p) {
    FpPoly r(std::max(f.size(), g.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        int64_t v = (i < f.size() ? f[i] : 0) - (i < g.size() ? g[i] : 0);
        r[i] = mod_i64(v, p);
    }
    trim(r);
    return r;
}

inline FpPoly mul(const FpPoly& f, const FpPoly& g, int64_t p) {
    if (f.empty() || g.empty()) return {};
    std::vector<__int128> acc(f.size() + g.size() - 1, 0);
    for (size_t i = 0; i < f.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j)
            acc[i + j] += static_cast<__int128>(f[i]) * g[j];
    FpPoly r(acc.size());
    for (size_t i = 0; i < acc.size(); ++i) r[i] = static_cast<int64_t>(acc[i] % p);
    trim(r);
    return r;
}

inline std::pair<FpPoly, FpPoly> divrem(const FpPoly& f, const FpPoly& g, int64_t p) {
    check(!g.empty(), "fp::divrem by zero");
    FpPoly r = f, q;
    int64_t inv_lc = inv_mod_i64(g.back(), p);
    if (deg(r) >= deg(g)) q.assign(deg(r) - deg(g) + 1, 0);
    while (deg(r) >= deg(g)) {
        int64_t c = mod_i64(r.back() * inv_lc, p);
        int shift = deg(r) - deg(g);
        q[shift] = c;
        for (size_t i = 0; i < g.size(); ++i)
            r[i + shift] = mod_i64(r[i + shift] - c * g[i], p);
        trim(r);
    }
    trim(q);
    return {q, r};
}

inline FpPoly rem(const FpPoly& f, const FpPoly& g, int64_t p) { return divrem(f, g, p).second; }

inline FpPoly gcd(FpPoly f, FpPoly g, int64_t p) {
    while (!g.empty()) {
        FpPoly r = rem(f, g, p);
        f = std::move(g);
        g = std::move(r);
    }
    if (!f.empty()) {
        int64_t inv_lc = inv_mod_i64(f.back(), p);
        for (auto& c : f) c = mod_i64(c * inv_lc, p);
    }
    return f;
}

inline FpPoly powmod(FpPoly base, mpz_class n, const FpPoly& m, int64_t p) {
    FpPoly r = cst(1, p);
    base = rem(base, m, p);
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) r = rem(mul(r, base, p), m, p);
        base = rem(mul(base, base, p), m, p);
        n >>= 1;
    }
    return r;
}

inline int64_t eval(const FpPoly& f, int64_t x, int64_t p) {
    int64_t v = 0;
    for (size_t i = f.size(); i-- > 0;) v = mod_i64(v * x + f[i], p);
    return v;
}

inline FpPoly derivative(const FpPoly& f, int64_t p) {
    if (f.size() <= 1) return {};
    FpPoly d(f.size() - 1);
    for (size_t i = 1; i < f.size(); ++i) d[i - 1] = mod_i64(static_cast<int64_t>(i) * f[i], p);
    trim(d);
    return d;
}

// Degrees (with multiplicity of the split parts) of the distinct-degree
// decomposition of a squarefree f: returns pairs (degree d, number of
// irreducible factors of degree d).
inline std::vector<std::pair<int, int>> distinct_degree_profile(FpPoly f, int64_t p) {
    std::vector<std::pair<int, int>> out;
    int64_t inv_lc = inv_mod_i64(f.back(), p);
    for (auto& c : f) c = mod_i64(c * inv_lc, p);
    FpPoly h = rem(x(), f, p);
    int d = 0;
    while (deg(f) > 0) {
        ++d;
        if (2 * d > deg(f)) {
            out.emplace_back(deg(f), 1);
            break;
        }
        h = powmod(h, p, f, p);
        FpPoly g = gcd(sub(h, x(), p), f, p);
        if (deg(g) > 0) {
            out.emplace_back(d, deg(g) / d);
            f = divrem(f, g, p).first;
            h = rem(h, f, p);
        }
    }
    return out;
}

inline bool is_irreducible(const FpPoly& f, int64_t p) {
    int n = deg(f);
    if (n <= 0) return false;
    if (n == 1) return true;
    // x^(p^n) = x mod f, and gcd(x^(p^(n/l)) - x, f) = 1 for prime l | n.
    FpPoly h = powmod(x(), pow_mpz(mpz_class(static_cast<long>(p)), n), f, p);
    if (sub(h, x(), p) != FpPoly{}) return false;
    for (auto& [l, m] : factorize(n)) {
        (void)m;
        FpPoly hl = powmod(x(), pow_mpz(mpz_class(static_cast<long>(p)), n / static_cast<int>(l)), f, p);
        if (deg(gcd(sub(hl, x(), p), f, p)) != 0) return false;
    }
    return true;
}

// All roots in F_p, by brute scan (p is word-size and small in all our uses).
inline std::vector<int64_t> roots_bruteforce(const FpPoly& f, int64_t p) {
    std::vector<int64_t> r;
    for (int64_t v = 0; v < p; ++v)
        if (eval(f, v, p) == 0) r.push_back(v);
    return r;
}

}  // namespace fp
}  // namespace galrep
