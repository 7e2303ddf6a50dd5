#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include <gmpxx.h>

#include "galrep/errors.hpp"

namespace galrep {

inline int64_t mod_i64(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

inline int64_t gcd_i64(int64_t a, int64_t b) { return std::gcd(a, b); }

// Extended gcd: returns g and sets x, y with a*x + b*y = g.
inline int64_t xgcd_i64(int64_t a, int64_t b, int64_t& x, int64_t& y) {
    int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        int64_t q = a / b;
        int64_t t = a - q * b; a = b; b = t;
        t = x0 - q * x1; x0 = x1; x1 = t;
        t = y0 - q * y1; y0 = y1; y1 = t;
    }
    x = x0; y = y0;
    return a;
}

inline int64_t inv_mod_i64(int64_t a, int64_t m) {
    int64_t x, y;
    int64_t g = xgcd_i64(mod_i64(a, m), m, x, y);
    check(g == 1, "inv_mod: not invertible");
    return mod_i64(x, m);
}

inline int64_t pow_mod_i64(int64_t base, int64_t exp, int64_t m) {
    mpz_class b(static_cast<long>(mod_i64(base, m))), mm(static_cast<long>(m)), r;
    mpz_powm_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(exp), mm.get_mpz_t());
    return r.get_si();
}

// Canonicalized rational a/b (mpq_class's two-argument constructor does not
// reduce the fraction on its own).
inline mpq_class frac(const mpz_class& a, const mpz_class& b) {
    mpq_class q(a, b);
    q.canonicalize();
    return q;
}
inline mpq_class frac(long a, long b) { return frac(mpz_class(a), mpz_class(b)); }

inline mpz_class pow_mpz(const mpz_class& base, unsigned long exp) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

inline mpz_class powm(const mpz_class& b, const mpz_class& e, const mpz_class& m) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline mpz_class mod_mpz(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline mpz_class inv_mod_mpz(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw Error("inv_mod_mpz: not invertible");
    return r;
}

inline bool is_prime(int64_t n) {
    if (n < 2) return false;
    for (int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<int64_t> primes_up_to(int64_t bound) {
    std::vector<int64_t> out;
    for (int64_t p = 2; p <= bound; ++p)
        if (is_prime(p)) out.push_back(p);
    return out;
}

// Factorization by trial division; fine for the desk-scale inputs here.
inline std::map<int64_t, int> factorize(int64_t n) {
    check(n >= 1, "factorize: positive input required");
    std::map<int64_t, int> f;
    for (int64_t d = 2; d * d <= n; ++d)
        while (n % d == 0) { f[d]++; n /= d; }
    if (n > 1) f[n]++;
    return f;
}

inline std::map<mpz_class, int> factorize_mpz(mpz_class n) {
    std::map<mpz_class, int> f;
    check(n >= 1, "factorize_mpz: positive input required");
    for (mpz_class d = 2; d * d <= n; ++d)
        while (n % d == 0) { f[d]++; n /= d; }
    if (n > 1) f[n]++;
    return f;
}

inline int64_t euler_phi(int64_t n) {
    int64_t r = n;
    for (auto& [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

inline std::vector<int64_t> units_mod(int64_t n) {
    std::vector<int64_t> u;
    for (int64_t x = n == 1 ? 0 : 1; x < n || (n == 1 && x == 0); ++x) {
        if (n == 1) { u.push_back(0); break; }
        if (std::gcd(x, n) == 1) u.push_back(x);
    }
    return u;
}

inline int64_t mult_order_mod(int64_t a, int64_t n) {
    check(n >= 1 && std::gcd(mod_i64(a, n), n) == 1, "mult_order: unit required");
    if (n == 1) return 1;
    int64_t x = mod_i64(a, n);
    int64_t acc = x, ord = 1;
    while (acc != 1) { acc = mod_i64(acc * x, n); ++ord; }
    return ord;
}

// Legendre symbol for word-size p.
inline int legendre(int64_t a, int64_t p) {
    a = mod_i64(a, p);
    if (a == 0) return 0;
    return pow_mod_i64(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

}  // namespace galrep
