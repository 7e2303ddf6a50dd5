#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "galrep/arith.hpp"
#include "galrep/errors.hpp"
#include "galrep/rng.hpp"

namespace galrep {

class PAdicContext;
using CtxPtr = std::shared_ptr<const PAdicContext>;

// The unramified local ring Z_q/p^e realised as (Z/p^e)[t]/(f) where f is the
// deterministic lift of the lexicographically least monic irreducible of
// degree a over F_p. All ring elements are coefficient vectors of length a.
class PAdicContext : public std::enable_shared_from_this<PAdicContext> {
public:
    mpz_class p;
    int a = 1;
    int e = 1;
    mpz_class pe;                    // p^e
    std::vector<mpz_class> defpoly;  // monic, length a+1, defpoly[a] = 1

    static CtxPtr make(const mpz_class& p, int a, int e);
    // Same (p, a) tower at accuracy e2 <= e; cached.
    CtxPtr view(int e2) const;

    bool same_tower(const PAdicContext& o) const {
        return p == o.p && a == o.a;
    }

    // sigma(t)^i for i < a, as coefficient vectors; sigma = ring Frobenius.
    const std::vector<std::vector<mpz_class>>& frob_powers() const { return frob_pow_; }

private:
    friend class RingElem;
    mutable std::map<int, CtxPtr> views_;
    std::vector<std::vector<mpz_class>> frob_pow_;
    PAdicContext() = default;
};

class RingElem {
public:
    RingElem() = default;
    RingElem(CtxPtr ctx, std::vector<mpz_class> coeffs) : ctx_(std::move(ctx)), c_(std::move(coeffs)) {
        c_.resize(ctx_->a);
        normalize();
    }
    static RingElem zero(const CtxPtr& ctx) { return RingElem(ctx, {}); }
    static RingElem one(const CtxPtr& ctx) { return from_int(ctx, 1); }
    static RingElem from_int(const CtxPtr& ctx, const mpz_class& n) {
        std::vector<mpz_class> v(ctx->a);
        v[0] = mod_mpz(n, ctx->pe);
        return RingElem(ctx, std::move(v));
    }
    // Generator t of the extension.
    static RingElem gen(const CtxPtr& ctx) {
        std::vector<mpz_class> v(ctx->a);
        if (ctx->a > 1) v[1] = 1; else v[0] = mod_mpz(-ctx->defpoly[0], ctx->pe);
        return RingElem(ctx, std::move(v));
    }
    static RingElem random(const CtxPtr& ctx, Rng& rng) {
        std::vector<mpz_class> v(ctx->a);
        for (auto& x : v) x = rng.below(ctx->pe);
        return RingElem(ctx, std::move(v));
    }

    const CtxPtr& ctx() const { return ctx_; }
    const std::vector<mpz_class>& coeffs() const { return c_; }

    bool is_zero() const {
        for (auto& x : c_) if (x != 0) return false;
        return true;
    }
    // Unit iff nonzero mod p.
    bool is_unit() const {
        for (auto& x : c_) if (x % ctx_->p != 0) return true;
        return false;
    }
    bool operator==(const RingElem& o) const { return c_ == o.c_; }
    bool operator!=(const RingElem& o) const { return !(*this == o); }

    RingElem operator+(const RingElem& o) const;
    RingElem operator-(const RingElem& o) const;
    RingElem operator-() const;
    RingElem operator*(const RingElem& o) const;
    RingElem& operator+=(const RingElem& o) { return *this = *this + o; }
    RingElem& operator-=(const RingElem& o) { return *this = *this - o; }
    RingElem& operator*=(const RingElem& o) { return *this = *this * o; }

    RingElem mul_int(const mpz_class& n) const;
    RingElem inverse() const;  // requires unit
    RingElem pow(mpz_class n) const;

    // Reduce into the accuracy-e2 view of the same tower.
    RingElem reduce(const CtxPtr& target) const;
    // Arbitrary coefficient-preserving lift into a higher-accuracy view.
    RingElem lift_naive(const CtxPtr& target) const;

    std::string str() const;

private:
    CtxPtr ctx_;
    std::vector<mpz_class> c_;
    void normalize() {
        for (auto& x : c_) x = mod_mpz(x, ctx_->pe);
    }
    friend RingElem frobenius(const RingElem&);
    friend RingElem frobenius_iter(const RingElem&, int);
};

// The lift of x -> x^p; a ring morphism of Z_q/p^e of order a.
RingElem frobenius(const RingElem& x);
RingElem frobenius_iter(const RingElem& x, int k);

RingElem teichmuller(const RingElem& x);

// Square root with Newton refinement; input must be a unit square.
// Returns the root congruent mod p to the Tonelli-Shanks root of x mod p.
RingElem sqrt_unit(const RingElem& x, Rng& rng);

// Discrete log in the cyclic subgroup of F_q^* generated by `base`
// (exact multiplicative order l^v). Pohlig-Hellman with BSGS leaves.
mpz_class dlog_prime_power(const RingElem& base, const RingElem& target, int64_t l, int v);

// Rational reconstruction of x mod p^e: a/b with |a|, |b| <= sqrt(p^e/2),
// gcd(b, p) = 1, a = b x mod p^e. Throws NoSmallFraction.
mpq_class rational_reconstruction(const mpz_class& x, const mpz_class& pe, const mpz_class& p);

}  // namespace galrep
