#pragma once

#include <utility>
#include <vector>

#include <gmpxx.h>

#include "galrep/padic.hpp"
#include "galrep/rng.hpp"

namespace galrep {

// ---------------------------------------------------------------- Z[x] -----
using ZPoly = std::vector<mpz_class>;  // low coefficients first, trimmed

namespace zp {
void trim(ZPoly& f);
int deg(const ZPoly& f);
ZPoly add(const ZPoly& f, const ZPoly& g);
ZPoly sub(const ZPoly& f, const ZPoly& g);
ZPoly mul(const ZPoly& f, const ZPoly& g);
ZPoly neg(const ZPoly& f);
// Exact division; throws if the division leaves a remainder.
ZPoly divexact(const ZPoly& f, const ZPoly& g);
mpz_class eval(const ZPoly& f, const mpz_class& x);
ZPoly derivative(const ZPoly& f);
// Res(f, g) = lc(f)^deg(g) prod g(alpha_i) over roots of f; Sylvester + Bareiss.
mpz_class resultant(const ZPoly& f, const ZPoly& g);
ZPoly cyclotomic(int64_t n);
ZPoly x_pow_minus_1(int64_t n);
}  // namespace zp

// ---------------------------------------------------------------- Q[x] -----
using QPoly = std::vector<mpq_class>;

namespace qp {
void trim(QPoly& f);
int deg(const QPoly& f);
QPoly from_z(const ZPoly& f);
QPoly add(const QPoly& f, const QPoly& g);
QPoly sub(const QPoly& f, const QPoly& g);
QPoly mul(const QPoly& f, const QPoly& g);
std::pair<QPoly, QPoly> divrem(const QPoly& f, const QPoly& g);
QPoly gcd(QPoly f, QPoly g);  // monic gcd
QPoly derivative(const QPoly& f);
// Primitive integer multiple: returns (F, den) with F = den * f in Z[x],
// content(F) trimmed to 1.
std::pair<ZPoly, mpz_class> to_integer(const QPoly& f);
}  // namespace qp

// ------------------------------------------------- (Z_q/p^e)[x] ------------
using RPoly = std::vector<RingElem>;

namespace rp {
void trim(RPoly& f);
int deg(const RPoly& f);
RPoly from_z(const ZPoly& f, const CtxPtr& ctx);
RPoly add(const RPoly& f, const RPoly& g, const CtxPtr& ctx);
RPoly sub(const RPoly& f, const RPoly& g, const CtxPtr& ctx);
RPoly mul(const RPoly& f, const RPoly& g, const CtxPtr& ctx);
RingElem eval(const RPoly& f, const RingElem& x);
RPoly derivative(const RPoly& f, const CtxPtr& ctx);
// Requires unit leading coefficient of g.
std::pair<RPoly, RPoly> divrem(const RPoly& f, const RPoly& g, const CtxPtr& ctx);
RPoly divexact(const RPoly& f, const RPoly& g, const CtxPtr& ctx);
RPoly powmod(RPoly base, mpz_class n, const RPoly& m, const CtxPtr& ctx);
// Monic gcd over F_q (context must have e = 1).
RPoly gcd_fq(RPoly f, RPoly g, const CtxPtr& ctx);
RPoly reduce(const RPoly& f, const CtxPtr& target);
// All roots in F_q of a squarefree polynomial that splits completely
// (context e = 1); seeded equal-degree splitting.
std::vector<RingElem> roots_split_fq(const RPoly& f, const CtxPtr& ctx, Rng& rng);
// Same, but stops once `want` roots are extracted.
std::vector<RingElem> some_roots_split_fq(const RPoly& f, const CtxPtr& ctx, Rng& rng, int want);
}  // namespace rp

// Hensel lift of a simple root: f over Z_q/p^e, r0 a root of f mod p with
// f'(r0) a unit. Returns r with f(r) = 0 exactly and r = r0 mod p.
RingElem hensel_lift_root(const RPoly& f, const RingElem& r0);

}  // namespace galrep
