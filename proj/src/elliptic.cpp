#include "galrep/elliptic.hpp"

#include <functional>
#include <map>

namespace galrep {

bool on_curve(const WeierstrassCurve& E, const EllPoint& P) {
    if (P.inf) return true;
    return P.y * P.y == E.rhs(P.x);
}

EllPoint ell_neg(const WeierstrassCurve& E, const EllPoint& P) {
    (void)E;
    if (P.inf) return P;
    return EllPoint(P.x, -P.y);
}

RingElem chord_slope(const WeierstrassCurve& E, const EllPoint& P, const EllPoint& Q) {
    check(!P.inf && !Q.inf, "chord_slope: affine points required");
    if (P.x == Q.x) {
        if (P.y != Q.y || P.y.is_zero())
            throw NonUnitDenominator("chord_slope: vertical line");
        RingElem num = (P.x * P.x).mul_int(3) + E.A;
        RingElem den = P.y.mul_int(2);
        if (!den.is_unit()) throw NonUnitDenominator("chord_slope: tangent at non-unit 2y");
        return num * den.inverse();
    }
    RingElem den = Q.x - P.x;
    if (!den.is_unit()) throw NonUnitDenominator("chord_slope: x difference not a unit");
    return (Q.y - P.y) * den.inverse();
}

EllPoint ell_add(const WeierstrassCurve& E, const EllPoint& P, const EllPoint& Q) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    if (P.x == Q.x && P.y == -Q.y) return EllPoint::infinity();
    RingElem lam = chord_slope(E, P, Q);
    RingElem x3 = lam * lam - P.x - Q.x;
    RingElem y3 = lam * (P.x - x3) - P.y;
    return EllPoint(std::move(x3), std::move(y3));
}

EllPoint ell_mul(const WeierstrassCurve& E, mpz_class n, const EllPoint& P) {
    EllPoint base = P;
    if (n < 0) { base = ell_neg(E, base); n = -n; }
    EllPoint acc = EllPoint::infinity();
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) acc = ell_add(E, acc, base);
        n >>= 1;
        if (n > 0) base = ell_add(E, base, base);
    }
    return acc;
}

EllPoint ell_reduce(const EllPoint& P, const CtxPtr& target) {
    if (P.inf) return P;
    return EllPoint(P.x.reduce(target), P.y.reduce(target));
}

int64_t count_points_fp(int64_t A, int64_t B, int64_t p) {
    A = mod_i64(A, p);
    B = mod_i64(B, p);
    if (mod_i64(4 * mod_i64(A * A % p * A, p) + 27 * mod_i64(B * B, p), p) == 0)
        throw SingularCurve();
    // chi table: chi[v] = Legendre symbol (v/p).
    std::vector<int8_t> chi(p, -1);
    for (int64_t v = 1; v < p; ++v) chi[v * v % p] = 1;
    chi[0] = 0;
    int64_t sum = 0;
    for (int64_t x = 0; x < p; ++x) {
        int64_t f = ((x * x % p * x) % p + A * x % p + B) % p;
        sum += chi[f];
    }
    return -sum;  // a_p = p + 1 - #E = -sum(chi)
}

mpz_class newton_sum(int64_t a_p, int64_t p, int a) {
    mpz_class prev = 2, cur = a_p;
    if (a == 0) return prev;
    for (int i = 1; i < a; ++i) {
        mpz_class next = mpz_class(static_cast<long>(a_p)) * cur - mpz_class(static_cast<long>(p)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// Division polynomial recurrences in the "hat" normalization: psi_m = y*g_m(x)
// for even m, psi_m = g_m(x) for odd m, with y^2 = x^3 + Ax + B substituted.
namespace {

template <class Poly, class Ops>
Poly division_poly_hat_impl(int64_t m, const Ops& op) {
    std::map<int64_t, Poly> memo;
    std::function<const Poly&(int64_t)> psi = [&](int64_t k) -> const Poly& {
        auto it = memo.find(k);
        if (it != memo.end()) return it->second;
        Poly r;
        if (k == 0) r = Poly{};
        else if (k == 1 || k == 2) r = op.cst(k);
        else if (k == 3) r = op.psi3();
        else if (k == 4) r = op.psi4();
        else if (k % 2 == 1) {
            int64_t n = k / 2;  // k = 2n+1
            Poly t1 = op.mul(psi(n + 2), op.pow3(psi(n)));
            Poly t2 = op.mul(psi(n - 1), op.pow3(psi(n + 1)));
            if (n % 2 == 0) r = op.sub(op.mul(op.f2(), t1), t2);
            else r = op.sub(t1, op.mul(op.f2(), t2));
        } else {
            int64_t n = k / 2;  // k = 2n
            Poly t1 = op.mul(psi(n + 2), op.sq(psi(n - 1)));
            Poly t2 = op.mul(psi(n - 2), op.sq(psi(n + 1)));
            r = op.half(op.mul(psi(n), op.sub(t1, t2)));
        }
        return memo.emplace(k, std::move(r)).first->second;
    };
    return psi(m);
}

struct FpOps {
    int64_t A, B, p;
    FpPoly cst(int64_t c) const { return fp::cst(c, p); }
    FpPoly f() const {
        FpPoly r = {mod_i64(B, p), mod_i64(A, p), 0, 1};
        fp::trim(r);
        return r;
    }
    FpPoly f2() const { return fp::mul(f(), f(), p); }
    FpPoly psi3() const {
        FpPoly r = {mod_i64(-A * A, p), mod_i64(12 * B, p), mod_i64(6 * A, p), 0, 3};
        fp::trim(r);
        return r;
    }
    FpPoly psi4() const {
        // 4(x^6 + 5A x^4 + 20B x^3 - 5A^2 x^2 - 4AB x - 8B^2 - A^3)
        FpPoly r = {mod_i64(-8 * B % p * B % p - mod_i64(A * A % p * A, p), p),
                    mod_i64(-4 * A % p * B, p),
                    mod_i64(-5 * A % p * A, p),
                    mod_i64(20 * B, p),
                    mod_i64(5 * A, p),
                    0,
                    1};
        fp::trim(r);
        for (auto& c : r) c = mod_i64(4 * c, p);
        return r;
    }
    FpPoly mul(const FpPoly& a, const FpPoly& b) const { return fp::mul(a, b, p); }
    FpPoly sub(const FpPoly& a, const FpPoly& b) const { return fp::sub(a, b, p); }
    FpPoly sq(const FpPoly& a) const { return fp::mul(a, a, p); }
    FpPoly pow3(const FpPoly& a) const { return fp::mul(fp::mul(a, a, p), a, p); }
    FpPoly half(const FpPoly& a) const {
        int64_t inv2 = inv_mod_i64(2, p);
        FpPoly r = a;
        for (auto& c : r) c = mod_i64(c * inv2, p);
        return r;
    }
};

struct RpOps {
    const WeierstrassCurve& E;
    const CtxPtr& ctx;
    RPoly cst(int64_t c) const { return RPoly{RingElem::from_int(ctx, c)}; }
    RPoly f() const {
        RPoly r{E.B, E.A, RingElem::zero(ctx), RingElem::one(ctx)};
        rp::trim(r);
        return r;
    }
    RPoly f2() const { return rp::mul(f(), f(), ctx); }
    RPoly psi3() const {
        RPoly r{-(E.A * E.A), E.B.mul_int(12), E.A.mul_int(6), RingElem::zero(ctx),
                RingElem::from_int(ctx, 3)};
        rp::trim(r);
        return r;
    }
    RPoly psi4() const {
        RingElem A = E.A, B = E.B;
        RPoly r{(-(B * B).mul_int(8)) - A * A * A, -(A * B).mul_int(4), -(A * A).mul_int(5),
                B.mul_int(20), A.mul_int(5), RingElem::zero(ctx), RingElem::one(ctx)};
        rp::trim(r);
        for (auto& c : r) c = c.mul_int(4);
        return r;
    }
    RPoly mul(const RPoly& a, const RPoly& b) const { return rp::mul(a, b, ctx); }
    RPoly sub(const RPoly& a, const RPoly& b) const { return rp::sub(a, b, ctx); }
    RPoly sq(const RPoly& a) const { return rp::mul(a, a, ctx); }
    RPoly pow3(const RPoly& a) const { return rp::mul(rp::mul(a, a, ctx), a, ctx); }
    RPoly half(const RPoly& a) const {
        RingElem inv2 = RingElem::from_int(ctx, 2).inverse();
        RPoly r = a;
        for (auto& c : r) c = c * inv2;
        return r;
    }
};

}  // namespace

FpPoly fp_division_poly_hat(int64_t A, int64_t B, int64_t m, int64_t p) {
    FpOps op{A, B, p};
    return division_poly_hat_impl<FpPoly>(m, op);
}

FpPoly fp_division_poly_x(int64_t A, int64_t B, int64_t m, int64_t p) {
    FpPoly hat = fp_division_poly_hat(A, B, m, p);
    if (m % 2 == 1) return hat;
    FpOps op{A, B, p};
    return fp::mul(op.f(), hat, p);
}

RPoly rp_division_poly_hat(const WeierstrassCurve& E, int64_t m) {
    RpOps op{E, E.ctx};
    return division_poly_hat_impl<RPoly>(m, op);
}

RPoly rp_division_poly_x(const WeierstrassCurve& E, int64_t m) {
    RPoly hat = rp_division_poly_hat(E, m);
    if (m % 2 == 1) return hat;
    RpOps op{E, E.ctx};
    return rp::mul(op.f(), hat, E.ctx);
}

// ---------------------------------------------------------------------------
// Weil pairing via Miller's algorithm.
namespace {

// Evaluate the function of the line through T and U (tangent when T = U) at X,
// divided by the vertical through T + U. Both evaluated together to dodge
// intermediate infinities: returns (l(X), v(X)).
struct LinePair {
    RingElem l, v;
};

LinePair line_eval(const WeierstrassCurve& E, const EllPoint& T, const EllPoint& U,
                   const EllPoint& X) {
    const CtxPtr& ctx = E.ctx;
    check(!X.inf, "line_eval: evaluation point must be affine");
    if (T.inf && U.inf) return {RingElem::one(ctx), RingElem::one(ctx)};
    if (T.inf) return {X.x - U.x, RingElem::one(ctx)};
    if (U.inf) return {X.x - T.x, RingElem::one(ctx)};
    if (T.x == U.x && T.y == -U.y) {
        // Vertical line; the "sum" is O, no vertical correction.
        return {X.x - T.x, RingElem::one(ctx)};
    }
    RingElem lam = chord_slope(E, T, U);
    RingElem l = X.y - T.y - lam * (X.x - T.x);
    RingElem x3 = lam * lam - T.x - U.x;
    return {l, X.x - x3};
}

// Miller function f_{n,P} evaluated at the single affine point X. Valid when
// X avoids the support of every intermediate line, which holds whenever X is
// not in the cyclic group generated by P.
RingElem miller(const WeierstrassCurve& E, const EllPoint& P, int64_t n, const EllPoint& X) {
    check(!P.inf && n >= 1, "miller: nonzero P and positive n required");
    RingElem num = RingElem::one(E.ctx), den = RingElem::one(E.ctx);
    EllPoint T = P;
    int bits = 0;
    while ((n >> bits) > 1) ++bits;
    for (int i = bits - 1; i >= 0; --i) {
        LinePair a = line_eval(E, T, T, X);
        num = num * num * a.l;
        den = den * den * a.v;
        T = ell_add(E, T, T);
        if ((n >> i) & 1) {
            LinePair b = line_eval(E, T, P, X);
            num = num * b.l;
            den = den * b.v;
            T = ell_add(E, T, P);
        }
    }
    if (!num.is_unit() || !den.is_unit())
        throw NonUnitDenominator("miller: support collision");
    return num * den.inverse();
}

// Is Q a multiple of P? Both points N-torsion over a field; linear scan.
bool in_cyclic_span(const WeierstrassCurve& E, const EllPoint& P, const EllPoint& Q, int64_t N) {
    EllPoint T = EllPoint::infinity();
    for (int64_t k = 0; k < N; ++k) {
        if (T == Q) return true;
        T = ell_add(E, T, P);
    }
    return false;
}

}  // namespace

bool weil_orientation_inverted() { return true; }

RingElem weil_pairing(const WeierstrassCurve& E, const EllPoint& P, const EllPoint& Q, int64_t N) {
    if (!ell_mul(E, N, P).inf || !ell_mul(E, N, Q).inf) throw NotTorsion();
    const CtxPtr& ctx = E.ctx;
    CtxPtr f1 = ctx->view(1);
    WeierstrassCurve Ebar = E.reduce(f1);
    EllPoint Pb = ell_reduce(P, f1), Qb = ell_reduce(Q, f1);
    RingElem zbar = RingElem::one(f1);
    if (!Pb.inf && !Qb.inf && !in_cyclic_span(Ebar, Pb, Qb, N) &&
        !in_cyclic_span(Ebar, Qb, Pb, N)) {
        // e_N(P,Q) = (-1)^N f_{N,P}(Q) / f_{N,Q}(P); no collision is possible
        // once mutual cyclic dependence is excluded.
        RingElem val = miller(Ebar, Pb, N, Qb) * miller(Ebar, Qb, N, Pb).inverse();
        if (N % 2 == 1) val = -val;
        zbar = weil_orientation_inverted() ? val.inverse() : val;
    }
    if (ctx->e == 1) return zbar;
    RPoly xn1 = rp::from_z(zp::x_pow_minus_1(N), ctx);
    return hensel_lift_root(xn1, zbar.lift_naive(ctx));
}

EllPoint frobenius_point(const EllPoint& P) {
    if (P.inf) return P;
    return EllPoint(frobenius(P.x), frobenius(P.y));
}

}  // namespace galrep
