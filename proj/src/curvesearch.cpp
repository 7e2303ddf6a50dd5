#include "galrep/curvesearch.hpp"

#include <algorithm>

#include "galrep/fppoly.hpp"

namespace galrep {

namespace {

bool passes_battery(int64_t N, int64_t p, int a, int64_t A, int64_t B) {
    int64_t ap;
    try {
        ap = count_points_fp(A, B, p);
    } catch (const SingularCurve&) {
        return false;
    }
    mpz_class q = pow_mpz(mpz_class(static_cast<long>(p)), a);
    mpz_class nu = newton_sum(ap, p, a);
    // (i) N^2 must divide #E(F_q)
    if (mod_mpz(q + 1 - nu, mpz_class(static_cast<long>(N)) * N) != 0) return false;

    int64_t delta = ap * ap - 4 * p;
    auto fac = factorize(N);
    // (ii) nu_a = 2 mod M1, M1 = prod of l | N coprime to delta
    int64_t M1 = 1;
    for (auto& [l, v] : fac)
        if (delta % l != 0) M1 *= l;
    if (M1 > 1 && mod_mpz(nu - 2, M1) != 0) return false;
    // (iii) for odd l dividing both N and delta: a_p^a = 2^a mod l
    for (auto& [l, v] : fac) {
        if (l == 2 || delta % l != 0) continue;
        if (pow_mod_i64(ap, a, l) != pow_mod_i64(2, a, l)) return false;
    }
    // (iv) division-polynomial confirmation for the unresolved prime powers:
    // l with v >= 2, and l | delta with v = 1 and l not dividing a.
    for (auto& [l, v] : fac) {
        bool skip = (delta % l != 0 && v == 1) || (delta % l == 0 && v == 1 && a % l == 0);
        if (skip) continue;
        int64_t lv = 1;
        for (int i = 0; i < v; ++i) lv *= l;
        FpPoly full = fp_division_poly_x(A, B, lv, p);
        for (auto& [dg, cnt] : fp::distinct_degree_profile(full, p)) {
            (void)cnt;
            if (a % dg != 0) return false;
        }
        if (lv != 2) {
            // every root with y != 0 must have x^3 + Ax + B square in F_q
            FpPoly g = fp_division_poly_hat(A, B, lv, p);
            FpPoly cubic{mod_i64(B, p), mod_i64(A, p), 0, 1};
            FpPoly s = fp::powmod(cubic, (q - 1) / 2, g, p);
            if (s != fp::cst(1, p)) return false;
        }
    }
    return true;
}

}  // namespace

CurveCandidate find_curve(int64_t N, int64_t p, int a, uint64_t seed, int64_t budget) {
    check(p > 3 && p % 3 != 0 && N % p != 0, "find_curve: p must not divide 6N");
    mpz_class q = pow_mpz(mpz_class(static_cast<long>(p)), a);
    check(mod_mpz(q - 1, N) == 0, "find_curve: p^a = 1 mod N required");
    check(q >= mpz_class(static_cast<long>(N - 1)) * (N - 1), "find_curve: Hasse bound violated");
    if (budget <= 0) budget = 10 * p;

    Rng rng(seed);
    for (int64_t tries = 0; tries < budget; ++tries) {
        int64_t A = 1 + static_cast<int64_t>(rng.below(static_cast<uint64_t>(p - 1)));
        int64_t B = 1 + static_cast<int64_t>(rng.below(static_cast<uint64_t>(p - 1)));
        if (!passes_battery(N, p, a, A, B)) continue;
        CurveCandidate cand;
        cand.A = A;
        cand.B = B;
        cand.p = p;
        cand.N = N;
        cand.a = a;
        cand.a_p = count_points_fp(A, B, p);
        cand.delta = cand.a_p * cand.a_p - 4 * p;
        return cand;
    }
    throw NoCurveFound("find_curve: budget exhausted for this (p, a)");
}

TorsionBasisData torsion_basis(const CurveCandidate& cand, int64_t N, const CtxPtr& ctx,
                               uint64_t seed) {
    check(cand.N == N && ctx->p == cand.p && ctx->a == cand.a, "torsion_basis: mismatched data");
    Rng rng(seed);
    CtxPtr f1 = ctx->view(1);
    WeierstrassCurve E = WeierstrassCurve::from_int(ctx, cand.A, cand.B);
    WeierstrassCurve Ebar = E.reduce(f1);

    auto fac = factorize(N);
    struct Block {
        int64_t lv;
        EllPoint P, Q;    // over Z_q/p^e
        EllPoint Pb, Qb;  // over F_q
        RingElem zbar;    // e_{l^v}(Pb, Qb)
        std::array<std::array<int64_t, 2>, 2> M;
    };
    std::vector<Block> blocks;

    for (auto& [l, v] : fac) {
        int64_t lv = 1;
        for (int i = 0; i < v; ++i) lv *= l;
        Block blk;
        blk.lv = lv;

        // Exact-order-l^v x-polynomial over Z_q/p^e and its reduction.
        RPoly h_e;
        if (l == 2 && v == 1) {
            h_e = RPoly{E.B, E.A, RingElem::zero(ctx), RingElem::one(ctx)};
        } else {
            h_e = rp::divexact(rp_division_poly_hat(E, lv), rp_division_poly_hat(E, lv / l), ctx);
        }
        RPoly h_bar = rp::reduce(h_e, f1);

        // Pick root pairs over F_q until the Weil pairing is primitive.
        std::vector<RingElem> roots = rp::some_roots_split_fq(h_bar, f1, rng, 8);
        check(roots.size() >= 2, "torsion_basis: not enough exact-order roots");
        bool found = false;
        for (size_t i = 0; i < roots.size() && !found; ++i)
            for (size_t j = 0; j < roots.size() && !found; ++j) {
                if (i == j) continue;
                EllPoint Pb, Qb;
                if (lv == 2) {
                    Pb = EllPoint(roots[i], RingElem::zero(f1));
                    Qb = EllPoint(roots[j], RingElem::zero(f1));
                } else {
                    Pb = EllPoint(roots[i], sqrt_unit(Ebar.rhs(roots[i]), rng));
                    Qb = EllPoint(roots[j], sqrt_unit(Ebar.rhs(roots[j]), rng));
                }
                RingElem zk = weil_pairing(Ebar, Pb, Qb, lv);
                if (zk.pow(lv / l) == RingElem::one(f1)) continue;  // not primitive
                blk.Pb = Pb;
                blk.Qb = Qb;
                blk.zbar = zk;
                found = true;
            }
        if (!found) throw PrimitivityExhausted();

        // Frobenius block by discrete logs in base zbar:
        // Frob P = alpha P + gamma Q gives e(Q, Frob P) = z^-alpha and
        // e(P, Frob P) = z^gamma; likewise for Frob Q.
        {
            EllPoint FP = frobenius_point(blk.Pb), FQ = frobenius_point(blk.Qb);
            auto lg = [&](const EllPoint& R, const EllPoint& S) {
                return dlog_prime_power(blk.zbar, weil_pairing(Ebar, R, S, lv), l, v).get_si();
            };
            blk.M[0][0] = mod_i64(-lg(blk.Qb, FP), lv);
            blk.M[0][1] = mod_i64(-lg(blk.Qb, FQ), lv);
            blk.M[1][0] = mod_i64(lg(blk.Pb, FP), lv);
            blk.M[1][1] = mod_i64(lg(blk.Pb, FQ), lv);
            int64_t det = mod_i64(blk.M[0][0] * blk.M[1][1] - blk.M[0][1] * blk.M[1][0], lv);
            check(det == mod_i64(cand.p, lv), "torsion_basis: det of Frobenius block != p");
            check(mod_i64(blk.M[0][0] + blk.M[1][1] - cand.a_p, lv) == 0,
                  "torsion_basis: trace of Frobenius block != a_p");
        }

        // Hensel lift x-coordinates, then y as the matching square root.
        auto lift_point = [&](const EllPoint& Pb) {
            RingElem x = hensel_lift_root(h_e, Pb.x.lift_naive(ctx));
            if (lv == 2) return EllPoint(x, RingElem::zero(ctx));
            RingElem y = sqrt_unit(E.rhs(x), rng);
            if (y.reduce(f1) != Pb.y) y = -y;
            check(y.reduce(f1) == Pb.y, "torsion_basis: y lift does not reduce correctly");
            return EllPoint(x, y);
        };
        blk.P = lift_point(blk.Pb);
        blk.Q = lift_point(blk.Qb);
        check(ell_mul(E, lv, blk.P).inf && ell_mul(E, lv, blk.Q).inf,
              "torsion_basis: lifted block points are not l^v-torsion");
        blocks.push_back(std::move(blk));
    }

    // Assemble P = sum P_k, Q = sum Q_k, M_p by Chinese remainders via the
    // idempotents i_k, and zbar = prod zbar_k^{N_k}.
    TorsionBasisData out;
    out.E = E;
    out.a_p = cand.a_p;
    EllPoint P = EllPoint::infinity(), Q = EllPoint::infinity();
    RingElem zbar = RingElem::one(f1);
    std::array<std::array<int64_t, 2>, 2> Mp{{{0, 0}, {0, 0}}};
    for (auto& blk : blocks) {
        P = ell_add(E, P, blk.P);
        Q = ell_add(E, Q, blk.Q);
        int64_t Nk = N / blk.lv;
        int64_t ik = mod_i64(Nk * inv_mod_i64(Nk, blk.lv), N);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) Mp[i][j] = mod_i64(Mp[i][j] + ik * blk.M[i][j], N);
        zbar = zbar * blk.zbar.pow(Nk);
    }
    out.P = P;
    out.Q = Q;
    out.Mp = Mp;
    {
        int64_t det = mod_i64(Mp[0][0] * Mp[1][1] - Mp[0][1] * Mp[1][0], N);
        check(det == mod_i64(cand.p, N), "torsion_basis: det Mp != p mod N");
        check(mod_i64(Mp[0][0] + Mp[1][1] - cand.a_p, N) == 0,
              "torsion_basis: trace Mp != a_p mod N");
    }
    // assembled product must agree with the direct pairing over F_q
    {
        EllPoint Pb = ell_reduce(P, f1), Qb = ell_reduce(Q, f1);
        RingElem direct = weil_pairing(Ebar, Pb, Qb, N);
        check(direct == zbar, "torsion_basis: assembled pairing != direct pairing");
        for (auto& [l, v] : fac) {
            (void)v;
            check(zbar.pow(N / l) != RingElem::one(f1), "torsion_basis: pairing not primitive");
        }
    }
    if (ctx->e == 1) {
        out.z = zbar;
    } else {
        RPoly xn1 = rp::from_z(zp::x_pow_minus_1(N), ctx);
        out.z = hensel_lift_root(xn1, zbar.lift_naive(ctx));
    }
    check(ell_mul(E, N, out.P).inf && ell_mul(E, N, out.Q).inf, "torsion_basis: [N]P != O");
    for (auto& [l, v] : fac) {
        (void)v;
        check(!ell_mul(E, N / l, out.P).inf, "torsion_basis: P has order < N");
        check(!ell_mul(E, N / l, out.Q).inf, "torsion_basis: Q has order < N");
    }
    return out;
}

}  // namespace galrep
