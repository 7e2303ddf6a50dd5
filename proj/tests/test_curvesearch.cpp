#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "galrep/curvesearch.hpp"
#include "galrep/eisenstein.hpp"

using namespace galrep;

namespace {

// Is (A, B) accepted by the battery? Exposed through find_curve with a budget
// of 1 by planting the pair via a crafted scan: we instead call the battery
// indirectly: a seed whose first draw is (A, B) is not available, so test the
// published fixtures by checking that a seeded search returns a pair that
// passes its own postconditions, and that the paper's pairs pass.
bool pair_accepted(int64_t N, int64_t p, int a, int64_t A, int64_t B) {
    // reproduce find_curve's acceptance for one specific pair by scanning
    // seeds until the draw matches would be wasteful; instead replicate the
    // postcondition through torsion_basis construction on a tiny context.
    CurveCandidate cand;
    cand.A = A;
    cand.B = B;
    cand.p = p;
    cand.N = N;
    cand.a = a;
    try {
        cand.a_p = count_points_fp(A, B, p);
    } catch (const SingularCurve&) {
        return false;
    }
    cand.delta = cand.a_p * cand.a_p - 4 * p;
    // full N-torsion over F_q iff N^2 | #E(F_q) and the N-division polynomial
    // splits with square rhs everywhere; torsion_basis checks this by building
    // the basis and checking exact orders.
    try {
        auto ctx = PAdicContext::make(p, a, 1);
        TorsionBasisData tb = torsion_basis(cand, N, ctx, 7);
        (void)tb;
        return true;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace

TEST_CASE("paper fixture curves pass and torsion bases verify") {
    // (N=16, p=43, a=4): y^2 = x^3 + 38x + 4
    CHECK(pair_accepted(16, 43, 4, 38, 4));
    // (N=13, p=73, a=4): y^2 = x^3 + 6x + 28
    CHECK(pair_accepted(13, 73, 4, 6, 28));
}

TEST_CASE("seeded search finds a valid curve for (16, 43, 4)") {
    CurveCandidate cand = find_curve(16, 43, 4, 1);
    CHECK(cand.A > 0);
    CHECK(cand.B > 0);
    // postconditions: N^2 | #E(F_q)
    mpz_class q = pow_mpz(mpz_class(43), 4);
    mpz_class count = q + 1 - newton_sum(cand.a_p, 43, 4);
    CHECK(mod_mpz(count, 256) == 0);
    // determinism
    CurveCandidate cand2 = find_curve(16, 43, 4, 1);
    CHECK(cand.A == cand2.A);
    CHECK(cand.B == cand2.B);
}

TEST_CASE("negative fixture: no curve over F_13 with full 4-torsion and j not 0/1728") {
    // 13 = 1 mod 4 and 13 >= (4-1)^2, yet no admissible curve exists; the
    // budget far exceeds the 144 possible (A, B) pairs.
    CHECK_THROWS_AS(find_curve(4, 13, 1, 5, 3000), NoCurveFound);
}

TEST_CASE("torsion basis invariants for the level-16 fixture") {
    auto ctx = PAdicContext::make(43, 4, 3);
    CurveCandidate cand;
    cand.A = 38;
    cand.B = 4;
    cand.p = 43;
    cand.N = 16;
    cand.a = 4;
    cand.a_p = count_points_fp(38, 4, 43);
    cand.delta = cand.a_p * cand.a_p - 4 * 43;
    TorsionBasisData tb = torsion_basis(cand, 16, ctx, 5);

    // det Mp = p, trace Mp = a_p mod N (also asserted internally)
    int64_t det = mod_i64(tb.Mp[0][0] * tb.Mp[1][1] - tb.Mp[0][1] * tb.Mp[1][0], 16);
    CHECK(det == mod_i64(43, 16));
    CHECK(mod_i64(tb.Mp[0][0] + tb.Mp[1][1], 16) == mod_i64(tb.a_p, 16));

    // curve equation holds at full accuracy and [N]P = O
    CHECK(on_curve(tb.E, tb.P));
    CHECK(on_curve(tb.E, tb.Q));
    CHECK(ell_mul(tb.E, 16, tb.P).inf);
    CHECK(!ell_mul(tb.E, 8, tb.P).inf);
    CHECK(ell_mul(tb.E, 16, tb.Q).inf);

    // z is a primitive 16th root of unity at full accuracy
    CHECK(tb.z.pow(16) == RingElem::one(ctx));
    CHECK(tb.z.pow(8) != RingElem::one(ctx));

    // Frobenius-matrix correctness end to end: Frob(beta(v)) = beta(Mp v)
    LevelStructure ls = LevelStructure::build(tb, 16);
    Rng rng(11);
    for (int it = 0; it < 20; ++it) {
        int64_t c = rng.below(uint64_t(16)), d = rng.below(uint64_t(16));
        if (c == 0 && d == 0) continue;
        EllPoint lhs = frobenius_point(ls.beta_at(c, d));
        int64_t c2 = mod_i64(tb.Mp[0][0] * c + tb.Mp[0][1] * d, 16);
        int64_t d2 = mod_i64(tb.Mp[1][0] * c + tb.Mp[1][1] * d, 16);
        CHECK(lhs == ls.beta_at(c2, d2));
    }

    // beta is a group morphism (spot check)
    for (int it = 0; it < 10; ++it) {
        int64_t c1 = rng.below(uint64_t(16)), d1 = rng.below(uint64_t(16));
        int64_t c2 = rng.below(uint64_t(16)), d2 = rng.below(uint64_t(16));
        EllPoint lhs = ell_add(ls.E, ls.beta_at(c1, d1), ls.beta_at(c2, d2));
        CHECK(lhs == ls.beta_at(c1 + c2, d1 + d2));
    }
}

TEST_CASE("torsion basis for the level-13 fixture at accuracy 4") {
    auto ctx = PAdicContext::make(73, 4, 4);
    CurveCandidate cand;
    cand.A = 6;
    cand.B = 28;
    cand.p = 73;
    cand.N = 13;
    cand.a = 4;
    cand.a_p = count_points_fp(6, 28, 73);
    cand.delta = cand.a_p * cand.a_p - 4 * 73;
    TorsionBasisData tb = torsion_basis(cand, 13, ctx, 5);
    CHECK(ell_mul(tb.E, 13, tb.P).inf);
    CHECK(!ell_mul(tb.E, 1, tb.P).inf);
    CHECK(tb.z.pow(13) == RingElem::one(ctx));
    CHECK(tb.z != RingElem::one(ctx));
    int64_t det = mod_i64(tb.Mp[0][0] * tb.Mp[1][1] - tb.Mp[0][1] * tb.Mp[1][0], 13);
    CHECK(det == mod_i64(73, 13));
}
