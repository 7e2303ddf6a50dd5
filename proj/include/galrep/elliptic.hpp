#pragma once

#include <cstdint>
#include <vector>

#include "galrep/fppoly.hpp"
#include "galrep/poly.hpp"

namespace galrep {

// Short Weierstrass curve y^2 = x^3 + A x + B over Z_q/p^e (or F_q when e=1).
struct WeierstrassCurve {
    CtxPtr ctx;
    RingElem A, B;

    WeierstrassCurve() = default;
    WeierstrassCurve(CtxPtr c, RingElem a, RingElem b) : ctx(std::move(c)), A(std::move(a)), B(std::move(b)) {
        RingElem disc = (A * A * A).mul_int(4) + (B * B).mul_int(27);
        if (!disc.is_unit()) throw SingularCurve();
    }
    static WeierstrassCurve from_int(const CtxPtr& c, const mpz_class& a, const mpz_class& b) {
        return WeierstrassCurve(c, RingElem::from_int(c, a), RingElem::from_int(c, b));
    }
    WeierstrassCurve reduce(const CtxPtr& target) const {
        return WeierstrassCurve(target, A.reduce(target), B.reduce(target));
    }
    // x^3 + A x + B
    RingElem rhs(const RingElem& x) const { return x * x * x + A * x + B; }
};

struct EllPoint {
    bool inf = true;
    RingElem x, y;
    EllPoint() = default;
    EllPoint(RingElem px, RingElem py) : inf(false), x(std::move(px)), y(std::move(py)) {}
    static EllPoint infinity() { return EllPoint(); }
    bool operator==(const EllPoint& o) const {
        if (inf || o.inf) return inf == o.inf;
        return x == o.x && y == o.y;
    }
    bool operator!=(const EllPoint& o) const { return !(*this == o); }
};

bool on_curve(const WeierstrassCurve& E, const EllPoint& P);
EllPoint ell_neg(const WeierstrassCurve& E, const EllPoint& P);
// Chord-tangent addition; throws NonUnitDenominator when the required slope
// denominator is not a unit.
EllPoint ell_add(const WeierstrassCurve& E, const EllPoint& P, const EllPoint& Q);
EllPoint ell_mul(const WeierstrassCurve& E, mpz_class n, const EllPoint& P);
EllPoint ell_reduce(const EllPoint& P, const CtxPtr& target);

// Slope of the line through P and Q (tangent when P = Q). Requires the
// denominator to be a unit; this is the quantity the Eisenstein module reads.
RingElem chord_slope(const WeierstrassCurve& E, const EllPoint& P, const EllPoint& Q);

// a_p = p + 1 - #E(F_p) by an x-sweep with a quadratic-residue table; p <= ~10^4.
int64_t count_points_fp(int64_t A, int64_t B, int64_t p);

// nu_0 = 2, nu_1 = a_p, nu_{i+1} = a_p nu_i - p nu_{i-1}.
mpz_class newton_sum(int64_t a_p, int64_t p, int a);

// Univariate division polynomial data: psi_m = y^(m odd ? 0 : 1) * poly(x).
// fp_division_poly_x returns, for the given m, the polynomial in x whose roots
// are the x-coordinates of the nonzero m-torsion (the 2-torsion cubic factor
// included for even m).
FpPoly fp_division_poly_hat(int64_t A, int64_t B, int64_t m, int64_t p);
FpPoly fp_division_poly_x(int64_t A, int64_t B, int64_t m, int64_t p);
RPoly rp_division_poly_hat(const WeierstrassCurve& E, int64_t m);
RPoly rp_division_poly_x(const WeierstrassCurve& E, int64_t m);

// Weil pairing e_N(P, Q), normalized as in the convention fixed by this
// artifact (see weil_orientation below). Computed by Miller's algorithm in
// the residue field; for e > 1 the value is lifted as a root of x^N - 1.
RingElem weil_pairing(const WeierstrassCurve& E, const EllPoint& P, const EllPoint& Q, int64_t N);

// Operational orientation switch: when true, weil_pairing returns the inverse
// of the plain (-1)^N f_P(Q)/f_Q(P) Miller value. Pinned by the end-to-end
// fixture checks.
bool weil_orientation_inverted();

// Coordinate-wise ring Frobenius (curve must have Frobenius-stable A, B).
EllPoint frobenius_point(const EllPoint& P);

}  // namespace galrep
