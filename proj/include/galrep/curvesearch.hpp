#pragma once

#include <array>
#include <cstdint>

#include "galrep/elliptic.hpp"
#include "galrep/rng.hpp"

namespace galrep {

// A Weierstrass pair that passed the point-counting battery for (N, p, a).
struct CurveCandidate {
    int64_t A = 0, B = 0;  // integers in (0, p)
    int64_t p = 0;
    int64_t N = 0;
    int a = 0;
    int64_t a_p = 0;
    int64_t delta = 0;  // a_p^2 - 4p
};

// Search for a curve with full N-torsion over F_{p^a} and j not in {0, 1728}
// mod p. Deterministic given (N, p, a, seed). Throws NoCurveFound when the
// budget (default 10p draws) is exhausted.
CurveCandidate find_curve(int64_t N, int64_t p, int a, uint64_t seed, int64_t budget = 0);

struct TorsionBasisData {
    WeierstrassCurve E;  // over Z_q/p^e
    EllPoint P, Q;       // basis of E[N]
    std::array<std::array<int64_t, 2>, 2> Mp{{{1, 0}, {0, 1}}};  // Frobenius matrix mod N
    RingElem z;          // e_N(P, Q), primitive N-th root of unity
    int64_t a_p = 0;
};

// Build the N-torsion basis over Z_q/p^e prime power by prime power, with the
// Frobenius matrix assembled by Chinese remainders and z = prod z_k^{N_k}.
TorsionBasisData torsion_basis(const CurveCandidate& cand, int64_t N, const CtxPtr& ctx,
                               uint64_t seed);

}  // namespace galrep
