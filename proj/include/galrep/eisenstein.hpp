#pragma once

#include <cstdint>
#include <vector>

#include "galrep/curvesearch.hpp"
#include "galrep/cyclotomic.hpp"
#include "galrep/modcurve.hpp"

namespace galrep {

// A short Weierstrass curve over Z_q/p^e together with a basis (P, Q) of
// E[N], the full torsion table beta(v), z = e_N(P, Q) and the Frobenius
// matrix mod N.
struct LevelStructure {
    int64_t N = 0;
    WeierstrassCurve E;
    EllPoint P, Q;
    std::array<std::array<int64_t, 2>, 2> Mp{{{1, 0}, {0, 1}}};
    RingElem z;
    int64_t a_p = 0;
    std::vector<EllPoint> beta;  // beta[c * N + d] = [c]P + [d]Q

    static LevelStructure build(const TorsionBasisData& tb, int64_t N);
    const EllPoint& beta_at(int64_t c, int64_t d) const {
        return beta[static_cast<size_t>(mod_i64(c, N)) * N + mod_i64(d, N)];
    }
    const CtxPtr& ctx() const { return E.ctx; }
    LevelStructure reduce(const CtxPtr& target) const;
};

// Values f_1^v(W, beta) for all nonzero v, solved from chord/tangent slopes.
struct EisTable {
    int64_t N = 0;
    CtxPtr ctx;
    std::vector<RingElem> val;  // index c * N + d; the v = 0 slot stays zero
    const RingElem& at(int64_t c, int64_t d) const {
        return val[static_cast<size_t>(mod_i64(c, N)) * N + mod_i64(d, N)];
    }
};

// Build the table by solving the slope relations along two generator lines
// and translating; `line_param` picks the first line <(1, k)>, so different
// parameters give independent computations of the same table.
EisTable eval_f1_table(const LevelStructure& ls, int64_t line_param = 0);

// f_2^{v,w} = sum over Gamma_H(N)/Gamma(N) of f_1^{v gamma} f_1^{w gamma}.
RingElem eval_f2_trace(const EisTable& table, const CongruenceData& cd, int64_t vc, int64_t vd,
                       int64_t wc, int64_t wd);

// Exact q_N-expansion over Q(zeta_N): coefficients for exponents in
// [lead, prec).
struct QExp {
    CycFieldPtr F;
    int64_t lead = 0;
    int64_t prec = 0;
    std::vector<CycNum> a;  // a[i] is the coefficient of q_N^(lead + i)

    CycNum coeff(int64_t n) const {
        if (n < lead || n >= prec) return CycNum::zero(F);
        return a[static_cast<size_t>(n - lead)];
    }
    void trim();
};

QExp qexp_zero(const CycFieldPtr& F, int64_t prec);
QExp qexp_add(const QExp& f, const QExp& g);
QExp qexp_scale(const QExp& f, const CycNum& c);
QExp qexp_mul(const QExp& f, const QExp& g);
// Laurent division; the lowest coefficient of g must be nonzero.
QExp qexp_div(const QExp& f, const QExp& g, int64_t want_prec);

// Expansion of f_1^{(c,d)} to q_N-precision prec (coefficients 0..prec-1),
// with the global constant set to 1.
QExp qexp_f1(int64_t N, int64_t c, int64_t d, int64_t prec);
// Constant term of f_1^{(c,d)} alone.
CycNum qexp_f1_a0(const CycFieldPtr& F, int64_t c, int64_t d);

// Expansion at infinity of (sum_i weight_i f_1^{v_i} f_1^{w_i}) | M.
struct WeightedPair {
    std::array<int64_t, 2> v, w;
    mpq_class weight = 1;
};
QExp qexp_slashed_product(int64_t N, const std::vector<WeightedPair>& pairs, const SL2Rep& M,
                          int64_t prec);
// Individual q_N-coefficients of the same sum, for scattered (large) indices.
std::vector<CycNum> qexp_slashed_coeffs(int64_t N, const std::vector<WeightedPair>& pairs,
                                        const SL2Rep& M, const std::vector<int64_t>& indices);

// The Gamma_H-trace orbit of (v, w): pairs (v gamma, w gamma).
std::vector<WeightedPair> trace_pairs(const CongruenceData& cd, std::array<int64_t, 2> v,
                                      std::array<int64_t, 2> w);
// Constant term of f_2^{v,w} | M (cheap, no series products).
CycNum trace_constant_at(const CongruenceData& cd, std::array<int64_t, 2> v,
                         std::array<int64_t, 2> w, const SL2Rep& M);

inline std::array<int64_t, 2> vec_times_sl2(std::array<int64_t, 2> v, const SL2Rep& M, int64_t N) {
    return {mod_i64(v[0] * M.m[0][0] + v[1] * M.m[1][0], N),
            mod_i64(v[0] * M.m[0][1] + v[1] * M.m[1][1], N)};
}

}  // namespace galrep
