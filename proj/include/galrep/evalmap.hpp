#pragma once

#include "galrep/jacobian.hpp"

namespace galrep {

// Effective cusp-supported divisor of degree d0 - g = g + 1, Galois-stable.
struct EvalDivisor {
    std::vector<std::pair<CuspLabel, int>> support;  // (cusp, multiplicity)
    int64_t degree() const {
        int64_t s = 0;
        for (auto& [c, m] : support) s += m;
        return s;
    }
};

// One coefficient-ratio evaluation map: read a_{n1}(u | M1) / a_{n2}(u | M2)
// with u = s1/s2 and n_i in q_w-units at the cusp M_i * infinity.
struct EvalMapSpec {
    CuspLabel cusp1, cusp2;
    SL2Rep M1, M2;
    int64_t n1 = 0, n2 = 0;
};

struct DivisorData {
    EvalDivisor E1, E2;
    std::vector<EvalMapSpec> specs;
};

// Choose E1, E2 (Galois-stable, distinct supports, degree g+1) and enumerate
// candidate specs over the rational-q-expansion matrices and indices <= 5.
DivisorData build_divisors(const MakdisiModel& m);

// Per-model evaluation engine with cached embedded expansions.
class Evaluator {
public:
    Evaluator(const MakdisiModel& m, int e);

    const MakdisiModel& model() const { return *m_; }
    int accuracy() const { return e_; }

    // Raw-product coordinates of a value vector in V2 (any solution; all give
    // the same section).
    std::vector<RingElem> raw_coords(const std::vector<RingElem>& values) const;

    // The 1-dimensional space of sections of L^2 vanishing on the divisor of
    // x and on E; returns raw-product coordinates of a spanning section.
    std::vector<RingElem> section_through(const JacPoint& x, const EvalDivisor& E) const;

    // Embedded q_N-expansion of the section with given raw coordinates at the
    // cusp matrix M, to q_N-precision prec.
    std::vector<RingElem> section_expansion(const std::vector<RingElem>& raw, const SL2Rep& M,
                                            int64_t prec) const;

    // alpha(x) = a_{n1}(u|M1) / a_{n2}(u|M2), u = s1/s2.
    RingElem alpha(const JacPoint& x, const EvalMapSpec& spec, const EvalDivisor& E1,
                   const EvalDivisor& E2) const;

    // Jacobian point representing the class of E + (g extra fibre points),
    // used to certify E1 not ~ E2 with a shared tail.
    JacPoint cusp_divisor_point(const EvalDivisor& E, const std::vector<int>& tail_fibre) const;

    // Optional strategy: coordinate ratio of x's section in a Galois-averaged
    // rational basis of the section space (requires p not dividing phi(N)).
    RingElem alpha_rational_forms(const JacPoint& x, const EvalDivisor& E1, int i1, int i2) const;

    // Condition rows on raw coordinates imposing vanishing of order >= mult
    // at the cusp (beyond the forced vanishing at non-retained cusps).
    RMat divisor_conditions(const EvalDivisor& E) const;

private:
    const MakdisiModel* m_;
    int e_;
    CtxPtr ctx_;
    bool is_retained(const CuspLabel& s) const;
    // cached embedded expansions of every raw V2 product at a cusp matrix
    struct ExpCache {
        int64_t prec = 0;
        std::vector<std::vector<RingElem>> raw;  // per raw pair: dense q_N coefficients
    };
    mutable std::map<std::array<int64_t, 4>, ExpCache> exp_cache_;
    mutable std::mutex mu_;
    const ExpCache& expansions(const SL2Rep& M, int64_t prec) const;
};

}  // namespace galrep
