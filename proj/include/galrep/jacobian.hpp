#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>

#include "galrep/hecke.hpp"
#include "galrep/linalg.hpp"

namespace galrep {

// Divisor class represented by the subspace of H^0(L^2) vanishing on an
// effective degree-d0 divisor, stored as its value matrix at the marked
// points (n_Z x (g+2), full column rank mod p).
struct JacPoint {
    RMat w;
    const CtxPtr& ctx() const { return w.ctx; }
};

// How a torsion point over F_q was produced; replayed at full accuracy by
// lift_torsion so every intermediate stays a genuine Jacobian point.
struct TorsionRecipe {
    uint64_t point_seed = 0;
    ZPoly pre_frobpoly;     // (x^a - 1)/Phi_d applied first (empty: none)
    mpz_class multiplier;   // M or M_d
    int ell_descents = 0;   // extra multiplications by ell
    ZPoly chi_cofactor;     // lift of (L_p / chi mod ell), centered coefficients
};

struct TorsionPoint {
    JacPoint pt;  // over F_q
    TorsionRecipe recipe;
};

enum class TorsionStrategy { Plain, Cyclotomic };

// p-adic Makdisi model of X_H(N) (Def. 1 data plus the q-expansion side).
class MakdisiModel {
public:
    CongruenceData cd;
    CtxPtr ctx;            // full accuracy
    LevelStructure ls;     // full accuracy
    EisTable table;        // f_1 values, full accuracy
    FormSpaceBasis forms;  // symbolic trace-form side
    LFactor L;
    int64_t g = 0, d0 = 0, d = 0, nZ = 0;
    std::vector<std::pair<int64_t, int64_t>> fibre;
    std::vector<int> marked;           // indices into fibre
    std::vector<int> perm;             // Frobenius permutation on marked slots
    std::vector<CuspLabel> retained;   // the three unpruned cusps
    CycMat pruned;                     // d2 x d: H^0(L) basis in trace coordinates
    RMat trace_values;                 // #fibre x d2, full accuracy
    RMat V;                            // n_Z x d, full accuracy

    long ops() const { return cache_->ops.load(std::memory_order_relaxed); }
    void reset_ops() const { cache_->ops.store(0, std::memory_order_relaxed); }

    // Cached per-accuracy data for the group operations.
    struct View {
        CtxPtr ctx;
        RMat v1;                                 // n_Z x d
        std::vector<std::pair<int, int>> v2pairs;  // index pairs of V1 columns
        RMat v2raw;                              // n_Z x #pairs products
        ColSpan v2;                              // echelonized basis of V2 values
        RMat v2ann;                              // (n_Z - dim V2) x n_Z
        ColSpan v3;
        RMat trace_values;                       // #fibre x d2 at this accuracy
    };
    const View& view(int e) const;

    JacPoint zero(int e) const;
    JacPoint addflip(const JacPoint& x, const JacPoint& y) const;
    JacPoint neg(const JacPoint& x) const;
    JacPoint add(const JacPoint& x, const JacPoint& y) const { return neg(addflip(x, y)); }
    JacPoint sub(const JacPoint& x, const JacPoint& y) const {
        return neg(addflip(x, neg(y)));
    }
    JacPoint mul(mpz_class n, const JacPoint& x) const;
    bool is_zero(const JacPoint& x) const;
    bool eq(const JacPoint& x, const JacPoint& y) const;
    JacPoint frob(const JacPoint& x) const;
    // f(Frob) applied to x by Horner in Frob.
    JacPoint frobpoly(const ZPoly& f, const JacPoint& x) const;
    JacPoint reduce_point(const JacPoint& x, int e) const;
    // Subspace of forms vanishing at d0 seeded random fibre points.
    JacPoint random_point(uint64_t seed, int e) const;

    // An F_ell-basis of T = J[ell][chi] over F_q; chi has coefficients mod ell.
    std::vector<TorsionPoint> torsion_gen(int64_t ell, const std::vector<int64_t>& chi,
                                          TorsionStrategy strategy, uint64_t seed) const;
    // Replay the recipe at accuracy e and correct to exact ell-torsion.
    JacPoint lift_torsion(const TorsionPoint& t, int64_t ell) const;

    // All t_v for v in F_ell^2 \ {0}, filled orbit-by-orbit under Frobenius;
    // index v = v1 * ell + v2, with jac_frob(t_v) = t_{Mfrob v} (column action).
    std::vector<JacPoint> span_torsion(const JacPoint& t1, const JacPoint& t2, int64_t ell,
                                       const std::array<std::array<int64_t, 2>, 2>& Mfrob) const;

    // Matrix of Frobenius on the span of (t1, t2) over F_q, column convention:
    // coords(Frob t) = M coords(t).
    std::array<std::array<int64_t, 2>, 2> frobenius_on_basis(const JacPoint& t1,
                                                             const JacPoint& t2,
                                                             int64_t ell) const;

    // Values of the V1 basis at an arbitrary fibre point (by table lookup).
    std::vector<RingElem> v1_values_at(const std::pair<int64_t, int64_t>& pt, int e) const;

private:
    struct Cache {
        std::mutex mu;
        std::map<int, std::shared_ptr<View>> views;
        std::atomic<long> ops{0};
    };
    mutable std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
    JacPoint flip(const JacPoint& x, const View& vw) const;
    RingElem table_at_view(int64_t c, int64_t dd, const View& vw) const;
};

// Assemble the model: pruned section space, marked Frobenius orbits, V.
// ell = 0 skips the p | ell precondition check.
MakdisiModel build_model(const CongruenceData& cd, const LevelStructure& ls,
                         const FormSpaceBasis& forms, const LFactor& L, int64_t ell = 0);

// Versioned cache: serialize/restore bit-exactly.
void model_save(const MakdisiModel& m, const std::string& path);
MakdisiModel model_load(const std::string& path);

}  // namespace galrep
