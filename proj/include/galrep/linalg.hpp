#pragma once

#include <optional>
#include <vector>

#include "galrep/padic.hpp"

namespace galrep {

// Dense matrix over Z_q/p^e.
struct RMat {
    int nr = 0, nc = 0;
    CtxPtr ctx;
    std::vector<RingElem> a;

    RMat() = default;
    RMat(CtxPtr c, int r, int ncols) : nr(r), nc(ncols), ctx(std::move(c)) {
        a.assign(static_cast<size_t>(nr) * nc, RingElem::zero(ctx));
    }
    RingElem& at(int i, int j) { return a[static_cast<size_t>(i) * nc + j]; }
    const RingElem& at(int i, int j) const { return a[static_cast<size_t>(i) * nc + j]; }

    static RMat identity(const CtxPtr& c, int n) {
        RMat m(c, n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = RingElem::one(c);
        return m;
    }
    RMat transpose() const {
        RMat t(ctx, nc, nr);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j) t.at(j, i) = at(i, j);
        return t;
    }
    RMat mul(const RMat& o) const {
        check(nc == o.nr, "RMat::mul shape");
        RMat r(ctx, nr, o.nc);
        for (int i = 0; i < nr; ++i)
            for (int k = 0; k < nc; ++k) {
                const RingElem& x = at(i, k);
                if (x.is_zero()) continue;
                for (int j = 0; j < o.nc; ++j) r.at(i, j) += x * o.at(k, j);
            }
        return r;
    }
    std::vector<RingElem> mul_vec(const std::vector<RingElem>& v) const {
        check(static_cast<int>(v.size()) == nc, "RMat::mul_vec shape");
        std::vector<RingElem> r(nr, RingElem::zero(ctx));
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j)
                if (!at(i, j).is_zero() && !v[j].is_zero()) r[i] += at(i, j) * v[j];
        return r;
    }
    RMat reduce(const CtxPtr& target) const {
        RMat r(target, nr, nc);
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i].reduce(target);
        return r;
    }
    RMat lift_naive(const CtxPtr& target) const {
        RMat r(target, nr, nc);
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i].lift_naive(target);
        return r;
    }
    bool operator==(const RMat& o) const { return nr == o.nr && nc == o.nc && a == o.a; }
};

struct Echelon {
    RMat rref;
    std::vector<int> pivot_cols;  // in elimination order; sorted ascending after the run
    int rank = 0;
};

// Row reduction over the local ring selecting only unit pivots. Throws
// PrecisionLoss when the unreduced block is nonzero but has no unit entry.
Echelon echelon_local(const RMat& m);
std::optional<Echelon> echelon_local_try(const RMat& m);

// Kernel basis {x : M x = 0} as columns; reduces mod p to a kernel basis mod p.
RMat kernel_basis(const RMat& m);
std::optional<RMat> kernel_basis_try(const RMat& m);

// Echelonized basis of the column span.
struct ColSpan {
    RMat basis;                  // n x rank, basis.at(pivot_rows[k], j) = delta_kj
    std::vector<int> pivot_rows;
};
ColSpan col_span(const RMat& m);

// Coordinates of v in the span (reads off pivot rows); nullopt if v is not in
// the span at full accuracy.
std::optional<std::vector<RingElem>> coords_in_span(const ColSpan& s, const std::vector<RingElem>& v);

// Rows y with y^T basis = 0; returns (n - rank) x n matrix.
RMat annihilator(const ColSpan& s);

// Particular solution of A x = b (free variables set to 0); nullopt when the
// system is inconsistent at full accuracy.
std::optional<std::vector<RingElem>> solve_linear(const RMat& A, const std::vector<RingElem>& b);

}  // namespace galrep
