#include "galrep/linalg.hpp"

#include <algorithm>

namespace galrep {

std::optional<Echelon> echelon_local_try(const RMat& m) {
    Echelon ech;
    ech.rref = m;
    RMat& r = ech.rref;
    std::vector<bool> col_used(m.nc, false);
    int row = 0;
    while (row < m.nr) {
        // Unit pivot search: leftmost unused column first, then top-most row.
        int pi = -1, pj = -1;
        for (int j = 0; j < m.nc && pi < 0; ++j) {
            if (col_used[j]) continue;
            for (int i = row; i < m.nr; ++i) {
                if (r.at(i, j).is_unit()) { pi = i; pj = j; break; }
            }
        }
        if (pi < 0) {
            // No unit entry left: the remaining block must vanish.
            for (int j = 0; j < m.nc; ++j) {
                if (col_used[j]) continue;
                for (int i = row; i < m.nr; ++i)
                    if (!r.at(i, j).is_zero()) return std::nullopt;
            }
            break;
        }
        if (pi != row)
            for (int j = 0; j < m.nc; ++j) std::swap(r.at(pi, j), r.at(row, j));
        RingElem inv = r.at(row, pj).inverse();
        for (int j = 0; j < m.nc; ++j)
            if (!r.at(row, j).is_zero()) r.at(row, j) = r.at(row, j) * inv;
        for (int i = 0; i < m.nr; ++i) {
            if (i == row) continue;
            RingElem f = r.at(i, pj);
            if (f.is_zero()) continue;
            for (int j = 0; j < m.nc; ++j)
                if (!r.at(row, j).is_zero()) r.at(i, j) -= f * r.at(row, j);
        }
        col_used[pj] = true;
        ech.pivot_cols.push_back(pj);
        ++row;
    }
    ech.rank = static_cast<int>(ech.pivot_cols.size());
    // Rows are reordered so pivots appear in ascending column order.
    std::vector<int> order(ech.rank);
    for (int i = 0; i < ech.rank; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return ech.pivot_cols[x] < ech.pivot_cols[y]; });
    RMat sorted(m.ctx, m.nr, m.nc);
    std::vector<int> spc(ech.rank);
    for (int i = 0; i < ech.rank; ++i) {
        spc[i] = ech.pivot_cols[order[i]];
        for (int j = 0; j < m.nc; ++j) sorted.at(i, j) = ech.rref.at(order[i], j);
    }
    ech.rref = std::move(sorted);
    ech.pivot_cols = std::move(spc);
    return ech;
}

Echelon echelon_local(const RMat& m) {
    auto e = echelon_local_try(m);
    if (!e) throw PrecisionLoss("echelon_local: nonzero block without unit pivot");
    return *e;
}

static RMat kernel_from_echelon(const Echelon& ech, const RMat& m) {
    std::vector<bool> is_pivot(m.nc, false);
    for (int c : ech.pivot_cols) is_pivot[c] = true;
    int dim = m.nc - ech.rank;
    RMat k(m.ctx, m.nc, dim);
    int col = 0;
    for (int j = 0; j < m.nc; ++j) {
        if (is_pivot[j]) continue;
        k.at(j, col) = RingElem::one(m.ctx);
        for (int r = 0; r < ech.rank; ++r)
            k.at(ech.pivot_cols[r], col) = -ech.rref.at(r, j);
        ++col;
    }
    return k;
}

RMat kernel_basis(const RMat& m) {
    Echelon ech = echelon_local(m);
    return kernel_from_echelon(ech, m);
}

std::optional<RMat> kernel_basis_try(const RMat& m) {
    auto ech = echelon_local_try(m);
    if (!ech) return std::nullopt;
    return kernel_from_echelon(*ech, m);
}

ColSpan col_span(const RMat& m) {
    Echelon ech = echelon_local(m.transpose());
    ColSpan s;
    s.pivot_rows = ech.pivot_cols;
    s.basis = RMat(m.ctx, m.nr, ech.rank);
    for (int k = 0; k < ech.rank; ++k)
        for (int i = 0; i < m.nr; ++i) s.basis.at(i, k) = ech.rref.at(k, i);
    return s;
}

std::optional<std::vector<RingElem>> coords_in_span(const ColSpan& s, const std::vector<RingElem>& v) {
    int rank = s.basis.nc;
    std::vector<RingElem> c;
    c.reserve(rank);
    for (int k = 0; k < rank; ++k) c.push_back(v[s.pivot_rows[k]]);
    std::vector<RingElem> w = s.basis.mul_vec(c);
    for (int i = 0; i < s.basis.nr; ++i)
        if (w[i] != v[i]) return std::nullopt;
    return c;
}

std::optional<std::vector<RingElem>> solve_linear(const RMat& A, const std::vector<RingElem>& b) {
    check(static_cast<int>(b.size()) == A.nr, "solve_linear: shape mismatch");
    RMat aug(A.ctx, A.nr, A.nc + 1);
    for (int i = 0; i < A.nr; ++i) {
        for (int j = 0; j < A.nc; ++j) aug.at(i, j) = A.at(i, j);
        aug.at(i, A.nc) = b[i];
    }
    auto ech = echelon_local_try(aug);
    if (!ech) return std::nullopt;
    std::vector<RingElem> x(A.nc, RingElem::zero(A.ctx));
    for (int r = 0; r < ech->rank; ++r) {
        if (ech->pivot_cols[r] == A.nc) return std::nullopt;  // pivot in b: inconsistent
        x[ech->pivot_cols[r]] = ech->rref.at(r, A.nc);
    }
    return x;
}

RMat annihilator(const ColSpan& s) {
    int n = s.basis.nr, rank = s.basis.nc;
    std::vector<bool> is_pivot(n, false);
    for (int r : s.pivot_rows) is_pivot[r] = true;
    RMat ann(s.basis.ctx, n - rank, n);
    int row = 0;
    for (int i = 0; i < n; ++i) {
        if (is_pivot[i]) continue;
        ann.at(row, i) = RingElem::one(s.basis.ctx);
        for (int k = 0; k < rank; ++k) ann.at(row, s.pivot_rows[k]) = -s.basis.at(i, k);
        ++row;
    }
    return ann;
}

}  // namespace galrep
