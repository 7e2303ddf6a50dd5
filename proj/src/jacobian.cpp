#include "galrep/jacobian.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace galrep {

namespace {

std::vector<RingElem> col_product(const RMat& m, int i, const RMat& n, int j) {
    std::vector<RingElem> r;
    r.reserve(static_cast<size_t>(m.nr));
    for (int row = 0; row < m.nr; ++row) r.push_back(m.at(row, i) * n.at(row, j));
    return r;
}

RMat from_columns(const CtxPtr& ctx, const std::vector<std::vector<RingElem>>& cols) {
    check(!cols.empty(), "from_columns: empty");
    RMat m(ctx, static_cast<int>(cols[0].size()), static_cast<int>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j)
        for (size_t i = 0; i < cols[j].size(); ++i)
            m.at(static_cast<int>(i), static_cast<int>(j)) = cols[j][i];
    return m;
}

// Stack over the columns w_i of W of ann * diag(w_i) * B.
RMat stacked_conditions(const RMat& ann, const RMat& W, const RMat& B) {
    RMat cond(B.ctx, ann.nr * W.nc, B.nc);
    for (int i = 0; i < W.nc; ++i) {
        RMat scaled(B.ctx, B.nr, B.nc);
        for (int r = 0; r < B.nr; ++r) {
            const RingElem& wr = W.at(r, i);
            if (wr.is_zero()) continue;
            for (int jj = 0; jj < B.nc; ++jj)
                if (!B.at(r, jj).is_zero()) scaled.at(r, jj) = wr * B.at(r, jj);
        }
        RMat block = ann.mul(scaled);
        for (int r = 0; r < ann.nr; ++r)
            for (int jj = 0; jj < cond.nc; ++jj) cond.at(ann.nr * i + r, jj) = block.at(r, jj);
    }
    return cond;
}

// Annihilator of the span of s (.) B where s is the column `col` of S.
RMat scaled_space_annihilator(const RMat& S, int col, const RMat& B, int expect_dim) {
    std::vector<std::vector<RingElem>> cols;
    for (int j = 0; j < B.nc; ++j) {
        std::vector<RingElem> c;
        c.reserve(static_cast<size_t>(B.nr));
        for (int r = 0; r < B.nr; ++r) c.push_back(S.at(r, col) * B.at(r, j));
        cols.push_back(std::move(c));
    }
    ColSpan span = col_span(from_columns(B.ctx, cols));
    check(span.basis.nc == expect_dim, "scaled space has unexpected dimension");
    return annihilator(span);
}

}  // namespace

const MakdisiModel::View& MakdisiModel::view(int e) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->views.find(e);
    if (it != cache_->views.end()) return *it->second;
    auto vw = std::make_shared<View>();
    vw->ctx = ctx->view(e);
    vw->v1 = V.reduce(vw->ctx);
    for (int i = 0; i < V.nc; ++i)
        for (int j = i; j < V.nc; ++j) vw->v2pairs.emplace_back(i, j);
    std::vector<std::vector<RingElem>> prods;
    for (auto& [i, j] : vw->v2pairs) prods.push_back(col_product(vw->v1, i, vw->v1, j));
    vw->v2raw = from_columns(vw->ctx, prods);
    vw->v2 = col_span(vw->v2raw);
    check(vw->v2.basis.nc == 3 * g + 3, "model view: dim V2 != 3g+3");
    vw->v2ann = annihilator(vw->v2);
    std::vector<std::vector<RingElem>> prods3;
    for (int i = 0; i < vw->v1.nc; ++i)
        for (int j = 0; j < vw->v2.basis.nc; ++j)
            prods3.push_back(col_product(vw->v1, i, vw->v2.basis, j));
    vw->v3 = col_span(from_columns(vw->ctx, prods3));
    check(vw->v3.basis.nc == 5 * g + 4, "model view: dim V3 != 5g+4");
    vw->trace_values = trace_values.reduce(vw->ctx);
    auto& slot = cache_->views[e];
    slot = vw;
    return *slot;
}

JacPoint MakdisiModel::zero(int e) const {
    const View& vw = view(e);
    std::vector<std::vector<RingElem>> cols;
    for (int j = 0; j < vw.v1.nc; ++j) cols.push_back(col_product(vw.v1, 0, vw.v1, j));
    return JacPoint{from_columns(vw.ctx, cols)};
}

JacPoint MakdisiModel::flip(const JacPoint& x, const View& vw) const {
    cache_->ops.fetch_add(1, std::memory_order_relaxed);
    RMat ann = scaled_space_annihilator(x.w, 0, vw.v2.basis, 3 * static_cast<int>(g) + 3);
    RMat cond = stacked_conditions(ann, x.w, vw.v2.basis);
    RMat ker = kernel_basis(cond);
    check(ker.nc == static_cast<int>(g) + 2, "flip: kernel dimension != g+2");
    return JacPoint{vw.v2.basis.mul(ker)};
}

JacPoint MakdisiModel::neg(const JacPoint& x) const { return flip(x, view(x.ctx()->e)); }

JacPoint MakdisiModel::addflip(const JacPoint& x, const JacPoint& y) const {
    cache_->ops.fetch_add(1, std::memory_order_relaxed);
    check(x.ctx()->e == y.ctx()->e, "addflip: accuracy mismatch");
    const View& vw = view(x.ctx()->e);
    const CtxPtr& c = vw.ctx;
    // Pi = W1 W2 = H^0(L^4 - D1 - D2)
    std::vector<std::vector<RingElem>> prods;
    for (int i = 0; i < x.w.nc; ++i)
        for (int j = 0; j < y.w.nc; ++j) prods.push_back(col_product(x.w, i, y.w, j));
    ColSpan Pi = col_span(from_columns(c, prods));
    check(Pi.basis.nc == 3 * g + 3, "addflip: product space has wrong dimension");
    RMat annPi = annihilator(Pi);
    // Pi' = {v in V3 : v V1 <= Pi} = H^0(L^3 - D1 - D2)
    RMat condPi = stacked_conditions(annPi, vw.v1, vw.v3.basis);
    RMat kerPi = kernel_basis(condPi);
    check(kerPi.nc == static_cast<int>(g) + 2, "addflip: H0(L^3 - D1 - D2) dimension != g+2");
    RMat PiPrime = vw.v3.basis.mul(kerPi);
    // s in Pi' has divisor D1 + D2 + E; result = {v in V2 : v Pi' <= s V2}
    RMat ann = scaled_space_annihilator(PiPrime, 0, vw.v2.basis, 3 * static_cast<int>(g) + 3);
    RMat cond = stacked_conditions(ann, PiPrime, vw.v2.basis);
    RMat ker = kernel_basis(cond);
    check(ker.nc == static_cast<int>(g) + 2, "addflip: result dimension != g+2");
    return JacPoint{vw.v2.basis.mul(ker)};
}

JacPoint MakdisiModel::mul(mpz_class n, const JacPoint& x) const {
    int e = x.ctx()->e;
    if (n == 0) return zero(e);
    JacPoint base = x;
    if (n < 0) {
        base = neg(base);
        n = -n;
    }
    if (n == 1) return base;
    size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    JacPoint acc = base;
    for (size_t i = bits - 1; i-- > 0;) {
        acc = add(acc, acc);
        if (mpz_tstbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = add(acc, base);
    }
    return acc;
}

bool MakdisiModel::is_zero(const JacPoint& x) const {
    const View& vw = view(x.ctx()->e);
    ColSpan W = col_span(x.w);
    if (W.basis.nc != static_cast<int>(g) + 2) return false;
    RMat ann = annihilator(W);
    // zero iff some nonzero s in V1 satisfies s V1 <= W
    RMat cond = stacked_conditions(ann, vw.v1, vw.v1);
    auto ker = kernel_basis_try(cond);
    if (!ker) return false;  // vanishes mod p but not at full accuracy
    return ker->nc > 0;
}

bool MakdisiModel::eq(const JacPoint& x, const JacPoint& y) const {
    check(x.ctx()->e == y.ctx()->e, "eq: accuracy mismatch");
    const View& vw = view(x.ctx()->e);
    RMat ann = scaled_space_annihilator(y.w, 0, vw.v2.basis, 3 * static_cast<int>(g) + 3);
    // equal iff some nonzero v in W_x has v W_y <= s_y V2
    RMat cond = stacked_conditions(ann, y.w, x.w);
    auto ker = kernel_basis_try(cond);
    if (!ker) return false;
    return ker->nc > 0;
}

JacPoint MakdisiModel::frob(const JacPoint& x) const {
    RMat out(x.w.ctx, x.w.nr, x.w.nc);
    for (int i = 0; i < x.w.nr; ++i)
        for (int j = 0; j < x.w.nc; ++j)
            out.at(perm[static_cast<size_t>(i)], j) = frobenius(x.w.at(i, j));
    return JacPoint{std::move(out)};
}

JacPoint MakdisiModel::frobpoly(const ZPoly& f, const JacPoint& x) const {
    int e = x.ctx()->e;
    JacPoint acc = zero(e);
    for (size_t i = f.size(); i-- > 0;) {
        acc = frob(acc);
        if (f[i] != 0) acc = add(acc, mul(f[i], x));
    }
    return acc;
}

JacPoint MakdisiModel::reduce_point(const JacPoint& x, int e) const {
    return JacPoint{x.w.reduce(ctx->view(e))};
}

RingElem MakdisiModel::table_at_view(int64_t c, int64_t dd, const View& vw) const {
    return table.at(c, dd).reduce(vw.ctx);
}

std::vector<RingElem> MakdisiModel::v1_values_at(const std::pair<int64_t, int64_t>& pt,
                                                 int e) const {
    const View& vw = view(e);
    int64_t N = cd.N;
    int64_t c = pt.first, dd = pt.second;
    int64_t u, v;
    int64_t gg = xgcd_i64(dd, c, u, v);
    check(gg != 0 && std::gcd(mod_i64(gg, N), N) == 1, "v1_values_at: vector not primitive");
    int64_t ginv = inv_mod_i64(gg, N);
    SL2Rep gamma;
    gamma.m = {{{mod_i64(u * ginv, N), mod_i64(-v * ginv, N)}, {mod_i64(c, N), mod_i64(dd, N)}}};

    RingElem z = ls.z.reduce(vw.ctx);
    std::vector<RingElem> out;
    for (int j = 0; j < pruned.nc; ++j) {
        RingElem acc = RingElem::zero(vw.ctx);
        for (int i = 0; i < pruned.nr; ++i) {
            if (pruned.at(i, j).is_zero()) continue;
            RingElem val = RingElem::zero(vw.ctx);
            for (const WeightedPair& wp : trace_pairs(cd, forms.tags[static_cast<size_t>(i)].v,
                                                      forms.tags[static_cast<size_t>(i)].w)) {
                auto vm = vec_times_sl2(wp.v, gamma, N);
                auto wm = vec_times_sl2(wp.w, gamma, N);
                val += table_at_view(vm[0], vm[1], vw) * table_at_view(wm[0], wm[1], vw);
            }
            acc += pruned.at(i, j).embed(z) * val;
        }
        out.push_back(acc);
    }
    return out;
}

JacPoint MakdisiModel::random_point(uint64_t seed, int e) const {
    const View& vw = view(e);
    Rng rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<int> picks;
        while (static_cast<int64_t>(picks.size()) < d0) {
            int idx = static_cast<int>(rng.below(static_cast<uint64_t>(fibre.size())));
            if (std::find(picks.begin(), picks.end(), idx) == picks.end()) picks.push_back(idx);
        }
        RMat rawx(vw.ctx, static_cast<int>(picks.size()), static_cast<int>(vw.v2pairs.size()));
        for (size_t r = 0; r < picks.size(); ++r) {
            std::vector<RingElem> v1x = v1_values_at(fibre[static_cast<size_t>(picks[r])], e);
            for (size_t k = 0; k < vw.v2pairs.size(); ++k)
                rawx.at(static_cast<int>(r), static_cast<int>(k)) =
                    v1x[static_cast<size_t>(vw.v2pairs[k].first)] *
                    v1x[static_cast<size_t>(vw.v2pairs[k].second)];
        }
        auto ker = kernel_basis_try(rawx);
        if (!ker || ker->nc != static_cast<int>(vw.v2pairs.size()) - static_cast<int>(d0))
            continue;
        RMat vals = vw.v2raw.mul(*ker);
        ColSpan span = col_span(vals);
        if (span.basis.nc != static_cast<int>(g) + 2) continue;
        return JacPoint{span.basis};
    }
    throw DegenerateDraw("random_point: no valid draw");
}

std::vector<TorsionPoint> MakdisiModel::torsion_gen(int64_t ell, const std::vector<int64_t>& chi,
                                                    TorsionStrategy strategy,
                                                    uint64_t seed) const {
    check(chi.size() == 3, "torsion_gen: chi must be quadratic");
    GroupOrders go = group_orders(L, ctx->a, ell);
    check(go.ell_valuation > 0, "torsion_gen: no ell-torsion over F_q");

    ZPoly chiz;
    for (int64_t c : chi) chiz.push_back(c);
    zp::trim(chiz);
    ZPoly cof;
    {
        FpPoly Lmod, chimod;
        for (auto& c : L.Lp)
            Lmod.push_back(mod_mpz(c, mpz_class(static_cast<long>(ell))).get_si());
        for (auto& c : chiz)
            chimod.push_back(mod_mpz(c, mpz_class(static_cast<long>(ell))).get_si());
        fp::trim(Lmod);
        fp::trim(chimod);
        auto [q, r] = fp::divrem(Lmod, chimod, ell);
        check(r.empty(), "torsion_gen: chi does not divide L_p mod ell");
        FpPoly gcd_qc = fp::gcd(q, chimod, ell);
        check(fp::deg(gcd_qc) == 0, "torsion_gen: chi not coprime with its cofactor mod ell");
        for (int64_t c : q) cof.push_back(c > ell / 2 ? c - ell : c);  // centered lift
        zp::trim(cof);
    }

    std::vector<int64_t> dlist;
    if (strategy == TorsionStrategy::Cyclotomic) {
        check(static_cast<int64_t>(ctx->a) % ell != 0, "torsion_gen: ell divides a");
        for (auto& [dd, nd] : go.Nd) {
            if (nd % ell != 0) continue;
            FpPoly phid, chimod;
            for (auto& c : zp::cyclotomic(dd))
                phid.push_back(mod_mpz(c, mpz_class(static_cast<long>(ell))).get_si());
            for (auto& c : chiz)
                chimod.push_back(mod_mpz(c, mpz_class(static_cast<long>(ell))).get_si());
            fp::trim(phid);
            fp::trim(chimod);
            if (fp::deg(fp::gcd(phid, chimod, ell)) > 0) dlist.push_back(dd);
        }
        check(!dlist.empty(), "torsion_gen: no admissible d");
    }

    std::vector<TorsionPoint> basis;
    Rng rng(seed);
    int draws = 0;
    size_t d_rotate = 0;
    while (basis.size() < 2 && draws++ < 200) {
        TorsionRecipe rec;
        rec.point_seed = rng.next_u64();
        if (strategy == TorsionStrategy::Cyclotomic) {
            int64_t dd = dlist[d_rotate++ % dlist.size()];
            rec.pre_frobpoly = go.cyclo_cofactor.at(dd);
            mpz_class Md = go.Nd.at(dd);
            while (Md % ell == 0) Md /= ell;
            rec.multiplier = Md;
        } else {
            rec.multiplier = go.cofactor;
        }
        rec.chi_cofactor = cof;

        JacPoint x = random_point(rec.point_seed, 1);
        if (!rec.pre_frobpoly.empty()) x = frobpoly(rec.pre_frobpoly, x);
        x = mul(rec.multiplier, x);
        if (is_zero(x)) continue;
        int descents = 0;
        while (true) {
            JacPoint y = mul(ell, x);
            if (is_zero(y)) break;
            x = y;
            ++descents;
            check(descents <= go.ell_valuation + 2, "torsion_gen: descent runaway");
        }
        rec.ell_descents = descents;
        x = frobpoly(rec.chi_cofactor, x);
        if (is_zero(x)) continue;

        if (basis.size() == 1) {
            // dependence scan over the lines (1 : b); (0 : 1) is x = 0, done
            bool dep = false;
            for (int64_t bb = 0; bb < ell && !dep; ++bb)
                if (is_zero(add(basis[0].pt, mul(bb, x)))) dep = true;
            if (dep) continue;
        }
        basis.push_back(TorsionPoint{x, rec});
    }
    if (basis.size() < 2) throw StuckGeneration();
    return basis;
}

JacPoint MakdisiModel::lift_torsion(const TorsionPoint& t, int64_t ell) const {
    int e = ctx->e;
    if (e == 1) return t.pt;
    // Replay the construction at full accuracy: every step manipulates
    // genuine Jacobian points, so the result is a valid point whose
    // reduction is the target.
    JacPoint x = random_point(t.recipe.point_seed, e);
    if (!t.recipe.pre_frobpoly.empty()) x = frobpoly(t.recipe.pre_frobpoly, x);
    x = mul(t.recipe.multiplier, x);
    for (int i = 0; i < t.recipe.ell_descents; ++i) x = mul(ell, x);
    x = frobpoly(t.recipe.chi_cofactor, x);
    // Correct to exact ell-torsion: x <- x - [m]([ell] x) with m the inverse
    // of ell modulo p^(e-1), the exponent of the reduction kernel.
    JacPoint y = mul(ell, x);
    mpz_class m = inv_mod_mpz(ell, pow_mpz(ctx->p, static_cast<unsigned long>(e - 1)));
    x = sub(x, mul(m, y));
    check(is_zero(mul(ell, x)), "lift_torsion: correction did not reach exact torsion");
    check(eq(reduce_point(x, 1), t.pt), "lift_torsion: reduction mismatch");
    return x;
}

std::array<std::array<int64_t, 2>, 2> MakdisiModel::frobenius_on_basis(const JacPoint& t1,
                                                                       const JacPoint& t2,
                                                                       int64_t ell) const {
    int e = t1.ctx()->e;
    std::vector<JacPoint> m1{zero(e)}, m2{zero(e)};
    for (int64_t c = 1; c < ell; ++c) {
        m1.push_back(add(m1.back(), t1));
        m2.push_back(add(m2.back(), t2));
    }
    auto solve = [&](const JacPoint& target) -> std::array<int64_t, 2> {
        for (int64_t a = 0; a < ell; ++a)
            for (int64_t b = 0; b < ell; ++b) {
                if (a == 0 && b == 0) {
                    if (is_zero(target)) return {0, 0};
                    continue;
                }
                if (eq(add(m1[static_cast<size_t>(a)], m2[static_cast<size_t>(b)]), target))
                    return {a, b};
            }
        throw Error("frobenius_on_basis: image not in the span");
    };
    std::array<int64_t, 2> ft1 = solve(frob(t1));
    std::array<int64_t, 2> ft2 = solve(frob(t2));
    // column convention: coords(Frob t) = M coords(t)
    return {{{ft1[0], ft2[0]}, {ft1[1], ft2[1]}}};
}

std::vector<JacPoint> MakdisiModel::span_torsion(
    const JacPoint& t1, const JacPoint& t2, int64_t ell,
    const std::array<std::array<int64_t, 2>, 2>& Mfrob) const {
    int e = t1.ctx()->e;
    std::vector<JacPoint> out(static_cast<size_t>(ell * ell), zero(e));
    std::vector<bool> have(static_cast<size_t>(ell * ell), false);
    have[0] = true;
    std::vector<JacPoint> m1{zero(e)}, m2{zero(e)};
    for (int64_t c = 1; c < ell; ++c) {
        m1.push_back(add(m1.back(), t1));
        m2.push_back(add(m2.back(), t2));
    }
    auto frob_index = [&](int64_t v1, int64_t v2) {
        int64_t w1 = mod_i64(Mfrob[0][0] * v1 + Mfrob[0][1] * v2, ell);
        int64_t w2 = mod_i64(Mfrob[1][0] * v1 + Mfrob[1][1] * v2, ell);
        return w1 * ell + w2;
    };
    for (int64_t v1 = 0; v1 < ell; ++v1)
        for (int64_t v2 = 0; v2 < ell; ++v2) {
            int64_t idx = v1 * ell + v2;
            if (have[static_cast<size_t>(idx)]) continue;
            JacPoint rep = v1 == 0   ? m2[static_cast<size_t>(v2)]
                           : v2 == 0 ? m1[static_cast<size_t>(v1)]
                                     : add(m1[static_cast<size_t>(v1)], m2[static_cast<size_t>(v2)]);
            int64_t cur = idx;
            JacPoint pt = rep;
            while (!have[static_cast<size_t>(cur)]) {
                out[static_cast<size_t>(cur)] = pt;
                have[static_cast<size_t>(cur)] = true;
                int64_t nxt = frob_index(cur / ell, cur % ell);
                if (have[static_cast<size_t>(nxt)]) break;
                pt = frob(pt);
                cur = nxt;
            }
        }
    return out;
}

// ------------------------------------------------------------- build_model --

MakdisiModel build_model(const CongruenceData& cd, const LevelStructure& ls,
                         const FormSpaceBasis& forms, const LFactor& L, int64_t ell) {
    MakdisiModel m;
    m.cd = cd;
    m.ctx = ls.ctx();
    m.ls = ls;
    m.forms = forms;
    m.L = L;
    m.g = forms.g;
    m.d0 = 2 * m.g + 1;
    m.d = m.g + 2;

    if (forms.nuoo < 3) throw FewCusps();
    {
        int64_t p = m.ctx->p.get_si();
        check(p % 2 != 0 && p % 3 != 0 && cd.N % p != 0, "build_model: p divides 6N");
        if (ell > 0) check(p != ell, "build_model: p = ell");
        check(static_cast<int64_t>(cd.H.size()) % p != 0, "build_model: p divides #H");
    }

    // the three retained cusps: rational ones first, else whole orbits
    auto orbits = cusp_galois_orbits(cd, forms.cusps);
    {
        std::map<int, std::vector<int>> by_orbit;
        for (size_t i = 0; i < forms.cusps.size(); ++i)
            by_orbit[orbits[i]].push_back(static_cast<int>(i));
        std::vector<int> rational;
        for (auto& [o, members] : by_orbit)
            if (members.size() == 1) rational.push_back(members[0]);
        std::sort(rational.begin(), rational.end());
        if (rational.size() >= 3) {
            for (int k = 0; k < 3; ++k)
                m.retained.push_back(forms.cusps[static_cast<size_t>(rational[static_cast<size_t>(k)])]);
        } else {
            std::vector<std::vector<int>> orbit_sets;
            for (auto& [o, members] : by_orbit) orbit_sets.push_back(members);
            std::vector<int> chosen;
            std::function<bool(size_t, int)> pick = [&](size_t i, int need) {
                if (need == 0) return true;
                if (i >= orbit_sets.size()) return false;
                if (static_cast<int>(orbit_sets[i].size()) <= need) {
                    chosen.insert(chosen.end(), orbit_sets[i].begin(), orbit_sets[i].end());
                    if (pick(i + 1, need - static_cast<int>(orbit_sets[i].size()))) return true;
                    chosen.resize(chosen.size() - orbit_sets[i].size());
                }
                return pick(i + 1, need);
            };
            if (!pick(0, 3)) throw FewCusps("no Galois-stable cusp triple");
            for (int i : chosen) m.retained.push_back(forms.cusps[static_cast<size_t>(i)]);
        }
    }

    // pruned section space: forms vanishing at every non-retained cusp
    {
        std::vector<int> non_retained;
        for (size_t s = 0; s < forms.cusps.size(); ++s) {
            bool kept = false;
            for (const CuspLabel& r : m.retained) kept = kept || (forms.cusps[s] == r);
            if (!kept) non_retained.push_back(static_cast<int>(s));
        }
        CycMat cond(forms.F, static_cast<int>(non_retained.size()), forms.d2);
        for (size_t r = 0; r < non_retained.size(); ++r)
            for (int i = 0; i < forms.d2; ++i)
                cond.at(static_cast<int>(r), i) =
                    forms.cusp_constants.at(i, non_retained[r]);
        CycMat ker = cyc_kernel(cond);
        check(ker.nc == static_cast<int>(m.d), "build_model: pruned space dimension != g+2");
        // clear denominators columnwise so the embedding stays integral
        m.pruned = CycMat(forms.F, forms.d2, ker.nc);
        for (int j = 0; j < ker.nc; ++j) {
            mpz_class den = 1;
            for (int i = 0; i < ker.nr; ++i)
                for (const mpq_class& q : ker.at(i, j).coords()) {
                    mpz_class dd = q.get_den();
                    mpz_class gg;
                    mpz_gcd(gg.get_mpz_t(), den.get_mpz_t(), dd.get_mpz_t());
                    den = den / gg * dd;
                }
            for (int i = 0; i < ker.nr; ++i)
                m.pruned.at(i, j) = ker.at(i, j).mul_q(mpq_class(den));
        }
    }

    // trace values at every fibre point
    m.fibre = fibre_points(cd);
    m.table = eval_f1_table(ls);
    {
        m.trace_values = RMat(m.ctx, static_cast<int>(m.fibre.size()), forms.d2);
        for (size_t fp = 0; fp < m.fibre.size(); ++fp) {
            auto [c, dd] = m.fibre[fp];
            int64_t u, v;
            int64_t gg = xgcd_i64(dd, c, u, v);
            check(gg != 0 && std::gcd(mod_i64(gg, cd.N), cd.N) == 1, "build_model: fibre vector");
            int64_t ginv = inv_mod_i64(gg, cd.N);
            SL2Rep gamma;
            gamma.m = {{{mod_i64(u * ginv, cd.N), mod_i64(-v * ginv, cd.N)},
                        {mod_i64(c, cd.N), mod_i64(dd, cd.N)}}};
            for (int i = 0; i < forms.d2; ++i) {
                RingElem val = RingElem::zero(m.ctx);
                for (const WeightedPair& wp :
                     trace_pairs(cd, forms.tags[static_cast<size_t>(i)].v,
                                 forms.tags[static_cast<size_t>(i)].w)) {
                    auto vm = vec_times_sl2(wp.v, gamma, cd.N);
                    auto wm = vec_times_sl2(wp.w, gamma, cd.N);
                    val += m.table.at(vm[0], vm[1]) * m.table.at(wm[0], wm[1]);
                }
                m.trace_values.at(static_cast<int>(fp), i) = val;
            }
        }
    }
    // trace-generation cross-check: value rank mod p reaches d2
    {
        Echelon ech = echelon_local(m.trace_values.reduce(m.ctx->view(1)));
        check(ech.rank == forms.d2, "build_model: trace value rank mod p != d2");
    }

    // Frobenius orbits of fibre points; keep whole orbits until n_Z > 5 d0
    std::vector<int> fibre_perm = fibre_frobenius(cd, ls.Mp);
    {
        int64_t target = 5 * m.d0 + 1;
        std::vector<std::vector<int>> orbit_list;
        std::vector<bool> seen(m.fibre.size(), false);
        for (size_t i = 0; i < m.fibre.size(); ++i) {
            if (seen[i]) continue;
            std::vector<int> orb;
            int cur = static_cast<int>(i);
            while (!seen[static_cast<size_t>(cur)]) {
                seen[static_cast<size_t>(cur)] = true;
                orb.push_back(cur);
                cur = fibre_perm[static_cast<size_t>(cur)];
            }
            orbit_list.push_back(orb);
        }
        // minimal-overshoot subset sum over orbit sizes
        int64_t cap = target + static_cast<int64_t>(m.fibre.size());
        std::vector<int> reach(static_cast<size_t>(cap + 1), -1);
        std::vector<int64_t> parent(static_cast<size_t>(cap + 1), -1);
        reach[0] = -2;
        for (size_t oi = 0; oi < orbit_list.size(); ++oi) {
            int sz = static_cast<int>(orbit_list[oi].size());
            for (int64_t s = cap - sz; s >= 0; --s) {
                if (reach[static_cast<size_t>(s)] != -1 &&
                    reach[static_cast<size_t>(s + sz)] == -1) {
                    reach[static_cast<size_t>(s + sz)] = static_cast<int>(oi);
                    parent[static_cast<size_t>(s + sz)] = s;
                }
            }
        }
        int64_t best = -1;
        for (int64_t s = target; s <= cap; ++s)
            if (reach[static_cast<size_t>(s)] != -1) { best = s; break; }
        check(best > 0, "build_model: cannot reach the n_Z bound with whole orbits");
        std::vector<bool> use(orbit_list.size(), false);
        for (int64_t s = best; s > 0; s = parent[static_cast<size_t>(s)])
            use[static_cast<size_t>(reach[static_cast<size_t>(s)])] = true;
        for (size_t oi = 0; oi < orbit_list.size(); ++oi)
            if (use[oi])
                for (int idx : orbit_list[oi]) m.marked.push_back(idx);
        std::sort(m.marked.begin(), m.marked.end());
        m.nZ = static_cast<int64_t>(m.marked.size());
        check(m.nZ > 5 * m.d0, "build_model: n_Z bound violated");
        std::map<int, int> pos;
        for (size_t i = 0; i < m.marked.size(); ++i) pos[m.marked[i]] = static_cast<int>(i);
        m.perm.resize(m.marked.size());
        for (size_t i = 0; i < m.marked.size(); ++i)
            m.perm[i] = pos.at(fibre_perm[static_cast<size_t>(m.marked[i])]);
    }

    // V: values of the pruned basis at the marked points
    {
        RMat vals(m.ctx, static_cast<int>(m.nZ), static_cast<int>(m.d));
        RMat emb(m.ctx, forms.d2, static_cast<int>(m.d));
        for (int i = 0; i < forms.d2; ++i)
            for (int j = 0; j < static_cast<int>(m.d); ++j)
                emb.at(i, j) = m.pruned.at(i, j).embed(ls.z);
        for (int64_t r = 0; r < m.nZ; ++r)
            for (int j = 0; j < static_cast<int>(m.d); ++j) {
                RingElem acc = RingElem::zero(m.ctx);
                for (int i = 0; i < forms.d2; ++i)
                    acc += m.trace_values.at(m.marked[static_cast<size_t>(r)], i) * emb.at(i, j);
                vals.at(static_cast<int>(r), j) = acc;
            }
        ColSpan span = col_span(vals);
        check(span.basis.nc == static_cast<int>(m.d), "build_model: rank of V mod p != g+2");
        m.V = span.basis;
    }
    return m;
}

// --------------------------------------------------------------- cache IO --

namespace {

using nlohmann::json;

json rmat_to_json(const RMat& m) {
    json j;
    j["nr"] = m.nr;
    j["nc"] = m.nc;
    std::vector<std::string> entries;
    entries.reserve(m.a.size());
    for (const RingElem& x : m.a) entries.push_back(x.str());
    j["entries"] = entries;
    return j;
}

RMat rmat_from_json(const json& j, const CtxPtr& ctx) {
    RMat m(ctx, j.at("nr").get<int>(), j.at("nc").get<int>());
    auto entries = j.at("entries").get<std::vector<std::string>>();
    check(entries.size() == m.a.size(), "rmat_from_json: size mismatch");
    for (size_t i = 0; i < entries.size(); ++i) {
        std::vector<mpz_class> coeffs;
        std::stringstream ss(entries[i]);
        std::string tok;
        while (std::getline(ss, tok, ',')) coeffs.emplace_back(tok.c_str());
        m.a[i] = RingElem(ctx, std::move(coeffs));
    }
    return m;
}

std::string cyc_to_str(const CycNum& c) {
    std::string s;
    for (size_t i = 0; i < c.coords().size(); ++i) {
        if (i) s += ";";
        s += c.coords()[i].get_str();
    }
    return s;
}

CycNum cyc_from_str(const CycFieldPtr& F, const std::string& s) {
    QPoly coords;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ';')) coords.emplace_back(tok.c_str());
    qp::trim(coords);
    return CycNum(F, coords);
}

}  // namespace

void model_save(const MakdisiModel& m, const std::string& path) {
    json j;
    j["version"] = 1;
    j["p"] = m.ctx->p.get_str();
    j["a"] = m.ctx->a;
    j["e"] = m.ctx->e;
    j["N"] = m.cd.N;
    j["H"] = m.cd.H;
    j["A"] = m.ls.E.A.str();
    j["B"] = m.ls.E.B.str();
    j["P"] = std::vector<std::string>{m.ls.P.x.str(), m.ls.P.y.str()};
    j["Q"] = std::vector<std::string>{m.ls.Q.x.str(), m.ls.Q.y.str()};
    j["Mp"] = std::vector<int64_t>{m.ls.Mp[0][0], m.ls.Mp[0][1], m.ls.Mp[1][0], m.ls.Mp[1][1]};
    j["z"] = m.ls.z.str();
    j["ap"] = m.ls.a_p;
    j["g"] = m.g;
    std::vector<std::vector<int64_t>> fib;
    for (auto& [c, dd] : m.fibre) fib.push_back({c, dd});
    j["fibre"] = fib;
    j["marked"] = m.marked;
    j["perm"] = m.perm;
    std::vector<std::vector<int64_t>> ret;
    for (auto& s : m.retained) ret.push_back({s.c, s.d});
    j["retained"] = ret;
    std::vector<std::vector<int64_t>> tags;
    for (auto& t : m.forms.tags) tags.push_back({t.v[0], t.v[1], t.w[0], t.w[1]});
    j["tags"] = tags;
    std::vector<std::string> pruned;
    for (const CycNum& c : m.pruned.a) pruned.push_back(cyc_to_str(c));
    j["pruned"] = pruned;
    j["V"] = rmat_to_json(m.V);
    j["trace_values"] = rmat_to_json(m.trace_values);
    std::vector<std::string> lp;
    for (auto& c : m.L.Lp) lp.push_back(c.get_str());
    j["Lp"] = lp;
    std::ofstream os(path);
    check(os.good(), "model_save: cannot open file");
    os << j.dump();
}

MakdisiModel model_load(const std::string& path) {
    std::ifstream is(path);
    check(is.good(), "model_load: cannot open file");
    json j;
    is >> j;
    check(j.at("version").get<int>() == 1, "model_load: unknown cache version");

    MakdisiModel m;
    mpz_class p(j.at("p").get<std::string>().c_str());
    m.ctx = PAdicContext::make(p, j.at("a").get<int>(), j.at("e").get<int>());
    m.cd.N = j.at("N").get<int64_t>();
    m.cd.H = j.at("H").get<std::vector<int64_t>>();

    auto elem = [&](const std::string& s) {
        std::vector<mpz_class> coeffs;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) coeffs.emplace_back(tok.c_str());
        return RingElem(m.ctx, std::move(coeffs));
    };
    TorsionBasisData tb;
    tb.E = WeierstrassCurve(m.ctx, elem(j.at("A").get<std::string>()),
                            elem(j.at("B").get<std::string>()));
    auto pc = j.at("P").get<std::vector<std::string>>();
    auto qc = j.at("Q").get<std::vector<std::string>>();
    tb.P = EllPoint(elem(pc[0]), elem(pc[1]));
    tb.Q = EllPoint(elem(qc[0]), elem(qc[1]));
    auto mp = j.at("Mp").get<std::vector<int64_t>>();
    tb.Mp = {{{mp[0], mp[1]}, {mp[2], mp[3]}}};
    tb.z = elem(j.at("z").get<std::string>());
    tb.a_p = j.at("ap").get<int64_t>();
    m.ls = LevelStructure::build(tb, m.cd.N);
    m.table = eval_f1_table(m.ls);
    m.g = j.at("g").get<int64_t>();
    m.d0 = 2 * m.g + 1;
    m.d = m.g + 2;
    for (auto& f : j.at("fibre")) m.fibre.emplace_back(f[0].get<int64_t>(), f[1].get<int64_t>());
    m.marked = j.at("marked").get<std::vector<int>>();
    m.perm = j.at("perm").get<std::vector<int>>();
    m.nZ = static_cast<int64_t>(m.marked.size());
    for (auto& s : j.at("retained"))
        m.retained.push_back(CuspLabel{s[0].get<int64_t>(), s[1].get<int64_t>()});
    std::vector<FormSpaceBasis::Tag> tags;
    for (auto& t : j.at("tags"))
        tags.push_back(FormSpaceBasis::Tag{{t[0].get<int64_t>(), t[1].get<int64_t>()},
                                           {t[2].get<int64_t>(), t[3].get<int64_t>()}});
    m.forms = basis_from_tags(m.cd, tags);
    auto pruned = j.at("pruned").get<std::vector<std::string>>();
    m.pruned = CycMat(m.forms.F, m.forms.d2, static_cast<int>(m.d));
    check(pruned.size() == m.pruned.a.size(), "model_load: pruned size mismatch");
    for (size_t i = 0; i < pruned.size(); ++i) m.pruned.a[i] = cyc_from_str(m.forms.F, pruned[i]);
    m.V = rmat_from_json(j.at("V"), m.ctx);
    m.trace_values = rmat_from_json(j.at("trace_values"), m.ctx);
    ZPoly lp;
    for (auto& c : j.at("Lp").get<std::vector<std::string>>()) lp.emplace_back(c.c_str());
    m.L.p = p.get_si();
    m.L.g = m.g;
    m.L.Lp = lp;
    return m;
}

}  // namespace galrep
