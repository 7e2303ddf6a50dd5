#include "galrep/hecke.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace galrep {

namespace {

SL2Rep diamond_matrix(int64_t x, int64_t N) {
    SL2Rep g;
    g.m = {{{inv_mod_i64(x, N), 0}, {0, mod_i64(x, N)}}};
    return g;
}

CycMat cyc_transpose(const CycMat& m) {
    CycMat t(m.f, m.nc, m.nr);
    for (int i = 0; i < m.nr; ++i)
        for (int j = 0; j < m.nc; ++j) t.at(j, i) = m.at(i, j);
    return t;
}

std::vector<CycNum> trace_coeffs_q1(const CongruenceData& cd, const FormSpaceBasis::Tag& tag,
                                    const SL2Rep& M, const std::vector<int64_t>& q1_indices) {
    std::vector<int64_t> qn;
    qn.reserve(q1_indices.size());
    for (int64_t n : q1_indices) qn.push_back(n * cd.N);
    return qexp_slashed_coeffs(cd.N, trace_pairs(cd, tag.v, tag.w), M, qn);
}

}  // namespace

CycNum FormSpaceBasis::coeff_q1(int i, int64_t n) const {
    SL2Rep id;
    return trace_coeffs_q1(cd, tags[static_cast<size_t>(i)], id, {n})[0];
}

CycNum FormSpaceBasis::coeff_q1_diamond(int i, int64_t x, int64_t n) const {
    return trace_coeffs_q1(cd, tags[static_cast<size_t>(i)], diamond_matrix(x, cd.N), {n})[0];
}

FormSpaceBasis basis_m2(const CongruenceData& cd, uint64_t seed) {
    int64_t g = genus_formula(cd);
    int d2 = static_cast<int>(g + static_cast<int64_t>(enumerate_cusps(cd).size()) - 1);
    CycFieldPtr F = CycField::make(cd.N);

    Rng rng(seed);
    int64_t K = d2 + 8;  // q_1-coefficients 0..K-1 per candidate
    std::vector<int64_t> probe;
    for (int64_t n = 0; n < K; ++n) probe.push_back(n);

    std::vector<FormSpaceBasis::Tag> tags;
    std::vector<std::vector<CycNum>> kept;
    SL2Rep id;
    int budget = 60 * d2;
    while (static_cast<int>(tags.size()) < d2 && budget-- > 0) {
        FormSpaceBasis::Tag tag;
        tag.v = {static_cast<int64_t>(rng.below(static_cast<uint64_t>(cd.N))),
                 static_cast<int64_t>(rng.below(static_cast<uint64_t>(cd.N)))};
        tag.w = {static_cast<int64_t>(rng.below(static_cast<uint64_t>(cd.N))),
                 static_cast<int64_t>(rng.below(static_cast<uint64_t>(cd.N)))};
        if ((tag.v[0] == 0 && tag.v[1] == 0) || (tag.w[0] == 0 && tag.w[1] == 0)) continue;
        std::vector<CycNum> row = trace_coeffs_q1(cd, tag, id, probe);
        kept.push_back(row);
        CycMat m(F, static_cast<int>(kept.size()), static_cast<int>(K));
        for (size_t i = 0; i < kept.size(); ++i)
            for (int64_t j = 0; j < K; ++j)
                m.at(static_cast<int>(i), static_cast<int>(j)) = kept[i][static_cast<size_t>(j)];
        if (cyc_rank(m) == static_cast<int>(kept.size())) {
            tags.push_back(tag);
        } else {
            kept.pop_back();
        }
    }
    if (static_cast<int>(tags.size()) < d2) throw RankDeficient("basis_m2: could not reach rank d2");
    return basis_from_tags(cd, tags);
}

FormSpaceBasis basis_from_tags(const CongruenceData& cd,
                               const std::vector<FormSpaceBasis::Tag>& tags) {
    FormSpaceBasis b;
    b.cd = cd;
    b.F = CycField::make(cd.N);
    b.g = genus_formula(cd);
    b.cusps = enumerate_cusps(cd);
    b.nuoo = static_cast<int64_t>(b.cusps.size());
    b.d2 = static_cast<int>(b.g + b.nuoo - 1);
    check(static_cast<int>(tags.size()) == b.d2, "basis_from_tags: need exactly d2 tags");
    b.tags = tags;

    int64_t K = b.d2 + 8;
    std::vector<int64_t> probe;
    for (int64_t n = 0; n < K; ++n) probe.push_back(n);
    SL2Rep id;
    std::vector<std::vector<CycNum>> kept;
    for (const auto& tag : b.tags) kept.push_back(trace_coeffs_q1(cd, tag, id, probe));

    CycMat m(b.F, b.d2, static_cast<int>(K));
    for (int i = 0; i < b.d2; ++i)
        for (int64_t j = 0; j < K; ++j)
            m.at(i, static_cast<int>(j)) = kept[static_cast<size_t>(i)][static_cast<size_t>(j)];
    if (cyc_rank(m) != b.d2) throw RankDeficient("basis_from_tags: tags not independent");

    std::vector<int64_t> idx;
    int rank = 0;
    for (int64_t j = 0; j < K && rank < b.d2; ++j) {
        CycMat trial(b.F, b.d2, static_cast<int>(idx.size()) + 1);
        for (int i = 0; i < b.d2; ++i) {
            for (size_t k = 0; k < idx.size(); ++k)
                trial.at(i, static_cast<int>(k)) = m.at(i, static_cast<int>(idx[k]));
            trial.at(i, static_cast<int>(idx.size())) = m.at(i, static_cast<int>(j));
        }
        int r = cyc_rank(trial);
        if (r > rank) {
            idx.push_back(j);
            rank = r;
        }
    }
    check(rank == b.d2, "basis_m2: identification indices not found");
    b.id_indices = idx;
    b.id_coeffs = CycMat(b.F, b.d2, static_cast<int>(idx.size()));
    for (int i = 0; i < b.d2; ++i)
        for (size_t k = 0; k < idx.size(); ++k)
            b.id_coeffs.at(i, static_cast<int>(k)) = m.at(i, static_cast<int>(idx[k]));

    // cusp constants and the cusp subspace
    b.cusp_mats.reserve(b.cusps.size());
    for (const CuspLabel& s : b.cusps) b.cusp_mats.push_back(cusp_matrix(cd, s));
    b.cusp_constants = CycMat(b.F, b.d2, static_cast<int>(b.cusps.size()));
    for (int i = 0; i < b.d2; ++i)
        for (size_t s = 0; s < b.cusps.size(); ++s)
            b.cusp_constants.at(i, static_cast<int>(s)) = trace_constant_at(
                cd, b.tags[static_cast<size_t>(i)].v, b.tags[static_cast<size_t>(i)].w,
                b.cusp_mats[s]);
    b.s2_coeffs = cusp_subspace(b);
    check(b.s2_coeffs.nc == static_cast<int>(b.g), "basis_m2: cusp subspace dimension != g");
    return b;
}

CycMat cusp_subspace(const FormSpaceBasis& basis) {
    // conditions: sum_i x_i a_0(f_i | M_s) = 0 for every cusp s
    CycMat cond(basis.F, static_cast<int>(basis.cusps.size()), basis.d2);
    for (int s = 0; s < cond.nr; ++s)
        for (int i = 0; i < basis.d2; ++i) cond.at(s, i) = basis.cusp_constants.at(i, s);
    return cyc_kernel(cond);
}

HeckeMats hecke_matrices(const FormSpaceBasis& basis, int64_t p) {
    const CongruenceData& cd = basis.cd;
    check(std::gcd(mod_i64(p, cd.N), cd.N) == 1, "hecke_matrices: p must be prime to N");
    int g = static_cast<int>(basis.g);
    auto F = basis.F;

    // identification inside S2: q_1-indices n >= 1 with rank-g coefficients
    std::vector<int64_t> idx;
    CycMat B(F, g, 0);
    {
        int rank = 0;
        std::vector<std::vector<CycNum>> cols;
        for (int64_t n = 1; rank < g; ++n) {
            if (n >= 4 * basis.d2 + 8) throw PrecisionTooLow("hecke_matrices: no S2 id indices");
            std::vector<CycNum> col(static_cast<size_t>(g), CycNum::zero(F));
            for (int j = 0; j < g; ++j) {
                CycNum acc = CycNum::zero(F);
                for (int i = 0; i < basis.d2; ++i)
                    if (!basis.s2_coeffs.at(i, j).is_zero())
                        acc += basis.s2_coeffs.at(i, j) * basis.coeff_q1(i, n);
                col[static_cast<size_t>(j)] = acc;
            }
            cols.push_back(col);
            CycMat trial(F, g, static_cast<int>(cols.size()));
            for (int j = 0; j < g; ++j)
                for (size_t k = 0; k < cols.size(); ++k)
                    trial.at(j, static_cast<int>(k)) = cols[k][static_cast<size_t>(j)];
            int r = cyc_rank(trial);
            if (r > rank) {
                idx.push_back(n);
                B = trial;
                rank = r;
            } else {
                cols.pop_back();
            }
        }
    }

    std::vector<int64_t> read_idx;
    for (int64_t n : idx) read_idx.push_back(n * p);
    std::vector<int64_t> over_p;
    for (int64_t n : idx) over_p.push_back(n % p == 0 ? n / p : -1);

    SL2Rep id, dia = diamond_matrix(p, cd.N);
    std::vector<std::vector<CycNum>> raw_np(static_cast<size_t>(basis.d2));
    std::vector<std::vector<CycNum>> raw_dia(static_cast<size_t>(basis.d2));
    std::vector<std::vector<CycNum>> raw_dia_np(static_cast<size_t>(basis.d2));
    for (int i = 0; i < basis.d2; ++i) {
        raw_np[static_cast<size_t>(i)] =
            trace_coeffs_q1(cd, basis.tags[static_cast<size_t>(i)], id, read_idx);
        raw_dia[static_cast<size_t>(i)] =
            trace_coeffs_q1(cd, basis.tags[static_cast<size_t>(i)], dia, idx);
        std::vector<int64_t> np_over;
        for (int64_t n : over_p) np_over.push_back(n < 0 ? 0 : n);
        raw_dia_np[static_cast<size_t>(i)] =
            trace_coeffs_q1(cd, basis.tags[static_cast<size_t>(i)], dia, np_over);
    }

    CycMat Tp(F, g, g), D(F, g, g);
    CycMat Bt = cyc_transpose(B);
    for (int j = 0; j < g; ++j) {
        std::vector<CycNum> t_vec, d_vec;
        for (size_t k = 0; k < idx.size(); ++k) {
            CycNum tp_acc = CycNum::zero(F), d_acc = CycNum::zero(F);
            for (int i = 0; i < basis.d2; ++i) {
                const CycNum& c = basis.s2_coeffs.at(i, j);
                if (c.is_zero()) continue;
                CycNum term = raw_np[static_cast<size_t>(i)][k];
                if (over_p[k] >= 0)
                    term += raw_dia_np[static_cast<size_t>(i)][k].mul_q(
                        mpq_class(static_cast<long>(p)));
                tp_acc += c * term;
                d_acc += c * raw_dia[static_cast<size_t>(i)][k];
            }
            t_vec.push_back(tp_acc);
            d_vec.push_back(d_acc);
        }
        std::vector<CycNum> x = cyc_solve(Bt, t_vec);
        std::vector<CycNum> y = cyc_solve(Bt, d_vec);
        for (int k = 0; k < g; ++k) {
            Tp.at(k, j) = x[static_cast<size_t>(k)];
            D.at(k, j) = y[static_cast<size_t>(k)];
        }
    }

    // sanity: Tp and <p> commute; <p> = 1 when p mod N lies in H
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            CycNum a = CycNum::zero(F), bsum = CycNum::zero(F);
            for (int k = 0; k < g; ++k) {
                a += Tp.at(i, k) * D.at(k, j);
                bsum += D.at(i, k) * Tp.at(k, j);
            }
            check(a == bsum, "hecke_matrices: Tp and diamond do not commute");
        }
    if (cd.in_H(p)) {
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j)
                check(D.at(i, j) == (i == j ? CycNum::one(F) : CycNum::zero(F)),
                      "hecke_matrices: diamond != 1 for p in H");
    }
    return {Tp, D};
}

LFactor lfactor(const FormSpaceBasis& basis, int64_t p) {
    check(p >= 2 && basis.cd.N % p != 0, "lfactor: p must not divide N");
    int g = static_cast<int>(basis.g);
    HeckeMats H = hecke_matrices(basis, p);
    auto F = basis.F;
    // det(x^2 I - x Tp + p <p>) by evaluation at 2g + 1 integer points and
    // Lagrange interpolation over Q(zeta).
    int npts = 2 * g + 1;
    std::vector<mpq_class> xs;
    std::vector<CycNum> ys;
    for (int t = 0; t < npts; ++t) {
        mpq_class x(static_cast<long>(t));
        CycMat M(F, g, g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                CycNum v = H.diamond.at(i, j).mul_q(mpq_class(static_cast<long>(p)));
                v -= H.Tp.at(i, j).mul_q(x);
                if (i == j) v += CycNum::from_q(F, x * x);
                M.at(i, j) = v;
            }
        xs.push_back(x);
        ys.push_back(cyc_det(M));
    }
    std::vector<CycNum> coeffs(static_cast<size_t>(npts), CycNum::zero(F));
    for (int i = 0; i < npts; ++i) {
        QPoly num{mpq_class(1)};
        mpq_class den = 1;
        for (int j = 0; j < npts; ++j) {
            if (j == i) continue;
            num = qp::mul(num, QPoly{-xs[static_cast<size_t>(j)], mpq_class(1)});
            den *= xs[static_cast<size_t>(i)] - xs[static_cast<size_t>(j)];
        }
        for (size_t k = 0; k < num.size(); ++k)
            coeffs[k] += ys[static_cast<size_t>(i)].mul_q(num[k] / den);
    }
    LFactor L;
    L.p = p;
    L.g = g;
    L.Lp.resize(static_cast<size_t>(npts));
    for (int k = 0; k < npts; ++k) {
        if (!coeffs[static_cast<size_t>(k)].is_rational())
            throw NonIntegralResult("lfactor: non-rational coefficient");
        mpq_class q = coeffs[static_cast<size_t>(k)].rational();
        if (q.get_den() != 1) throw NonIntegralResult("lfactor: non-integral coefficient");
        L.Lp[static_cast<size_t>(k)] = q.get_num();
    }
    zp::trim(L.Lp);
    check(zp::deg(L.Lp) == 2 * g && L.Lp.back() == 1, "lfactor: not monic of degree 2g");
    check(L.Lp[0] == pow_mpz(mpz_class(static_cast<long>(p)), static_cast<unsigned long>(g)),
          "lfactor: constant coefficient != p^g");
    // Weil bounds: |c_i| <= binom(2g, i) p^((2g-i)/2)
    for (int i = 0; i <= 2 * g; ++i) {
        mpz_class bound;
        mpz_bin_uiui(bound.get_mpz_t(), static_cast<unsigned long>(2 * g),
                     static_cast<unsigned long>(i));
        mpz_class pw = pow_mpz(mpz_class(static_cast<long>(p)),
                               static_cast<unsigned long>(2 * g - i));
        mpz_class sq;
        mpz_sqrt(sq.get_mpz_t(), pw.get_mpz_t());
        bound *= sq + 1;
        check(abs(L.Lp[static_cast<size_t>(i)]) <= bound, "lfactor: Weil bound violated");
    }
    return L;
}

LFactor lfactor(const CongruenceData& cd, int64_t p, uint64_t seed) {
    FormSpaceBasis basis = basis_m2(cd, seed);
    return lfactor(basis, p);
}

GroupOrders group_orders(const LFactor& L, int a, int64_t ell) {
    GroupOrders out;
    out.ell = ell;
    out.order = abs(zp::resultant(L.Lp, zp::x_pow_minus_1(a)));
    mpz_class M = out.order;
    int v = 0;
    while (M % ell == 0) {
        M /= ell;
        ++v;
    }
    out.ell_valuation = v;
    out.cofactor = M;
    mpz_class prod = 1;
    for (int64_t d = 1; d <= a; ++d) {
        if (a % d != 0) continue;
        out.Nd[d] = abs(zp::resultant(L.Lp, zp::cyclotomic(d)));
        out.cyclo_cofactor[d] = zp::divexact(zp::x_pow_minus_1(a), zp::cyclotomic(d));
        prod *= out.Nd[d];
    }
    check(prod == out.order, "group_orders: product identity failed");
    return out;
}

void lfactor_cache_append(const std::string& path, const LFactor& L) {
    std::ofstream os(path, std::ios::app);
    check(os.good(), "lfactor_cache_append: cannot open file");
    os << L.p << " :";
    for (const mpz_class& c : L.Lp) os << " " << c.get_str();
    os << "\n";
}

std::optional<ZPoly> lfactor_cache_lookup(const std::string& path, int64_t p) {
    std::ifstream is(path);
    if (!is.good()) return std::nullopt;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        int64_t q;
        std::string colon;
        if (!(ls >> q >> colon) || colon != ":") continue;
        if (q != p) continue;
        ZPoly f;
        std::string tok;
        while (ls >> tok) f.emplace_back(tok.c_str());
        zp::trim(f);
        return f;
    }
    return std::nullopt;
}

}  // namespace galrep
