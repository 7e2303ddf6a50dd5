#include "galrep/eisenstein.hpp"

#include <algorithm>
#include <map>

namespace galrep {

LevelStructure LevelStructure::build(const TorsionBasisData& tb, int64_t N) {
    LevelStructure ls;
    ls.N = N;
    ls.E = tb.E;
    ls.P = tb.P;
    ls.Q = tb.Q;
    ls.Mp = tb.Mp;
    ls.z = tb.z;
    ls.a_p = tb.a_p;
    ls.beta.assign(static_cast<size_t>(N) * N, EllPoint::infinity());
    // row by row: beta(c, 0) = beta(c-1, 0) + P, beta(c, d) = beta(c, d-1) + Q
    for (int64_t c = 0; c < N; ++c) {
        if (c > 0) ls.beta[c * N] = ell_add(ls.E, ls.beta[(c - 1) * N], ls.P);
        for (int64_t d = 1; d < N; ++d)
            ls.beta[c * N + d] = ell_add(ls.E, ls.beta[c * N + d - 1], ls.Q);
    }
    check(ls.beta_at(1, 0) == ls.P && ls.beta_at(0, 1) == ls.Q, "LevelStructure: beta base");
    return ls;
}

LevelStructure LevelStructure::reduce(const CtxPtr& target) const {
    LevelStructure ls;
    ls.N = N;
    ls.E = E.reduce(target);
    ls.P = ell_reduce(P, target);
    ls.Q = ell_reduce(Q, target);
    ls.Mp = Mp;
    ls.z = z.reduce(target);
    ls.a_p = a_p;
    ls.beta.reserve(beta.size());
    for (const EllPoint& pt : beta) ls.beta.push_back(ell_reduce(pt, target));
    return ls;
}

namespace {

// Solve for f_1 along the cyclic line through u (additive order m) from the
// tangent at u and the chords joining u to its multiples: with f_j = f_1^{ju},
// the relations f_2 = 2 f_1 - mu and f_{j+1} = f_j + f_1 - lambda(u, ju) give
// f_j = j f_1 - c_j, and the oddness anchor f_{m-1} = -f_1 yields
// f_1 = c_{m-1} / m (m | N is invertible).
void solve_line(const LevelStructure& ls, EisTable& table, int64_t uc, int64_t ud) {
    int64_t N = ls.N;
    int64_t g = std::gcd(std::gcd(uc == 0 ? N : uc, ud == 0 ? N : ud), N);
    int64_t m = N / g;
    const CtxPtr& ctx = ls.ctx();
    auto slot = [&](int64_t j) -> RingElem& {
        int64_t c = mod_i64(j * uc, N), d = mod_i64(j * ud, N);
        return table.val[static_cast<size_t>(c) * N + d];
    };
    if (m == 1) return;
    if (m == 2) {
        slot(1) = RingElem::zero(ctx);
        return;
    }
    std::vector<RingElem> c(m, RingElem::zero(ctx));
    const EllPoint& U = ls.beta_at(uc, ud);
    c[2] = chord_slope(ls.E, U, U);  // tangent at beta(u)
    for (int64_t j = 2; j + 1 <= m - 1; ++j) {
        const EllPoint& JU = ls.beta_at(mod_i64(j * uc, N), mod_i64(j * ud, N));
        c[j + 1] = c[j] + chord_slope(ls.E, U, JU);
    }
    RingElem f1 = c[m - 1] * RingElem::from_int(ctx, m).inverse();
    for (int64_t j = 1; j <= m - 1; ++j) slot(j) = f1.mul_int(j) - c[j];
    if (m % 2 == 0) check(slot(m / 2).is_zero(), "solve_line: 2-torsion value nonzero");
}

}  // namespace

EisTable eval_f1_table(const LevelStructure& ls, int64_t line_param) {
    int64_t N = ls.N;
    const CtxPtr& ctx = ls.ctx();
    EisTable table;
    table.N = N;
    table.ctx = ctx;
    table.val.assign(static_cast<size_t>(N) * N, RingElem::zero(ctx));

    int64_t k = mod_i64(line_param, N);
    solve_line(ls, table, 1, k);  // covers (c, ck mod N)
    solve_line(ls, table, 0, 1);  // covers (0, d)
    for (int64_t cc = 1; cc < N; ++cc) {
        for (int64_t d = 0; d < N; ++d) {
            if (d == mod_i64(cc * k, N)) continue;
            int64_t d2 = mod_i64(d - cc * k, N);
            const EllPoint& A = ls.beta_at(cc, mod_i64(cc * k, N));
            const EllPoint& B = ls.beta_at(0, d2);
            table.val[static_cast<size_t>(cc) * N + d] =
                table.at(cc, cc * k) + table.at(0, d2) - chord_slope(ls.E, A, B);
        }
    }
    // oddness f_1^{-v} = -f_1^v is forced by the relations; check it
    for (int64_t cc = 0; cc < N; ++cc)
        for (int64_t d = 0; d < N; ++d) {
            if (cc == 0 && d == 0) continue;
            check(table.at(cc, d) == -table.at(N - cc, N - d), "eval_f1_table: oddness violated");
        }
    return table;
}

RingElem eval_f2_trace(const EisTable& table, const CongruenceData& cd, int64_t vc, int64_t vd,
                       int64_t wc, int64_t wd) {
    int64_t N = cd.N;
    check(table.N == N, "eval_f2_trace: table level mismatch");
    RingElem sum = RingElem::zero(table.ctx);
    for (int64_t h : cd.H) {
        int64_t hinv = inv_mod_i64(h, N);
        for (int64_t x = 0; x < N; ++x) {
            // v (h^{-1} x; 0 h) = (v_c h^{-1}, v_c x + v_d h)
            int64_t vc2 = mod_i64(vc * hinv, N), vd2 = mod_i64(vc * x + vd * h, N);
            int64_t wc2 = mod_i64(wc * hinv, N), wd2 = mod_i64(wc * x + wd * h, N);
            sum += table.at(vc2, vd2) * table.at(wc2, wd2);
        }
    }
    return sum;
}

// ------------------------------------------------------------ q-expansions --

void QExp::trim() {
    size_t lo = 0;
    while (lo < a.size() && a[lo].is_zero()) ++lo;
    if (lo > 0) {
        a.erase(a.begin(), a.begin() + static_cast<long>(lo));
        lead += static_cast<int64_t>(lo);
    }
    if (a.empty()) lead = prec;
}

QExp qexp_zero(const CycFieldPtr& F, int64_t prec) {
    QExp r;
    r.F = F;
    r.lead = prec;
    r.prec = prec;
    return r;
}

QExp qexp_add(const QExp& f, const QExp& g) {
    QExp r;
    r.F = f.F;
    r.prec = std::min(f.prec, g.prec);
    r.lead = std::min(f.lead, g.lead);
    if (r.lead > r.prec) r.lead = r.prec;
    r.a.assign(static_cast<size_t>(r.prec - r.lead), CycNum::zero(f.F));
    for (int64_t n = r.lead; n < r.prec; ++n)
        r.a[static_cast<size_t>(n - r.lead)] = f.coeff(n) + g.coeff(n);
    r.trim();
    return r;
}

QExp qexp_scale(const QExp& f, const CycNum& c) {
    QExp r = f;
    for (auto& x : r.a) x *= c;
    r.trim();
    return r;
}

QExp qexp_mul(const QExp& f, const QExp& g) {
    QExp r;
    r.F = f.F;
    r.lead = f.lead + g.lead;
    r.prec = std::min(f.prec + g.lead, g.prec + f.lead);
    if (r.lead > r.prec) r.lead = r.prec;
    r.a.assign(static_cast<size_t>(std::max<int64_t>(r.prec - r.lead, 0)), CycNum::zero(f.F));
    for (size_t i = 0; i < f.a.size(); ++i) {
        if (f.a[i].is_zero()) continue;
        for (size_t j = 0; j < g.a.size(); ++j) {
            int64_t n = f.lead + static_cast<int64_t>(i) + g.lead + static_cast<int64_t>(j);
            if (n >= r.prec) break;
            if (!g.a[j].is_zero()) r.a[static_cast<size_t>(n - r.lead)] += f.a[i] * g.a[j];
        }
    }
    r.trim();
    return r;
}

QExp qexp_div(const QExp& f, const QExp& g, int64_t want_prec) {
    QExp gg = g;
    gg.trim();
    check(!gg.a.empty() && !gg.a[0].is_zero(), "qexp_div: divisor has no leading unit");
    QExp r;
    r.F = f.F;
    r.lead = f.lead - gg.lead;
    int64_t avail = std::min(f.prec - gg.lead, r.lead + (gg.prec - gg.lead));
    r.prec = std::min(want_prec, avail);
    if (r.lead >= r.prec) {
        r.lead = r.prec;
        return r;
    }
    size_t len = static_cast<size_t>(r.prec - r.lead);
    r.a.assign(len, CycNum::zero(f.F));
    CycNum inv0 = gg.a[0].inverse();
    for (size_t n = 0; n < len; ++n) {
        CycNum acc = f.coeff(f.lead + static_cast<int64_t>(n));
        for (size_t k = 1; k <= n && k < gg.a.size(); ++k)
            acc -= gg.a[k] * r.a[n - k];
        r.a[n] = acc * inv0;
    }
    return r;
}

CycNum qexp_f1_a0(const CycFieldPtr& F, int64_t c, int64_t d) {
    int64_t N = F->N;
    c = mod_i64(c, N);
    d = mod_i64(d, N);
    check(c != 0 || d != 0, "qexp_f1_a0: v must be nonzero");
    if (c == 0) {
        if (d == 0) throw DivisionByZeroRoot();
        CycNum zd = CycNum::zeta_pow(F, d);
        return ((CycNum::one(F) + zd) * (CycNum::one(F) - zd).inverse()).mul_q(frac(1, 2));
    }
    return CycNum::from_q(F, frac(1, 2) - frac(c, N));
}

QExp qexp_f1(int64_t N, int64_t c, int64_t d, int64_t prec) {
    auto F = CycField::make(N);
    c = mod_i64(c, N);
    d = mod_i64(d, N);
    QExp r;
    r.F = F;
    r.lead = 0;
    r.prec = prec;
    r.a.assign(static_cast<size_t>(prec), CycNum::zero(F));
    r.a[0] = qexp_f1_a0(F, c, d);
    // a_n = sum over ab = n, a = c mod N of sgn(b) z^{bd}; sieve over a > 0.
    for (int64_t alpha = 1; alpha < prec; ++alpha) {
        bool pos = mod_i64(alpha, N) == c;
        bool neg = mod_i64(-alpha, N) == c;
        if (!pos && !neg) continue;
        for (int64_t n = alpha; n < prec; n += alpha) {
            int64_t beta = n / alpha;
            if (pos) r.a[n] += CycNum::zeta_pow(F, mod_i64(beta * d, N));
            if (neg) r.a[n] -= CycNum::zeta_pow(F, mod_i64(-beta * d, N));
        }
    }
    r.trim();
    return r;
}

namespace {

// Integer group-ring tail engine: the n >= 1 coefficients of f_1 live in
// Z[t]/(t^N - 1) with small entries, stored sparsely per exponent.
struct GrSeries {
    int64_t N = 0;
    int64_t prec = 0;
    // row n: list of (zeta exponent, integer coefficient)
    std::vector<std::vector<std::pair<int32_t, int64_t>>> rows;
};

GrSeries f1_tail_gr(int64_t N, int64_t cc, int64_t d, int64_t prec) {
    GrSeries s;
    s.N = N;
    s.prec = prec;
    s.rows.assign(static_cast<size_t>(prec), {});
    cc = mod_i64(cc, N);
    d = mod_i64(d, N);
    std::vector<std::vector<int64_t>> acc(static_cast<size_t>(prec),
                                          std::vector<int64_t>(static_cast<size_t>(N), 0));
    for (int64_t alpha = 1; alpha < prec; ++alpha) {
        bool pos = mod_i64(alpha, N) == cc;
        bool neg = mod_i64(-alpha, N) == cc;
        if (!pos && !neg) continue;
        for (int64_t n = alpha; n < prec; n += alpha) {
            int64_t beta = n / alpha;
            if (pos) acc[static_cast<size_t>(n)][mod_i64(beta * d, N)] += 1;
            if (neg) acc[static_cast<size_t>(n)][mod_i64(-beta * d, N)] -= 1;
        }
    }
    for (int64_t n = 1; n < prec; ++n)
        for (int64_t j = 0; j < N; ++j)
            if (acc[static_cast<size_t>(n)][static_cast<size_t>(j)])
                s.rows[static_cast<size_t>(n)].emplace_back(
                    static_cast<int32_t>(j), acc[static_cast<size_t>(n)][static_cast<size_t>(j)]);
    return s;
}

// Convolution coefficient (T1 T2)_m into a length-N accumulator.
void tail_conv_at(const GrSeries& tf, const GrSeries& tg, int64_t m, std::vector<int64_t>& acc) {
    int64_t N = tf.N;
    std::fill(acc.begin(), acc.end(), 0);
    for (int64_t i = 1; i <= m - 1; ++i) {
        const auto& fi = tf.rows[static_cast<size_t>(i)];
        if (fi.empty()) continue;
        const auto& gj = tg.rows[static_cast<size_t>(m - i)];
        if (gj.empty()) continue;
        for (auto& [u, cu] : fi)
            for (auto& [v, cv] : gj) acc[static_cast<size_t>((u + v) % N)] += cu * cv;
    }
}

CycNum gr_to_cyc(const CycFieldPtr& F, const std::vector<int64_t>& acc) {
    QPoly poly(static_cast<size_t>(F->N), mpq_class(0));
    bool nz = false;
    for (int64_t j = 0; j < F->N; ++j)
        if (acc[static_cast<size_t>(j)]) {
            poly[static_cast<size_t>(j)] = mpq_class(static_cast<long>(acc[static_cast<size_t>(j)]));
            nz = true;
        }
    if (!nz) return CycNum::zero(F);
    return CycNum(F, poly);
}

CycNum row_to_cyc(const CycFieldPtr& F, const GrSeries& t, int64_t n) {
    if (n <= 0 || n >= t.prec) return CycNum::zero(F);
    QPoly poly(static_cast<size_t>(F->N), mpq_class(0));
    bool nz = false;
    for (auto& [j, cj] : t.rows[static_cast<size_t>(n)]) {
        poly[static_cast<size_t>(j)] = mpq_class(static_cast<long>(cj));
        nz = true;
    }
    if (!nz) return CycNum::zero(F);
    return CycNum(F, poly);
}

struct TailCache {
    int64_t N;
    int64_t prec;
    CycFieldPtr F;
    std::map<std::pair<int64_t, int64_t>, std::pair<CycNum, GrSeries>> cache;
    const std::pair<CycNum, GrSeries>& get(std::array<int64_t, 2> u) {
        auto key = std::make_pair(u[0], u[1]);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache
                     .emplace(key, std::make_pair(qexp_f1_a0(F, u[0], u[1]),
                                                  f1_tail_gr(N, u[0], u[1], prec)))
                     .first;
        return it->second;
    }
};

}  // namespace

QExp qexp_slashed_product(int64_t N, const std::vector<WeightedPair>& pairs, const SL2Rep& M,
                          int64_t prec) {
    auto F = CycField::make(N);
    std::vector<CycNum> out(static_cast<size_t>(prec), CycNum::zero(F));
    std::vector<int64_t> buffer(static_cast<size_t>(N), 0);
    TailCache tails{N, prec, F, {}};
    for (const WeightedPair& wp : pairs) {
        std::array<int64_t, 2> vm = vec_times_sl2(wp.v, M, N);
        std::array<int64_t, 2> wm = vec_times_sl2(wp.w, M, N);
        const auto& [a0f, tf] = tails.get(vm);
        const auto& [a0g, tg] = tails.get(wm);
        CycNum w = CycNum::from_q(F, wp.weight);
        out[0] += (a0f * a0g) * w;
        for (int64_t n = 1; n < prec; ++n) {
            CycNum term = a0f * row_to_cyc(F, tg, n) + a0g * row_to_cyc(F, tf, n);
            if (n >= 2) {
                tail_conv_at(tf, tg, n, buffer);
                term += gr_to_cyc(F, buffer);
            }
            if (!term.is_zero()) out[static_cast<size_t>(n)] += term * w;
        }
    }
    QExp r;
    r.F = F;
    r.lead = 0;
    r.prec = prec;
    r.a = std::move(out);
    r.trim();
    return r;
}

std::vector<CycNum> qexp_slashed_coeffs(int64_t N, const std::vector<WeightedPair>& pairs,
                                        const SL2Rep& M, const std::vector<int64_t>& indices) {
    auto F = CycField::make(N);
    int64_t prec = 1;
    for (int64_t n : indices) prec = std::max(prec, n + 1);
    std::vector<CycNum> out(indices.size(), CycNum::zero(F));
    std::vector<int64_t> buffer(static_cast<size_t>(N), 0);
    TailCache tails{N, prec, F, {}};
    for (const WeightedPair& wp : pairs) {
        std::array<int64_t, 2> vm = vec_times_sl2(wp.v, M, N);
        std::array<int64_t, 2> wm = vec_times_sl2(wp.w, M, N);
        const auto& [a0f, tf] = tails.get(vm);
        const auto& [a0g, tg] = tails.get(wm);
        CycNum w = CycNum::from_q(F, wp.weight);
        for (size_t k = 0; k < indices.size(); ++k) {
            int64_t n = indices[k];
            CycNum term = n == 0 ? a0f * a0g
                                 : a0f * row_to_cyc(F, tg, n) + a0g * row_to_cyc(F, tf, n);
            if (n >= 2) {
                tail_conv_at(tf, tg, n, buffer);
                term += gr_to_cyc(F, buffer);
            }
            if (!term.is_zero()) out[k] += term * w;
        }
    }
    return out;
}

std::vector<WeightedPair> trace_pairs(const CongruenceData& cd, std::array<int64_t, 2> v,
                                      std::array<int64_t, 2> w) {
    int64_t N = cd.N;
    std::vector<WeightedPair> out;
    out.reserve(cd.H.size() * static_cast<size_t>(N));
    for (int64_t h : cd.H) {
        int64_t hinv = inv_mod_i64(h, N);
        for (int64_t x = 0; x < N; ++x) {
            WeightedPair wp;
            wp.v = {mod_i64(v[0] * hinv, N), mod_i64(v[0] * x + v[1] * h, N)};
            wp.w = {mod_i64(w[0] * hinv, N), mod_i64(w[0] * x + w[1] * h, N)};
            out.push_back(wp);
        }
    }
    return out;
}

CycNum trace_constant_at(const CongruenceData& cd, std::array<int64_t, 2> v,
                         std::array<int64_t, 2> w, const SL2Rep& M) {
    auto F = CycField::make(cd.N);
    CycNum sum = CycNum::zero(F);
    for (const WeightedPair& wp : trace_pairs(cd, v, w)) {
        std::array<int64_t, 2> vm = vec_times_sl2(wp.v, M, cd.N);
        std::array<int64_t, 2> wm = vec_times_sl2(wp.w, M, cd.N);
        sum += qexp_f1_a0(F, vm[0], vm[1]) * qexp_f1_a0(F, wm[0], wm[1]);
    }
    return sum;
}

}  // namespace galrep
