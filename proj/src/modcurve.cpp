#include "galrep/modcurve.hpp"

#include <algorithm>
#include <set>

namespace galrep {

SL2Rep sl2_mul(const SL2Rep& a, const SL2Rep& b, int64_t N) {
    SL2Rep r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.m[i][j] = mod_i64(a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j], N);
    return r;
}

CongruenceData CongruenceData::make(int64_t N, const std::vector<int64_t>& gens) {
    check(N >= 2, "CongruenceData: N >= 2 required");
    CongruenceData cd;
    cd.N = N;
    std::set<int64_t> h{1, mod_i64(-1, N)};
    for (int64_t g : gens) {
        int64_t x = mod_i64(g, N);
        check(std::gcd(x, N) == 1, "CongruenceData: generator not a unit");
        h.insert(x);
    }
    // close under multiplication
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<int64_t> cur(h.begin(), h.end());
        for (int64_t x : cur)
            for (int64_t y : cur)
                if (h.insert(mod_i64(x * y, N)).second) grew = true;
    }
    cd.H.assign(h.begin(), h.end());
    check(euler_phi(N) % static_cast<int64_t>(cd.H.size()) == 0,
          "CongruenceData: #H must divide phi(N)");
    return cd;
}

CongruenceData CongruenceData::full(int64_t N) {
    CongruenceData cd;
    cd.N = N;
    cd.H = units_mod(N);
    return cd;
}

void CongruenceData::build_mask() const {
    if (!h_mask_.empty()) return;
    h_mask_.assign(N, false);
    for (int64_t h : H) h_mask_[h] = true;
}

bool CongruenceData::in_H(int64_t x) const {
    build_mask();
    return h_mask_[mod_i64(x, N)];
}

CuspLabel CongruenceData::canonical_cusp(int64_t c, int64_t d) const {
    c = mod_i64(c, N);
    int64_t g = c == 0 ? N : std::gcd(c, N);
    d = mod_i64(d, g);
    CuspLabel best{-1, -1};
    for (int64_t h : H) {
        int64_t hc = mod_i64(h * c, N);
        int64_t hd = mod_i64(h * d, g);
        if (best.c < 0 || hc < best.c || (hc == best.c && hd < best.d)) best = {hc, hd};
    }
    return best;
}

std::pair<int64_t, int64_t> CongruenceData::canonical_fibre(int64_t c, int64_t d) const {
    c = mod_i64(c, N);
    d = mod_i64(d, N);
    std::pair<int64_t, int64_t> best{-1, -1};
    for (int64_t h : H) {
        std::pair<int64_t, int64_t> cand{mod_i64(h * c, N), mod_i64(h * d, N)};
        if (best.first < 0 || cand < best) best = cand;
    }
    return best;
}

std::vector<CuspLabel> enumerate_cusps(const CongruenceData& cd) {
    std::set<CuspLabel> seen;
    for (int64_t c = 0; c < cd.N; ++c) {
        int64_t g = c == 0 ? cd.N : std::gcd(c, cd.N);
        if (g == 1) {
            seen.insert(cd.canonical_cusp(c, 0));
            continue;
        }
        for (int64_t d = 0; d < g; ++d) {
            if (std::gcd(d, g) != 1) continue;
            seen.insert(cd.canonical_cusp(c, d));
        }
    }
    return std::vector<CuspLabel>(seen.begin(), seen.end());
}

namespace {

// Solve a*dp - b*c = 1 mod N for (a, b); requires gcd(c, dp, N) = 1.
std::optional<SL2Rep> complete_bottom_row(int64_t N, int64_t c, int64_t dp) {
    c = mod_i64(c, N);
    dp = mod_i64(dp, N);
    if (std::gcd(std::gcd(c, dp), N) != 1) return std::nullopt;
    int64_t u, v;
    int64_t g = xgcd_i64(dp, c, u, v);  // u*dp + v*c = g
    if (g == 0) return std::nullopt;
    if (std::gcd(mod_i64(g, N), N) != 1) return std::nullopt;
    int64_t ginv = inv_mod_i64(g, N);
    SL2Rep M;
    M.m[0][0] = mod_i64(u * ginv, N);
    M.m[0][1] = mod_i64(-v * ginv, N);
    M.m[1][0] = c;
    M.m[1][1] = dp;
    return M;
}

}  // namespace

SL2Rep cusp_matrix(const CongruenceData& cd, const CuspLabel& s) {
    int64_t g = s.c == 0 ? cd.N : std::gcd(s.c, cd.N);
    for (int64_t k = 0; k * g < cd.N || k == 0; ++k) {
        int64_t dp = mod_i64(s.d + k * g, cd.N);
        auto M = complete_bottom_row(cd.N, s.c, dp);
        if (M) return *M;
    }
    throw Error("cusp_matrix: no SL2 extension found");
}

std::vector<SL2Rep> cusp_matrices_all(const CongruenceData& cd, const CuspLabel& s, int max_count) {
    std::vector<SL2Rep> out;
    int64_t g = s.c == 0 ? cd.N : std::gcd(s.c, cd.N);
    for (int64_t h : cd.H) {
        int64_t hc = mod_i64(h * s.c, cd.N);
        for (int64_t k = 0; k * g < cd.N || k == 0; ++k) {
            int64_t dp = mod_i64(h * s.d + k * g, cd.N);
            auto M0 = complete_bottom_row(cd.N, hc, dp);
            if (!M0) continue;
            for (int64_t t = 0; t < cd.N; ++t) {
                SL2Rep M = *M0;
                M.m[0][0] = mod_i64(M.m[0][0] + t * hc, cd.N);
                M.m[0][1] = mod_i64(M.m[0][1] + t * dp, cd.N);
                out.push_back(M);
                if (static_cast<int>(out.size()) >= max_count) return out;
            }
        }
    }
    return out;
}

int64_t cusp_width(const CongruenceData& cd, const CuspLabel& s) {
    SL2Rep M = cusp_matrix(cd, s);
    int64_t a = M.m[0][0], c = M.m[1][0];
    int64_t c2 = mod_i64(c * c, cd.N);
    int64_t g2 = c2 == 0 ? cd.N : std::gcd(c2, cd.N);
    int64_t N2 = cd.N / g2;
    int64_t acN2 = mod_i64(mod_i64(a * c, cd.N) * N2, cd.N);
    for (int64_t t = 1; t <= cd.N; ++t) {
        if (cd.in_H(1 + acN2 * t)) return N2 * t;
    }
    throw Error("cusp_width: no stabilizing translation found");
}

CuspLabel galois_on_cusp(const CongruenceData& cd, int64_t x, const CuspLabel& s) {
    check(std::gcd(mod_i64(x, cd.N), cd.N) == 1, "galois_on_cusp: x must be a unit");
    return cd.canonical_cusp(s.c, x * s.d);
}

bool yields_rational_qexp(const CongruenceData& cd, const SL2Rep& M) {
    int64_t N = cd.N;
    int64_t a = M.m[0][0], c = M.m[1][0], d = M.m[1][1];
    check(mod_i64(M.m[0][0] * M.m[1][1] - M.m[0][1] * M.m[1][0], N) == 1,
          "yields_rational_qexp: det 1 required");
    for (int64_t x = 2; x < N; ++x) {
        if (std::gcd(x, N) != 1) continue;
        if (mod_i64(c * d % N * (x - 1), N) != 0) return false;
        if (!cd.in_H(mod_i64(a * d % N * (x - 1), N) + 1)) return false;
    }
    return true;
}

std::vector<std::pair<CuspLabel, SL2Rep>> rational_qexp_matrices(const CongruenceData& cd) {
    std::vector<std::pair<CuspLabel, SL2Rep>> out;
    for (const CuspLabel& s : enumerate_cusps(cd)) {
        bool found = false;
        int64_t g = s.c == 0 ? cd.N : std::gcd(s.c, cd.N);
        for (int64_t h : cd.H) {
            if (found) break;
            int64_t hc = mod_i64(h * s.c, cd.N);
            for (int64_t k = 0; (k * g < cd.N || k == 0) && !found; ++k) {
                int64_t dp = mod_i64(h * s.d + k * g, cd.N);
                auto M0 = complete_bottom_row(cd.N, hc, dp);
                if (!M0) continue;
                for (int64_t t = 0; t < cd.N && !found; ++t) {
                    SL2Rep M = *M0;
                    M.m[0][0] = mod_i64(M.m[0][0] + t * hc, cd.N);
                    M.m[0][1] = mod_i64(M.m[0][1] + t * dp, cd.N);
                    if (yields_rational_qexp(cd, M)) {
                        out.emplace_back(s, M);
                        found = true;
                    }
                }
            }
        }
    }
    return out;
}

std::vector<std::pair<int64_t, int64_t>> fibre_points(const CongruenceData& cd) {
    std::set<std::pair<int64_t, int64_t>> seen;
    for (int64_t c = 0; c < cd.N; ++c)
        for (int64_t d = 0; d < cd.N; ++d) {
            if (std::gcd(std::gcd(c, d), cd.N) != 1) continue;
            seen.insert(cd.canonical_fibre(c, d));
        }
    return std::vector<std::pair<int64_t, int64_t>>(seen.begin(), seen.end());
}

std::vector<int> fibre_frobenius(const CongruenceData& cd,
                                 const std::array<std::array<int64_t, 2>, 2>& Mp) {
    int64_t det = mod_i64(Mp[0][0] * Mp[1][1] - Mp[0][1] * Mp[1][0], cd.N);
    check(std::gcd(det, cd.N) == 1, "fibre_frobenius: det Mp must be a unit mod N");
    auto pts = fibre_points(cd);
    std::map<std::pair<int64_t, int64_t>, int> index;
    for (size_t i = 0; i < pts.size(); ++i) index[pts[i]] = static_cast<int>(i);
    std::vector<int> perm(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        auto [c, d] = pts[i];
        // v * (transpose Mp) = (Mp v^T)^T
        int64_t nc = mod_i64(Mp[0][0] * c + Mp[0][1] * d, cd.N);
        int64_t nd = mod_i64(Mp[1][0] * c + Mp[1][1] * d, cd.N);
        perm[i] = index.at(cd.canonical_fibre(nc, nd));
    }
    return perm;
}

namespace {

int64_t count_fixed(const CongruenceData& cd, int64_t m00, int64_t m01, int64_t m10, int64_t m11) {
    auto pts = fibre_points(cd);
    int64_t fixed = 0;
    for (auto [c, d] : pts) {
        int64_t nc = mod_i64(c * m00 + d * m10, cd.N);
        int64_t nd = mod_i64(c * m01 + d * m11, cd.N);
        if (cd.canonical_fibre(nc, nd) == std::make_pair(c, d)) ++fixed;
    }
    return fixed;
}

}  // namespace

int64_t nu2_count(const CongruenceData& cd) {
    // right multiplication by S = (0 -1; 1 0)
    return count_fixed(cd, 0, -1, 1, 0);
}

int64_t nu3_count(const CongruenceData& cd) {
    // right multiplication by ST = (0 -1; 1 -1), order 3 in PSL2
    return count_fixed(cd, 0, -1, 1, -1);
}

int64_t genus_formula(const CongruenceData& cd) {
    int64_t d = static_cast<int64_t>(fibre_points(cd).size());
    int64_t nu2 = nu2_count(cd), nu3 = nu3_count(cd);
    int64_t nuoo = static_cast<int64_t>(enumerate_cusps(cd).size());
    mpq_class g = 1 + frac(d, 12) - frac(nu2, 4) - frac(nu3, 3) - frac(nuoo, 2);
    check(g.get_den() == 1, "genus_formula: non-integral genus");
    return g.get_num().get_si();
}

std::vector<int> cusp_galois_orbits(const CongruenceData& cd, const std::vector<CuspLabel>& cusps) {
    std::map<CuspLabel, int> index;
    for (size_t i = 0; i < cusps.size(); ++i) index[cusps[i]] = static_cast<int>(i);
    std::vector<int> orbit(cusps.size(), -1);
    int next = 0;
    for (size_t i = 0; i < cusps.size(); ++i) {
        if (orbit[i] >= 0) continue;
        int id = next++;
        std::vector<int> stack{static_cast<int>(i)};
        orbit[i] = id;
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (int64_t x = 1; x < cd.N; ++x) {
                if (std::gcd(x, cd.N) != 1) continue;
                int j = index.at(galois_on_cusp(cd, x, cusps[cur]));
                if (orbit[j] < 0) {
                    orbit[j] = id;
                    stack.push_back(j);
                }
            }
        }
    }
    return orbit;
}

}  // namespace galrep
