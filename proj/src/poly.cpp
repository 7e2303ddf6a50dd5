#include "galrep/poly.hpp"

#include <algorithm>
#include <map>

namespace galrep {

// ---------------------------------------------------------------- Z[x] -----
namespace zp {

void trim(ZPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}
int deg(const ZPoly& f) { return static_cast<int>(f.size()) - 1; }

ZPoly add(const ZPoly& f, const ZPoly& g) {
    ZPoly r(std::max(f.size(), g.size()));
    for (size_t i = 0; i < r.size(); ++i)
        r[i] = (i < f.size() ? f[i] : 0) + (i < g.size() ? g[i] : 0);
    trim(r);
    return r;
}

ZPoly sub(const ZPoly& f, const ZPoly& g) {
    ZPoly r(std::max(f.size(), g.size()));
    for (size_t i = 0; i < r.size(); ++i)
        r[i] = (i < f.size() ? f[i] : 0) - (i < g.size() ? g[i] : 0);
    trim(r);
    return r;
}

ZPoly mul(const ZPoly& f, const ZPoly& g) {
    if (f.empty() || g.empty()) return {};
    ZPoly r(f.size() + g.size() - 1);
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0) continue;
        for (size_t j = 0; j < g.size(); ++j) r[i + j] += f[i] * g[j];
    }
    trim(r);
    return r;
}

ZPoly neg(const ZPoly& f) {
    ZPoly r = f;
    for (auto& c : r) c = -c;
    return r;
}

ZPoly divexact(const ZPoly& f, const ZPoly& g) {
    check(!g.empty(), "zp::divexact by zero");
    ZPoly r = f, q;
    if (deg(r) >= deg(g)) q.assign(deg(r) - deg(g) + 1, 0);
    while (deg(r) >= deg(g)) {
        mpz_class c = r.back() / g.back();
        check(c * g.back() == r.back(), "zp::divexact: leading coefficient not divisible");
        int shift = deg(r) - deg(g);
        q[shift] = c;
        for (size_t i = 0; i < g.size(); ++i) r[i + shift] -= c * g[i];
        trim(r);
    }
    check(r.empty(), "zp::divexact: nonzero remainder");
    return q;
}

mpz_class eval(const ZPoly& f, const mpz_class& x) {
    mpz_class v = 0;
    for (size_t i = f.size(); i-- > 0;) v = v * x + f[i];
    return v;
}

ZPoly derivative(const ZPoly& f) {
    ZPoly d;
    for (size_t i = 1; i < f.size(); ++i) d.push_back(mpz_class(static_cast<long>(i)) * f[i]);
    trim(d);
    return d;
}

mpz_class resultant(const ZPoly& f, const ZPoly& g) {
    int m = deg(f), n = deg(g);
    if (m < 0 || n < 0) return 0;
    if (m == 0) return pow_mpz(f[0], n);
    if (n == 0) return pow_mpz(g[0], m);
    int dim = m + n;
    // Sylvester matrix, fraction-free Bareiss elimination.
    std::vector<std::vector<mpz_class>> s(dim, std::vector<mpz_class>(dim, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j) s[i][i + j] = f[m - j];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j) s[n + i][i + j] = g[n - j];
    mpz_class denom = 1;
    int sign = 1;
    for (int k = 0; k < dim - 1; ++k) {
        if (s[k][k] == 0) {
            int piv = -1;
            for (int i = k + 1; i < dim; ++i)
                if (s[i][k] != 0) { piv = i; break; }
            if (piv < 0) return 0;
            std::swap(s[k], s[piv]);
            sign = -sign;
        }
        for (int i = k + 1; i < dim; ++i) {
            for (int j = k + 1; j < dim; ++j) {
                mpz_class t = s[i][j] * s[k][k] - s[i][k] * s[k][j];
                s[i][j] = t / denom;
            }
            s[i][k] = 0;
        }
        denom = s[k][k];
    }
    return sign * s[dim - 1][dim - 1];
}

ZPoly x_pow_minus_1(int64_t n) {
    ZPoly f(n + 1, 0);
    f[0] = -1;
    f[n] = 1;
    return f;
}

ZPoly cyclotomic(int64_t n) {
    static std::map<int64_t, ZPoly> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    ZPoly f = x_pow_minus_1(n);
    for (int64_t d = 1; d < n; ++d)
        if (n % d == 0) f = divexact(f, cyclotomic(d));
    cache[n] = f;
    return f;
}

}  // namespace zp

// ---------------------------------------------------------------- Q[x] -----
namespace qp {

void trim(QPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}
int deg(const QPoly& f) { return static_cast<int>(f.size()) - 1; }

QPoly from_z(const ZPoly& f) {
    QPoly r(f.size());
    for (size_t i = 0; i < f.size(); ++i) r[i] = mpq_class(f[i]);
    return r;
}

QPoly add(const QPoly& f, const QPoly& g) {
    QPoly r(std::max(f.size(), g.size()));
    for (size_t i = 0; i < r.size(); ++i)
        r[i] = (i < f.size() ? f[i] : mpq_class(0)) + (i < g.size() ? g[i] : mpq_class(0));
    trim(r);
    return r;
}

QPoly sub(const QPoly& f, const QPoly& g) {
    QPoly r(std::max(f.size(), g.size()));
    for (size_t i = 0; i < r.size(); ++i)
        r[i] = (i < f.size() ? f[i] : mpq_class(0)) - (i < g.size() ? g[i] : mpq_class(0));
    trim(r);
    return r;
}

QPoly mul(const QPoly& f, const QPoly& g) {
    if (f.empty() || g.empty()) return {};
    QPoly r(f.size() + g.size() - 1, mpq_class(0));
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0) continue;
        for (size_t j = 0; j < g.size(); ++j) r[i + j] += f[i] * g[j];
    }
    trim(r);
    return r;
}

std::pair<QPoly, QPoly> divrem(const QPoly& f, const QPoly& g) {
    check(!g.empty(), "qp::divrem by zero");
    QPoly r = f, q;
    if (deg(r) >= deg(g)) q.assign(deg(r) - deg(g) + 1, mpq_class(0));
    while (deg(r) >= deg(g)) {
        mpq_class c = r.back() / g.back();
        int shift = deg(r) - deg(g);
        q[shift] = c;
        for (size_t i = 0; i < g.size(); ++i) r[i + shift] -= c * g[i];
        trim(r);
    }
    trim(q);
    return {q, r};
}

QPoly gcd(QPoly f, QPoly g) {
    while (!g.empty()) {
        QPoly r = divrem(f, g).second;
        f = std::move(g);
        g = std::move(r);
    }
    if (!f.empty()) {
        mpq_class lc = f.back();
        for (auto& c : f) c /= lc;
    }
    return f;
}

QPoly derivative(const QPoly& f) {
    QPoly d;
    for (size_t i = 1; i < f.size(); ++i) d.push_back(mpq_class(static_cast<long>(i)) * f[i]);
    trim(d);
    return d;
}

std::pair<ZPoly, mpz_class> to_integer(const QPoly& f) {
    mpz_class den = 1;
    for (auto& c : f) {
        mpz_class d = c.get_den();
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
        den = den / g * d;
    }
    ZPoly r(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        mpq_class v = f[i] * mpq_class(den);
        check(v.get_den() == 1, "to_integer: denominator did not clear");
        r[i] = v.get_num();
    }
    return {r, den};
}

}  // namespace qp

// ------------------------------------------------- (Z_q/p^e)[x] ------------
namespace rp {

void trim(RPoly& f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
}
int deg(const RPoly& f) { return static_cast<int>(f.size()) - 1; }

RPoly from_z(const ZPoly& f, const CtxPtr& ctx) {
    RPoly r(f.size(), RingElem::zero(ctx));
    for (size_t i = 0; i < f.size(); ++i) r[i] = RingElem::from_int(ctx, f[i]);
    trim(r);
    return r;
}

RPoly add(const RPoly& f, const RPoly& g, const CtxPtr& ctx) {
    RPoly r(std::max(f.size(), g.size()), RingElem::zero(ctx));
    for (size_t i = 0; i < r.size(); ++i) {
        if (i < f.size()) r[i] += f[i];
        if (i < g.size()) r[i] += g[i];
    }
    trim(r);
    return r;
}

RPoly sub(const RPoly& f, const RPoly& g, const CtxPtr& ctx) {
    RPoly r(std::max(f.size(), g.size()), RingElem::zero(ctx));
    for (size_t i = 0; i < r.size(); ++i) {
        if (i < f.size()) r[i] += f[i];
        if (i < g.size()) r[i] -= g[i];
    }
    trim(r);
    return r;
}

RPoly mul(const RPoly& f, const RPoly& g, const CtxPtr& ctx) {
    if (f.empty() || g.empty()) return {};
    RPoly r(f.size() + g.size() - 1, RingElem::zero(ctx));
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i].is_zero()) continue;
        for (size_t j = 0; j < g.size(); ++j)
            if (!g[j].is_zero()) r[i + j] += f[i] * g[j];
    }
    trim(r);
    return r;
}

RingElem eval(const RPoly& f, const RingElem& x) {
    RingElem v = RingElem::zero(x.ctx());
    for (size_t i = f.size(); i-- > 0;) v = v * x + f[i];
    return v;
}

RPoly derivative(const RPoly& f, const CtxPtr& ctx) {
    RPoly d;
    for (size_t i = 1; i < f.size(); ++i)
        d.push_back(f[i].mul_int(mpz_class(static_cast<long>(i))));
    trim(d);
    (void)ctx;
    return d;
}

std::pair<RPoly, RPoly> divrem(const RPoly& f, const RPoly& g, const CtxPtr& ctx) {
    check(!g.empty(), "rp::divrem by zero");
    check(g.back().is_unit(), "rp::divrem: divisor leading coefficient must be a unit");
    RingElem inv_lc = g.back().inverse();
    RPoly r = f, q;
    if (deg(r) >= deg(g)) q.assign(deg(r) - deg(g) + 1, RingElem::zero(ctx));
    while (deg(r) >= deg(g)) {
        RingElem c = r.back() * inv_lc;
        int shift = deg(r) - deg(g);
        q[shift] = c;
        for (size_t i = 0; i < g.size(); ++i) r[i + shift] -= c * g[i];
        trim(r);
    }
    trim(q);
    return {q, r};
}

RPoly divexact(const RPoly& f, const RPoly& g, const CtxPtr& ctx) {
    auto [q, r] = divrem(f, g, ctx);
    check(r.empty(), "rp::divexact: nonzero remainder");
    return q;
}

RPoly powmod(RPoly base, mpz_class n, const RPoly& m, const CtxPtr& ctx) {
    RPoly r{RingElem::one(ctx)};
    base = divrem(base, m, ctx).second;
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) r = divrem(mul(r, base, ctx), m, ctx).second;
        base = divrem(mul(base, base, ctx), m, ctx).second;
        n >>= 1;
    }
    return r;
}

RPoly gcd_fq(RPoly f, RPoly g, const CtxPtr& ctx) {
    check(ctx->e == 1, "gcd_fq: residue field context required");
    while (!g.empty()) {
        RPoly r = divrem(f, g, ctx).second;
        f = std::move(g);
        g = std::move(r);
    }
    if (!f.empty()) {
        RingElem inv = f.back().inverse();
        for (auto& c : f) c = c * inv;
    }
    return f;
}

RPoly reduce(const RPoly& f, const CtxPtr& target) {
    RPoly r;
    r.reserve(f.size());
    for (auto& c : f) r.push_back(c.reduce(target));
    trim(r);
    return r;
}

std::vector<RingElem> some_roots_split_fq(const RPoly& f, const CtxPtr& ctx, Rng& rng, int want) {
    check(ctx->e == 1, "roots_split_fq: residue field context required");
    std::vector<RingElem> out;
    std::vector<RPoly> stack{f};
    mpz_class q = pow_mpz(ctx->p, ctx->a);
    while (!stack.empty() && static_cast<int>(out.size()) < want) {
        // favor the smallest piece so linear factors surface early
        size_t best = stack.size() - 1;
        for (size_t i = 0; i < stack.size(); ++i)
            if (deg(stack[i]) < deg(stack[best])) best = i;
        RPoly h = stack[best];
        stack.erase(stack.begin() + static_cast<long>(best));
        if (deg(h) <= 0) continue;
        if (deg(h) == 1) {
            out.push_back(-(h[0] * h[1].inverse()));
            continue;
        }
        // (x + delta)^((q-1)/2) - 1 splits h into two pieces on average.
        RPoly split;
        for (int tries = 0; tries < 200; ++tries) {
            RPoly lin{RingElem::random(ctx, rng), RingElem::one(ctx)};
            RPoly pw = powmod(lin, (q - 1) / 2, h, ctx);
            if (!pw.empty()) pw[0] -= RingElem::one(ctx);
            trim(pw);
            RPoly g = gcd_fq(pw, h, ctx);
            if (deg(g) > 0 && deg(g) < deg(h)) { split = g; break; }
        }
        check(!split.empty(), "roots_split_fq: splitting failed (polynomial may not split)");
        stack.push_back(split);
        stack.push_back(divexact(h, split, ctx));
    }
    return out;
}

std::vector<RingElem> roots_split_fq(const RPoly& f, const CtxPtr& ctx, Rng& rng) {
    return some_roots_split_fq(f, ctx, rng, deg(f) + 1);
}

}  // namespace rp

RingElem hensel_lift_root(const RPoly& f, const RingElem& r0) {
    const CtxPtr& ctx = r0.ctx();
    RPoly df = rp::derivative(f, ctx);
    RingElem d0 = rp::eval(df, r0);
    if (!d0.is_unit()) throw NotSimpleRoot();
    {
        // f(r0) must vanish mod p.
        CtxPtr f1 = ctx->view(1);
        if (!rp::eval(rp::reduce(f, f1), r0.reduce(f1)).is_zero())
            throw NotSimpleRoot("hensel_lift_root: not a root mod p");
    }
    RingElem r = r0;
    int steps = 1;
    while ((1 << steps) < 2 * ctx->e) ++steps;
    for (int i = 0; i <= steps; ++i) {
        RingElem fr = rp::eval(f, r);
        if (fr.is_zero()) break;
        r = r - fr * rp::eval(df, r).inverse();
    }
    check(rp::eval(f, r).is_zero(), "hensel_lift_root: no convergence");
    return r;
}

}  // namespace galrep
