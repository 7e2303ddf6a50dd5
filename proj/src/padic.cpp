#include "galrep/padic.hpp"

#include <algorithm>
#include <sstream>

#include "galrep/fppoly.hpp"

namespace galrep {

namespace {

// Horner evaluation of a scalar-coefficient polynomial at a ring element.
RingElem eval_scalar_poly(const std::vector<mpz_class>& f, const RingElem& r) {
    RingElem acc = RingElem::zero(r.ctx());
    for (size_t i = f.size(); i-- > 0;) {
        acc = acc * r + RingElem::from_int(r.ctx(), f[i]);
    }
    return acc;
}

std::vector<mpz_class> scalar_derivative(const std::vector<mpz_class>& f) {
    std::vector<mpz_class> d;
    for (size_t i = 1; i < f.size(); ++i) d.push_back(mpz_class(static_cast<long>(i)) * f[i]);
    return d;
}

// Newton iteration for a simple root of a scalar-coefficient polynomial,
// starting from a root mod p. The derivative must be a unit at the start.
RingElem newton_scalar_root(const std::vector<mpz_class>& f, const RingElem& r0) {
    std::vector<mpz_class> df = scalar_derivative(f);
    RingElem r = r0;
    int e = r.ctx()->e;
    int steps = 1;
    while ((1 << steps) < 2 * e) ++steps;  // accuracy doubles per step
    for (int i = 0; i <= steps; ++i) {
        RingElem fr = eval_scalar_poly(f, r);
        if (fr.is_zero()) break;
        RingElem dfr = eval_scalar_poly(df, r);
        if (!dfr.is_unit()) throw NotSimpleRoot();
        r = r - fr * dfr.inverse();
    }
    if (!eval_scalar_poly(f, r).is_zero()) throw NotSimpleRoot("newton_scalar_root: no convergence");
    return r;
}

}  // namespace

CtxPtr PAdicContext::make(const mpz_class& p, int a, int e) {
    check(p >= 2 && a >= 1 && e >= 1, "PAdicContext: bad parameters");
    check(p.fits_slong_p(), "PAdicContext: p must fit a machine word");
    int64_t pl = p.get_si();
    check(is_prime(pl), "PAdicContext: p must be prime");

    auto ctx = std::shared_ptr<PAdicContext>(new PAdicContext());
    ctx->p = p;
    ctx->a = a;
    ctx->e = e;
    mpz_pow_ui(ctx->pe.get_mpz_t(), p.get_mpz_t(), e);

    // Lexicographically least monic irreducible of degree a over F_p,
    // coefficient vectors (c_{a-1},...,c_0) ordered by counter value.
    FpPoly f;
    if (a == 1) {
        f = {0, 1};
    } else {
        mpz_class counter = 0, bound = pow_mpz(p, a);
        for (; counter < bound; ++counter) {
            FpPoly cand(a + 1, 0);
            cand[a] = 1;
            mpz_class rest = counter;
            for (int i = a - 1; i >= 0; --i) {
                mpz_class digit = rest % p;
                cand[i] = digit.get_si();
                rest /= p;
            }
            std::reverse(cand.begin(), cand.end() - 1);
            if (fp::is_irreducible(cand, pl)) {
                f = cand;
                break;
            }
        }
        check(!f.empty(), "PAdicContext: no irreducible found");
    }
    ctx->defpoly.resize(a + 1);
    for (int i = 0; i <= a; ++i) ctx->defpoly[i] = f[i];

    // Frobenius: sigma(t) is the root of defpoly congruent to t^p mod p.
    CtxPtr cptr = ctx;
    ctx->frob_pow_.assign(a, std::vector<mpz_class>(a));
    if (a == 1) {
        ctx->frob_pow_[0][0] = 1;
    } else {
        RingElem t = RingElem::gen(cptr);
        RingElem tp = t.pow(p);  // already a root mod p
        RingElem st = newton_scalar_root(ctx->defpoly, tp);
        RingElem acc = RingElem::one(cptr);
        for (int i = 0; i < a; ++i) {
            ctx->frob_pow_[i] = acc.coeffs();
            acc = acc * st;
        }
    }
    return cptr;
}

CtxPtr PAdicContext::view(int e2) const {
    check(e2 >= 1 && e2 <= e, "PAdicContext::view: bad accuracy");
    if (e2 == e) return shared_from_this();
    auto it = views_.find(e2);
    if (it != views_.end()) return it->second;

    auto sub = std::shared_ptr<PAdicContext>(new PAdicContext());
    sub->p = p;
    sub->a = a;
    sub->e = e2;
    mpz_pow_ui(sub->pe.get_mpz_t(), p.get_mpz_t(), e2);
    sub->defpoly.resize(a + 1);
    for (int i = 0; i <= a; ++i) sub->defpoly[i] = mod_mpz(defpoly[i], sub->pe);
    sub->frob_pow_.assign(a, std::vector<mpz_class>(a));
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j) sub->frob_pow_[i][j] = mod_mpz(frob_pow_[i][j], sub->pe);
    views_[e2] = sub;
    return sub;
}

RingElem RingElem::operator+(const RingElem& o) const {
    std::vector<mpz_class> v(ctx_->a);
    for (int i = 0; i < ctx_->a; ++i) v[i] = c_[i] + o.c_[i];
    return RingElem(ctx_, std::move(v));
}

RingElem RingElem::operator-(const RingElem& o) const {
    std::vector<mpz_class> v(ctx_->a);
    for (int i = 0; i < ctx_->a; ++i) v[i] = c_[i] - o.c_[i];
    return RingElem(ctx_, std::move(v));
}

RingElem RingElem::operator-() const {
    std::vector<mpz_class> v(ctx_->a);
    for (int i = 0; i < ctx_->a; ++i) v[i] = -c_[i];
    return RingElem(ctx_, std::move(v));
}

RingElem RingElem::operator*(const RingElem& o) const {
    int a = ctx_->a;
    if (a == 1) {
        std::vector<mpz_class> v(1);
        v[0] = mod_mpz(c_[0] * o.c_[0], ctx_->pe);
        return RingElem(ctx_, std::move(v));
    }
    std::vector<mpz_class> prod(2 * a - 1);
    for (int i = 0; i < a; ++i) {
        if (c_[i] == 0) continue;
        for (int j = 0; j < a; ++j) {
            if (o.c_[j] == 0) continue;
            prod[i + j] += c_[i] * o.c_[j];
        }
    }
    // Reduce by the monic defining polynomial.
    for (int k = 2 * a - 2; k >= a; --k) {
        if (prod[k] == 0) continue;
        mpz_class lead = mod_mpz(prod[k], ctx_->pe);
        prod[k] = 0;
        for (int i = 0; i < a; ++i) prod[k - a + i] -= lead * ctx_->defpoly[i];
    }
    prod.resize(a);
    return RingElem(ctx_, std::move(prod));
}

RingElem RingElem::mul_int(const mpz_class& n) const {
    std::vector<mpz_class> v(ctx_->a);
    mpz_class m = mod_mpz(n, ctx_->pe);
    for (int i = 0; i < ctx_->a; ++i) v[i] = c_[i] * m;
    return RingElem(ctx_, std::move(v));
}

RingElem RingElem::inverse() const {
    if (!is_unit()) throw NonUnitDenominator("RingElem::inverse of non-unit");
    int64_t pl = ctx_->p.get_si();
    // Invert the reduction mod p in F_q = F_p[t]/(defpoly) by poly xgcd.
    FpPoly fbar(ctx_->a + 1), xbar(ctx_->a);
    for (int i = 0; i <= ctx_->a; ++i) fbar[i] = mod_mpz(ctx_->defpoly[i], ctx_->p).get_si();
    for (int i = 0; i < ctx_->a; ++i) xbar[i] = mod_mpz(c_[i], ctx_->p).get_si();
    fp::trim(fbar);
    fp::trim(xbar);
    // Extended Euclid over F_p[t].
    FpPoly r0 = fbar, r1 = xbar, s0 = {}, s1 = {1};
    while (fp::deg(r1) > 0) {
        auto [q, r] = fp::divrem(r0, r1, pl);
        FpPoly s = fp::sub(s0, fp::mul(q, s1, pl), pl);
        r0 = std::move(r1); r1 = std::move(r);
        s0 = std::move(s1); s1 = std::move(s);
    }
    check(!r1.empty(), "inverse: gcd hit zero");
    int64_t c = inv_mod_i64(r1[0], pl);
    std::vector<mpz_class> y0(ctx_->a);
    for (int i = 0; i < ctx_->a && i < static_cast<int>(s1.size()); ++i)
        y0[i] = mod_i64(s1[i] * c % pl, pl);
    RingElem y(ctx_, std::move(y0));
    // Newton refinement y <- y(2 - xy).
    RingElem two = RingElem::from_int(ctx_, 2);
    for (int prec = 1; prec < ctx_->e; prec *= 2) y = y * (two - *this * y);
    return y;
}

RingElem RingElem::pow(mpz_class n) const {
    if (n < 0) return inverse().pow(-n);
    RingElem r = RingElem::one(ctx_), b = *this;
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

RingElem RingElem::reduce(const CtxPtr& target) const {
    check(target->same_tower(*ctx_) && target->e <= ctx_->e, "reduce: incompatible context");
    std::vector<mpz_class> v(c_);
    return RingElem(target, std::move(v));
}

RingElem RingElem::lift_naive(const CtxPtr& target) const {
    check(target->same_tower(*ctx_) && target->e >= ctx_->e, "lift_naive: incompatible context");
    std::vector<mpz_class> v(c_);
    return RingElem(target, std::move(v));
}

std::string RingElem::str() const {
    std::ostringstream os;
    for (int i = 0; i < ctx_->a; ++i) {
        if (i) os << ",";
        os << c_[i].get_str();
    }
    return os.str();
}

RingElem frobenius(const RingElem& x) {
    const auto& pows = x.ctx()->frob_powers();
    int a = x.ctx()->a;
    std::vector<mpz_class> v(a);
    for (int i = 0; i < a; ++i) {
        if (x.coeffs()[i] == 0) continue;
        for (int j = 0; j < a; ++j) v[j] += x.coeffs()[i] * pows[i][j];
    }
    return RingElem(x.ctx(), std::move(v));
}

RingElem frobenius_iter(const RingElem& x, int k) {
    int a = x.ctx()->a;
    k = ((k % a) + a) % a;
    RingElem y = x;
    for (int i = 0; i < k; ++i) y = frobenius(y);
    return y;
}

RingElem teichmuller(const RingElem& x) {
    mpz_class q = pow_mpz(x.ctx()->p, x.ctx()->a);
    RingElem y = x;
    for (int i = 0; i < x.ctx()->e; ++i) y = y.pow(q);
    return y;
}

RingElem sqrt_unit(const RingElem& x, Rng& rng) {
    check(x.is_unit(), "sqrt_unit: unit required");
    const CtxPtr& ctx = x.ctx();
    CtxPtr f = ctx->view(1);
    RingElem u = x.reduce(f);

    mpz_class q = pow_mpz(ctx->p, ctx->a);
    mpz_class m = q - 1;
    int s = 0;
    while (mpz_even_p(m.get_mpz_t())) { m >>= 1; ++s; }

    check(u.pow((q - 1) / 2) == RingElem::one(f), "sqrt_unit: not a square");
    // Tonelli-Shanks in F_q.
    RingElem z = RingElem::zero(f);
    do {
        z = RingElem::random(f, rng);
    } while (z.is_zero() || z.pow((q - 1) / 2) == RingElem::one(f));
    RingElem c = z.pow(m);
    RingElem t = u.pow(m);
    RingElem r = u.pow((m + 1) / 2);
    int mexp = s;
    while (t != RingElem::one(f)) {
        RingElem tt = t;
        int i = 0;
        while (tt != RingElem::one(f)) { tt *= tt; ++i; }
        RingElem b = c;
        for (int j = 0; j < mexp - i - 1; ++j) b *= b;
        r *= b;
        c = b * b;
        t *= c;
        mexp = i;
    }
    if (ctx->e == 1) return r;
    // Newton refinement y <- (y + x/y)/2 at full accuracy.
    RingElem y = r.lift_naive(ctx);
    RingElem inv2 = RingElem::from_int(ctx, 2).inverse();
    for (int prec = 1; prec < ctx->e; prec *= 2) y = (y + x * y.inverse()) * inv2;
    check((y * y) == x, "sqrt_unit: refinement failed");
    return y;
}

mpz_class dlog_prime_power(const RingElem& base, const RingElem& target, int64_t l, int v) {
    const CtxPtr& ctx = base.ctx();
    mpz_class lv = pow_mpz(mpz_class(static_cast<long>(l)), v);
    if (target.pow(lv) != RingElem::one(ctx)) throw NotInSubgroup();

    // gamma generates the order-l subgroup; BSGS table for it.
    RingElem gamma = base.pow(pow_mpz(mpz_class(static_cast<long>(l)), v - 1));
    int64_t mstep = 1;
    while (mstep * mstep < l) ++mstep;
    std::vector<std::pair<std::string, int64_t>> baby;
    {
        RingElem g = RingElem::one(ctx);
        for (int64_t j = 0; j < mstep; ++j) {
            baby.emplace_back(g.str(), j);
            g *= gamma;
        }
        std::sort(baby.begin(), baby.end());
    }
    RingElem giant = gamma.pow(mstep).inverse();
    auto log_gamma = [&](RingElem h) -> int64_t {
        for (int64_t i = 0; i * mstep < l + mstep; ++i) {
            auto key = h.str();
            auto it = std::lower_bound(baby.begin(), baby.end(), std::make_pair(key, int64_t(-1)));
            if (it != baby.end() && it->first == key) return mod_i64(i * mstep + it->second, l);
            h *= giant;
        }
        throw NotInSubgroup("dlog: leaf not found");
    };

    mpz_class x = 0;
    RingElem binv = base.inverse();
    for (int i = 0; i < v; ++i) {
        RingElem h = (target * binv.pow(x)).pow(pow_mpz(mpz_class(static_cast<long>(l)), v - 1 - i));
        int64_t xi = log_gamma(h);
        x += mpz_class(static_cast<long>(xi)) * pow_mpz(mpz_class(static_cast<long>(l)), i);
    }
    return x;
}

mpq_class rational_reconstruction(const mpz_class& x, const mpz_class& pe, const mpz_class& p) {
    mpz_class bound;
    mpz_class half = pe / 2;
    mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());

    mpz_class r0 = pe, r1 = mod_mpz(x, pe);
    mpz_class t0 = 0, t1 = 1;
    while (r1 > bound) {
        mpz_class q = r0 / r1;
        mpz_class r2 = r0 - q * r1;
        mpz_class t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    mpz_class a = r1, b = t1;
    if (b < 0) { a = -a; b = -b; }
    mpz_class absa = abs(a);
    if (b == 0 || absa > bound || b > bound) throw NoSmallFraction();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), b.get_mpz_t(), p.get_mpz_t());
    if (g != 1) throw NoSmallFraction("denominator shares a factor with p");
    if (mod_mpz(a - b * x, pe) != 0) throw NoSmallFraction("congruence check failed");
    mpq_class q(a, b);
    q.canonicalize();
    return q;
}

}  // namespace galrep
