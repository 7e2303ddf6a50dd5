#include "galrep/cyclotomic.hpp"

#include <map>
#include <sstream>

#include "galrep/arith.hpp"

namespace galrep {

std::shared_ptr<const CycField> CycField::make(int64_t N) {
    static std::map<int64_t, std::shared_ptr<const CycField>> cache;
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    auto f = std::make_shared<CycField>();
    f->N = N;
    f->phi = qp::from_z(zp::cyclotomic(N));
    f->d = qp::deg(f->phi);
    cache[N] = f;
    return f;
}

void CycNum::reduce() {
    if (qp::deg(c_) >= f_->d) c_ = qp::divrem(c_, f_->phi).second;
}

CycNum CycNum::zeta_pow(const CycFieldPtr& f, int64_t k) {
    k = mod_i64(k, f->N);
    QPoly m(k + 1, mpq_class(0));
    m[k] = 1;
    return CycNum(f, std::move(m));
}

CycNum CycNum::operator-() const {
    QPoly r = c_;
    for (auto& x : r) x = -x;
    return CycNum(f_, std::move(r));
}

CycNum CycNum::mul_q(const mpq_class& q) const {
    QPoly r = c_;
    for (auto& x : r) x *= q;
    qp::trim(r);
    return CycNum(f_, std::move(r));
}

CycNum CycNum::inverse() const {
    check(!is_zero(), "CycNum::inverse of zero");
    // Extended Euclid over Q[t] against Phi_N.
    QPoly r0 = f_->phi, r1 = c_, s0 = {}, s1 = {mpq_class(1)};
    while (qp::deg(r1) > 0) {
        auto [q, r] = qp::divrem(r0, r1);
        QPoly s = qp::sub(s0, qp::mul(q, s1));
        r0 = std::move(r1); r1 = std::move(r);
        s0 = std::move(s1); s1 = std::move(s);
    }
    check(!r1.empty(), "CycNum::inverse: gcd vanished");
    mpq_class inv_c = 1 / r1[0];
    QPoly res = s1;
    for (auto& x : res) x *= inv_c;
    return CycNum(f_, std::move(res));
}

CycNum CycNum::galois(int64_t x) const {
    check(std::gcd(mod_i64(x, f_->N), f_->N) == 1, "CycNum::galois: x must be a unit");
    CycNum acc = CycNum::zero(f_);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        acc += zeta_pow(f_, mod_i64(static_cast<int64_t>(i) * x, f_->N)).mul_q(c_[i]);
    }
    return acc;
}

RingElem CycNum::embed(const RingElem& z) const {
    const CtxPtr& ctx = z.ctx();
    RingElem acc = RingElem::zero(ctx);
    for (size_t i = c_.size(); i-- > 0;) {
        acc *= z;
        if (c_[i] != 0) {
            mpz_class num = c_[i].get_num(), den = c_[i].get_den();
            RingElem term = RingElem::from_int(ctx, num);
            if (den != 1) term *= RingElem::from_int(ctx, den).inverse();
            acc += term;
        }
    }
    return acc;
}

std::string CycNum::str() const {
    std::ostringstream os;
    if (c_.empty()) return "0";
    bool first = true;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        if (!first) os << " + ";
        os << c_[i].get_str();
        if (i >= 1) os << "*z" << (i > 1 ? "^" + std::to_string(i) : "");
        first = false;
    }
    return os.str();
}

namespace {

// Row echelon over the field Q(zeta_N); returns pivot columns.
std::vector<int> cyc_echelon_inplace(CycMat& m) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.nc && row < m.nr; ++col) {
        int piv = -1;
        for (int i = row; i < m.nr; ++i)
            if (!m.at(i, col).is_zero()) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != row)
            for (int j = 0; j < m.nc; ++j) std::swap(m.at(piv, j), m.at(row, j));
        CycNum inv = m.at(row, col).inverse();
        for (int j = col; j < m.nc; ++j)
            if (!m.at(row, j).is_zero()) m.at(row, j) = m.at(row, j) * inv;
        for (int i = 0; i < m.nr; ++i) {
            if (i == row) continue;
            CycNum f = m.at(i, col);
            if (f.is_zero()) continue;
            for (int j = col; j < m.nc; ++j)
                if (!m.at(row, j).is_zero()) m.at(i, j) -= f * m.at(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

int cyc_rank(CycMat m) { return static_cast<int>(cyc_echelon_inplace(m).size()); }

CycMat cyc_kernel(CycMat m) {
    std::vector<int> pivots = cyc_echelon_inplace(m);
    std::vector<bool> is_piv(m.nc, false);
    for (int c : pivots) is_piv[c] = true;
    int dim = m.nc - static_cast<int>(pivots.size());
    CycMat k(m.f, m.nc, dim);
    int col = 0;
    for (int j = 0; j < m.nc; ++j) {
        if (is_piv[j]) continue;
        k.at(j, col) = CycNum::one(m.f);
        for (size_t r = 0; r < pivots.size(); ++r)
            k.at(pivots[r], col) = -m.at(static_cast<int>(r), j);
        ++col;
    }
    return k;
}

std::vector<CycNum> cyc_solve(CycMat m, std::vector<CycNum> b) {
    check(static_cast<int>(b.size()) == m.nr, "cyc_solve: shape mismatch");
    CycMat aug(m.f, m.nr, m.nc + 1);
    for (int i = 0; i < m.nr; ++i) {
        for (int j = 0; j < m.nc; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.nc) = b[i];
    }
    std::vector<int> pivots = cyc_echelon_inplace(aug);
    std::vector<CycNum> x(m.nc, CycNum::zero(m.f));
    for (size_t r = 0; r < pivots.size(); ++r) {
        if (pivots[r] == m.nc) throw Error("cyc_solve: inconsistent system");
        x[pivots[r]] = aug.at(static_cast<int>(r), m.nc);
    }
    return x;
}

CycNum cyc_det(CycMat m) {
    check(m.nr == m.nc, "cyc_det: square matrix required");
    CycNum det = CycNum::one(m.f);
    for (int col = 0; col < m.nc; ++col) {
        int piv = -1;
        for (int i = col; i < m.nr; ++i)
            if (!m.at(i, col).is_zero()) { piv = i; break; }
        if (piv < 0) return CycNum::zero(m.f);
        if (piv != col) {
            for (int j = 0; j < m.nc; ++j) std::swap(m.at(piv, j), m.at(col, j));
            det = -det;
        }
        det *= m.at(col, col);
        CycNum inv = m.at(col, col).inverse();
        for (int i = col + 1; i < m.nr; ++i) {
            CycNum f = m.at(i, col) * inv;
            if (f.is_zero()) continue;
            for (int j = col; j < m.nc; ++j)
                if (!m.at(col, j).is_zero()) m.at(i, j) -= f * m.at(col, j);
        }
    }
    return det;
}

}  // namespace galrep
