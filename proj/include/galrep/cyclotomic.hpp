#pragma once

#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "galrep/poly.hpp"

namespace galrep {

// The field Q(zeta_N) = Q[t]/Phi_N(t), with exact rational coordinates.
struct CycField {
    int64_t N;
    int d;            // deg Phi_N
    QPoly phi;        // monic
    static std::shared_ptr<const CycField> make(int64_t N);
};
using CycFieldPtr = std::shared_ptr<const CycField>;

class CycNum {
public:
    CycNum() = default;
    CycNum(CycFieldPtr f, QPoly coords) : f_(std::move(f)), c_(std::move(coords)) { reduce(); }
    static CycNum zero(const CycFieldPtr& f) { return CycNum(f, {}); }
    static CycNum one(const CycFieldPtr& f) { return CycNum(f, {mpq_class(1)}); }
    static CycNum from_q(const CycFieldPtr& f, const mpq_class& q) { return CycNum(f, {q}); }
    // zeta^k
    static CycNum zeta_pow(const CycFieldPtr& f, int64_t k);

    const CycFieldPtr& field() const { return f_; }
    const QPoly& coords() const { return c_; }

    bool is_zero() const { return c_.empty(); }
    bool operator==(const CycNum& o) const { return c_ == o.c_; }
    bool operator!=(const CycNum& o) const { return !(*this == o); }

    CycNum operator+(const CycNum& o) const { return CycNum(f_, qp::add(c_, o.c_)); }
    CycNum operator-(const CycNum& o) const { return CycNum(f_, qp::sub(c_, o.c_)); }
    CycNum operator-() const;
    CycNum operator*(const CycNum& o) const { return CycNum(f_, qp::mul(c_, o.c_)); }
    CycNum& operator+=(const CycNum& o) { return *this = *this + o; }
    CycNum& operator-=(const CycNum& o) { return *this = *this - o; }
    CycNum& operator*=(const CycNum& o) { return *this = *this * o; }
    CycNum mul_q(const mpq_class& q) const;
    CycNum inverse() const;

    // Galois action sigma_x : t -> t^x (x a unit mod N).
    CycNum galois(int64_t x) const;

    // True when the element lies in Q.
    bool is_rational() const { return c_.size() <= 1; }
    mpq_class rational() const {
        check(is_rational(), "CycNum::rational: element not in Q");
        return c_.empty() ? mpq_class(0) : c_[0];
    }

    // Image under zeta -> z in Z_q/p^e; all denominators must be units mod p.
    RingElem embed(const RingElem& z) const;

    std::string str() const;

private:
    CycFieldPtr f_;
    QPoly c_;  // degree < d
    void reduce();
};

// Small dense matrix over Q(zeta_N) with exact elimination.
struct CycMat {
    int nr = 0, nc = 0;
    CycFieldPtr f;
    std::vector<CycNum> a;
    CycMat() = default;
    CycMat(CycFieldPtr fld, int r, int c) : nr(r), nc(c), f(std::move(fld)) {
        a.assign(static_cast<size_t>(nr) * nc, CycNum::zero(f));
    }
    CycNum& at(int i, int j) { return a[static_cast<size_t>(i) * nc + j]; }
    const CycNum& at(int i, int j) const { return a[static_cast<size_t>(i) * nc + j]; }
};

int cyc_rank(CycMat m);
// Kernel {x : M x = 0}, columns of the returned matrix.
CycMat cyc_kernel(CycMat m);
CycNum cyc_det(CycMat m);
// Exact solution of M x = b; throws on inconsistency (solution must exist).
std::vector<CycNum> cyc_solve(CycMat m, std::vector<CycNum> b);

}  // namespace galrep
