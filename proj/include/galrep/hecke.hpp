#pragma once

#include <map>
#include <optional>
#include <string>

#include "galrep/eisenstein.hpp"

namespace galrep {

// A basis of M_2(Gamma_H(N)) made of trace forms, with exact q-expansion
// bookkeeping, cusp constants, and the cusp-form subspace.
struct FormSpaceBasis {
    CongruenceData cd;
    CycFieldPtr F;
    int64_t g = 0;
    int64_t nuoo = 0;
    int d2 = 0;  // dim M_2 = g + nuoo - 1

    struct Tag {
        std::array<int64_t, 2> v, w;
    };
    std::vector<Tag> tags;            // d2 independent trace forms
    std::vector<int64_t> id_indices;  // q_1-indices with full-rank coefficients
    CycMat id_coeffs;                 // d2 x |id_indices|
    std::vector<CuspLabel> cusps;
    std::vector<SL2Rep> cusp_mats;    // canonical M_s per cusp
    CycMat cusp_constants;            // d2 x nuoo: a_0 of form i at cusp s
    CycMat s2_coeffs;                 // d2 x g: cusp subspace coordinates

    // q_1-coefficient of basis form i at index n (q_N-exponent n N).
    CycNum coeff_q1(int i, int64_t n) const;
    // same for the diamond-transformed form <x> f_i
    CycNum coeff_q1_diamond(int i, int64_t x, int64_t n) const;
};

FormSpaceBasis basis_m2(const CongruenceData& cd, uint64_t seed);
// Rebuild all derived data from a fixed independent tag list (used by the
// model cache); throws RankDeficient if the tags are not independent.
FormSpaceBasis basis_from_tags(const CongruenceData& cd,
                               const std::vector<FormSpaceBasis::Tag>& tags);

// Subspace of combinations vanishing at every cusp: dimension g.
CycMat cusp_subspace(const FormSpaceBasis& basis);

struct HeckeMats {
    CycMat Tp;       // g x g on the cusp subspace
    CycMat diamond;  // <p>
};
HeckeMats hecke_matrices(const FormSpaceBasis& basis, int64_t p);

struct LFactor {
    int64_t p = 0;
    int64_t g = 0;
    ZPoly Lp;  // monic, degree 2g, constant coefficient p^g
};
LFactor lfactor(const FormSpaceBasis& basis, int64_t p);
LFactor lfactor(const CongruenceData& cd, int64_t p, uint64_t seed = 1);

struct GroupOrders {
    mpz_class order;            // #J(F_q) = |Res(L, x^a - 1)|
    int64_t ell = 0;
    int ell_valuation = 0;      // #J = ell^v M
    mpz_class cofactor;         // M
    std::map<int64_t, mpz_class> Nd;       // d | a -> |Res(L, Phi_d)|
    std::map<int64_t, ZPoly> cyclo_cofactor;  // d | a -> (x^a - 1)/Phi_d
};
GroupOrders group_orders(const LFactor& L, int a, int64_t ell);

// L-factor cache file: lines "p : c_0 c_1 ... c_2g".
void lfactor_cache_append(const std::string& path, const LFactor& L);
std::optional<ZPoly> lfactor_cache_lookup(const std::string& path, int64_t p);

}  // namespace galrep
