#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "galrep/arith.hpp"

namespace galrep {

// 2x2 matrix over Z/NZ with determinant 1.
struct SL2Rep {
    std::array<std::array<int64_t, 2>, 2> m{{{1, 0}, {0, 1}}};
    int64_t& at(int i, int j) { return m[i][j]; }
    int64_t at(int i, int j) const { return m[i][j]; }
};

SL2Rep sl2_mul(const SL2Rep& a, const SL2Rep& b, int64_t N);

// Cusp of X_H(N): c mod N, d mod gcd(c, N), canonical in its H-orbit.
struct CuspLabel {
    int64_t c = 0, d = 0;
    bool operator==(const CuspLabel& o) const { return c == o.c && d == o.d; }
    bool operator<(const CuspLabel& o) const { return c < o.c || (c == o.c && d < o.d); }
};

// Level N with a subgroup H of (Z/NZ)^x containing -1.
class CongruenceData {
public:
    int64_t N = 1;
    std::vector<int64_t> H;  // sorted

    // Builds <gens, -1>; gens may be empty (then H = {1, -1}).
    static CongruenceData make(int64_t N, const std::vector<int64_t>& gens);
    // Full unit group (X_0(N)).
    static CongruenceData full(int64_t N);

    bool in_H(int64_t x) const;

    CuspLabel canonical_cusp(int64_t c, int64_t d) const;
    std::pair<int64_t, int64_t> canonical_fibre(int64_t c, int64_t d) const;

private:
    mutable std::vector<bool> h_mask_;
    void build_mask() const;
};

std::vector<CuspLabel> enumerate_cusps(const CongruenceData& cd);
int64_t cusp_width(const CongruenceData& cd, const CuspLabel& s);
CuspLabel galois_on_cusp(const CongruenceData& cd, int64_t x, const CuspLabel& s);

// Extension of the cusp to M in SL2(Z/N) with M * infinity = s.
SL2Rep cusp_matrix(const CongruenceData& cd, const CuspLabel& s);
// All SL2 extensions used for width independence testing.
std::vector<SL2Rep> cusp_matrices_all(const CongruenceData& cd, const CuspLabel& s, int max_count);

// Does M yield rational q-expansions (Galois-equivariant coefficients)?
bool yields_rational_qexp(const CongruenceData& cd, const SL2Rep& M);
// For each cusp admitting one, a single rational-q-expansion matrix.
std::vector<std::pair<CuspLabel, SL2Rep>> rational_qexp_matrices(const CongruenceData& cd);

// Primitive vectors of (Z/N)^2 modulo H-scaling: the fibre of X_H(N) -> X(1).
std::vector<std::pair<int64_t, int64_t>> fibre_points(const CongruenceData& cd);
// Permutation i -> j induced by v -> v * (transpose Mp); det Mp must be prime to N.
std::vector<int> fibre_frobenius(const CongruenceData& cd,
                                 const std::array<std::array<int64_t, 2>, 2>& Mp);

// Elliptic point counts by fixed points of the order-4 / order-6 elements.
int64_t nu2_count(const CongruenceData& cd);
int64_t nu3_count(const CongruenceData& cd);
// Genus from 1 + d/12 - nu2/4 - nu3/3 - nuoo/2.
int64_t genus_formula(const CongruenceData& cd);

// Galois orbit partition of the cusps under all sigma_x; returns orbit id per cusp.
std::vector<int> cusp_galois_orbits(const CongruenceData& cd, const std::vector<CuspLabel>& cusps);

}  // namespace galrep
