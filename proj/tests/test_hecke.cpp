#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "galrep/hecke.hpp"

using namespace galrep;

namespace {
CongruenceData gamma1(int64_t N) { return CongruenceData::make(N, {}); }
}

TEST_CASE("basis dimensions and cusp subspaces") {
    // dim M_2 = g + nu_oo - 1; cusp subspace has dimension g
    auto b13 = basis_m2(gamma1(13), 1);
    CHECK(b13.d2 == 13);  // g = 2, 12 cusps
    CHECK(b13.s2_coeffs.nc == 2);

    auto b16 = basis_m2(gamma1(16), 1);
    CHECK(b16.d2 == 15);  // g = 2, 14 cusps
    CHECK(b16.s2_coeffs.nc == 2);

    auto b013 = basis_m2(CongruenceData::full(13), 1);
    CHECK(b013.d2 == 1);  // g = 0, 2 cusps
    CHECK(b013.s2_coeffs.nc == 0);
}

TEST_CASE("L-factor: genus agreement, seed independence, fixture values") {
    auto cd = gamma1(13);
    auto basis = basis_m2(cd, 1);
    LFactor L73 = lfactor(basis, 73);
    CHECK(zp::deg(L73.Lp) == 4);
    // genus triple agreement
    CHECK(zp::deg(L73.Lp) / 2 == genus_formula(cd));
    CHECK(basis.s2_coeffs.nc == genus_formula(cd));
    // seed independence
    auto basis2 = basis_m2(cd, 99);
    LFactor L73b = lfactor(basis2, 73);
    CHECK(L73.Lp == L73b.Lp);

    // paper fixture: p = 191, ell = 29
    LFactor L = lfactor(basis, 191);
    GroupOrders go = group_orders(L, 12, 29);
    CHECK(go.ell_valuation == 4);
    CHECK(go.cofactor % 29 != 0);
    CHECK(mpz_sizeinbase(go.cofactor.get_mpz_t(), 2) - 1 >= 160);
    CHECK(mpz_sizeinbase(go.cofactor.get_mpz_t(), 2) - 1 <= 164);

    mpz_class N12 = go.Nd.at(12);
    int v12 = 0;
    while (N12 % 29 == 0) { N12 /= 29; ++v12; }
    CHECK(v12 == 2);
    // the undivided resultant is the ~2^60 quantity; the 29^2-cofactor is
    // ~2^51 (Weil bounds cap |Res(L, Phi_12)| near (sqrt(p)+1)^8)
    CHECK(mpz_sizeinbase(go.Nd.at(12).get_mpz_t(), 2) - 1 >= 58);
    CHECK(mpz_sizeinbase(go.Nd.at(12).get_mpz_t(), 2) - 1 <= 62);
    CHECK(mpz_sizeinbase(N12.get_mpz_t(), 2) - 1 >= 48);
    CHECK(mpz_sizeinbase(N12.get_mpz_t(), 2) - 1 <= 53);

    mpz_class N3 = go.Nd.at(3);
    int v3 = 0;
    while (N3 % 29 == 0) { N3 /= 29; ++v3; }
    CHECK(v3 == 2);
    CHECK(mpz_sizeinbase(N3.get_mpz_t(), 2) - 1 >= 18);
    CHECK(mpz_sizeinbase(N3.get_mpz_t(), 2) - 1 <= 22);

    // cofactor polynomial (x^12 - 1)/Phi_12 = x^8 + x^6 - x^2 - 1
    ZPoly expect{-1, 0, -1, 0, 0, 0, 1, 0, 1};
    CHECK(go.cyclo_cofactor.at(12) == expect);

    mpz_class prod = 1;
    for (auto& [d, nd] : go.Nd) prod *= nd;
    CHECK(prod == go.order);
}

TEST_CASE("X_0(13) has genus 0 and trivial L-factor") {
    auto cd = CongruenceData::full(13);
    auto basis = basis_m2(cd, 1);
    LFactor L = lfactor(basis, 7);
    CHECK(zp::deg(L.Lp) == 0);
    CHECK(L.Lp == ZPoly{1});
}

TEST_CASE("diamond is the identity for p mod N in H and has finite order") {
    auto b16 = basis_m2(gamma1(16), 1);
    HeckeMats H = hecke_matrices(b16, 31);  // 31 = 15 mod 16 lies in H
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(H.diamond.at(i, j) ==
                  (i == j ? CycNum::one(b16.F) : CycNum::zero(b16.F)));
    // p = 43 = 11 mod 16: 11^4 = 1 mod 16, so diamond^4 = 1
    HeckeMats H43 = hecke_matrices(b16, 43);
    CycMat pw = H43.diamond;
    for (int rep = 0; rep < 2; ++rep) {
        CycMat nxt(b16.F, 2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                CycNum acc = CycNum::zero(b16.F);
                for (int k = 0; k < 2; ++k) acc += pw.at(i, k) * pw.at(k, j);
                nxt.at(i, j) = acc;
            }
        pw = nxt;
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(pw.at(i, j) == (i == j ? CycNum::one(b16.F) : CycNum::zero(b16.F)));
}

TEST_CASE("L-factor cache round trip") {
    auto basis = basis_m2(gamma1(13), 1);
    LFactor L = lfactor(basis, 7);
    std::string path = "/tmp/galrep_lfactor_cache_test.txt";
    std::remove(path.c_str());
    lfactor_cache_append(path, L);
    auto back = lfactor_cache_lookup(path, 7);
    REQUIRE(back.has_value());
    CHECK(*back == L.Lp);
    CHECK(!lfactor_cache_lookup(path, 11).has_value());
    std::remove(path.c_str());
}

TEST_CASE("Weil bounds hold for assorted primes on X_1(13)") {
    auto basis = basis_m2(gamma1(13), 1);
    for (int64_t p : {5, 7, 11, 29}) {
        LFactor L = lfactor(basis, p);
        CHECK(zp::deg(L.Lp) == 4);
        CHECK(L.Lp[0] == p * p);
        mpz_class c3 = abs(L.Lp[3]);
        CHECK(c3 * c3 <= 4 * 4 * p);
    }
}
