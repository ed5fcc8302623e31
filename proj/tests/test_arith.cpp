#include "kzp/arith.hpp"

#include <doctest.h>

#include <vector>

using namespace kzp;

TEST_CASE("primality by trial division")
{
    CHECK(is_prime(2));
    CHECK(is_prime(3));
    CHECK(is_prime(104729));
    CHECK_FALSE(is_prime(0));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(4));
    CHECK_FALSE(is_prime(104730));
}

TEST_CASE("classify_pair derives k, M, c")
{
    PrimePair a = classify_pair(7, 2);
    CHECK(a.k == 1);
    CHECK(a.pair_type == 1);
    CHECK(a.M == 3);
    CHECK(a.c == 1);

    PrimePair b = classify_pair(5, 3);
    CHECK(b.k == 2);
    CHECK(b.pair_type == 2);

    PrimePair c = classify_pair(7, 3);
    CHECK(c.k == 1);
    CHECK(c.pair_type == 1);
    CHECK(c.M == 2);
    CHECK(c.c == 3);
    CHECK(2 * c.M + c.c == 7);

    // brute-force confirmation of minimality for (7,3)
    for (u64 k = 1; k < c.k; ++k) CHECK((k * 7 - 1) % 3 != 0);
}

TEST_CASE("classify_pair rejects bad input")
{
    CHECK_THROWS_AS(classify_pair(4, 2), std::invalid_argument);
    CHECK_THROWS_AS(classify_pair(7, 4), std::invalid_argument);
    CHECK_THROWS_AS(classify_pair(5, 7), std::invalid_argument);
    CHECK_THROWS_AS(classify_pair(5, 5), std::invalid_argument);
}

TEST_CASE("type-1 identities hold for every classified pair")
{
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull}) {
        for (u64 p = q + 1; p < 500; ++p) {
            if (!is_prime(p)) continue;
            PrimePair pr = classify_pair(p, q);
            CHECK((q * pr.M + 1) % p == 0);
            CHECK((q * pr.c) % p == 2 % p);
            if (pr.pair_type == 1) {
                CHECK(2 * pr.M + pr.c == p);
                CHECK(pr.c % 2 == 1);
            }
        }
    }
}

TEST_CASE("pair type is determined by the residue of p mod q")
{
    // k is the inverse of s = p mod q; type 1 iff that inverse is <= q/2
    for (u64 q : {3ull, 5ull, 7ull}) {
        for (u64 p = q + 1; p < 10000; ++p) {
            if (!is_prime(p)) continue;
            u64 s = p % q;
            u64 k = 0;
            for (u64 x = 1; x < q; ++x)
                if (x * s % q == 1) { k = x; break; }
            PrimePair pr = classify_pair(p, q);
            CHECK(pr.k == k);
            CHECK(pr.pair_type == (2 * k <= q ? 1 : 2));
        }
    }
}

TEST_CASE("about half of the pairs have type 1")
{
    for (u64 q : {3ull, 5ull, 7ull}) {
        int total = 0, type1 = 0;
        for (u64 p = q + 1; p < 10000; ++p) {
            if (!is_prime(p)) continue;
            ++total;
            if (classify_pair(p, q).pair_type == 1) ++type1;
        }
        double frac = (double)type1 / total;
        CHECK(frac > 0.4);
        CHECK(frac < 0.6);
    }
    // q = 2 is special: every pair has type 1
    for (u64 p = 3; p < 1000; ++p)
        if (is_prime(p)) CHECK(classify_pair(p, 2).pair_type == 1);
}

TEST_CASE("binomial coefficients mod p")
{
    CHECK(binom_mod_p(4, 2, 5) == 1);
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 13ull}) {
        CHECK(binom_mod_p(p, 1, p) == 0);
        CHECK(binom_mod_p(123, 0, p) == 1);
    }
    CHECK(binom_mod_p(3, 7, 5) == 0);   // b > a
}

TEST_CASE("Lucas agrees with the Pascal-triangle oracle")
{
    // additive oracle: one row at a time, no division anywhere
    for (u64 p : {2ull, 5ull, 13ull}) {
        std::vector<u64> row{1};
        for (u64 a = 0; a <= 10000; ++a) {
            if (a <= 600 || a % 977 == 0 || a == 10000) {
                for (u64 b = 0; b <= a; ++b)
                    REQUIRE(binom_mod_p(a, b, p) == row[b]);
            }
            std::vector<u64> next(a + 2, 1);
            for (u64 b = 1; b <= a; ++b) next[b] = (row[b - 1] + row[b]) % p;
            row = std::move(next);
        }
    }
}

TEST_CASE("exact 64-bit binomials")
{
    CHECK(binom_u64(0, 0) == 1);
    CHECK(binom_u64(5, 2) == 10);
    CHECK(binom_u64(10, 3) == 120);
    CHECK(binom_u64(3, 5) == 0);
    CHECK(binom_u64(60, 30) == 118264581564861424ull);
}

TEST_CASE("modular helpers")
{
    CHECK(mod_pow(3, 4, 5) == 1);
    CHECK(mod_inv(2, 7) == 4);
    for (u64 p : {3ull, 7ull, 13ull})
        for (u64 a = 1; a < p; ++a) CHECK(a * mod_inv(a, p) % p == 1);
    CHECK_THROWS_AS(mod_inv(0, 7), std::invalid_argument);
}
