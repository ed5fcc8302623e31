#include "kzp/arith.hpp"

#include <string>

namespace kzp {

bool is_prime(u64 x)
{
    if (x < 2) return false;
    if (x % 2 == 0) return x == 2;
    if (x % 3 == 0) return x == 3;
    for (u64 d = 5; d * d <= x; d += 6) {
        if (x % d == 0 || x % (d + 2) == 0) return false;
    }
    return true;
}

u64 mod_pow(u64 base, u64 exp, u64 p)
{
    base %= p;
    u64 acc = 1 % p;
    while (exp) {
        if (exp & 1) acc = acc * base % p;
        base = base * base % p;
        exp >>= 1;
    }
    return acc;
}

u64 mod_inv(u64 a, u64 p)
{
    a %= p;
    if (a == 0) throw std::invalid_argument("mod_inv: zero has no inverse");
    return mod_pow(a, p - 2, p);
}

u64 binom_mod_p(u64 a, u64 b, u64 p)
{
    if (b > a) return 0;
    u64 result = 1 % p;
    while (a > 0 || b > 0) {
        u64 ad = a % p, bd = b % p;
        if (bd > ad) return 0;
        // C(ad, bd) with ad, bd < p: product formula, inverses exist.
        u64 num = 1 % p, den = 1 % p;
        for (u64 i = 0; i < bd; ++i) {
            num = num * ((ad - i) % p) % p;
            den = den * ((i + 1) % p) % p;
        }
        result = result * num % p * mod_inv(den == 0 ? 1 : den, p) % p;
        a /= p;
        b /= p;
    }
    return result;
}

u64 binom_u64(u64 n, u64 k)
{
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (u64 i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;   // partial product is C(n-k+i, i), division exact
        if (r > (unsigned __int128)~u64(0)) throw std::overflow_error("binom_u64 overflow");
    }
    return (u64)r;
}

PrimePair classify_pair(u64 p, u64 q)
{
    if (!is_prime(p)) throw std::invalid_argument("classify_pair: p = " + std::to_string(p) + " is not prime");
    if (!is_prime(q)) throw std::invalid_argument("classify_pair: q = " + std::to_string(q) + " is not prime");
    if (p <= q) throw std::invalid_argument("classify_pair: need p > q");

    PrimePair pr;
    pr.p = p;
    pr.q = q;

    // least k in 1..q-1 with q | (k*p - 1); q is tiny, scan
    for (u64 k = 1; k < q; ++k) {
        if ((k * p - 1) % q == 0) { pr.k = k; break; }
    }
    if (pr.k == 0) throw std::logic_error("classify_pair: no k found (p divisible by q?)");

    pr.pair_type = (2 * pr.k <= q) ? 1 : 2;
    pr.M = (pr.k * p - 1) / q;

    // least positive c with q*c == 2 (mod p)
    pr.c = 2 * mod_inv(q, p) % p;
    if (pr.c == 0) pr.c = p;

    // sanity: congruences and the type-1 identities
    if ((q * pr.M + 1) % p != 0) throw std::logic_error("classify_pair: M congruence failed");
    if ((q * pr.c) % p != 2 % p) throw std::logic_error("classify_pair: c congruence failed");
    if (pr.pair_type == 1) {
        if (pr.c != ((q - 2 * pr.k) * p + 2) / q) throw std::logic_error("classify_pair: c formula failed");
        if (2 * pr.M + pr.c != p) throw std::logic_error("classify_pair: 2M+c != p");
        if (pr.c % 2 == 0) throw std::logic_error("classify_pair: c even for type-1 pair");
    }
    return pr;
}

} // namespace kzp
