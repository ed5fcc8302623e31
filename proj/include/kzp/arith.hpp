#ifndef KZP_ARITH_HPP
#define KZP_ARITH_HPP

#include <cstdint>
#include <stdexcept>

namespace kzp {

using u64 = std::uint64_t;

/// Deterministic primality by trial division; intended for desk-scale
/// moduli (p < 10^6 style inputs, anything < 2^32 is fine).
bool is_prime(u64 x);

u64 mod_pow(u64 base, u64 exp, u64 p);
u64 mod_inv(u64 a, u64 p);   // p prime, a != 0 mod p

/// C(a,b) mod p by Lucas decomposition in base p. b > a yields 0.
u64 binom_mod_p(u64 a, u64 b, u64 p);

/// Exact C(n,k) in 64 bits; throws std::overflow_error if it does not fit.
u64 binom_u64(u64 n, u64 k);

/// A pair of primes p > q together with the derived constants:
///   k  -- least positive integer with q | (k*p - 1), 1 <= k < q
///   M  -- least positive integer with q*M == -1 (mod p), equal to (k*p-1)/q
///   c  -- least positive integer with q*c ==  2 (mod p)
/// The pair has type 1 when k <= q/2; then c = ((q-2k)p + 2)/q is odd and
/// 2M + c = p.
struct PrimePair {
    u64 p = 0;
    u64 q = 0;
    u64 k = 0;
    int pair_type = 0;   // 1 or 2
    u64 M = 0;
    u64 c = 0;

    bool type1() const { return pair_type == 1; }
};

/// Classifies (p,q). Throws std::invalid_argument unless p, q are prime
/// and p > q.
PrimePair classify_pair(u64 p, u64 q);

} // namespace kzp

#endif
