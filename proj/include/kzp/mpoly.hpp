#ifndef KZP_MPOLY_HPP
#define KZP_MPOLY_HPP

#include "kzp/arith.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kzp {

using Exp = std::uint16_t;

/// Sparse exact multivariate polynomial over F_p in two variable blocks:
/// t_1..t_r (the t-block) followed by z_1..z_n (the z-block).
///
/// Terms are kept canonical: unique exponent vectors of length r+n,
/// nonzero coefficients in [1, p), sorted in descending lexicographic
/// order on the full exponent vector (t-block first, then z_1 > z_2 > ...).
/// The descending order makes the leading term the first one and gives a
/// deterministic serialization.
class MPoly {
public:
    MPoly() = default;
    MPoly(u64 p, int t_arity, int z_arity);

    static MPoly constant(u64 p, int t_arity, int z_arity, u64 value);
    /// t_i - z_s and friends; index is 0-based within its block.
    static MPoly t_var(u64 p, int t_arity, int z_arity, int i);
    static MPoly z_var(u64 p, int t_arity, int z_arity, int s);
    static MPoly monomial(u64 p, int t_arity, int z_arity,
                          std::span<const Exp> exps, u64 coef);
    /// Builds from an arbitrary term list (normalizes: sorts, merges, drops zeros).
    static MPoly from_terms(u64 p, int t_arity, int z_arity,
                            std::vector<Exp> exps, std::vector<u64> coefs);

    u64 modulus() const { return p_; }
    int t_arity() const { return tr_; }
    int z_arity() const { return zn_; }
    int width() const { return tr_ + zn_; }
    std::size_t term_count() const { return coefs_.size(); }
    bool is_zero() const { return coefs_.empty(); }

    std::span<const Exp> exps(std::size_t i) const
    { return {exps_.data() + i * width(), (std::size_t)width()}; }
    u64 coef(std::size_t i) const { return coefs_[i]; }

    /// Coefficient of an exact exponent vector (0 if absent).
    u64 coef_at(std::span<const Exp> e) const;

    MPoly operator-() const;
    MPoly scaled(u64 factor) const;
    friend MPoly add(const MPoly& a, const MPoly& b);
    friend MPoly sub(const MPoly& a, const MPoly& b);
    bool operator==(const MPoly& o) const;

    /// Product. When caps are given (length = width, 0xFFFF = uncapped) any
    /// term whose exponent exceeds a cap is dropped; sound for downstream
    /// extraction of a single coefficient at or below the caps.
    friend MPoly mul(const MPoly& a, const MPoly& b);
    friend MPoly mul_capped(const MPoly& a, const MPoly& b,
                            std::span<const Exp> caps);

    MPoly pow(u64 e, std::optional<std::vector<Exp>> caps = std::nullopt) const;

    /// z-polynomial coefficient of t_1^{e_1}..t_r^{e_r}; result has t_arity 0.
    MPoly coeff_extract(std::span<const Exp> t_targets) const;

    /// Leading term under lex order with z_1 > z_2 > ... (t-block first when
    /// present). Throws std::invalid_argument on the zero polynomial.
    std::pair<std::vector<Exp>, u64> lex_leading() const;

    /// True iff invariant (sign +1) or anti-invariant (sign -1) under every
    /// transposition of the t variables.
    bool symmetrize_check(int sign) const;

    /// Formal partial derivative in z_{index} (0-based).
    MPoly partial_derivative(int z_index) const;

    /// Renames z-variables: old index i becomes perm[i]; terms re-sorted.
    MPoly relabel_z(std::span<const int> perm) const;

    int total_degree() const;           // max over terms, -1 for zero
    int degree_in(int var) const;       // full-width variable index
    /// Degree of the homogeneous polynomial; throws if not homogeneous.
    int homogeneous_degree() const;
    bool is_homogeneous() const;

    /// Canonical text form, e.g. "4*z1^3*z2^2*z3 + z1*z2 + 3".
    std::string to_string() const;

private:
    u64 p_ = 0;
    int tr_ = 0, zn_ = 0;
    std::vector<Exp> exps_;
    std::vector<u64> coefs_;

    void normalize();
    friend class PackedPoly;
};

using ZPoly = MPoly;   // z-only polynomial: t_arity == 0

} // namespace kzp

#endif
