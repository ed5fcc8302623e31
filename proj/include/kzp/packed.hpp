#ifndef KZP_PACKED_HPP
#define KZP_PACKED_HPP

#include "kzp/mpoly.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace kzp {

using u32 = std::uint32_t;

/// Bit-packed exponent key for z-only polynomials: every variable gets the
/// same field width, variable 0 (z_1) sits in the most significant field, so
/// unsigned key order coincides with the z_1 > z_2 > ... lex order on
/// monomials.
struct KeyLayout {
    int nvars = 0;
    int bits = 0;

    u64 digit_mask() const { return (u64(1) << bits) - 1; }
    int shift(int v) const { return bits * (nvars - 1 - v); }
    u64 encode(std::span<const Exp> e) const;
    void decode(u64 key, std::span<Exp> out) const;
    u64 digit(u64 key, int v) const { return (key >> shift(v)) & digit_mask(); }

    bool operator==(const KeyLayout&) const = default;

    /// Smallest uniform width holding the given per-variable caps.
    static KeyLayout for_caps(std::span<const int> caps);
};

/// Sparse z-polynomial over F_p with packed keys in strictly ascending order.
/// This is the workhorse representation for large solution components; MPoly
/// remains the general two-block type.
struct PackedPoly {
    u64 p = 0;
    KeyLayout layout;
    std::vector<u64> keys;
    std::vector<u32> coefs;

    std::size_t size() const { return keys.size(); }
    bool empty() const { return keys.empty(); }

    static PackedPoly zero(u64 p, KeyLayout l) { return {p, l, {}, {}}; }
    static PackedPoly from_mpoly(const MPoly& a, KeyLayout l);
    MPoly to_mpoly() const;

    PackedPoly reencoded(KeyLayout wider) const;
    /// Variable v becomes perm[v]; keys rebuilt and re-sorted.
    PackedPoly relabeled(std::span<const int> perm) const;
    /// Moves variable v to the most significant field (others keep relative
    /// order); used to slice by the exponent of one variable.
    PackedPoly rotated_to_msb(int v) const;

    /// Formal derivative in variable v; key order is preserved.
    PackedPoly derivative(int v) const;
    PackedPoly scaled(u64 s) const;

    bool operator==(const PackedPoly& o) const
    { return p == o.p && layout == o.layout && keys == o.keys && coefs == o.coefs; }

    u64 coef_at(u64 key) const;
};

/// Sorts parallel (key, coef) arrays by key (LSD radix).
void sort_terms(std::vector<u64>& keys, std::vector<u32>& coefs);
/// Sorts and merges equal keys mod p, dropping zeros.
void sort_and_combine(std::vector<u64>& keys, std::vector<u32>& coefs, u64 p);

/// Σ scalar_i * poly_i. All operands share p and layout.
PackedPoly merge_scaled(std::span<const std::pair<const PackedPoly*, u64>> parts);
bool is_zero_sum(std::span<const std::pair<const PackedPoly*, u64>> parts);

/// Exact division of a (rotated) polynomial by (z_msb - z_j), where z_msb is
/// the variable in the most significant field and j is the rotated index of
/// the other variable. Returns std::nullopt when not divisible. The layout
/// must be wide enough to absorb the carried exponent (digit j can grow by
/// the msb degree).
std::optional<PackedPoly> divide_linear_msb(const PackedPoly& a, int j);

struct ConvTask {
    const PackedPoly* a;
    const PackedPoly* b;
    u64 scalar;
};

/// Σ scalar * a * b over all tasks. Operands must already use `out_layout`
/// and the layout must hold the sum of the operands' per-variable degrees
/// (keys then add without carries). Chooses between a flat sort-based path
/// and a tiled accumulation path by estimated cost; results are identical
/// and independent of `jobs`.
PackedPoly convolve_tasks(std::span<const ConvTask> tasks, const KeyLayout& out_layout,
                          u64 p, int jobs, u64 max_terms);

} // namespace kzp

#endif
