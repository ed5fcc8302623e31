#ifndef KZP_CARTIER_HPP
#define KZP_CARTIER_HPP

#include "kzp/kzcore.hpp"

#include <map>
#include <vector>

namespace kzp {

/// Weakly decreasing nonnegative integers, fixed length r (trailing zeros kept).
using Partition = std::vector<int>;

/// All partitions with r parts, each part <= d, in descending lex order.
/// Count is C(d+r, r).
std::vector<Partition> enumerate_partitions(int d, int r);

/// Schur polynomial s_a(t_1..t_r) mod p via the Jacobi-Trudi determinant of
/// complete homogeneous symmetric polynomials, expanded over the integers and
/// reduced afterwards.
MPoly schur(const Partition& a, int r, u64 p);

/// Kostka numbers: coefficients of s_a in the monomial symmetric basis.
std::map<Partition, long long> schur_monomial_expansion(const Partition& a);

/// Correspondence between partitions a in A(kg-1) and cycle tuples:
/// l_i = a_i + r - i + 1.
SolutionIndex partition_to_tuple(const Partition& a);
Partition tuple_to_partition(const SolutionIndex& L);

struct CartierTable {
    u64 p = 0;
    int n = 0, r = 0;
    std::map<std::pair<SubsetIndex, Partition>, ZPoly> entries;   // absent = zero

    const ZPoly* find(const SubsetIndex& J, const Partition& a) const;
};

/// Single Cartier coefficient c_J^{(a)}: the z-polynomial attached to the
/// alternant monomial t_1^{(a_1+r-1)p}...t_r^{a_r p} * (t_1...t_r)^{p-1} in
/// Phi_p * W_J. Always computed by two routes that must agree (the direct
/// p-integral and, depending on size, either the full skew expansion or the
/// sign-adjusted mirror extraction); disagreement throws.
ZPoly cartier_entry(const PrimePair& pair, const ModelParams& prm,
                    const SubsetIndex& J, const Partition& a,
                    const Limits& lim = {});

/// Full table over all J and all a in A(kg-1). Requires a type-1 pair.
CartierTable cartier_decompose(const PrimePair& pair, const ModelParams& prm,
                               const Limits& lim = {});

/// Reconstruction: for every a in A(kg-1) the Cartier coefficients equal the
/// components of the solution with tuple (a_1+r, ..., a_r+1).
bool verify_reconstruction(const PrimePair& pair, const ModelParams& prm,
                           const Limits& lim = {});

namespace detail {

/// Packed single entry; set crosscheck=false to skip the dual-route guard.
PackedPoly cartier_entry_packed(const PrimePair& pair, const ModelParams& prm,
                                const SubsetIndex& J, const Partition& a,
                                const KeyLayout& layout, const Limits& lim,
                                bool crosscheck = true);

/// Mirror route only (sign-adjusted extraction at reversed targets).
PackedPoly cartier_entry_mirror(const PrimePair& pair, const ModelParams& prm,
                                const SubsetIndex& J, const Partition& a,
                                const KeyLayout& layout, const Limits& lim);

} // namespace detail

} // namespace kzp

#endif
