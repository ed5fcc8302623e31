#ifndef KZP_KZCORE_HPP
#define KZP_KZCORE_HPP

#include "kzp/arith.hpp"
#include "kzp/guard.hpp"
#include "kzp/mpoly.hpp"
#include "kzp/packed.hpp"

#include <deque>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kzp {

/// Geometry of the weight space: n tensor factors, weight n-2r. When the
/// model comes from a pair (p,q) the extra integer g with n = q*g + 2r - 1
/// selects the family; the checks on arbitrary vectors work without g.
struct ModelParams {
    int n = 0;
    int r = 0;
    std::optional<int> g;
};

ModelParams params_from_g(const PrimePair& pair, int g, int r);
ModelParams params_from_n(const PrimePair& pair, int n, int r);
ModelParams params_free(int n, int r);

/// M - g >= 0, the hypothesis the rank and leading-term statements need.
bool mgp_holds(const PrimePair& pair, const ModelParams& prm);
/// kg + r - 1, the bound on l_1 for a nonzero solution. Requires g.
int tuple_bound(const PrimePair& pair, const ModelParams& prm);

/// An r-element subset of {1,...,n}, stored ascending, 1-based.
struct SubsetIndex {
    std::vector<int> elems;

    SubsetIndex() = default;
    SubsetIndex(std::initializer_list<int> init) : elems(init) {}
    explicit SubsetIndex(std::vector<int> v) : elems(std::move(v)) {}

    int size() const { return (int)elems.size(); }
    bool contains(int x) const;
    /// Symmetric difference with {m,j}; defined when exactly one is a member.
    SubsetIndex swapped(int m, int j) const;
    auto operator<=>(const SubsetIndex&) const = default;
    std::string to_string() const;
};

bool valid_subset(const SubsetIndex& J, int n, int r);
std::vector<SubsetIndex> all_subsets(int n, int r);   // lex ascending

/// Cycle selector (l_1,...,l_r), positive integers.
struct SolutionIndex {
    std::vector<int> l;

    SolutionIndex() = default;
    SolutionIndex(std::initializer_list<int> init) : l(init) {}
    explicit SolutionIndex(std::vector<int> v) : l(std::move(v)) {}

    int size() const { return (int)l.size(); }
    auto operator<=>(const SolutionIndex&) const = default;
    std::string to_string() const;
};

/// Strictly decreasing and within [1, kg+r-1].
bool admissible(const PrimePair& pair, const ModelParams& prm, const SolutionIndex& L);
std::vector<SolutionIndex> admissible_tuples(const PrimePair& pair, const ModelParams& prm);

/// Element of the weight space tensored with F_p[z]: association from
/// subsets J to z-polynomial components; absent key means zero.
struct VectorPoly {
    u64 p = 0;
    int n = 0;
    int r = 0;
    std::map<SubsetIndex, ZPoly> components;

    bool is_zero() const { return components.empty(); }
    u64 total_terms() const;
    const ZPoly* find(const SubsetIndex& J) const;
    void set(const SubsetIndex& J, ZPoly f);   // drops zero polynomials
    bool operator==(const VectorPoly&) const = default;
};

// ------------------------------------------------------------ construction

MPoly master_polynomial(const PrimePair& pair, const ModelParams& prm,
                        const Limits& lim = {});

/// Phi_p * W_J assembled without rational functions: one exponent decrement
/// per permutation of the pairing between t variables and the members of J.
MPoly phi_times_weight(const PrimePair& pair, const ModelParams& prm,
                       const SubsetIndex& J, const Limits& lim = {});

/// Component at J of the solution: the coefficient of t_i^{l_i p - 1} in
/// Phi_p * W_J. Computed by per-variable coefficient windows, never by a
/// full expansion.
ZPoly construct_component(const PrimePair& pair, const ModelParams& prm,
                          const SolutionIndex& L, const SubsetIndex& J,
                          const Limits& lim = {});

VectorPoly construct_solution(const PrimePair& pair, const ModelParams& prm,
                              const SolutionIndex& L, const Limits& lim = {});

/// Total z-degree of a nonzero solution (joint homogeneity of the integrand).
int expected_solution_degree(const PrimePair& pair, const ModelParams& prm,
                             const SolutionIndex& L);

// ------------------------------------------------------------------ checks

/// Membership in the singular subspace: for every (r-1)-subset K the sum of
/// the components over K ∪ {j}, j outside K, vanishes identically.
bool check_singular(const VectorPoly& v);

/// (Omega - 1/2) acting in tensor slots m and j (1-based).
VectorPoly casimir_minus_half(int m, int j, const VectorPoly& v);

/// KZ system with cleared denominators: for every m the expression
///   q * prod_{j != m}(z_m - z_j) * d/dz_m v  -  sum_j prod_{l != m,j}(z_m - z_l) * (Omega_{mj} - 1/2) v
/// vanishes identically. Decided exactly via residues and exact division.
bool check_kz(const VectorPoly& v, const PrimePair& pair, const Limits& lim = {});

/// Master polynomial with shifted exponents c' = c + d0*p, M_s = M + d_s*p
/// equals Phi_p * prod (t_i^p - t_j^p)^{d0} * prod (t_i^p - z_s^p)^{d_s}.
bool shifted_master_congruence(const PrimePair& pair, const ModelParams& prm,
                               int d0, std::span<const int> d_vec,
                               const Limits& lim = {});

/// Exact F_p rank / nullity of the singular-vector linear system.
u64 singular_system_rank(int n, int r, u64 p);
u64 singular_dimension(int n, int r, u64 p);

// ------------------------------------------------------- large solutions

enum class CheckMode { Auto, Full, OrbitReps };

/// Solution with components materialized on demand. One representative
/// component is constructed directly; the others are its images under the
/// simultaneous relabeling of z variables and subsets, which is an identity
/// of the defining coefficient extraction. A bounded cache keeps recently
/// used components.
class SolutionStore {
public:
    SolutionStore(const PrimePair& pair, const ModelParams& prm,
                  const SolutionIndex& L, const Limits& lim = {});

    const PrimePair& pair() const { return pair_; }
    const ModelParams& params() const { return prm_; }
    const SolutionIndex& index() const { return L_; }
    const Limits& limits() const { return lim_; }
    const KeyLayout& layout() const { return layout_; }

    bool is_zero() const { return rep_->empty(); }
    u64 component_terms() const { return rep_->size(); }
    int degree() const;

    /// Component at J (shared, cached).
    std::shared_ptr<const PackedPoly> component(const SubsetIndex& J);
    /// Recomputes the component from scratch, bypassing the relabeling path.
    PackedPoly component_direct(const SubsetIndex& J) const;
    /// z-relabeling that carries the representative subset {1..r} to J.
    std::vector<int> relabel_for(const SubsetIndex& J) const;

    void set_cache_budget(std::size_t max_components);
    VectorPoly materialize();   // full map; guarded by limits

private:
    PrimePair pair_;
    ModelParams prm_;
    SolutionIndex L_;
    Limits lim_;
    KeyLayout layout_;
    SubsetIndex rep_index_;
    std::shared_ptr<const PackedPoly> rep_;
    std::map<SubsetIndex, std::shared_ptr<const PackedPoly>> cache_;
    std::deque<SubsetIndex> cache_order_;
    std::size_t cache_budget_ = 12;
};

/// Same predicates on a stored solution. OrbitReps restricts to one
/// representative per orbit of the relabeling action that the store's
/// components are defined by; Full loops over everything. Auto picks
/// OrbitReps only when the component size makes the full loop impractical.
bool check_singular(SolutionStore& s, CheckMode mode = CheckMode::Auto);
bool check_kz(SolutionStore& s, CheckMode mode = CheckMode::Auto);

// ------------------------------------------------------------- internals
// exposed for the leading/cartier modules and the test suite

namespace detail {

/// Coefficients [t^e] prod_s (t - z_s)^{mu_s} for e in [e_lo, e_hi], as
/// packed z-polynomials in the given layout (signs included).
struct WindowFamily {
    int total_degree = 0;                 // sum of multiplicities
    int e_lo = 0;
    std::vector<PackedPoly> w;            // index e - e_lo
    const PackedPoly* at(int e) const;    // nullptr when out of range/zero
};

WindowFamily t_block_windows(std::span<const int> mu, int e_lo, int e_hi,
                             u64 p, const KeyLayout& layout, const Limits& lim);

/// Coefficient of t_1^{T_1} ... t_r^{T_r} in Phi_p * W_J, packed.
PackedPoly extract_t_coefficient(const PrimePair& pair, const ModelParams& prm,
                                 const SubsetIndex& J, std::span<const int> targets,
                                 const KeyLayout& layout, const Limits& lim);

KeyLayout solution_layout(const PrimePair& pair, const ModelParams& prm);

/// Monomial count upper bound: vectors with given total degree under
/// per-variable caps.
u64 count_support(std::span<const int> caps, int degree);

} // namespace detail

} // namespace kzp

#endif
