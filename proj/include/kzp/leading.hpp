#ifndef KZP_LEADING_HPP
#define KZP_LEADING_HPP

#include "kzp/kzcore.hpp"

#include <map>
#include <string>
#include <vector>

namespace kzp {

/// Leading term of a vector-valued polynomial: the lex-largest z-monomial
/// appearing in any component, the coefficient vector at that monomial, and
/// the leading index of that vector. Basis vectors V_J are ordered with
/// V_{1,...,r} largest, so the leading index is the subset-lex smallest J
/// carrying a nonzero entry.
struct LeadingData {
    std::vector<Exp> exponents;
    std::map<SubsetIndex, u64> coefficient;
    SubsetIndex leading_index;
};

LeadingData leading_term(const VectorPoly& v);
LeadingData leading_term(SolutionStore& s);

/// The index set {m_1 < ... < m_r} determined by
///   (m_i - 1) M <= n M + (r-i) c - l_i p < m_i M.
/// Requires an admissible tuple and M - g >= 0; rejects otherwise.
SubsetIndex predict_index(const PrimePair& pair, const ModelParams& prm,
                          const SolutionIndex& L);

/// Predicted leading exponents and the predicted entry of the leading
/// coefficient at the leading index (the other entries are not predicted).
LeadingData predict_leading(const PrimePair& pair, const ModelParams& prm,
                            const SolutionIndex& L);

/// Eigenvector property of a leading coefficient: for j = 1..n-1 the sum of
/// (Omega - 1/2) over slots (j, l>j) multiplies C by q*d_j, and d_n == 0 mod p.
bool check_eigen(const LeadingData& ld, const PrimePair& pair, const ModelParams& prm);

struct TupleLeadingReport {
    SolutionIndex L;
    bool nonzero = false;
    LeadingData predicted;
    LeadingData computed;
    bool matches = false;       // exponents, index, and predicted entry agree
    std::string detail;         // set when something failed
};

TupleLeadingReport leading_report(SolutionStore& s);

struct RankCertificate {
    bool ok = false;
    u64 rank = 0;               // number of certified basis elements
    u64 expected_rank = 0;      // C(kg+r-1, r)
    std::vector<TupleLeadingReport> basis;
    std::string failure;        // names the offending tuple when !ok
};

/// Enumerates every admissible tuple, certifies that each solution is
/// nonzero with exactly the predicted leading behavior, and that the leading
/// indices are pairwise distinct.
RankCertificate certify_rank(const PrimePair& pair, const ModelParams& prm,
                             const Limits& lim = {});

} // namespace kzp

#endif
