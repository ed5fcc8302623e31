#ifndef KZP_TESTS_ORACLE_HPP
#define KZP_TESTS_ORACLE_HPP

#include "kzp/kzcore.hpp"

namespace kzp::oracle {

// Brute-force reference paths used only by the tests. These deliberately
// avoid the library's window extraction and residue shortcuts: products are
// expanded in full, coefficients are read off directly, and the KZ check
// multiplies out the cleared-denominator expression literally.

MPoly full_phi_times_weight(const PrimePair& pair, const ModelParams& prm,
                            const SubsetIndex& J);

VectorPoly construct_solution_full(const PrimePair& pair, const ModelParams& prm,
                                   const SolutionIndex& L);

bool check_singular_literal(const VectorPoly& v);

bool check_kz_literal(const VectorPoly& v, const PrimePair& pair);

} // namespace kzp::oracle

#endif
