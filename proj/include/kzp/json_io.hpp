#ifndef KZP_JSON_IO_HPP
#define KZP_JSON_IO_HPP

#include "kzp/kzcore.hpp"
#include "kzp/leading.hpp"

#include <json.hpp>

#include <string>

namespace kzp {

using ordered_json = nlohmann::ordered_json;

/// Canonical solution document:
/// {"p":..,"q":..,"k":..,"M":..,"c":..,"n":..,"r":..,"L":[..],"zero":bool,
///  "components":[{"J":[..],"terms":[{"exp":[..],"coef":..},..]},..]}
/// Components ascend in subset-lex order, terms descend in monomial lex
/// order, so the byte output is deterministic.
ordered_json solution_to_json(const PrimePair& pair, const ModelParams& prm,
                              const SolutionIndex& L, const VectorPoly& v);

struct SolutionDoc {
    PrimePair pair;
    ModelParams prm;
    SolutionIndex L;
    VectorPoly v;
};

SolutionDoc solution_from_json(const ordered_json& j);

ordered_json pair_to_json(const PrimePair& pair);

ordered_json leading_to_json(const LeadingData& ld);

ordered_json certificate_to_json(const PrimePair& pair, const ModelParams& prm,
                                 const RankCertificate& cert,
                                 const std::vector<std::pair<std::string, bool>>& checks);

std::string dump_canonical(const ordered_json& j);

} // namespace kzp

#endif
