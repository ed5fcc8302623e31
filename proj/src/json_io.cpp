#include "kzp/json_io.hpp"

namespace kzp {

namespace {

ordered_json poly_terms_json(const ZPoly& f)
{
    ordered_json terms = ordered_json::array();
    for (std::size_t i = 0; i < f.term_count(); ++i) {
        ordered_json term;
        term["exp"] = std::vector<int>(f.exps(i).begin(), f.exps(i).end());
        term["coef"] = f.coef(i);
        terms.push_back(std::move(term));
    }
    return terms;
}

} // namespace

ordered_json solution_to_json(const PrimePair& pair, const ModelParams& prm,
                              const SolutionIndex& L, const VectorPoly& v)
{
    ordered_json j;
    j["p"] = pair.p;
    j["q"] = pair.q;
    j["k"] = pair.k;
    j["M"] = pair.M;
    j["c"] = pair.c;
    j["n"] = prm.n;
    j["r"] = prm.r;
    j["L"] = L.l;
    j["zero"] = v.is_zero();
    ordered_json comps = ordered_json::array();
    for (auto& [J, f] : v.components) {
        ordered_json c;
        c["J"] = J.elems;
        c["terms"] = poly_terms_json(f);
        comps.push_back(std::move(c));
    }
    j["components"] = std::move(comps);
    return j;
}

SolutionDoc solution_from_json(const ordered_json& j)
{
    SolutionDoc doc;
    doc.pair = classify_pair(j.at("p").get<u64>(), j.at("q").get<u64>());
    int n = j.at("n").get<int>();
    int r = j.at("r").get<int>();
    doc.prm = params_from_n(doc.pair, n, r);
    doc.L = SolutionIndex(j.at("L").get<std::vector<int>>());
    doc.v.p = doc.pair.p;
    doc.v.n = n;
    doc.v.r = r;
    for (auto& c : j.at("components")) {
        SubsetIndex J(c.at("J").get<std::vector<int>>());
        if (!valid_subset(J, n, r))
            throw std::invalid_argument("solution_from_json: bad subset " + J.to_string());
        std::vector<Exp> exps;
        std::vector<u64> coefs;
        for (auto& t : c.at("terms")) {
            auto e = t.at("exp").get<std::vector<int>>();
            if ((int)e.size() != n) throw std::invalid_argument("solution_from_json: bad exponent width");
            for (int x : e) exps.push_back((Exp)x);
            coefs.push_back(t.at("coef").get<u64>());
        }
        doc.v.set(J, MPoly::from_terms(doc.pair.p, 0, n, std::move(exps), std::move(coefs)));
    }
    if (j.at("zero").get<bool>() != doc.v.is_zero())
        throw std::invalid_argument("solution_from_json: zero flag contradicts the components");
    return doc;
}

ordered_json pair_to_json(const PrimePair& pair)
{
    ordered_json j;
    j["p"] = pair.p;
    j["q"] = pair.q;
    j["k"] = pair.k;
    j["type"] = pair.pair_type;
    j["M"] = pair.M;
    j["c"] = pair.c;
    return j;
}

ordered_json leading_to_json(const LeadingData& ld)
{
    ordered_json j;
    j["exponents"] = std::vector<int>(ld.exponents.begin(), ld.exponents.end());
    ordered_json coef = ordered_json::array();
    for (auto& [J, c] : ld.coefficient) {
        ordered_json e;
        e["J"] = J.elems;
        e["value"] = c;
        coef.push_back(std::move(e));
    }
    j["coefficient"] = std::move(coef);
    j["leading_index"] = ld.leading_index.elems;
    return j;
}

ordered_json certificate_to_json(const PrimePair& pair, const ModelParams& prm,
                                 const RankCertificate& cert,
                                 const std::vector<std::pair<std::string, bool>>& checks)
{
    ordered_json j;
    j["p"] = pair.p;
    j["q"] = pair.q;
    j["k"] = pair.k;
    j["M"] = pair.M;
    j["c"] = pair.c;
    j["n"] = prm.n;
    j["r"] = prm.r;
    j["g"] = prm.g ? *prm.g : 0;
    j["rank"] = cert.rank;
    j["expected_rank"] = cert.expected_rank;
    ordered_json basis = ordered_json::array();
    for (auto& entry : cert.basis) {
        ordered_json b;
        b["L"] = entry.L.l;
        b["nonzero"] = entry.nonzero;
        b["matches_prediction"] = entry.matches;
        if (entry.nonzero) {
            b["leading"] = leading_to_json(entry.computed);
            b["predicted"] = leading_to_json(entry.predicted);
        }
        basis.push_back(std::move(b));
    }
    j["basis"] = std::move(basis);
    ordered_json ch = ordered_json::array();
    bool all_ok = cert.ok;
    for (auto& [name, ok] : checks) {
        ordered_json c;
        c["name"] = name;
        c["ok"] = ok;
        ch.push_back(std::move(c));
        all_ok = all_ok && ok;
    }
    j["checks"] = std::move(ch);
    j["ok"] = all_ok;
    if (!cert.failure.empty()) j["failure"] = cert.failure;
    return j;
}

std::string dump_canonical(const ordered_json& j)
{
    return j.dump();
}

} // namespace kzp
