// Acceptance suite: instantiates every certified statement at desk scale and
// prints one pass/fail line per criterion. Exit status 0 iff all pass.

#include "kzp/cartier.hpp"
#include "kzp/json_io.hpp"
#include "kzp/kzcore.hpp"
#include "kzp/leading.hpp"
#include "support/oracle.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <vector>

using namespace kzp;

namespace {

struct Criterion {
    std::string name;
    bool ok = true;
    int checks = 0;
    std::vector<std::string> failures;

    void expect(bool cond, const std::string& what)
    {
        ++checks;
        if (!cond) {
            ok = false;
            if (failures.size() < 8) failures.push_back(what);
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SweepCase {
    PrimePair pair;
    ModelParams prm;
    std::string tag;
};

std::vector<SweepCase> criterion1_cases()
{
    std::vector<SweepCase> cases;
    const std::pair<u64, u64> pairs[] = {{3, 2}, {5, 2}, {7, 2}, {11, 2}, {7, 3}, {13, 3}};
    const std::pair<int, int> geom[] = {{1, 1}, {2, 1}, {1, 2}, {2, 2}};
    for (auto [p, q] : pairs) {
        PrimePair pr = classify_pair(p, q);
        for (auto [g, r] : geom) {
            ModelParams prm = params_from_g(pr, g, r);
            if (prm.n > 9) continue;
            if (!mgp_holds(pr, prm)) continue;
            std::ostringstream tag;
            tag << "(p=" << p << ",q=" << q << ",g=" << g << ",r=" << r << ",n=" << prm.n << ")";
            cases.push_back({pr, prm, tag.str()});
        }
    }
    return cases;
}

// Estimated pair cost of the mirror extraction for tuple L, used to decide
// how many components get the dual-route treatment at large sizes.
u64 mirror_cost_estimate(const PrimePair& pair, const ModelParams& prm, const SolutionIndex& L)
{
    const int r = prm.r, n = prm.n;
    const int D = n * (int)pair.M - 1;
    const int spread = (int)pair.c * (r - 1);
    std::vector<int> caps(n, (int)pair.M);
    u64 total = 0;
    std::vector<u64> size_at(D + 1, 0);
    for (int e = 0; e <= D; ++e) size_at[e] = detail::count_support(caps, D - e);
    for (int i = 0; i < r; ++i) {
        for (int j = i + 1; j < r; ++j) {
            // dominant cost: products of window i and window j (reversed targets)
            int Ti = L.l[r - 1 - i] * (int)pair.p - 1;
            int Tj = L.l[r - 1 - j] * (int)pair.p - 1;
            for (int x = 0; x <= spread; ++x) {
                int ei = Ti - x, ej = Tj - (spread - x);
                u64 a = (ei >= 0 && ei <= D) ? size_at[ei] : 0;
                u64 b = (ej >= 0 && ej <= D) ? size_at[ej] : 0;
                total += a * b;
            }
        }
    }
    return total;
}

} // namespace

int main()
{
    auto wall0 = std::chrono::steady_clock::now();
    Limits lim;
    lim.max_terms = 40'000'000;   // the largest single component holds ~1.9e7 terms
    lim.jobs = 0;

    std::vector<Criterion> crit(11);
    crit[1].name = "solution property (singular + KZ, exact over F_p)";
    crit[2].name = "n=5 r=2 example family (degree, leading monomial, index)";
    crit[3].name = "rank and vanishing (basis count, repeated/over-bound tuples)";
    crit[4].name = "leading-term formulas (exponents, index, entry)";
    crit[5].name = "Cartier reconstruction via two routes";
    crit[6].name = "eigenvector property of leading coefficients";
    crit[7].name = "shifted-exponent master congruence";
    crit[8].name = "singular-space dimension by exact rank";
    crit[9].name = "partition count = binomial = certified rank";
    crit[10].name = "naive full-expansion oracle equivalence (byte-for-byte)";

    // ---------------------------------------------------------- case sweep
    for (auto& cs : criterion1_cases()) {
        auto t0 = std::chrono::steady_clock::now();
        const PrimePair& pr = cs.pair;
        const ModelParams& prm = cs.prm;
        const int bound = tuple_bound(pr, prm);
        auto tuples = admissible_tuples(pr, prm);

        std::map<SolutionIndex, std::shared_ptr<SolutionStore>> stores;
        for (auto& L : tuples)
            stores.emplace(L, std::make_shared<SolutionStore>(pr, prm, L, lim));

        // criterion 1: each admissible solution solves both systems exactly
        for (auto& [L, s] : stores) {
            crit[1].expect(!s->is_zero(), cs.tag + " " + L.to_string() + " is zero");
            crit[1].expect(check_singular(*s), cs.tag + " " + L.to_string() + " singular system");
            crit[1].expect(check_kz(*s), cs.tag + " " + L.to_string() + " KZ system");
        }

        // criteria 3 + 4 + 9: leading behavior, distinctness, rank bookkeeping
        std::map<SubsetIndex, SolutionIndex> seen_indices;
        bool all_match = true;
        for (auto& [L, s] : stores) {
            TupleLeadingReport rep = leading_report(*s);
            crit[4].expect(rep.nonzero && rep.matches,
                           cs.tag + " " + L.to_string() + " leading term: " + rep.detail);
            all_match = all_match && rep.nonzero && rep.matches;
            if (rep.nonzero) {
                auto [it, fresh] = seen_indices.emplace(rep.computed.leading_index, L);
                crit[3].expect(fresh, cs.tag + " duplicate leading index at " + L.to_string());
                // criterion 6: eigen equations with eigenvalues q*d_j
                crit[6].expect(check_eigen(rep.computed, pr, prm),
                               cs.tag + " " + L.to_string() + " eigen equations");
            }
        }
        u64 expected = binom_u64((u64)bound, (u64)prm.r);
        crit[3].expect(all_match && stores.size() == expected,
                       cs.tag + " certified basis count != C(kg+r-1,r)");
        u64 partition_count = enumerate_partitions(bound - prm.r, prm.r).size();
        crit[9].expect(partition_count == expected && stores.size() == expected,
                       cs.tag + " |A(kg-1)| = C(kg+r-1,r) = rank fails");

        // criterion 3: vanishing outside the admissible family
        {
            std::vector<int> over(prm.r);
            over[0] = bound + 1;
            for (int i = 1; i < prm.r; ++i) over[i] = prm.r - i;
            SolutionStore sz(pr, prm, SolutionIndex(over), lim);
            crit[3].expect(sz.is_zero(), cs.tag + " l_1 = kg+r does not vanish");
            if (prm.r >= 2) {
                for (int x = 1; x <= bound; ++x) {
                    std::vector<int> rep_tuple(prm.r, x);
                    SolutionStore sr(pr, prm, SolutionIndex(rep_tuple), lim);
                    crit[3].expect(sr.is_zero(),
                                   cs.tag + " repeated tuple does not vanish");
                }
                // honest extraction witness, bypassing the skew shortcut
                auto layout = detail::solution_layout(pr, prm);
                std::vector<int> dup(prm.r, bound * (int)pr.p - 1);
                std::vector<int> base(prm.r);
                std::iota(base.begin(), base.end(), 1);
                crit[3].expect(detail::extract_t_coefficient(pr, prm, SubsetIndex(base),
                                                             dup, layout, lim).empty(),
                               cs.tag + " raw extraction at a repeated target is nonzero");
            }
        }

        // relabeling spot checks: a directly constructed off-representative
        // component must equal the relabeled one. Both the cheapest and the
        // most expensive tuple are probed, so the relabeling path is verified
        // at full scale in the largest case too.
        {
            auto subsets = all_subsets(prm.n, prm.r);
            SubsetIndex off = subsets[subsets.size() / 2];
            for (const SolutionIndex& probe : {tuples.back(), tuples.front()}) {
                auto s = stores.at(probe);
                crit[1].expect(s->component_direct(off) == *s->component(off),
                               cs.tag + " direct/relabeled mismatch at " + off.to_string()
                                   + " for " + probe.to_string());
                if (tuples.front() == tuples.back()) break;
            }
        }

        // criterion 5: reconstruction
        for (auto& a : enumerate_partitions(bound - prm.r, prm.r)) {
            SolutionIndex L = partition_to_tuple(a);
            auto s = stores.at(L);
            auto layout = detail::solution_layout(pr, prm);
            bool heavy = mirror_cost_estimate(pr, prm, L) > 50'000'000 && prm.r >= 2;
            std::vector<SubsetIndex> Js;
            if (heavy) {
                std::vector<int> base(prm.r);
                std::iota(base.begin(), base.end(), 1);
                Js.push_back(SubsetIndex(base));
            } else {
                Js = all_subsets(prm.n, prm.r);
            }
            for (auto& J : Js) {
                PackedPoly route1 = prm.r == 1
                    ? detail::cartier_entry_packed(pr, prm, J, a, layout, lim, false)
                    : detail::cartier_entry_mirror(pr, prm, J, a, layout, lim);
                crit[5].expect(route1 == *s->component(J),
                               cs.tag + " Cartier route mismatch at a, J=" + J.to_string());
            }
        }
        // ...and through the standalone table when the full expansion fits
        if (prm.n * (int)pr.M <= 12) {
            crit[5].expect(verify_reconstruction(pr, prm, lim),
                           cs.tag + " full-table reconstruction fails");
        }

        // criterion 8: exact rank of the singular system for this geometry
        crit[8].expect(singular_dimension(prm.n, prm.r, pr.p)
                           == binom_u64(prm.n, prm.r) - binom_u64(prm.n, prm.r - 1),
                       cs.tag + " singular-space dimension");

        std::fprintf(stderr, "[case %-28s] %d tuple(s), %.1fs\n",
                     cs.tag.c_str(), (int)tuples.size(), seconds_since(t0));
    }

    // --------------------------------------------- criterion 2: n=5, r=2
    for (u64 p : {5ull, 7ull, 11ull, 13ull}) {
        auto t0 = std::chrono::steady_clock::now();
        PrimePair pr = classify_pair(p, 2);
        ModelParams prm = params_from_n(pr, 5, 2);
        auto tuples = admissible_tuples(pr, prm);
        std::ostringstream tag;
        tag << "(p=" << p << ",q=2,n=5,r=2)";
        crit[2].expect(tuples.size() == 1 && tuples[0] == SolutionIndex{2, 1},
                       tag.str() + " admissible tuples != {(2,1)}");
        VectorPoly v = construct_solution(pr, prm, SolutionIndex{2, 1}, lim);
        crit[2].expect(!v.is_zero(), tag.str() + " solution is zero");
        int want_deg = 2 * (int)p - 4;
        for (auto& [J, f] : v.components) {
            crit[2].expect(f.is_homogeneous() && f.homogeneous_degree() == want_deg,
                           tag.str() + " not homogeneous of degree 2p-4");
        }
        crit[2].expect(expected_solution_degree(pr, prm, SolutionIndex{2, 1}) == want_deg,
                       tag.str() + " degree formula");
        LeadingData ld = leading_term(v);
        std::vector<Exp> want_exps{(Exp)(p - 2), (Exp)((p - 1) / 2), (Exp)((p - 3) / 2), 0, 0};
        crit[2].expect(ld.exponents == want_exps, tag.str() + " leading monomial");
        crit[2].expect(ld.leading_index == SubsetIndex{1, 3}, tag.str() + " leading index");
        std::fprintf(stderr, "[example p=%llu] %.1fs\n", (unsigned long long)p, seconds_since(t0));
    }

    // ------------------------------------- criterion 7: shifted congruence
    for (u64 p : {3ull, 5ull}) {
        PrimePair pr = classify_pair(p, 2);
        ModelParams prm = params_from_g(pr, 1, 1);   // n = 3, r = 1
        for (int d0 = 0; d0 <= 1; ++d0) {
            for (int mask = 0; mask < 8; ++mask) {
                std::vector<int> dv{mask & 1, (mask >> 1) & 1, (mask >> 2) & 1};
                std::ostringstream tag;
                tag << "(p=" << p << ",d0=" << d0 << ",d=" << mask << ")";
                crit[7].expect(shifted_master_congruence(pr, prm, d0, dv, lim),
                               tag.str() + " congruence fails");
            }
        }
    }

    // ------------------------------------------- criterion 8: the n=5 case
    crit[8].expect(singular_dimension(5, 2, 5) == 5, "dim Sing at n=5,r=2 != 5");

    // -------------------------------------------- criterion 10: the oracle
    for (u64 p : {3ull, 5ull}) {
        PrimePair pr = classify_pair(p, 2);
        ModelParams prm = params_from_g(pr, 1, 1);   // n = 3, r = 1
        int bound = tuple_bound(pr, prm);
        for (int l = 1; l <= bound + 1; ++l) {
            SolutionIndex L{l};
            VectorPoly fast = construct_solution(pr, prm, L, lim);
            VectorPoly slow = oracle::construct_solution_full(pr, prm, L);
            std::string bytes_fast = dump_canonical(solution_to_json(pr, prm, L, fast));
            std::string bytes_slow = dump_canonical(solution_to_json(pr, prm, L, slow));
            std::ostringstream tag;
            tag << "(p=" << p << ",l=" << l << ")";
            crit[10].expect(bytes_fast == bytes_slow, tag.str() + " byte mismatch");
        }
    }

    // ------------------------------------------------------------- report
    int failed = 0;
    for (int i = 1; i <= 10; ++i) {
        const Criterion& c = crit[i];
        std::printf("criterion %2d: %s — %s (%d checks)\n",
                    i, c.ok ? "PASS" : "FAIL", c.name.c_str(), c.checks);
        if (!c.ok) {
            ++failed;
            for (auto& f : c.failures) std::printf("    %s\n", f.c_str());
        }
    }
    std::fprintf(stderr, "total wall time %.1fs\n", seconds_since(wall0));
    return failed == 0 ? 0 : 1;
}
