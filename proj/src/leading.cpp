#include "kzp/leading.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace kzp {

LeadingData leading_term(const VectorPoly& v)
{
    if (v.is_zero()) throw std::invalid_argument("leading_term: zero vector");
    std::vector<Exp> best;
    for (auto& [J, f] : v.components) {
        auto e = f.exps(0);   // descending storage: front term is the lex max
        std::vector<Exp> cand(e.begin(), e.end());
        if (best.empty() || std::lexicographical_compare(best.begin(), best.end(),
                                                         cand.begin(), cand.end()))
            best = std::move(cand);
    }
    LeadingData ld;
    ld.exponents = best;
    for (auto& [J, f] : v.components) {
        u64 c = f.coef_at(best);
        if (c) ld.coefficient.emplace(J, c);
    }
    ld.leading_index = ld.coefficient.begin()->first;
    return ld;
}

LeadingData leading_term(SolutionStore& s)
{
    if (s.is_zero()) throw std::invalid_argument("leading_term: zero vector");
    std::vector<int> base(s.params().r);
    std::iota(base.begin(), base.end(), 1);
    auto rep_ptr = s.component(SubsetIndex(base));
    const PackedPoly& rep = *rep_ptr;
    const KeyLayout& L = s.layout();
    const int n = s.params().n;

    u64 global_best = 0;
    for (auto& J : all_subsets(n, s.params().r)) {
        auto perm = s.relabel_for(J);
        // max over the relabeled keys, computed without materializing
        u64 best = 0;
        for (u64 k : rep.keys) {
            u64 nk = 0;
            for (int v = 0; v < L.nvars; ++v)
                nk |= ((k >> L.shift(v)) & L.digit_mask()) << L.shift(perm[v]);
            best = std::max(best, nk);
        }
        global_best = std::max(global_best, best);
    }

    LeadingData ld;
    ld.exponents.assign(n, 0);
    L.decode(global_best, ld.exponents);
    for (auto& J : all_subsets(n, s.params().r)) {
        auto perm = s.relabel_for(J);
        std::vector<int> inv(n);
        for (int v = 0; v < n; ++v) inv[perm[v]] = v;
        u64 key = 0;
        for (int v = 0; v < n; ++v)
            key |= ((global_best >> L.shift(v)) & L.digit_mask()) << L.shift(inv[v]);
        u64 c = rep.coef_at(key);
        if (c) ld.coefficient.emplace(J, c);
    }
    ld.leading_index = ld.coefficient.begin()->first;
    return ld;
}

SubsetIndex predict_index(const PrimePair& pair, const ModelParams& prm,
                          const SolutionIndex& L)
{
    if (!admissible(pair, prm, L))
        throw std::invalid_argument("predict_index: inadmissible tuple " + L.to_string());
    if (!mgp_holds(pair, prm))
        throw std::invalid_argument("predict_index: M - g >= 0 fails");
    const long long n = prm.n, r = prm.r;
    const long long M = (long long)pair.M, c = (long long)pair.c, p = (long long)pair.p;
    std::vector<int> m(prm.r);
    for (int i = 0; i < prm.r; ++i) {
        long long num = n * M + (r - 1 - i) * c - (long long)L.l[i] * p;
        if (num < 0) throw std::logic_error("predict_index: negative bracket");
        m[i] = (int)(num / M) + 1;
    }
    for (int i = 0; i + 1 < prm.r; ++i)
        if (m[i] + 2 > m[i + 1]) throw std::logic_error("predict_index: spacing violated");
    if (m[0] < 1 || m[prm.r - 1] >= prm.n) throw std::logic_error("predict_index: range violated");
    return SubsetIndex(m);
}

LeadingData predict_leading(const PrimePair& pair, const ModelParams& prm,
                            const SolutionIndex& L)
{
    SubsetIndex mset = predict_index(pair, prm, L);
    const long long n = prm.n, r = prm.r;
    const long long M = (long long)pair.M, c = (long long)pair.c, p = (long long)pair.p;
    const auto& m = mset.elems;

    LeadingData ld;
    ld.exponents.assign(prm.n, 0);
    u64 entry = 1;
    for (int i = 0; i < prm.r; ++i) {
        long long e_i = (n - m[i] + 1) * M + (r - 1 - i) * c - (long long)L.l[i] * p;
        long long d_mi = e_i + (r - 1 - i) * M;
        ld.exponents[m[i] - 1] = (Exp)d_mi;
        u64 b = binom_mod_p(pair.M - 1, (u64)e_i, pair.p);
        entry = entry * (e_i % 2 ? (pair.p - b) % pair.p : b) % pair.p;
    }
    for (int j = 1; j < m[0]; ++j) ld.exponents[j - 1] = (Exp)(r * M);
    for (int i = 0; i + 1 < prm.r; ++i)
        for (int j = m[i] + 1; j < m[i + 1]; ++j)
            ld.exponents[j - 1] = (Exp)((r - 1 - i) * M);
    // positions past m_r stay zero

    ld.leading_index = mset;
    ld.coefficient.emplace(mset, entry);
    return ld;
}

namespace {

using CoefVec = std::map<SubsetIndex, u64>;

CoefVec casimir_sum_row(int j, int n, const CoefVec& C, u64 p)
{
    // sum over l > j of (Omega_{j,l} - 1/2) applied to the plain vector C
    CoefVec out;
    auto add = [&](const SubsetIndex& K, u64 val) {
        val %= p;
        if (!val) return;
        auto [it, fresh] = out.emplace(K, val);
        if (!fresh) {
            it->second = (it->second + val) % p;
            if (!it->second) out.erase(it);
        }
    };
    for (int l = j + 1; l <= n; ++l) {
        for (auto& [K, c] : C) {
            if (K.contains(j) == K.contains(l)) continue;
            add(K, p - c);
            add(K.swapped(j, l), c);
        }
    }
    return out;
}

} // namespace

bool check_eigen(const LeadingData& ld, const PrimePair& pair, const ModelParams& prm)
{
    const u64 p = pair.p;
    const int n = prm.n;
    if ((int)ld.exponents.size() != n) throw std::invalid_argument("check_eigen: bad exponent length");
    if (ld.exponents[n - 1] % p != 0) return false;   // d_n == 0 mod p fast path
    for (int j = 1; j <= n - 1; ++j) {
        CoefVec lhs = casimir_sum_row(j, n, ld.coefficient, p);
        u64 lambda = pair.q % p * (ld.exponents[j - 1] % p) % p;
        CoefVec rhs;
        for (auto& [K, c] : ld.coefficient) {
            u64 v = c * lambda % p;
            if (v) rhs.emplace(K, v);
        }
        if (lhs != rhs) return false;
    }
    return true;
}

TupleLeadingReport leading_report(SolutionStore& s)
{
    TupleLeadingReport rep;
    rep.L = s.index();
    rep.nonzero = !s.is_zero();
    if (!rep.nonzero) {
        rep.detail = "solution is zero";
        return rep;
    }
    rep.predicted = predict_leading(s.pair(), s.params(), s.index());
    rep.computed = leading_term(s);
    std::ostringstream why;
    bool ok = true;
    if (rep.computed.exponents != rep.predicted.exponents) {
        ok = false;
        why << "leading exponents differ;";
    }
    if (rep.computed.leading_index != rep.predicted.leading_index) {
        ok = false;
        why << "leading index differs;";
    }
    u64 want = rep.predicted.coefficient.begin()->second;
    auto it = rep.computed.coefficient.find(rep.predicted.leading_index);
    u64 got = it == rep.computed.coefficient.end() ? 0 : it->second;
    if (want != got) {
        ok = false;
        why << "leading entry differs;";
    }
    rep.matches = ok;
    rep.detail = why.str();
    return rep;
}

RankCertificate certify_rank(const PrimePair& pair, const ModelParams& prm, const Limits& lim)
{
    if (!pair.type1()) throw std::invalid_argument("certify_rank: pair is not of type 1");
    if (!mgp_holds(pair, prm)) throw std::invalid_argument("certify_rank: M - g >= 0 fails");
    RankCertificate cert;
    cert.expected_rank = binom_u64(tuple_bound(pair, prm), prm.r);
    std::map<SubsetIndex, SolutionIndex> seen;
    for (auto& L : admissible_tuples(pair, prm)) {
        SolutionStore s(pair, prm, L, lim);
        TupleLeadingReport rep = leading_report(s);
        if (!rep.nonzero || !rep.matches) {
            cert.ok = false;
            cert.failure = "tuple " + L.to_string() + ": "
                         + (rep.detail.empty() ? "mismatch" : rep.detail);
            cert.basis.push_back(std::move(rep));
            return cert;
        }
        auto [it, fresh] = seen.emplace(rep.computed.leading_index, L);
        if (!fresh) {
            cert.ok = false;
            cert.failure = "tuples " + it->second.to_string() + " and " + L.to_string()
                         + " share the leading index " + rep.computed.leading_index.to_string();
            cert.basis.push_back(std::move(rep));
            return cert;
        }
        cert.basis.push_back(std::move(rep));
    }
    cert.rank = cert.basis.size();
    cert.ok = cert.rank == cert.expected_rank;
    if (!cert.ok) cert.failure = "basis count differs from the expected rank";
    return cert;
}

} // namespace kzp
