#include "kzp/cartier.hpp"

#include <algorithm>
#include <numeric>

namespace kzp {

std::vector<Partition> enumerate_partitions(int d, int r)
{
    if (d < 0 || r < 0) throw std::invalid_argument("enumerate_partitions: negative arguments");
    std::vector<Partition> out;
    Partition cur(r);
    auto rec = [&](auto&& self, int pos, int hi) -> void {
        if (pos == r) {
            out.push_back(cur);
            return;
        }
        for (int v = hi; v >= 0; --v) {
            cur[pos] = v;
            self(self, pos + 1, v);
        }
    };
    if (r == 0) {
        out.push_back({});
        return out;
    }
    rec(rec, 0, d);
    return out;
}

// ------------------------------------------------ integer symmetric algebra

namespace {

using IMono = std::vector<int>;
using IPoly = std::map<IMono, long long>;

IPoly ipoly_one(int r) { return {{IMono(r, 0), 1}}; }

IPoly ipoly_mul(const IPoly& a, const IPoly& b)
{
    IPoly out;
    for (auto& [ea, ca] : a) {
        for (auto& [eb, cb] : b) {
            IMono e(ea.size());
            for (std::size_t v = 0; v < e.size(); ++v) e[v] = ea[v] + eb[v];
            out[e] += ca * cb;
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

// complete homogeneous symmetric polynomial h_k in r variables
IPoly complete_homogeneous(int k, int r)
{
    IPoly out;
    if (k < 0) return out;
    IMono e(r, 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
        if (pos == r - 1) {
            e[pos] = left;
            out[e] += 1;
            return;
        }
        for (int v = 0; v <= left; ++v) {
            e[pos] = v;
            self(self, pos + 1, left - v);
        }
    };
    if (r == 0) {
        if (k == 0) out[{}] = 1;
        return out;
    }
    rec(rec, 0, k);
    return out;
}

IPoly schur_integer(const Partition& a, int r)
{
    if ((int)a.size() != r) throw std::invalid_argument("schur: partition must have r parts");
    for (int i = 0; i < r; ++i) {
        if (a[i] < 0 || (i && a[i] > a[i - 1]))
            throw std::invalid_argument("schur: not a partition");
    }
    // det(h_{a_i - i + j}), expanded over permutations
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    IPoly det;
    do {
        int sign = 1;
        for (int i = 0; i < r; ++i)
            for (int j = i + 1; j < r; ++j)
                if (perm[i] > perm[j]) sign = -sign;
        IPoly prod = ipoly_one(r);
        bool zero = false;
        for (int i = 0; i < r && !zero; ++i) {
            int k = a[i] - i + perm[i];
            if (k < 0) { zero = true; break; }
            prod = ipoly_mul(prod, complete_homogeneous(k, r));
        }
        if (zero) continue;
        for (auto& [e, c] : prod) det[e] += sign * c;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (auto it = det.begin(); it != det.end();)
        it = it->second == 0 ? det.erase(it) : std::next(it);
    return det;
}

} // namespace

MPoly schur(const Partition& a, int r, u64 p)
{
    IPoly s = schur_integer(a, r);
    std::vector<Exp> exps;
    std::vector<u64> coefs;
    for (auto& [e, c] : s) {
        long long cc = c % (long long)p;
        if (cc < 0) cc += (long long)p;
        if (!cc) continue;
        for (int v : e) exps.push_back((Exp)v);
        coefs.push_back((u64)cc);
    }
    return MPoly::from_terms(p, r, 0, std::move(exps), std::move(coefs));
}

std::map<Partition, long long> schur_monomial_expansion(const Partition& a)
{
    IPoly s = schur_integer(a, (int)a.size());
    std::map<Partition, long long> out;
    for (auto& [e, c] : s) {
        bool sorted_desc = true;
        for (std::size_t i = 1; i < e.size(); ++i)
            if (e[i] > e[i - 1]) { sorted_desc = false; break; }
        if (!sorted_desc) continue;
        out[Partition(e.begin(), e.end())] = c;
    }
    return out;
}

SolutionIndex partition_to_tuple(const Partition& a)
{
    const int r = (int)a.size();
    std::vector<int> l(r);
    for (int i = 0; i < r; ++i) l[i] = a[i] + r - i;   // 0-based: l_i = a_i + r - i
    return SolutionIndex(l);
}

Partition tuple_to_partition(const SolutionIndex& L)
{
    const int r = L.size();
    Partition a(r);
    for (int i = 0; i < r; ++i) {
        a[i] = L.l[i] - (r - i);
        if (a[i] < 0 || (i && a[i] > a[i - 1]))
            throw std::invalid_argument("tuple_to_partition: tuple is not strictly decreasing to 1");
    }
    return a;
}

const ZPoly* CartierTable::find(const SubsetIndex& J, const Partition& a) const
{
    auto it = entries.find({J, a});
    return it == entries.end() ? nullptr : &it->second;
}

// ----------------------------------------------------------- single entries

namespace detail {

namespace {

std::vector<int> alternant_targets(const Partition& a, u64 p)
{
    const int r = (int)a.size();
    std::vector<int> t(r);
    for (int i = 0; i < r; ++i) t[i] = (a[i] + r - 1 - i) * (int)p + (int)p - 1;
    return t;
}

} // namespace

PackedPoly cartier_entry_mirror(const PrimePair& pair, const ModelParams& prm,
                                const SubsetIndex& J, const Partition& a,
                                const KeyLayout& layout, const Limits& lim)
{
    auto targets = alternant_targets(a, pair.p);
    std::reverse(targets.begin(), targets.end());
    PackedPoly mirror = extract_t_coefficient(pair, prm, J, targets, layout, lim);
    const int r = prm.r;
    u64 sign = ((r * (r - 1) / 2) % 2 == 0) ? 1 : pair.p - 1;   // sign of the flip
    return mirror.scaled(sign);
}

PackedPoly cartier_entry_packed(const PrimePair& pair, const ModelParams& prm,
                                const SubsetIndex& J, const Partition& a,
                                const KeyLayout& layout, const Limits& lim,
                                bool crosscheck)
{
    if (!pair.type1()) throw std::invalid_argument("cartier: pair is not of type 1");
    if ((int)a.size() != prm.r) throw std::invalid_argument("cartier: partition must have r parts");
    auto targets = alternant_targets(a, pair.p);
    PackedPoly direct = extract_t_coefficient(pair, prm, J, targets, layout, lim);
    if (crosscheck && prm.r > 1) {
        PackedPoly mirror = cartier_entry_mirror(pair, prm, J, a, layout, lim);
        if (!(mirror == direct))
            throw std::runtime_error("cartier: alternant routes disagree at J=" + J.to_string());
    }
    return direct;
}

} // namespace detail

ZPoly cartier_entry(const PrimePair& pair, const ModelParams& prm,
                    const SubsetIndex& J, const Partition& a, const Limits& lim)
{
    auto layout = detail::solution_layout(pair, prm);
    return detail::cartier_entry_packed(pair, prm, J, a, layout, lim, true).to_mpoly();
}

// ------------------------------------------------------------- full tables

namespace {

// Upper bound on the term count of the full expansion of Phi_p * W_J.
u64 full_expansion_bound(const PrimePair& pair, const ModelParams& prm)
{
    const int r = prm.r, n = prm.n;
    const int tdeg = n * (int)pair.M + (r - 1) * (int)pair.c - 1;
    std::vector<int> caps(r + n);
    for (int i = 0; i < r; ++i) caps[i] = tdeg;
    for (int s = 0; s < n; ++s) caps[r + s] = r * (int)pair.M;
    int total = r * (n * (int)pair.M - 1) + (int)pair.c * (r * (r - 1) / 2);
    return detail::count_support(caps, total);
}

constexpr u64 full_route_threshold = 1'500'000;

// Reads every coefficient class with all t-exponents == p-1 (mod p) out of
// the full expansion and checks the skew-symmetric alternant structure.
std::map<Partition, ZPoly> read_alternant_classes(const MPoly& F, const PrimePair& pair,
                                                  const ModelParams& prm, int a_bound)
{
    const int r = prm.r, n = prm.n;
    const u64 p = pair.p;
    std::map<std::vector<int>, std::pair<std::vector<Exp>, std::vector<u64>>> by_beta;
    for (std::size_t i = 0; i < F.term_count(); ++i) {
        auto e = F.exps(i);
        bool hit = true;
        std::vector<int> beta(r);
        for (int u = 0; u < r && hit; ++u) {
            if ((e[u] + 1) % p != 0) hit = false;
            else beta[u] = (int)((e[u] + 1) / p) - 1;
        }
        if (!hit) continue;
        auto& bucket = by_beta[beta];
        bucket.first.insert(bucket.first.end(), e.begin() + r, e.end());
        bucket.second.push_back(F.coef(i));
    }

    std::map<Partition, std::map<std::vector<int>, std::pair<ZPoly, int>>> classes;
    for (auto& [beta, bucket] : by_beta) {
        std::vector<int> sorted = beta;
        std::sort(sorted.begin(), sorted.end(), std::greater<int>());
        for (int u = 0; u + 1 < r; ++u)
            if (sorted[u] == sorted[u + 1])
                throw std::runtime_error("cartier: repeated alternant exponent survived");
        // sign of the permutation carrying beta to descending order
        std::vector<int> b = beta;
        int sign = 1;
        for (int u = 0; u < r; ++u) {
            for (int v = u + 1; v < r; ++v) {
                if (b[u] < b[v]) { std::swap(b[u], b[v]); sign = -sign; }
            }
        }
        Partition a(r);
        for (int u = 0; u < r; ++u) {
            a[u] = sorted[u] - (r - 1 - u);
            if (a[u] < 0) throw std::runtime_error("cartier: negative partition entry");
        }
        if (a[0] > a_bound) throw std::runtime_error("cartier: partition exceeds A(kg-1)");
        ZPoly f = MPoly::from_terms(p, 0, n, std::move(bucket.first), std::move(bucket.second));
        classes[a].emplace(beta, std::make_pair(std::move(f), sign));
    }

    std::map<Partition, ZPoly> out;
    for (auto& [a, byperm] : classes) {
        // canonical representative: the descending beta tuple (identity sign)
        std::vector<int> desc(r);
        for (int u = 0; u < r; ++u) desc[u] = a[u] + r - 1 - u;
        auto it = byperm.find(desc);
        if (it == byperm.end())
            throw std::runtime_error("cartier: missing identity monomial in an alternant class");
        const ZPoly& rep = it->second.first;
        for (auto& [beta, fs] : byperm) {
            const ZPoly want = fs.second == 1 ? rep : -rep;
            if (!(fs.first == want))
                throw std::runtime_error("cartier: alternant class is not skew-consistent");
        }
        out.emplace(a, rep);
    }
    return out;
}

} // namespace

CartierTable cartier_decompose(const PrimePair& pair, const ModelParams& prm, const Limits& lim)
{
    if (!pair.type1()) throw std::invalid_argument("cartier_decompose: pair is not of type 1");
    const int a_bound = tuple_bound(pair, prm) - prm.r;   // kg - 1; throws when g is absent
    CartierTable table;
    table.p = pair.p;
    table.n = prm.n;
    table.r = prm.r;

    const bool full_route = full_expansion_bound(pair, prm)
                          <= std::min<u64>(full_route_threshold, lim.max_terms);
    auto layout = detail::solution_layout(pair, prm);
    auto partitions = enumerate_partitions(a_bound, prm.r);

    for (auto& J : all_subsets(prm.n, prm.r)) {
        if (full_route) {
            MPoly F = phi_times_weight(pair, prm, J, lim);
            auto classes = read_alternant_classes(F, pair, prm, a_bound);
            for (auto& [a, f] : classes) {
                // cross-check against the window-extraction route
                PackedPoly direct = detail::cartier_entry_packed(pair, prm, J, a, layout, lim, false);
                if (!(direct.to_mpoly() == f))
                    throw std::runtime_error("cartier: expansion and extraction routes disagree at J="
                                             + J.to_string());
                if (!f.is_zero()) table.entries.emplace(std::make_pair(J, a), f);
            }
        } else {
            for (auto& a : partitions) {
                PackedPoly f = detail::cartier_entry_packed(pair, prm, J, a, layout, lim, true);
                if (!f.empty()) table.entries.emplace(std::make_pair(J, a), f.to_mpoly());
            }
        }
    }
    return table;
}

bool verify_reconstruction(const PrimePair& pair, const ModelParams& prm, const Limits& lim)
{
    if (!pair.type1()) throw std::invalid_argument("verify_reconstruction: pair is not of type 1");
    const int a_bound = tuple_bound(pair, prm) - prm.r;
    auto layout = detail::solution_layout(pair, prm);
    const bool small = full_expansion_bound(pair, prm)
                     <= std::min<u64>(full_route_threshold, lim.max_terms);

    if (small) {
        CartierTable table = cartier_decompose(pair, prm, lim);
        for (auto& a : enumerate_partitions(a_bound, prm.r)) {
            VectorPoly sol = construct_solution(pair, prm, partition_to_tuple(a), lim);
            for (auto& J : all_subsets(prm.n, prm.r)) {
                const ZPoly* lhs = table.find(J, a);
                const ZPoly* rhs = sol.find(J);
                if (!lhs && !rhs) continue;
                if (!lhs || !rhs) return false;
                if (!(*lhs == *rhs)) return false;
            }
        }
        return true;
    }

    // large case: compare on one orbit representative per partition; the
    // remaining components are common relabelings of both sides
    std::vector<int> base(prm.r);
    std::iota(base.begin(), base.end(), 1);
    SubsetIndex J0(base);
    for (auto& a : enumerate_partitions(a_bound, prm.r)) {
        SolutionStore s(pair, prm, partition_to_tuple(a), lim);
        PackedPoly mirror = detail::cartier_entry_mirror(pair, prm, J0, a, layout, lim);
        auto comp = s.component(J0);
        if (!(mirror == *comp)) return false;
    }
    return true;
}

} // namespace kzp
