#include "kzp/kzcore.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace kzp {

// ----------------------------------------------------------------- params

ModelParams params_from_g(const PrimePair& pair, int g, int r)
{
    if (g < 1) throw std::invalid_argument("params: g must be a positive integer");
    if (r < 1) throw std::invalid_argument("params: r must be a positive integer");
    ModelParams prm;
    prm.n = (int)pair.q * g + 2 * r - 1;
    prm.r = r;
    prm.g = g;
    if (prm.n < 2 * r) throw std::invalid_argument("params: weight space is empty (n < 2r)");
    return prm;
}

ModelParams params_from_n(const PrimePair& pair, int n, int r)
{
    if (r < 1) throw std::invalid_argument("params: r must be a positive integer");
    if (n < 2 * r) throw std::invalid_argument("params: weight space is empty (n < 2r)");
    int rem = n - 2 * r + 1;
    if (rem < (int)pair.q || rem % (int)pair.q != 0)
        throw std::invalid_argument("params: n = " + std::to_string(n)
                                    + " is not of the form q*g + 2r - 1 with positive g");
    ModelParams prm;
    prm.n = n;
    prm.r = r;
    prm.g = rem / (int)pair.q;
    return prm;
}

ModelParams params_free(int n, int r)
{
    if (r < 1 || n < 2 * r) throw std::invalid_argument("params: need n >= 2r >= 2");
    return ModelParams{n, r, std::nullopt};
}

bool mgp_holds(const PrimePair& pair, const ModelParams& prm)
{
    if (!prm.g) throw std::invalid_argument("mgp_holds: params carry no g");
    return (long long)pair.M >= (long long)*prm.g;
}

int tuple_bound(const PrimePair& pair, const ModelParams& prm)
{
    if (!prm.g) throw std::invalid_argument("tuple_bound: params carry no g");
    return (int)pair.k * *prm.g + prm.r - 1;
}

// ---------------------------------------------------------------- subsets

bool SubsetIndex::contains(int x) const
{
    return std::binary_search(elems.begin(), elems.end(), x);
}

SubsetIndex SubsetIndex::swapped(int m, int j) const
{
    bool hm = contains(m), hj = contains(j);
    if (hm == hj) throw std::invalid_argument("SubsetIndex::swapped: exactly one of m,j must be a member");
    SubsetIndex out = *this;
    int drop = hm ? m : j, insert = hm ? j : m;
    out.elems.erase(std::find(out.elems.begin(), out.elems.end(), drop));
    out.elems.insert(std::upper_bound(out.elems.begin(), out.elems.end(), insert), insert);
    return out;
}

std::string SubsetIndex::to_string() const
{
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (i) os << ",";
        os << elems[i];
    }
    os << "}";
    return os.str();
}

bool valid_subset(const SubsetIndex& J, int n, int r)
{
    if ((int)J.elems.size() != r) return false;
    for (int i = 0; i < r; ++i) {
        if (J.elems[i] < 1 || J.elems[i] > n) return false;
        if (i && J.elems[i] <= J.elems[i - 1]) return false;
    }
    return true;
}

std::vector<SubsetIndex> all_subsets(int n, int r)
{
    std::vector<SubsetIndex> out;
    if (r < 0 || r > n) return out;
    std::vector<int> cur(r);
    for (int i = 0; i < r; ++i) cur[i] = i + 1;
    while (true) {
        out.push_back(SubsetIndex(cur));
        int i = r - 1;
        while (i >= 0 && cur[i] == n - (r - 1 - i)) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < r; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

std::string SolutionIndex::to_string() const
{
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (i) os << ",";
        os << l[i];
    }
    os << ")";
    return os.str();
}

bool admissible(const PrimePair& pair, const ModelParams& prm, const SolutionIndex& L)
{
    if ((int)L.l.size() != prm.r) return false;
    int bound = tuple_bound(pair, prm);
    for (int i = 0; i < prm.r; ++i) {
        if (L.l[i] < 1) return false;
        if (i == 0 ? L.l[i] > bound : L.l[i] >= L.l[i - 1]) return false;
    }
    return true;
}

std::vector<SolutionIndex> admissible_tuples(const PrimePair& pair, const ModelParams& prm)
{
    int bound = tuple_bound(pair, prm);
    int r = prm.r;
    std::vector<SolutionIndex> out;
    // strictly decreasing tuples as ascending-lex list of vectors
    std::vector<int> cur(r);
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos == r) {
            out.push_back(SolutionIndex(cur));
            return;
        }
        // positions are filled from the last entry upward: cur is descending
        int lo = pos == 0 ? 1 : cur[pos - 1] + 1;   // building reversed
        for (int v = lo; v <= bound - (r - 1 - pos); ++v) {
            cur[pos] = v;
            self(self, pos + 1);
        }
    };
    // build reversed (ascending) then flip each tuple to descending order
    rec(rec, 0);
    for (auto& t : out) std::reverse(t.l.begin(), t.l.end());
    std::sort(out.begin(), out.end());
    return out;
}

// -------------------------------------------------------------- VectorPoly

u64 VectorPoly::total_terms() const
{
    u64 t = 0;
    for (auto& [J, f] : components) t += f.term_count();
    return t;
}

const ZPoly* VectorPoly::find(const SubsetIndex& J) const
{
    auto it = components.find(J);
    return it == components.end() ? nullptr : &it->second;
}

void VectorPoly::set(const SubsetIndex& J, ZPoly f)
{
    if (f.is_zero()) components.erase(J);
    else components.insert_or_assign(J, std::move(f));
}

// ------------------------------------------------ full-expansion products

namespace {

MPoly guarded_mul(const MPoly& a, const MPoly& b, const Limits& lim, const char* what)
{
    u64 pairs = (u64)a.term_count() * b.term_count();
    if (pairs > 8 * lim.max_terms)
        throw SizeGuardError(pairs, lim.max_terms, what);
    MPoly r = mul(a, b);
    if (r.term_count() > lim.max_terms)
        throw SizeGuardError(r.term_count(), lim.max_terms, what);
    return r;
}

MPoly linear_tt(u64 p, int r, int n, int i, int j)   // t_i - t_j, 0-based
{
    return sub(MPoly::t_var(p, r, n, i), MPoly::t_var(p, r, n, j));
}

MPoly linear_tz(u64 p, int r, int n, int i, int s)   // t_i - z_s, 0-based
{
    return sub(MPoly::t_var(p, r, n, i), MPoly::z_var(p, r, n, s));
}

} // namespace

MPoly master_polynomial(const PrimePair& pair, const ModelParams& prm, const Limits& lim)
{
    const u64 p = pair.p;
    const int r = prm.r, n = prm.n;
    MPoly acc = MPoly::constant(p, r, n, 1);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            for (u64 e = 0; e < pair.c; ++e)
                acc = guarded_mul(acc, linear_tt(p, r, n, i, j), lim, "master_polynomial");
    for (int i = 0; i < r; ++i)
        for (int s = 0; s < n; ++s)
            for (u64 e = 0; e < pair.M; ++e)
                acc = guarded_mul(acc, linear_tz(p, r, n, i, s), lim, "master_polynomial");
    return acc;
}

MPoly phi_times_weight(const PrimePair& pair, const ModelParams& prm,
                       const SubsetIndex& J, const Limits& lim)
{
    const u64 p = pair.p;
    const int r = prm.r, n = prm.n;
    if (!valid_subset(J, n, r)) throw std::invalid_argument("phi_times_weight: bad subset");

    MPoly cross = MPoly::constant(p, r, n, 1);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            for (u64 e = 0; e < pair.c; ++e)
                cross = guarded_mul(cross, linear_tt(p, r, n, i, j), lim, "phi_times_weight");

    MPoly total(p, r, n);
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        // t-block u pairs with z_{J[perm[u]]}: that factor loses one power
        MPoly v = cross;
        for (int u = 0; u < r; ++u) {
            for (int s = 0; s < n; ++s) {
                u64 e = pair.M - (J.elems[perm[u]] == s + 1 ? 1 : 0);
                for (u64 x = 0; x < e; ++x)
                    v = guarded_mul(v, linear_tz(p, r, n, u, s), lim, "phi_times_weight");
            }
        }
        total = add(total, v);
        if (total.term_count() > lim.max_terms)
            throw SizeGuardError(total.term_count(), lim.max_terms, "phi_times_weight");
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

// --------------------------------------------------------- window families

namespace detail {

const PackedPoly* WindowFamily::at(int e) const
{
    int idx = e - e_lo;
    if (idx < 0 || idx >= (int)w.size()) return nullptr;
    return w[idx].empty() ? nullptr : &w[idx];
}

u64 count_support(std::span<const int> caps, int degree)
{
    if (degree < 0) return 0;
    std::vector<u64> dp(degree + 1, 0);
    dp[0] = 1;
    const u64 huge = u64(1) << 62;
    for (int cap : caps) {
        std::vector<u64> nd(degree + 1, 0);
        for (int d = 0; d <= degree; ++d) {
            if (!dp[d]) continue;
            for (int x = 0; x <= cap && d + x <= degree; ++x) {
                nd[d + x] = std::min(huge, nd[d + x] + dp[d]);
            }
        }
        dp = std::move(nd);
    }
    return dp[degree];
}

namespace {

struct Slices {
    std::vector<std::vector<u64>> keys;
    std::vector<std::vector<u32>> coefs;
};

// out := sum over parts of scalar * shift(keys), all ascending
void merge_shifted(std::vector<u64>& ok, std::vector<u32>& oc,
                   std::span<const std::tuple<const std::vector<u64>*, const std::vector<u32>*, u64, u64>> parts,
                   u64 p)
{
    struct Cur { const std::vector<u64>* k; const std::vector<u32>* c; u64 sh, sc; std::size_t i; };
    std::vector<Cur> cur;
    std::size_t total = 0;
    for (auto& [k, c, sh, sc] : parts) {
        if (sc % p && !k->empty()) {
            cur.push_back({k, c, sh, sc % p, 0});
            total += k->size();
        }
    }
    ok.clear(); oc.clear();
    ok.reserve(total); oc.reserve(total);
    while (true) {
        u64 best = ~u64(0);
        bool any = false;
        for (auto& q : cur) {
            if (q.i < q.k->size()) {
                u64 key = (*q.k)[q.i] + q.sh;
                if (!any || key < best) { best = key; any = true; }
            }
        }
        if (!any) break;
        u64 acc = 0;
        for (auto& q : cur) {
            while (q.i < q.k->size() && (*q.k)[q.i] + q.sh == best) {
                acc = (acc + (u64)(*q.c)[q.i] * q.sc) % p;
                ++q.i;
            }
        }
        if (acc) { ok.push_back(best); oc.push_back((u32)acc); }
    }
}

} // namespace

WindowFamily t_block_windows(std::span<const int> mu, int e_lo, int e_hi,
                             u64 p, const KeyLayout& layout, const Limits& lim)
{
    const int n = (int)mu.size();
    if (layout.nvars != n) throw std::invalid_argument("t_block_windows: layout arity mismatch");
    WindowFamily fam;
    fam.total_degree = std::accumulate(mu.begin(), mu.end(), 0);
    fam.e_lo = e_lo;
    if (e_hi < e_lo) return fam;
    fam.w.assign(e_hi - e_lo + 1, PackedPoly::zero(p, layout));
    const int zcap = fam.total_degree - std::max(e_lo, 0);
    if (zcap < 0) return fam;   // every requested coefficient is zero

    Slices cur;
    cur.keys.assign(zcap + 1, {});
    cur.coefs.assign(zcap + 1, {});
    cur.keys[0].push_back(0);
    cur.coefs[0].push_back(1);

    std::vector<u64> tk;
    std::vector<u32> tc;
    for (int s = 0; s < n; ++s) {
        const int m = mu[s];
        if (m == 0) continue;
        // multiply by (t - z_s)^m: slice d gains sum_x C(m,x)(-1)^x z_s^x * old[d-x]
        std::vector<u64> binom(m + 1);
        for (int x = 0; x <= m; ++x) {
            u64 b = binom_mod_p(m, x, p);
            binom[x] = (x % 2 == 0) ? b : (p - b) % p;
        }
        Slices next;
        next.keys.assign(zcap + 1, {});
        next.coefs.assign(zcap + 1, {});
        u64 live = 0;
        for (int d = zcap; d >= 0; --d) {
            std::vector<std::tuple<const std::vector<u64>*, const std::vector<u32>*, u64, u64>> parts;
            for (int x = 0; x <= std::min(m, d); ++x) {
                if (cur.keys[d - x].empty() || binom[x] == 0) continue;
                parts.emplace_back(&cur.keys[d - x], &cur.coefs[d - x],
                                   (u64)x << layout.shift(s), binom[x]);
            }
            if (parts.empty()) continue;
            merge_shifted(tk, tc, parts, p);
            next.keys[d] = tk;
            next.coefs[d] = tc;
            live += tk.size();
        }
        if (live > 4 * lim.max_terms)
            throw SizeGuardError(live, lim.max_terms, "t_block_windows");
        cur = std::move(next);
    }
    for (int e = std::max(e_lo, 0); e <= std::min(e_hi, fam.total_degree); ++e) {
        int d = fam.total_degree - e;
        fam.w[e - e_lo].keys = std::move(cur.keys[d]);
        fam.w[e - e_lo].coefs = std::move(cur.coefs[d]);
    }
    return fam;
}

KeyLayout solution_layout(const PrimePair& pair, const ModelParams& prm)
{
    std::vector<int> caps(prm.n, prm.r * (int)pair.M);
    return KeyLayout::for_caps(caps);
}

// ------------------------------------------------ t-coefficient extraction

PackedPoly extract_t_coefficient(const PrimePair& pair, const ModelParams& prm,
                                 const SubsetIndex& J, std::span<const int> targets,
                                 const KeyLayout& layout, const Limits& lim)
{
    const u64 p = pair.p;
    const int r = prm.r, n = prm.n;
    const int c = (int)pair.c, M = (int)pair.M;
    if (!valid_subset(J, n, r)) throw std::invalid_argument("extract_t_coefficient: bad subset");
    if ((int)targets.size() != r) throw std::invalid_argument("extract_t_coefficient: bad target count");

    PackedPoly out = PackedPoly::zero(p, layout);

    // homogeneity: the output degree is forced
    const int block_deg = n * M - 1;
    int out_deg = r * block_deg + c * (r * (r - 1) / 2);
    for (int t : targets) out_deg -= t;
    if (out_deg < 0) return out;
    {
        std::vector<int> caps(n, r * M);
        for (int i = 0; i < r; ++i) caps[J.elems[i] - 1] -= 1;
        u64 bound = count_support(caps, out_deg);
        if (bound > lim.max_terms)
            throw SizeGuardError(bound, lim.max_terms, "extract_t_coefficient");
    }

    // window families keyed by (decremented z index, window position)
    const int spread = c * (r - 1);
    std::map<std::pair<int, int>, WindowFamily> fams;
    auto family = [&](int dec, int target) -> WindowFamily& {
        auto key = std::make_pair(dec, target);
        auto it = fams.find(key);
        if (it != fams.end()) return it->second;
        std::vector<int> mu(n, M);
        mu[dec - 1] -= 1;
        auto fam = t_block_windows(mu, target - spread, target, p, layout, lim);
        return fams.emplace(key, std::move(fam)).first->second;
    };

    // permutations sigma: block u is paired with z_{J[perm[u]]}
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);

    const int npairs = r * (r - 1) / 2;
    std::vector<std::pair<int, int>> pairs_uv;
    for (int u = 0; u < r; ++u)
        for (int v = u + 1; v < r; ++v)
            pairs_uv.emplace_back(u, v);

    std::vector<ConvTask> tasks;                       // r == 2 fast path
    std::vector<PackedPoly> chain_results;             // r >= 3 path
    std::vector<int> split(npairs, 0);

    do {
        // enumerate exponent splits of the cross factors
        std::fill(split.begin(), split.end(), 0);
        while (true) {
            u64 gamma = 1;
            std::vector<int> e(targets.begin(), targets.end());
            for (int k = 0; k < npairs; ++k) {
                auto [u, v] = pairs_uv[k];
                int x = split[k];                      // exponent of -t_v
                u64 b = binom_mod_p(c, x, p);
                gamma = gamma * (x % 2 ? (p - b) % p : b) % p;
                e[u] -= c - x;
                e[v] -= x;
            }
            if (gamma != 0) {
                bool feasible = true;
                std::vector<const PackedPoly*> ws(r);
                for (int u = 0; u < r && feasible; ++u) {
                    auto& fam = family(J.elems[perm[u]], targets[u]);
                    ws[u] = e[u] >= 0 ? fam.at(e[u]) : nullptr;
                    if (!ws[u]) feasible = false;
                }
                if (feasible) {
                    if (r == 1) {
                        std::pair<const PackedPoly*, u64> part{ws[0], gamma};
                        out = out.empty() ? ws[0]->scaled(gamma)
                                          : merge_scaled(std::vector{std::make_pair((const PackedPoly*)&out, (u64)1), part});
                    } else if (r == 2) {
                        tasks.push_back({ws[0], ws[1], gamma});
                    } else {
                        PackedPoly curp = convolve_tasks(std::vector<ConvTask>{{ws[0], ws[1], gamma}},
                                                         layout, p, lim.effective_jobs(), lim.max_terms);
                        for (int u = 2; u < r; ++u)
                            curp = convolve_tasks(std::vector<ConvTask>{{&curp, ws[u], 1}},
                                                  layout, p, lim.effective_jobs(), lim.max_terms);
                        chain_results.push_back(std::move(curp));
                    }
                }
            }
            int k = 0;
            while (k < npairs && split[k] == c) split[k++] = 0;
            if (k == npairs) break;
            ++split[k];
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (r == 2 && !tasks.empty())
        out = convolve_tasks(tasks, layout, p, lim.effective_jobs(), lim.max_terms);
    if (r >= 3 && !chain_results.empty()) {
        std::vector<std::pair<const PackedPoly*, u64>> parts;
        for (auto& cr : chain_results) parts.emplace_back(&cr, 1);
        out = merge_scaled(parts);
    }
    if (out.size() > lim.max_terms)
        throw SizeGuardError(out.size(), lim.max_terms, "extract_t_coefficient");
    return out;
}

} // namespace detail

// ------------------------------------------------------------ construction

namespace {

bool has_duplicate(const SolutionIndex& L)
{
    for (std::size_t i = 0; i < L.l.size(); ++i)
        for (std::size_t j = i + 1; j < L.l.size(); ++j)
            if (L.l[i] == L.l[j]) return true;
    return false;
}

void validate_solution_args(const ModelParams& prm, const SolutionIndex& L)
{
    if ((int)L.l.size() != prm.r)
        throw std::invalid_argument("solution index must have r entries");
    for (int v : L.l)
        if (v < 1) throw std::invalid_argument("solution index entries must be positive");
}

std::vector<int> p_integral_targets(const PrimePair& pair, const SolutionIndex& L)
{
    std::vector<int> t(L.l.size());
    for (std::size_t i = 0; i < L.l.size(); ++i) t[i] = L.l[i] * (int)pair.p - 1;
    return t;
}

} // namespace

int expected_solution_degree(const PrimePair& pair, const ModelParams& prm,
                             const SolutionIndex& L)
{
    validate_solution_args(prm, L);
    const int r = prm.r, n = prm.n, M = (int)pair.M, c = (int)pair.c;
    int deg = r * (n * M - 1) + c * (r * (r - 1) / 2);
    for (int li : L.l) deg -= li * (int)pair.p - 1;
    return deg;
}

ZPoly construct_component(const PrimePair& pair, const ModelParams& prm,
                          const SolutionIndex& L, const SubsetIndex& J,
                          const Limits& lim)
{
    validate_solution_args(prm, L);
    if (pair.c % 2 == 1 && has_duplicate(L)) return ZPoly(pair.p, 0, prm.n);
    auto layout = detail::solution_layout(pair, prm);
    auto targets = p_integral_targets(pair, L);
    return detail::extract_t_coefficient(pair, prm, J, targets, layout, lim).to_mpoly();
}

VectorPoly construct_solution(const PrimePair& pair, const ModelParams& prm,
                              const SolutionIndex& L, const Limits& lim)
{
    validate_solution_args(prm, L);
    VectorPoly v;
    v.p = pair.p;
    v.n = prm.n;
    v.r = prm.r;
    if (pair.c % 2 == 1 && has_duplicate(L)) return v;

    auto layout = detail::solution_layout(pair, prm);
    auto targets = p_integral_targets(pair, L);
    u64 total = 0;
    for (auto& J : all_subsets(prm.n, prm.r)) {
        auto comp = detail::extract_t_coefficient(pair, prm, J, targets, layout, lim);
        total += comp.size();
        if (total > lim.max_terms)
            throw SizeGuardError(total, lim.max_terms, "construct_solution");
        if (!comp.empty()) v.components.emplace(J, comp.to_mpoly());
    }
    return v;
}

// ------------------------------------------------------------------ checks

namespace {

struct PackedVector {
    u64 p = 0;
    int n = 0, r = 0;
    KeyLayout layout;
    std::map<SubsetIndex, PackedPoly> comps;

    const PackedPoly* find(const SubsetIndex& J) const
    {
        auto it = comps.find(J);
        return it == comps.end() ? nullptr : &it->second;
    }
};

PackedVector pack_vector(const VectorPoly& v)
{
    PackedVector pv;
    pv.p = v.p;
    pv.n = v.n;
    pv.r = v.r;
    std::vector<int> caps(v.n, 1);
    for (auto& [J, f] : v.components)
        for (int s = 0; s < v.n; ++s)
            caps[s] = std::max(caps[s], f.degree_in(s));
    pv.layout = KeyLayout::for_caps(caps);
    for (auto& [J, f] : v.components)
        pv.comps.emplace(J, PackedPoly::from_mpoly(f, pv.layout));
    return pv;
}

// Exactness of the KZ system for one (m, K) pair, everything already in the
// layout that has z_m rotated to the most significant field. `vK` is the
// rotated component at K (empty when absent); `fetch_swap` returns rotated
// components whose pointers only need to live until the next fetch.
template <class Fetch>
bool kz_identity_at(u64 p, u64 qres, int n, int m, const PackedPoly& vK,
                    Fetch&& fetch_swap, const SubsetIndex& K,
                    const std::vector<int>& rotindex)
{
    std::vector<PackedPoly> quotients;
    for (int j = 1; j <= n; ++j) {
        if (j == m) continue;
        if (K.contains(m) == K.contains(j)) continue;
        SubsetIndex Ksw = K.swapped(m, j);
        const PackedPoly* vsw = fetch_swap(Ksw);
        PackedPoly R;
        if (vsw && !vK.empty()) {
            std::vector<std::pair<const PackedPoly*, u64>> parts{{vsw, 1}, {&vK, p - 1}};
            R = merge_scaled(parts);
        } else if (vsw) {
            R = *vsw;
        } else if (!vK.empty()) {
            R = vK.scaled(p - 1);
        } else {
            continue;
        }
        if (R.empty()) continue;
        auto q = divide_linear_msb(R, rotindex[j - 1]);
        if (!q) return false;
        quotients.push_back(std::move(*q));
    }
    PackedPoly derivative_part = vK.derivative(0).scaled(qres);
    std::vector<std::pair<const PackedPoly*, u64>> parts;
    for (auto& q : quotients) parts.emplace_back(&q, 1);
    if (!derivative_part.empty()) parts.emplace_back(&derivative_part, p - 1);
    if (parts.empty()) return true;
    return is_zero_sum(parts);
}

// layout with room for the digit carried into z_j during the division
KeyLayout rotated_layout(const KeyLayout& base)
{
    KeyLayout l = base;
    l.bits = base.bits + 1;   // digits can grow to cap_j + cap_m
    if (l.nvars * l.bits > 63)
        throw std::invalid_argument("check_kz: rotated key layout does not fit 64 bits");
    return l;
}

std::vector<int> rotation_perm(int n, int m)   // variable v -> rotated position
{
    std::vector<int> perm(n);
    perm[m - 1] = 0;
    int pos = 1;
    for (int v = 0; v < n; ++v)
        if (v != m - 1) perm[v] = pos++;
    return perm;
}

} // namespace

bool check_singular(const VectorPoly& v)
{
    if (v.is_zero()) return true;
    PackedVector pv = pack_vector(v);
    for (auto& K : all_subsets(v.n, v.r - 1)) {
        std::vector<std::pair<const PackedPoly*, u64>> parts;
        for (int j = 1; j <= v.n; ++j) {
            if (K.contains(j)) continue;
            SubsetIndex Kj = K;
            Kj.elems.insert(std::upper_bound(Kj.elems.begin(), Kj.elems.end(), j), j);
            if (const PackedPoly* f = pv.find(Kj)) parts.emplace_back(f, 1);
        }
        if (!parts.empty() && !is_zero_sum(parts)) return false;
    }
    return true;
}

VectorPoly casimir_minus_half(int m, int j, const VectorPoly& v)
{
    if (m < 1 || m > v.n || j < 1 || j > v.n || m == j)
        throw std::invalid_argument("casimir_minus_half: indices must be distinct and in 1..n");
    VectorPoly out;
    out.p = v.p;
    out.n = v.n;
    out.r = v.r;
    std::map<SubsetIndex, MPoly> acc;
    auto add_to = [&](const SubsetIndex& K, const MPoly& f) {
        auto it = acc.find(K);
        if (it == acc.end()) acc.emplace(K, f);
        else it->second = add(it->second, f);
    };
    for (auto& [J, f] : v.components) {
        if (J.contains(m) == J.contains(j)) continue;   // equal marks: killed
        add_to(J, -f);
        add_to(J.swapped(m, j), f);
    }
    for (auto& [K, f] : acc) out.set(K, std::move(f));
    return out;
}

bool check_kz(const VectorPoly& v, const PrimePair& pair, const Limits& lim)
{
    (void)lim;
    if (v.p != pair.p) throw std::invalid_argument("check_kz: modulus mismatch");
    if (v.is_zero()) return true;
    const u64 p = pair.p;
    const u64 qres = pair.q % p;
    PackedVector pv = pack_vector(v);
    KeyLayout rot = rotated_layout(pv.layout);

    for (int m = 1; m <= v.n; ++m) {
        auto perm = rotation_perm(v.n, m);
        std::map<SubsetIndex, PackedPoly> rotated;
        for (auto& [J, f] : pv.comps)
            rotated.emplace(J, f.reencoded(rot).relabeled(perm));
        const PackedPoly empty = PackedPoly::zero(p, rot);
        auto fetch = [&](const SubsetIndex& K) -> const PackedPoly* {
            auto it = rotated.find(K);
            return it == rotated.end() ? nullptr : &it->second;
        };
        for (auto& K : all_subsets(v.n, v.r)) {
            const PackedPoly* vK = fetch(K);
            if (!kz_identity_at(p, qres, v.n, m, vK ? *vK : empty, fetch, K, perm))
                return false;
        }
    }
    return true;
}

bool shifted_master_congruence(const PrimePair& pair, const ModelParams& prm,
                               int d0, std::span<const int> d_vec, const Limits& lim)
{
    const u64 p = pair.p;
    const int r = prm.r, n = prm.n;
    if (d0 < 0) throw std::invalid_argument("shifted_master_congruence: d0 must be nonnegative");
    if ((int)d_vec.size() != n) throw std::invalid_argument("shifted_master_congruence: d_vec must have n entries");
    for (int d : d_vec)
        if (d < 0) throw std::invalid_argument("shifted_master_congruence: shifts must be nonnegative");

    // left side: shifted exponents
    MPoly lhs = MPoly::constant(p, r, n, 1);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            for (u64 e = 0; e < pair.c + (u64)d0 * p; ++e)
                lhs = guarded_mul(lhs, linear_tt(p, r, n, i, j), lim, "shifted_master_congruence");
    for (int i = 0; i < r; ++i)
        for (int s = 0; s < n; ++s)
            for (u64 e = 0; e < pair.M + (u64)d_vec[s] * p; ++e)
                lhs = guarded_mul(lhs, linear_tz(p, r, n, i, s), lim, "shifted_master_congruence");

    // right side: Phi_p times Frobenius factors
    MPoly rhs = master_polynomial(pair, prm, lim);
    auto pth = [&](const MPoly& var) { return var.pow(p); };
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            for (int e = 0; e < d0; ++e)
                rhs = guarded_mul(rhs, sub(pth(MPoly::t_var(p, r, n, i)), pth(MPoly::t_var(p, r, n, j))),
                                  lim, "shifted_master_congruence");
    for (int i = 0; i < r; ++i)
        for (int s = 0; s < n; ++s)
            for (int e = 0; e < d_vec[s]; ++e)
                rhs = guarded_mul(rhs, sub(pth(MPoly::t_var(p, r, n, i)), pth(MPoly::z_var(p, r, n, s))),
                                  lim, "shifted_master_congruence");
    return lhs == rhs;
}

u64 singular_system_rank(int n, int r, u64 p)
{
    if (r < 1 || n < r) throw std::invalid_argument("singular_system_rank: need 1 <= r <= n");
    auto rows = all_subsets(n, r - 1);
    auto cols = all_subsets(n, r);
    std::map<SubsetIndex, std::size_t> col_of;
    for (std::size_t i = 0; i < cols.size(); ++i) col_of.emplace(cols[i], i);

    std::vector<std::vector<u64>> mat(rows.size(), std::vector<u64>(cols.size(), 0));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 1; j <= n; ++j) {
            if (rows[i].contains(j)) continue;
            SubsetIndex Kj = rows[i];
            Kj.elems.insert(std::upper_bound(Kj.elems.begin(), Kj.elems.end(), j), j);
            mat[i][col_of.at(Kj)] = 1;
        }
    }
    // Gaussian elimination over F_p
    u64 rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols.size() && row < rows.size(); ++col) {
        std::size_t piv = row;
        while (piv < rows.size() && mat[piv][col] % p == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(mat[piv], mat[row]);
        u64 inv = mod_inv(mat[row][col] % p, p);
        for (auto& x : mat[row]) x = x % p * inv % p;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == row) continue;
            u64 f = mat[i][col] % p;
            if (!f) continue;
            for (std::size_t cix = col; cix < cols.size(); ++cix)
                mat[i][cix] = (mat[i][cix] + (p - f) * mat[row][cix]) % p;
        }
        ++row;
        ++rank;
    }
    return rank;
}

u64 singular_dimension(int n, int r, u64 p)
{
    return binom_u64(n, r) - singular_system_rank(n, r, p);
}

// ----------------------------------------------------------- SolutionStore

SolutionStore::SolutionStore(const PrimePair& pair, const ModelParams& prm,
                             const SolutionIndex& L, const Limits& lim)
    : pair_(pair), prm_(prm), L_(L), lim_(lim)
{
    validate_solution_args(prm, L);
    layout_ = detail::solution_layout(pair, prm);
    std::vector<int> base(prm.r);
    std::iota(base.begin(), base.end(), 1);
    rep_index_ = SubsetIndex(base);
    if (pair.c % 2 == 1 && has_duplicate(L)) {
        rep_ = std::make_shared<const PackedPoly>(PackedPoly::zero(pair.p, layout_));
    } else {
        auto targets = p_integral_targets(pair, L);
        rep_ = std::make_shared<const PackedPoly>(
            detail::extract_t_coefficient(pair, prm, rep_index_, targets, layout_, lim));
    }
}

int SolutionStore::degree() const
{
    if (rep_->empty()) return -1;
    int d = 0;
    for (int v = 0; v < layout_.nvars; ++v) d += (int)layout_.digit(rep_->keys[0], v);
    return d;
}

std::vector<int> SolutionStore::relabel_for(const SubsetIndex& J) const
{
    const int n = prm_.n, r = prm_.r;
    std::vector<int> perm(n, -1);
    for (int i = 0; i < r; ++i) perm[i] = J.elems[i] - 1;
    std::vector<bool> used(n, false);
    for (int e : J.elems) used[e - 1] = true;
    int pos = r;
    for (int v = 0; v < n; ++v)
        if (!used[v]) perm[pos++] = v;
    // perm maps rep variable index -> target variable index
    std::vector<int> out(n);
    for (int v = 0; v < n; ++v) out[v] = perm[v];
    return out;
}

std::shared_ptr<const PackedPoly> SolutionStore::component(const SubsetIndex& J)
{
    if (!valid_subset(J, prm_.n, prm_.r))
        throw std::invalid_argument("SolutionStore::component: bad subset");
    if (J == rep_index_) return rep_;
    if (auto it = cache_.find(J); it != cache_.end()) return it->second;
    auto comp = std::make_shared<const PackedPoly>(rep_->relabeled(relabel_for(J)));
    cache_.emplace(J, comp);
    cache_order_.push_back(J);
    while (cache_.size() > cache_budget_) {
        cache_.erase(cache_order_.front());
        cache_order_.pop_front();
    }
    return comp;
}

PackedPoly SolutionStore::component_direct(const SubsetIndex& J) const
{
    auto targets = p_integral_targets(pair_, L_);
    if (pair_.c % 2 == 1 && has_duplicate(L_)) return PackedPoly::zero(pair_.p, layout_);
    return detail::extract_t_coefficient(pair_, prm_, J, targets, layout_, lim_);
}

void SolutionStore::set_cache_budget(std::size_t max_components)
{
    cache_budget_ = std::max<std::size_t>(1, max_components);
}

VectorPoly SolutionStore::materialize()
{
    VectorPoly v;
    v.p = pair_.p;
    v.n = prm_.n;
    v.r = prm_.r;
    u64 total = 0;
    for (auto& J : all_subsets(prm_.n, prm_.r)) {
        auto comp = component(J);
        total += comp->size();
        if (total > lim_.max_terms)
            throw SizeGuardError(total, lim_.max_terms, "SolutionStore::materialize");
        if (!comp->empty()) v.components.emplace(J, comp->to_mpoly());
    }
    return v;
}

namespace {

constexpr u64 orbit_auto_threshold = 2'000'000;

} // namespace

bool check_singular(SolutionStore& s, CheckMode mode)
{
    if (s.is_zero()) return true;
    const int n = s.params().n, r = s.params().r;
    if (mode == CheckMode::Auto)
        mode = s.component_terms() > orbit_auto_threshold ? CheckMode::OrbitReps : CheckMode::Full;

    std::vector<SubsetIndex> Ks;
    if (mode == CheckMode::OrbitReps) {
        std::vector<int> base(r - 1);
        std::iota(base.begin(), base.end(), 1);
        Ks.push_back(SubsetIndex(base));
    } else {
        Ks = all_subsets(n, r - 1);
    }
    for (auto& K : Ks) {
        std::vector<std::shared_ptr<const PackedPoly>> pins;
        std::vector<std::pair<const PackedPoly*, u64>> parts;
        for (int j = 1; j <= n; ++j) {
            if (K.contains(j)) continue;
            SubsetIndex Kj = K;
            Kj.elems.insert(std::upper_bound(Kj.elems.begin(), Kj.elems.end(), j), j);
            auto comp = s.component(Kj);
            if (!comp->empty()) {
                pins.push_back(comp);
                parts.emplace_back(pins.back().get(), 1);
            }
        }
        if (!parts.empty() && !is_zero_sum(parts)) return false;
    }
    return true;
}

bool check_kz(SolutionStore& s, CheckMode mode)
{
    if (s.is_zero()) return true;
    const int n = s.params().n, r = s.params().r;
    const u64 p = s.pair().p;
    const u64 qres = s.pair().q % p;
    if (mode == CheckMode::Auto)
        mode = s.component_terms() > orbit_auto_threshold ? CheckMode::OrbitReps : CheckMode::Full;

    KeyLayout rot = rotated_layout(s.layout());

    std::vector<int> ms;
    std::vector<SubsetIndex> Ks;
    if (mode == CheckMode::OrbitReps) {
        ms = {1};
        std::vector<int> k1(r), k2(r);
        std::iota(k1.begin(), k1.end(), 1);       // contains m = 1
        std::iota(k2.begin(), k2.end(), 2);       // avoids m = 1
        Ks.push_back(SubsetIndex(k1));
        Ks.push_back(SubsetIndex(k2));
    } else {
        for (int m = 1; m <= n; ++m) ms.push_back(m);
        Ks = all_subsets(n, r);
    }

    const bool big = s.component_terms() > orbit_auto_threshold;
    for (int m : ms) {
        auto perm = rotation_perm(n, m);
        std::map<SubsetIndex, PackedPoly> rotated;
        std::vector<SubsetIndex> order;
        auto fetch = [&](const SubsetIndex& K) -> const PackedPoly* {
            auto it = rotated.find(K);
            if (it == rotated.end()) {
                auto sp = s.component(K);
                if (sp->empty()) return nullptr;
                it = rotated.emplace(K, sp->reencoded(rot).relabeled(perm)).first;
                order.push_back(K);
                if (big && rotated.size() > 4) {
                    // transient working set: the returned pointer only has to
                    // survive until the next fetch
                    auto victim = order.front();
                    order.erase(order.begin());
                    if (!(victim == K)) rotated.erase(victim);
                    else order.push_back(victim);
                }
            }
            return it->second.empty() ? nullptr : &it->second;
        };
        for (auto& K : Ks) {
            PackedPoly vK = PackedPoly::zero(p, rot);
            {
                auto sp = s.component(K);
                if (!sp->empty()) vK = sp->reencoded(rot).relabeled(perm);
            }
            if (!kz_identity_at(p, qres, n, m, vK, fetch, K, perm)) return false;
        }
    }
    return true;
}

} // namespace kzp
