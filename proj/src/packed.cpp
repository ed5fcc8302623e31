#include "kzp/packed.hpp"
#include "kzp/guard.hpp"

#include <algorithm>
#include <thread>

namespace kzp {

int Limits::effective_jobs() const
{
    if (jobs > 0) return jobs;
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? (int)hc : 1;
}

u64 KeyLayout::encode(std::span<const Exp> e) const
{
    u64 key = 0;
    for (int v = 0; v < nvars; ++v) key |= (u64)e[v] << shift(v);
    return key;
}

void KeyLayout::decode(u64 key, std::span<Exp> out) const
{
    for (int v = 0; v < nvars; ++v) out[v] = (Exp)((key >> shift(v)) & digit_mask());
}

KeyLayout KeyLayout::for_caps(std::span<const int> caps)
{
    int bits = 1;
    for (int c : caps) {
        int b = 1;
        while ((1 << b) <= c) ++b;
        bits = std::max(bits, b);
    }
    KeyLayout l{(int)caps.size(), bits};
    if (l.nvars * l.bits > 63) throw std::invalid_argument("KeyLayout: caps do not fit 64-bit keys");
    return l;
}

PackedPoly PackedPoly::from_mpoly(const MPoly& a, KeyLayout l)
{
    if (a.t_arity() != 0) throw std::invalid_argument("PackedPoly: t variables present");
    if (a.z_arity() != l.nvars) throw std::invalid_argument("PackedPoly: arity mismatch");
    PackedPoly r{a.modulus(), l, {}, {}};
    r.keys.reserve(a.term_count());
    r.coefs.reserve(a.term_count());
    // MPoly is lex-descending, packed storage is key-ascending
    for (std::size_t i = a.term_count(); i-- > 0;) {
        r.keys.push_back(l.encode(a.exps(i)));
        r.coefs.push_back((u32)a.coef(i));
    }
    return r;
}

MPoly PackedPoly::to_mpoly() const
{
    std::vector<Exp> exps(size() * layout.nvars);
    std::vector<u64> coefs(size());
    for (std::size_t i = 0; i < size(); ++i) {
        std::size_t o = size() - 1 - i;
        layout.decode(keys[i], {exps.data() + o * layout.nvars, (std::size_t)layout.nvars});
        coefs[o] = this->coefs[i];
    }
    return MPoly::from_terms(p, 0, layout.nvars, std::move(exps), std::move(coefs));
}

PackedPoly PackedPoly::reencoded(KeyLayout wider) const
{
    if (wider.nvars != layout.nvars) throw std::invalid_argument("reencoded: arity mismatch");
    if (wider == layout) return *this;
    PackedPoly r{p, wider, {}, {}};
    r.keys.resize(size());
    r.coefs = coefs;
    for (std::size_t i = 0; i < size(); ++i) {
        u64 k = keys[i], nk = 0;
        for (int v = 0; v < layout.nvars; ++v)
            nk |= ((k >> layout.shift(v)) & layout.digit_mask()) << wider.shift(v);
        r.keys[i] = nk;
    }
    // uniform widening preserves the order
    return r;
}

PackedPoly PackedPoly::relabeled(std::span<const int> perm) const
{
    if ((int)perm.size() != layout.nvars) throw std::invalid_argument("relabeled: bad permutation");
    PackedPoly r{p, layout, std::vector<u64>(size()), coefs};
    for (std::size_t i = 0; i < size(); ++i) {
        u64 k = keys[i], nk = 0;
        for (int v = 0; v < layout.nvars; ++v)
            nk |= ((k >> layout.shift(v)) & layout.digit_mask()) << layout.shift(perm[v]);
        r.keys[i] = nk;
    }
    sort_terms(r.keys, r.coefs);
    return r;
}

PackedPoly PackedPoly::rotated_to_msb(int v) const
{
    std::vector<int> perm(layout.nvars);
    perm[v] = 0;
    int pos = 1;
    for (int u = 0; u < layout.nvars; ++u)
        if (u != v) perm[u] = pos++;
    return relabeled(perm);
}

PackedPoly PackedPoly::derivative(int v) const
{
    PackedPoly r{p, layout, {}, {}};
    r.keys.reserve(size());
    r.coefs.reserve(size());
    const u64 one = u64(1) << layout.shift(v);
    for (std::size_t i = 0; i < size(); ++i) {
        u64 e = layout.digit(keys[i], v);
        if (!e) continue;
        u64 c = (u64)coefs[i] * (e % p) % p;
        if (!c) continue;
        r.keys.push_back(keys[i] - one);
        r.coefs.push_back((u32)c);
    }
    return r;   // subtracting a shared constant from kept keys preserves order
}

PackedPoly PackedPoly::scaled(u64 s) const
{
    s %= p;
    PackedPoly r{p, layout, {}, {}};
    if (!s) return r;
    r.keys.reserve(size());
    r.coefs.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        u64 c = (u64)coefs[i] * s % p;
        if (!c) continue;
        r.keys.push_back(keys[i]);
        r.coefs.push_back((u32)c);
    }
    return r;
}

u64 PackedPoly::coef_at(u64 key) const
{
    auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key) return 0;
    return coefs[it - keys.begin()];
}

void sort_terms(std::vector<u64>& keys, std::vector<u32>& coefs)
{
    const std::size_t n = keys.size();
    if (n < 2) return;
    if (n < (1u << 14)) {
        // small: index sort
        std::vector<u32> idx(n);
        for (u32 i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](u32 a, u32 b) { return keys[a] < keys[b]; });
        std::vector<u64> nk(n);
        std::vector<u32> nc(n);
        for (std::size_t i = 0; i < n; ++i) { nk[i] = keys[idx[i]]; nc[i] = coefs[idx[i]]; }
        keys = std::move(nk);
        coefs = std::move(nc);
        return;
    }
    // LSD radix, 8 bits per pass, skipping constant bytes
    std::vector<u64> kbuf(n);
    std::vector<u32> cbuf(n);
    u64 all_or = 0, all_and = ~u64(0);
    for (u64 k : keys) { all_or |= k; all_and &= k; }
    for (int pass = 0; pass < 8; ++pass) {
        int sh = pass * 8;
        if (((all_or >> sh) & 0xff) == ((all_and >> sh) & 0xff)) continue;
        std::size_t count[257] = {0};
        for (std::size_t i = 0; i < n; ++i) ++count[((keys[i] >> sh) & 0xff) + 1];
        for (int b = 0; b < 256; ++b) count[b + 1] += count[b];
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t o = count[(keys[i] >> sh) & 0xff]++;
            kbuf[o] = keys[i];
            cbuf[o] = coefs[i];
        }
        keys.swap(kbuf);
        coefs.swap(cbuf);
    }
}

void sort_and_combine(std::vector<u64>& keys, std::vector<u32>& coefs, u64 p)
{
    sort_terms(keys, coefs);
    std::size_t out = 0;
    std::size_t i = 0;
    const std::size_t n = keys.size();
    while (i < n) {
        u64 k = keys[i];
        u64 acc = 0;
        while (i < n && keys[i] == k) {
            acc += coefs[i];
            if (acc >= (u64(1) << 62)) acc %= p;
            ++i;
        }
        acc %= p;
        if (acc) {
            keys[out] = k;
            coefs[out] = (u32)acc;
            ++out;
        }
    }
    keys.resize(out);
    coefs.resize(out);
}

namespace {

struct MergeCursor {
    const PackedPoly* poly;
    u64 scalar;
    std::size_t i = 0;
    bool done() const { return i >= poly->size(); }
    u64 key() const { return poly->keys[i]; }
};

template <class Emit>
void merge_walk(std::span<const std::pair<const PackedPoly*, u64>> parts, u64 p, Emit&& emit)
{
    std::vector<MergeCursor> cur;
    cur.reserve(parts.size());
    for (auto& pr : parts) {
        if (pr.second % p && !pr.first->empty())
            cur.push_back({pr.first, pr.second % p, 0});
    }
    while (true) {
        u64 best = ~u64(0);
        bool any = false;
        for (auto& c : cur)
            if (!c.done() && (!any || c.key() < best)) { best = c.key(); any = true; }
        if (!any) break;
        u64 acc = 0;
        for (auto& c : cur) {
            while (!c.done() && c.key() == best) {
                acc = (acc + (u64)c.poly->coefs[c.i] * c.scalar) % p;
                ++c.i;
            }
        }
        if (acc) emit(best, (u32)acc);
    }
}

} // namespace

PackedPoly merge_scaled(std::span<const std::pair<const PackedPoly*, u64>> parts)
{
    if (parts.empty()) throw std::invalid_argument("merge_scaled: no parts");
    const u64 p = parts[0].first->p;
    PackedPoly r{p, parts[0].first->layout, {}, {}};
    for (auto& pr : parts)
        if (pr.first->p != p || !(pr.first->layout == r.layout))
            throw std::invalid_argument("merge_scaled: incompatible parts");
    merge_walk(parts, p, [&](u64 k, u32 c) {
        r.keys.push_back(k);
        r.coefs.push_back(c);
    });
    return r;
}

bool is_zero_sum(std::span<const std::pair<const PackedPoly*, u64>> parts)
{
    if (parts.empty()) return true;
    const u64 p = parts[0].first->p;
    bool zero = true;
    merge_walk(parts, p, [&](u64, u32) { zero = false; });
    return zero;
}

std::optional<PackedPoly> divide_linear_msb(const PackedPoly& a, int j)
{
    if (j <= 0 || j >= a.layout.nvars) throw std::invalid_argument("divide_linear_msb: bad index");
    const u64 p = a.p;
    const int sh0 = a.layout.shift(0);
    const u64 shj = u64(1) << a.layout.shift(j);
    if (a.empty()) return PackedPoly::zero(p, a.layout);

    const u64 dmax = a.layout.digit(a.keys.back(), 0);
    // slices R_e with the msb digit cleared; each stays ascending
    std::vector<std::vector<u64>> rk(dmax + 1);
    std::vector<std::vector<u32>> rc(dmax + 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        u64 e = a.keys[i] >> sh0;
        rk[e].push_back(a.keys[i] - (e << sh0));
        rc[e].push_back(a.coefs[i]);
    }

    auto add_shifted = [&](std::vector<u64>& xk, std::vector<u32>& xc,
                           const std::vector<u64>& yk, const std::vector<u32>& yc) {
        // x := x + (z_j * y), both ascending
        std::vector<u64> ok;
        std::vector<u32> oc;
        ok.reserve(xk.size() + yk.size());
        oc.reserve(xk.size() + yk.size());
        std::size_t i = 0, l = 0;
        while (i < xk.size() || l < yk.size()) {
            u64 ky = l < yk.size() ? yk[l] + shj : ~u64(0);
            if (i < xk.size() && (l >= yk.size() || xk[i] < ky)) {
                ok.push_back(xk[i]);
                oc.push_back(xc[i]);
                ++i;
            } else if (l < yk.size() && (i >= xk.size() || ky < xk[i])) {
                ok.push_back(ky);
                oc.push_back(yc[l]);
                ++l;
            } else {
                u64 s = ((u64)xc[i] + yc[l]) % p;
                if (s) { ok.push_back(xk[i]); oc.push_back((u32)s); }
                ++i; ++l;
            }
        }
        xk = std::move(ok);
        xc = std::move(oc);
    };

    // Q_{dmax-1} = R_dmax; Q_{e-1} = R_e + z_j Q_e; rem = R_0 + z_j Q_0
    std::vector<std::vector<u64>> qk(dmax);
    std::vector<std::vector<u32>> qc(dmax);
    if (dmax >= 1) {
        qk[dmax - 1] = std::move(rk[dmax]);
        qc[dmax - 1] = std::move(rc[dmax]);
        for (u64 e = dmax - 1; e >= 1; --e) {
            qk[e - 1] = std::move(rk[e]);
            qc[e - 1] = std::move(rc[e]);
            add_shifted(qk[e - 1], qc[e - 1], qk[e], qc[e]);
        }
        add_shifted(rk[0], rc[0], qk[0], qc[0]);
    }
    if (!rk[0].empty()) return std::nullopt;   // remainder nonzero

    PackedPoly q{p, a.layout, {}, {}};
    std::size_t total = 0;
    for (auto& v : qk) total += v.size();
    q.keys.reserve(total);
    q.coefs.reserve(total);
    for (u64 e = 0; e < dmax; ++e) {
        for (std::size_t i = 0; i < qk[e].size(); ++i) {
            q.keys.push_back(qk[e][i] + (e << sh0));
            q.coefs.push_back(qc[e][i]);
        }
    }
    return q;
}

// ---------------------------------------------------------------- convolve

namespace {

struct SideGroups {
    std::vector<u32> lo;        // per-term low key
    std::vector<u32> coef;      // per-term coefficient (scalar folded on the a side)
    std::vector<u64> hi;        // per-group high key
    std::vector<u32> begin;     // per-group [begin, end) into lo/coef
    std::vector<u32> end;
};

SideGroups build_groups(const PackedPoly& poly, int lo_bits, u64 fold, u64 p)
{
    SideGroups g;
    const std::size_t n = poly.size();
    g.lo.resize(n);
    g.coef.resize(n);
    const u64 lomask = (u64(1) << lo_bits) - 1;
    for (std::size_t i = 0; i < n; ++i) {
        g.lo[i] = (u32)(poly.keys[i] & lomask);
        g.coef[i] = (u32)((u64)poly.coefs[i] * fold % p);
        u64 hi = poly.keys[i] >> lo_bits;
        if (g.hi.empty() || g.hi.back() != hi) {
            g.hi.push_back(hi);
            g.begin.push_back((u32)i);
            g.end.push_back((u32)i + 1);
        } else {
            g.end.back() = (u32)i + 1;
        }
    }
    return g;
}

struct TilePlan {
    std::vector<u64> jobs;      // hiO:24 | task:8 | ga:16 | gb:16
    int lo_bits;
};

constexpr u64 flat_pair_limit = u64(1) << 22;

} // namespace

PackedPoly convolve_tasks(std::span<const ConvTask> tasks, const KeyLayout& out_layout,
                          u64 p, int jobs, u64 max_terms)
{
    PackedPoly out = PackedPoly::zero(p, out_layout);
    u64 pair_count = 0;
    for (auto& t : tasks) {
        if (!(t.a->layout == out_layout) || !(t.b->layout == out_layout))
            throw std::invalid_argument("convolve_tasks: operands must use the output layout");
        pair_count += (u64)t.a->size() * t.b->size();
    }
    if (pair_count == 0) return out;

    if (pair_count <= flat_pair_limit) {
        std::vector<u64> keys;
        std::vector<u32> coefs;
        keys.reserve(pair_count);
        coefs.reserve(pair_count);
        for (auto& t : tasks) {
            u64 s = t.scalar % p;
            if (!s) continue;
            for (std::size_t i = 0; i < t.a->size(); ++i) {
                u64 ca = (u64)t.a->coefs[i] * s % p;
                if (!ca) continue;
                u64 ka = t.a->keys[i];
                for (std::size_t l = 0; l < t.b->size(); ++l) {
                    u64 c = ca * t.b->coefs[l] % p;
                    if (!c) continue;
                    keys.push_back(ka + t.b->keys[l]);
                    coefs.push_back((u32)c);
                }
            }
        }
        sort_and_combine(keys, coefs, p);
        if (keys.size() > max_terms)
            throw SizeGuardError(keys.size(), max_terms, "convolve_tasks");
        out.keys = std::move(keys);
        out.coefs = std::move(coefs);
        return out;
    }

    // Tiled path: split keys at a digit boundary, accumulate per output tile.
    if (tasks.size() > 255) throw std::invalid_argument("convolve_tasks: too many tasks");
    int lo_digits = std::max(1, 16 / out_layout.bits);
    lo_digits = std::min(lo_digits, out_layout.nvars - 1);
    while (out_layout.bits * (out_layout.nvars - lo_digits) > 24)
        ++lo_digits;   // keep the high part within 24 bits
    const int lo_bits = out_layout.bits * lo_digits;
    if (lo_bits > 26)
        throw std::invalid_argument("convolve_tasks: key layout too wide for the tile buffer");
    const std::size_t lo_space = std::size_t(1) << lo_bits;

    std::vector<SideGroups> ga(tasks.size()), gb(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        ga[t] = build_groups(*tasks[t].a, lo_bits, tasks[t].scalar % p, p);
        gb[t] = build_groups(*tasks[t].b, lo_bits, 1, p);
        if (ga[t].hi.size() > 0xffff || gb[t].hi.size() > 0xffff)
            throw std::invalid_argument("convolve_tasks: too many key groups");
    }

    std::vector<u64> plan;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        for (std::size_t i = 0; i < ga[t].hi.size(); ++i) {
            for (std::size_t l = 0; l < gb[t].hi.size(); ++l) {
                u64 hiO = ga[t].hi[i] + gb[t].hi[l];
                plan.push_back(hiO << 40 | (u64)t << 32 | (u64)i << 16 | (u64)l);
            }
        }
    }
    std::sort(plan.begin(), plan.end());

    const bool small_p = p < (u64(1) << 15);
    auto run_range = [&](std::size_t pb, std::size_t pe,
                         std::vector<u64>& okeys, std::vector<u32>& ocoefs) {
        std::vector<u64> acc(lo_space, 0);
        std::vector<u32> stamp(lo_space, 0);
        std::vector<u32> touched;
        u32 epoch = 0;
        std::size_t i = pb;
        while (i < pe) {
            u64 hiO = plan[i] >> 40;
            ++epoch;
            touched.clear();
            while (i < pe && (plan[i] >> 40) == hiO) {
                u64 job = plan[i];
                auto& A = ga[(job >> 32) & 0xff];
                auto& B = gb[(job >> 32) & 0xff];
                u32 iga = (u32)((job >> 16) & 0xffff);
                u32 igb = (u32)(job & 0xffff);
                for (u32 x = A.begin[iga]; x < A.end[iga]; ++x) {
                    const u64 cA = A.coef[x];
                    if (!cA) continue;
                    const u32 loA = A.lo[x];
                    for (u32 y = B.begin[igb]; y < B.end[igb]; ++y) {
                        u32 idx = loA + B.lo[y];
                        if (stamp[idx] != epoch) {
                            stamp[idx] = epoch;
                            acc[idx] = 0;
                            touched.push_back(idx);
                        }
                        u64 prod = cA * B.coef[y];
                        acc[idx] += small_p ? prod : prod % p;
                    }
                }
                ++i;
            }
            std::sort(touched.begin(), touched.end());
            for (u32 idx : touched) {
                u64 c = acc[idx] % p;
                if (!c) continue;
                okeys.push_back((hiO << lo_bits) | idx);
                ocoefs.push_back((u32)c);
            }
        }
    };

    int nthreads = std::max(1, jobs);
    nthreads = (int)std::min<std::size_t>(nthreads, 8);
    std::vector<std::size_t> cut{0};
    if (nthreads > 1) {
        for (int t = 1; t < nthreads; ++t) {
            std::size_t pos = plan.size() * t / nthreads;
            // advance to a tile boundary
            while (pos < plan.size() && pos > 0 && (plan[pos] >> 40) == (plan[pos - 1] >> 40)) ++pos;
            cut.push_back(pos);
        }
    }
    cut.push_back(plan.size());

    std::vector<std::vector<u64>> tk(cut.size() - 1);
    std::vector<std::vector<u32>> tc(cut.size() - 1);
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < cut.size() - 1; ++t) {
        if (cut.size() - 1 == 1) {
            run_range(cut[t], cut[t + 1], tk[t], tc[t]);
        } else {
            threads.emplace_back([&, t] { run_range(cut[t], cut[t + 1], tk[t], tc[t]); });
        }
    }
    for (auto& th : threads) th.join();

    std::size_t total = 0;
    for (auto& v : tk) total += v.size();
    if (total > max_terms) throw SizeGuardError(total, max_terms, "convolve_tasks");
    out.keys.reserve(total);
    out.coefs.reserve(total);
    for (std::size_t t = 0; t < tk.size(); ++t) {
        out.keys.insert(out.keys.end(), tk[t].begin(), tk[t].end());
        out.coefs.insert(out.coefs.end(), tc[t].begin(), tc[t].end());
    }
    return out;
}

} // namespace kzp
