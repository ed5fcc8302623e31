#include "kzp/mpoly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace kzp {

namespace {

int cmp_exps(const Exp* a, const Exp* b, int w)
{
    for (int i = 0; i < w; ++i) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

} // namespace

MPoly::MPoly(u64 p, int t_arity, int z_arity)
    : p_(p), tr_(t_arity), zn_(z_arity)
{
    if (p < 2) throw std::invalid_argument("MPoly: modulus must be >= 2");
    if (t_arity < 0 || z_arity < 0) throw std::invalid_argument("MPoly: negative arity");
}

MPoly MPoly::constant(u64 p, int t_arity, int z_arity, u64 value)
{
    MPoly r(p, t_arity, z_arity);
    value %= p;
    if (value) {
        r.exps_.assign(r.width(), 0);
        r.coefs_.push_back(value);
    }
    return r;
}

MPoly MPoly::t_var(u64 p, int t_arity, int z_arity, int i)
{
    if (i < 0 || i >= t_arity) throw std::invalid_argument("t_var: index out of range");
    MPoly r(p, t_arity, z_arity);
    r.exps_.assign(r.width(), 0);
    r.exps_[i] = 1;
    r.coefs_.push_back(1);
    return r;
}

MPoly MPoly::z_var(u64 p, int t_arity, int z_arity, int s)
{
    if (s < 0 || s >= z_arity) throw std::invalid_argument("z_var: index out of range");
    MPoly r(p, t_arity, z_arity);
    r.exps_.assign(r.width(), 0);
    r.exps_[t_arity + s] = 1;
    r.coefs_.push_back(1);
    return r;
}

MPoly MPoly::monomial(u64 p, int t_arity, int z_arity,
                      std::span<const Exp> exps, u64 coef)
{
    MPoly r(p, t_arity, z_arity);
    if ((int)exps.size() != r.width()) throw std::invalid_argument("monomial: bad exponent width");
    coef %= p;
    if (coef) {
        r.exps_.assign(exps.begin(), exps.end());
        r.coefs_.push_back(coef);
    }
    return r;
}

MPoly MPoly::from_terms(u64 p, int t_arity, int z_arity,
                        std::vector<Exp> exps, std::vector<u64> coefs)
{
    MPoly r(p, t_arity, z_arity);
    if (exps.size() != coefs.size() * (std::size_t)r.width())
        throw std::invalid_argument("from_terms: size mismatch");
    for (auto& c : coefs) c %= p;
    r.exps_ = std::move(exps);
    r.coefs_ = std::move(coefs);
    r.normalize();
    return r;
}

void MPoly::normalize()
{
    const int w = width();
    const std::size_t n = coefs_.size();
    if (n == 0) return;
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const Exp* e = exps_.data();
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        return cmp_exps(e + (std::size_t)a * w, e + (std::size_t)b * w, w) > 0;
    });
    std::vector<Exp> ne;
    std::vector<u64> nc;
    ne.reserve(exps_.size());
    nc.reserve(n);
    std::size_t i = 0;
    while (i < n) {
        const Exp* cur = e + (std::size_t)idx[i] * w;
        u64 acc = 0;
        std::size_t j = i;
        while (j < n && cmp_exps(e + (std::size_t)idx[j] * w, cur, w) == 0) {
            acc += coefs_[idx[j]];
            if (acc >= p_) acc -= p_ * (acc / p_);
            ++j;
        }
        acc %= p_;
        if (acc) {
            ne.insert(ne.end(), cur, cur + w);
            nc.push_back(acc);
        }
        i = j;
    }
    exps_ = std::move(ne);
    coefs_ = std::move(nc);
}

u64 MPoly::coef_at(std::span<const Exp> e) const
{
    if ((int)e.size() != width()) throw std::invalid_argument("coef_at: bad width");
    const int w = width();
    // binary search: terms sorted descending
    std::size_t lo = 0, hi = coefs_.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        int c = cmp_exps(exps_.data() + mid * w, e.data(), w);
        if (c == 0) return coefs_[mid];
        if (c > 0) lo = mid + 1; else hi = mid;
    }
    return 0;
}

MPoly MPoly::operator-() const
{
    MPoly r = *this;
    for (auto& c : r.coefs_) c = (p_ - c) % p_;
    return r;
}

MPoly MPoly::scaled(u64 factor) const
{
    factor %= p_;
    MPoly r(p_, tr_, zn_);
    if (factor == 0) return r;
    r.exps_.reserve(exps_.size());
    r.coefs_.reserve(coefs_.size());
    const int w = width();
    for (std::size_t i = 0; i < coefs_.size(); ++i) {
        u64 c = coefs_[i] * factor % p_;
        if (c) {
            r.exps_.insert(r.exps_.end(), exps_.begin() + i * w, exps_.begin() + (i + 1) * w);
            r.coefs_.push_back(c);
        }
    }
    return r;
}

static void check_compat(const MPoly& a, const MPoly& b)
{
    if (a.modulus() != b.modulus()) throw std::invalid_argument("MPoly: modulus mismatch");
    if (a.t_arity() != b.t_arity() || a.z_arity() != b.z_arity())
        throw std::invalid_argument("MPoly: arity mismatch");
}

MPoly add(const MPoly& a, const MPoly& b)
{
    check_compat(a, b);
    const int w = a.width();
    MPoly r(a.p_, a.tr_, a.zn_);
    r.exps_.reserve(a.exps_.size() + b.exps_.size());
    r.coefs_.reserve(a.coefs_.size() + b.coefs_.size());
    std::size_t i = 0, j = 0;
    while (i < a.coefs_.size() || j < b.coefs_.size()) {
        int c;
        if (i == a.coefs_.size()) c = -1;
        else if (j == b.coefs_.size()) c = 1;
        else c = cmp_exps(a.exps_.data() + i * w, b.exps_.data() + j * w, w);
        if (c > 0) {
            r.exps_.insert(r.exps_.end(), a.exps_.begin() + i * w, a.exps_.begin() + (i + 1) * w);
            r.coefs_.push_back(a.coefs_[i]);
            ++i;
        } else if (c < 0) {
            r.exps_.insert(r.exps_.end(), b.exps_.begin() + j * w, b.exps_.begin() + (j + 1) * w);
            r.coefs_.push_back(b.coefs_[j]);
            ++j;
        } else {
            u64 s = (a.coefs_[i] + b.coefs_[j]) % a.p_;
            if (s) {
                r.exps_.insert(r.exps_.end(), a.exps_.begin() + i * w, a.exps_.begin() + (i + 1) * w);
                r.coefs_.push_back(s);
            }
            ++i; ++j;
        }
    }
    return r;
}

MPoly sub(const MPoly& a, const MPoly& b) { return add(a, -b); }

bool MPoly::operator==(const MPoly& o) const
{
    return p_ == o.p_ && tr_ == o.tr_ && zn_ == o.zn_
        && exps_ == o.exps_ && coefs_ == o.coefs_;
}

static MPoly mul_impl(const MPoly& a, const MPoly& b, const Exp* caps)
{
    check_compat(a, b);
    const int w = a.width();
    MPoly r(a.modulus(), a.t_arity(), a.z_arity());
    if (a.is_zero() || b.is_zero()) return r;
    std::vector<Exp> exps;
    std::vector<u64> coefs;
    exps.reserve(a.term_count() * b.term_count() * w);
    coefs.reserve(a.term_count() * b.term_count());
    std::vector<Exp> e(w);
    for (std::size_t i = 0; i < a.term_count(); ++i) {
        auto ea = a.exps(i);
        for (std::size_t j = 0; j < b.term_count(); ++j) {
            auto eb = b.exps(j);
            bool keep = true;
            for (int v = 0; v < w; ++v) {
                Exp s = (Exp)(ea[v] + eb[v]);
                if (caps && s > caps[v]) { keep = false; break; }
                e[v] = s;
            }
            if (!keep) continue;
            exps.insert(exps.end(), e.begin(), e.end());
            coefs.push_back(a.coef(i) * b.coef(j) % a.modulus());
        }
    }
    return MPoly::from_terms(a.modulus(), a.t_arity(), a.z_arity(),
                             std::move(exps), std::move(coefs));
}

MPoly mul(const MPoly& a, const MPoly& b) { return mul_impl(a, b, nullptr); }

MPoly mul_capped(const MPoly& a, const MPoly& b, std::span<const Exp> caps)
{
    if ((int)caps.size() != a.width()) throw std::invalid_argument("mul_capped: bad caps width");
    return mul_impl(a, b, caps.data());
}

MPoly MPoly::pow(u64 e, std::optional<std::vector<Exp>> caps) const
{
    if (caps && (int)caps->size() != width()) throw std::invalid_argument("pow: bad caps width");
    MPoly acc = MPoly::constant(p_, tr_, zn_, 1);
    MPoly base = caps ? mul_capped(acc, *this, *caps) : *this;
    // linear loop; exponents at desk scale are small and capping stays exact
    for (u64 i = 0; i < e; ++i)
        acc = caps ? mul_capped(acc, base, *caps) : mul(acc, base);
    return acc;
}

MPoly MPoly::coeff_extract(std::span<const Exp> t_targets) const
{
    if ((int)t_targets.size() != tr_) throw std::invalid_argument("coeff_extract: need one target per t variable");
    MPoly r(p_, 0, zn_);
    const int w = width();
    for (std::size_t i = 0; i < coefs_.size(); ++i) {
        const Exp* e = exps_.data() + i * w;
        bool hit = true;
        for (int v = 0; v < tr_; ++v) {
            if (e[v] != t_targets[v]) { hit = false; break; }
        }
        if (hit) {
            r.exps_.insert(r.exps_.end(), e + tr_, e + w);
            r.coefs_.push_back(coefs_[i]);
        }
    }
    // t-block-first descending order restricted to a fixed t-monomial is
    // already descending on the z-block; no re-sort needed
    return r;
}

std::pair<std::vector<Exp>, u64> MPoly::lex_leading() const
{
    if (is_zero()) throw std::invalid_argument("lex_leading: zero polynomial");
    auto e = exps(0);
    return {std::vector<Exp>(e.begin(), e.end()), coefs_[0]};
}

bool MPoly::symmetrize_check(int sign) const
{
    if (sign != 1 && sign != -1) throw std::invalid_argument("symmetrize_check: sign must be +-1");
    const int w = width();
    std::vector<Exp> e(w);
    // adjacent transpositions generate all of S_r and sign is multiplicative
    for (int v = 0; v + 1 < tr_; ++v) {
        for (std::size_t i = 0; i < coefs_.size(); ++i) {
            auto src = exps(i);
            std::copy(src.begin(), src.end(), e.begin());
            std::swap(e[v], e[v + 1]);
            u64 want = sign == 1 ? coefs_[i] : (p_ - coefs_[i]) % p_;
            if (coef_at(e) != want) return false;
        }
    }
    return true;
}

MPoly MPoly::partial_derivative(int z_index) const
{
    if (z_index < 0 || z_index >= zn_) throw std::invalid_argument("partial_derivative: bad z index");
    const int w = width();
    const int v = tr_ + z_index;
    MPoly r(p_, tr_, zn_);
    for (std::size_t i = 0; i < coefs_.size(); ++i) {
        const Exp* e = exps_.data() + i * w;
        if (e[v] == 0) continue;
        u64 c = coefs_[i] * (e[v] % p_) % p_;
        if (!c) continue;
        r.exps_.insert(r.exps_.end(), e, e + w);
        r.exps_[r.exps_.size() - w + v] -= 1;
        r.coefs_.push_back(c);
    }
    // decrementing one variable keeps the descending order
    return r;
}

MPoly MPoly::relabel_z(std::span<const int> perm) const
{
    if ((int)perm.size() != zn_) throw std::invalid_argument("relabel_z: bad permutation size");
    const int w = width();
    std::vector<Exp> exps(exps_.size());
    for (std::size_t i = 0; i < coefs_.size(); ++i) {
        const Exp* e = exps_.data() + i * w;
        Exp* o = exps.data() + i * w;
        for (int v = 0; v < tr_; ++v) o[v] = e[v];
        for (int s = 0; s < zn_; ++s) o[tr_ + perm[s]] = e[tr_ + s];
    }
    return MPoly::from_terms(p_, tr_, zn_, std::move(exps), std::vector<u64>(coefs_));
}

int MPoly::total_degree() const
{
    int best = -1;
    const int w = width();
    for (std::size_t i = 0; i < coefs_.size(); ++i) {
        int d = 0;
        const Exp* e = exps_.data() + i * w;
        for (int v = 0; v < w; ++v) d += e[v];
        best = std::max(best, d);
    }
    return best;
}

int MPoly::degree_in(int var) const
{
    if (var < 0 || var >= width()) throw std::invalid_argument("degree_in: bad variable");
    int best = -1;
    const int w = width();
    for (std::size_t i = 0; i < coefs_.size(); ++i)
        best = std::max(best, (int)exps_[i * w + var]);
    return best;
}

bool MPoly::is_homogeneous() const
{
    if (is_zero()) return true;
    const int w = width();
    int d0 = -1;
    for (std::size_t i = 0; i < coefs_.size(); ++i) {
        int d = 0;
        for (int v = 0; v < w; ++v) d += exps_[i * w + v];
        if (d0 < 0) d0 = d;
        else if (d != d0) return false;
    }
    return true;
}

int MPoly::homogeneous_degree() const
{
    if (!is_homogeneous()) throw std::invalid_argument("homogeneous_degree: polynomial is not homogeneous");
    return total_degree();
}

std::string MPoly::to_string() const
{
    if (is_zero()) return "0";
    std::ostringstream os;
    const int w = width();
    for (std::size_t i = 0; i < coefs_.size(); ++i) {
        if (i) os << " + ";
        const Exp* e = exps_.data() + i * w;
        bool any = false;
        std::ostringstream mono;
        for (int v = 0; v < w; ++v) {
            if (!e[v]) continue;
            if (any) mono << "*";
            if (v < tr_) mono << "t" << (v + 1);
            else mono << "z" << (v - tr_ + 1);
            if (e[v] > 1) mono << "^" << e[v];
            any = true;
        }
        if (!any) os << coefs_[i];
        else if (coefs_[i] == 1) os << mono.str();
        else os << coefs_[i] << "*" << mono.str();
    }
    return os.str();
}

} // namespace kzp
