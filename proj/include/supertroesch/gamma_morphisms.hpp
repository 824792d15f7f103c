#pragma once

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exact_linalg.hpp"
#include "power_functors.hpp"
#include "superspace.hpp"

namespace supertroesch {

struct HomContext {
    SuperSpace source;
    SuperSpace target;
    SuperSpace units;  // hom_space(source, target)
    int p;

    int unit(int tgt, int src) const { return tgt * source.dim() + src; }
    int unit_target(int u) const { return u / source.dim(); }
    int unit_source(int u) const { return u % source.dim(); }
};
using HomContextPtr = std::shared_ptr<const HomContext>;

inline HomContextPtr make_context(const SuperSpace& source, const SuperSpace& target, int p) {
    Fp check(p);
    (void)check;
    return std::make_shared<const HomContext>(HomContext{source, target, hom_space(source, target), p});
}

inline bool same_spaces(const HomContext& a, const HomContext& b) {
    return a.p == b.p && a.source.same_shape(b.source) && a.target.same_shape(b.target);
}

struct WordHash {
    size_t operator()(const Word& w) const noexcept {
        size_t h = 1469598103934665603ull;
        for (int x : w) h = (h ^ static_cast<size_t>(x + 1)) * 1099511628211ull;
        return h;
    }
};

// Element of Gamma^n Hom(V, W): Div monomials over the matrix units of Hom(V, W).
class GammaElement {
public:
    GammaElement() = default;
    GammaElement(HomContextPtr ctx, int n) : ctx_(std::move(ctx)), n_(n) {
        if (n < 0 || n > 255) throw_domain("Gamma degree must be in [0, 255]");
    }

    const HomContext& ctx() const { return *ctx_; }
    const HomContextPtr& ctx_ptr() const { return ctx_; }
    int n() const noexcept { return n_; }
    int p() const { return ctx_->p; }
    const PowerCombination& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    size_t size() const noexcept { return terms_.size(); }

    void add_monomial(const Exps& e, int c) {
        if (degree(e) != n_ || static_cast<int>(e.size()) != ctx_->units.dim()) throw_domain("Gamma monomial of wrong shape");
        if (!admissible(PowerKind::Div, e, ctx_->units)) throw_domain("Gamma monomial squares an odd unit");
        add_term(terms_, e, c, Fp(p()));
    }
    void add(const GammaElement& o, int s = 1) {
        check_compatible(o, "add");
        add_into(terms_, o.terms_, Fp(p()), s);
    }
    GammaElement scaled(int s) const {
        GammaElement r(ctx_, n_);
        r.terms_ = supertroesch::scaled(terms_, s, Fp(p()));
        return r;
    }
    int coefficient(const Exps& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? 0 : it->second;
    }

    int monomial_source_zdeg(const Exps& e) const {
        int z = 0;
        for (size_t u = 0; u < e.size(); ++u)
            if (e[u]) z += e[u] * ctx_->source.zdeg(ctx_->unit_source(static_cast<int>(u)));
        return z;
    }
    int monomial_target_zdeg(const Exps& e) const {
        int z = 0;
        for (size_t u = 0; u < e.size(); ++u)
            if (e[u]) z += e[u] * ctx_->target.zdeg(ctx_->unit_target(static_cast<int>(u)));
        return z;
    }

    // Monomials whose source factors sum to zdeg `src` and target factors to `tgt`.
    GammaElement restricted(int src, int tgt) const {
        GammaElement r(ctx_, n_);
        for (const auto& [e, c] : terms_)
            if (monomial_source_zdeg(e) == src && monomial_target_zdeg(e) == tgt) r.terms_.emplace(e, c);
        return r;
    }

    friend bool operator==(const GammaElement& a, const GammaElement& b) {
        return a.n_ == b.n_ && same_spaces(*a.ctx_, *b.ctx_) && a.terms_ == b.terms_;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            os << (first ? "" : " + ") << c << "*";
            first = false;
            bool any = false;
            for (size_t u = 0; u < e.size(); ++u) {
                if (!e[u]) continue;
                os << (any ? "·" : "") << "γ" << int(e[u]) << "(" << ctx_->units.basis[u].name << ")";
                any = true;
            }
            if (!any) os << "1";
        }
        return os.str();
    }

    void check_compatible(const GammaElement& o, const char* op) const {
        if (o.n_ != n_ || !same_spaces(*ctx_, *o.ctx_)) throw Error(ErrorKind::DimensionMismatch, std::string(op) + ": Gamma elements live in different spaces");
    }

private:
    HomContextPtr ctx_;
    int n_ = 0;
    PowerCombination terms_;
};

inline GammaElement gamma_monomial(HomContextPtr ctx, const Exps& e, int c = 1) {
    GammaElement g(std::move(ctx), degree(e));
    g.add_monomial(e, c);
    return g;
}

// gamma_a of a combination of units; an odd combination only admits a <= 1.
inline GammaElement gamma_power(HomContextPtr ctx, const std::vector<std::pair<int, int>>& combo, int a) {
    const HomContext& h = *ctx;
    Fp f(h.p);
    GammaElement out(ctx, a);
    std::vector<std::pair<int, int>> terms;
    std::map<int, int> merged;
    for (auto [u, c] : combo) add_term(merged, u, c, f);
    for (auto [u, c] : merged) terms.emplace_back(u, c);
    if (a == 0) {
        out.add_monomial(Exps(static_cast<size_t>(h.units.dim()), 0), 1);
        return out;
    }
    if (terms.empty()) return out;
    int par = -1;
    for (auto [u, c] : terms) {
        if (par >= 0 && h.units.parity(u) != par) throw_domain("gamma_power of an inhomogeneous combination");
        par = h.units.parity(u);
    }
    if (par == 1) {
        if (a > 1) return out;
        for (auto [u, c] : terms) {
            Exps e(static_cast<size_t>(h.units.dim()), 0);
            e[u] = 1;
            out.add_monomial(e, c);
        }
        return out;
    }
    Exps e(static_cast<size_t>(h.units.dim()), 0);
    auto rec = [&](auto&& self, size_t k, int remaining, int coeff) -> void {
        if (k + 1 == terms.size()) {
            e[terms[k].first] = static_cast<std::uint8_t>(remaining);
            out.add_monomial(e, f.mul(coeff, f.pow(terms[k].second, remaining)));
            e[terms[k].first] = 0;
            return;
        }
        for (int x = remaining; x >= 0; --x) {
            e[terms[k].first] = static_cast<std::uint8_t>(x);
            self(self, k + 1, remaining - x, f.mul(coeff, f.pow(terms[k].second, x)));
        }
        e[terms[k].first] = 0;
    };
    rec(rec, 0, a, 1);
    return out;
}

inline std::vector<std::pair<int, int>> map_units(const HomContext& h, const Matrix& m) {
    if (m.rows() != h.target.dim() || m.cols() != h.source.dim()) throw_shape("map_units", m.rows(), m.cols(), h.target.dim(), h.source.dim());
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (int c = m.at(i, j)) out.emplace_back(h.unit(i, j), c);
    return out;
}

inline GammaElement gamma_identity(const SuperSpace& v, int n, int p) {
    auto ctx = make_context(v, v, p);
    return gamma_power(ctx, map_units(*ctx, Matrix::identity(v.dim(), p)), n);
}

// Divided power product Gamma^a Hom(V,W) x Gamma^b Hom(V,W) -> Gamma^{a+b} Hom(V,W).
inline GammaElement product(const GammaElement& x, const GammaElement& y) {
    if (!same_spaces(x.ctx(), y.ctx())) throw Error(ErrorKind::DimensionMismatch, "product: Gamma elements over different Hom spaces");
    GammaElement out(x.ctx_ptr(), x.n() + y.n());
    const SuperSpace& units = x.ctx().units;
    Fp f(x.p());
    for (const auto& [a, ca] : x.terms())
        for (const auto& [b, cb] : y.terms()) {
            Exps e(a.size());
            int c = f.mul(ca, cb);
            bool neg = false;
            bool zero = false;
            for (size_t u = 0; u < a.size() && !zero; ++u) {
                e[u] = static_cast<std::uint8_t>(a[u] + b[u]);
                if (units.parity(static_cast<int>(u)) && e[u] > 1) zero = true;
                c = f.mul(c, f.binom(a[u] + b[u], a[u]));
            }
            if (zero || c == 0) continue;
            // Koszul sign of merging odd units of b ahead of larger odd units of a.
            int odd_a_above = 0;
            for (int u = static_cast<int>(a.size()) - 1; u >= 0; --u) {
                if (!units.parity(u)) continue;
                if (b[u]) neg ^= (odd_a_above & 1);
                if (a[u]) ++odd_a_above;
            }
            out.add_monomial(e, neg ? f.neg(c) : c);
        }
    return out;
}

inline long long expansion_size(const GammaElement& x) {
    long long total = 0;
    for (const auto& [e, c] : x.terms()) {
        long long m = 1;
        int placed = 0;
        constexpr long long cap = 1ll << 40;
        for (auto a : e)
            for (int t = 1; t <= a && m < cap; ++t) {
                ++placed;
                m = m * placed / t;
            }
        total += std::min(m, cap);
        if (total > (1ll << 40)) break;
    }
    return total;
}

inline long long expansion_budget() { return 20'000'000; }

inline void check_expansion(const GammaElement& x, const char* op) {
    const long long s = expansion_size(x);
    if (s > expansion_budget())
        throw BudgetError(std::string(op) + ": invariant tensor expansion of " + std::to_string(s) + " pure tensors exceeds the limit", s,
                          expansion_budget());
}

inline SignedTensor expand_to_invariant_tensor(const GammaElement& x) {
    check_expansion(x, "expand_to_invariant_tensor");
    Fp f(x.p());
    SignedTensor out;
    for (const auto& [e, c] : x.terms())
        for (const auto& [w, s] : lift_from_power(PowerKind::Div, e, x.ctx().units, x.p())) add_term(out, w, f.mul(c, s), f);
    return out;
}

inline GammaElement recognize(HomContextPtr ctx, int n, const SignedTensor& t) {
    GammaElement g(ctx, n);
    for (const auto& [e, c] : project_to_power(PowerKind::Div, t, ctx->units, ctx->p)) g.add_monomial(e, c);
    return g;
}

// phi o psi for phi in Gamma^n Hom(V,W), psi in Gamma^n Hom(U,V), factorwise with
// (f_1 x .. x f_n)(g_1 x .. x g_n) = (-1)^{sum_{i<k} |f_k||g_i|} (f_1 g_1 x .. x f_n g_n).
inline GammaElement compose(const GammaElement& phi, const GammaElement& psi) {
    if (phi.n() != psi.n() || phi.p() != psi.p() || !phi.ctx().source.same_shape(psi.ctx().target))
        throw Error(ErrorKind::DimensionMismatch, "compose: degrees or middle spaces differ");
    const HomContext& hf = phi.ctx();
    const HomContext& hg = psi.ctx();
    auto ctx = make_context(hg.source, hf.target, phi.p());
    GammaElement out(ctx, phi.n());
    if (phi.is_zero() || psi.is_zero()) return out;
    check_expansion(phi, "compose");
    check_expansion(psi, "compose");
    Fp f(phi.p());
    const int n = phi.n();

    struct Entry {
        Word sources;
        int coeff;
        std::vector<std::uint8_t> odd;
    };
    std::unordered_map<Word, std::vector<Entry>, WordHash> by_target;
    for (const auto& [w, c] : expand_to_invariant_tensor(psi)) {
        Word tg(static_cast<size_t>(n)), sr(static_cast<size_t>(n));
        std::vector<std::uint8_t> odd(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            tg[k] = hg.unit_target(w[k]);
            sr[k] = hg.unit_source(w[k]);
            odd[k] = static_cast<std::uint8_t>(hg.units.parity(w[k]));
        }
        by_target[tg].push_back({std::move(sr), c, std::move(odd)});
    }
    const SuperSpace& units = ctx->units;
    Word key(static_cast<size_t>(n)), res(static_cast<size_t>(n));
    for (const auto& [w, c] : expand_to_invariant_tensor(phi)) {
        for (int k = 0; k < n; ++k) key[k] = hf.unit_source(w[k]);
        auto it = by_target.find(key);
        if (it == by_target.end()) continue;
        for (const auto& g : it->second) {
            bool sorted = true;
            for (int k = 0; k < n; ++k) {
                res[k] = ctx->unit(hf.unit_target(w[k]), g.sources[k]);
                if (k && res[k] < res[k - 1]) { sorted = false; break; }
            }
            if (!sorted) continue;
            bool repeated_odd = false;
            for (int k = 1; k < n; ++k)
                if (res[k] == res[k - 1] && units.parity(res[k])) repeated_odd = true;
            if (repeated_odd) continue;
            bool neg = false;
            int odd_g_before = 0;
            for (int k = 0; k < n; ++k) {
                if (hf.units.parity(w[k])) neg ^= (odd_g_before & 1);
                odd_g_before += g.odd[k];
            }
            const int v = f.mul(c, g.coeff);
            out.add_monomial(exps_of(res, units.dim()), neg ? f.neg(v) : v);
        }
    }
    return out;
}

inline std::string monomial_name(const Exps& e, const SuperSpace& v) {
    std::string s;
    for (size_t i = 0; i < e.size(); ++i) {
        if (!e[i]) continue;
        if (!s.empty()) s += "·";
        s += "(" + v.basis[i].name + ")";
        if (e[i] > 1) s += "^" + std::to_string(e[i]);
    }
    return s.empty() ? "1" : s;
}

// S^n(V) as a superspace with basis power_basis(Sym, n, V).
inline SuperSpace power_space(PowerKind k, int n, const SuperSpace& v) {
    std::vector<BasisElement> b;
    for (const auto& e : power_basis(k, n, v)) b.push_back({monomial_name(e, v), monomial_zdeg(e, v), monomial_parity(e, v)});
    return SuperSpace{std::move(b), false};
}

// Action of phi on the given Sym monomials of the source; results keyed by target monomial.
class SymAction {
public:
    explicit SymAction(const GammaElement& phi) : phi_(phi) {
        if (phi.is_zero()) return;
        const HomContext& h = phi.ctx();
        for (const auto& [w, c] : expand_to_invariant_tensor(phi)) {
            Word src(w.size()), tgt(w.size());
            std::vector<std::uint8_t> odd(w.size());
            for (size_t k = 0; k < w.size(); ++k) {
                src[k] = h.unit_source(w[k]);
                tgt[k] = h.unit_target(w[k]);
                odd[k] = static_cast<std::uint8_t>(h.units.parity(w[k]));
            }
            by_source_[src].push_back({std::move(tgt), c, std::move(odd)});
        }
    }

    PowerCombination apply(const Exps& source_monomial) const {
        const HomContext& h = phi_.ctx();
        Fp f(h.p);
        PowerCombination out;
        const Word v = word_of(source_monomial);
        if (static_cast<int>(v.size()) != phi_.n()) throw_domain("apply_sym: degree mismatch");
        auto it = by_source_.find(v);
        if (it == by_source_.end()) return out;
        for (const auto& ent : it->second) {
            // (f_1 x .. x f_n)(v_1 x .. x v_n) = (-1)^{sum_{i<k} |f_k||v_i|} f_1 v_1 x .. x f_n v_n
            bool neg = false;
            int odd_v_before = 0;
            for (size_t k = 0; k < v.size(); ++k) {
                if (ent.odd[k]) neg ^= (odd_v_before & 1);
                odd_v_before += h.source.parity(v[k]);
            }
            Exps e = exps_of(ent.targets, h.target.dim());
            if (!admissible(PowerKind::Sym, e, h.target)) continue;
            if (sort_negative(PowerKind::Sym, h.target, ent.targets)) neg = !neg;
            add_term(out, e, neg ? f.neg(ent.coeff) : ent.coeff, f);
        }
        return out;
    }

private:
    struct Entry {
        Word targets;
        int coeff;
        std::vector<std::uint8_t> odd;
    };
    GammaElement phi_;
    std::unordered_map<Word, std::vector<Entry>, WordHash> by_source_;
};

// Matrix of phi acting S^n(V) -> S^n(W) between the given ordered monomial lists.
inline SparseMatrix apply_sym_matrix(const GammaElement& phi, const std::vector<Exps>& source_basis, const std::vector<Exps>& target_basis) {
    std::map<Exps, int> index;
    for (size_t i = 0; i < target_basis.size(); ++i) index.emplace(target_basis[i], static_cast<int>(i));
    std::vector<SparseMatrix::Triplet> trip;
    SymAction act(phi);
    for (size_t j = 0; j < source_basis.size(); ++j)
        for (const auto& [e, c] : act.apply(source_basis[j])) {
            auto it = index.find(e);
            if (it == index.end()) throw_internal("apply_sym: image monomial outside the target basis");
            trip.push_back({it->second, static_cast<int>(j), c});
        }
    return SparseMatrix::from_triplets(static_cast<int>(target_basis.size()), static_cast<int>(source_basis.size()), phi.p(), std::move(trip));
}

inline int gamma_parity(const GammaElement& x) {
    int par = -1;
    for (const auto& [e, c] : x.terms()) {
        const int q = monomial_parity(e, x.ctx().units);
        if (par >= 0 && q != par) throw_domain("Gamma element is not parity homogeneous");
        par = q;
    }
    return par < 0 ? 0 : par;
}

inline int gamma_zshift(const GammaElement& x) {
    int z = 0;
    bool first = true;
    for (const auto& [e, c] : x.terms()) {
        const int s = monomial_zdeg(e, x.ctx().units);
        if (!first && s != z) throw_domain("Gamma element is not homogeneous in Z-degree");
        z = s;
        first = false;
    }
    return z;
}

inline LinearMapSS apply_sym(const GammaElement& phi) {
    const HomContext& h = phi.ctx();
    auto sb = power_basis(PowerKind::Sym, phi.n(), h.source);
    auto tb = power_basis(PowerKind::Sym, phi.n(), h.target);
    SparseMatrix m = apply_sym_matrix(phi, sb, tb);
    return make_map(power_space(PowerKind::Sym, phi.n(), h.source), power_space(PowerKind::Sym, phi.n(), h.target), m.to_dense(),
                    gamma_parity(phi), gamma_zshift(phi));
}

// Dual Frobenius: gamma_{p^r}(e) with e even goes to e^(r); every other monomial to 0.
inline LinearMapSS apply_frobenius(const GammaElement& phi, int r) {
    const HomContext& h = phi.ctx();
    const long long q = int_pow(h.p, r);
    if (phi.n() != q) throw_domain("apply_frobenius: degree " + std::to_string(phi.n()) + " is not p^r = " + std::to_string(q));
    Matrix m(h.target.dim(), h.source.dim(), h.p);
    int zshift = 0;
    bool seen = false;
    for (const auto& [e, c] : phi.terms()) {
        for (size_t u = 0; u < e.size(); ++u) {
            if (e[u] != q) continue;
            if (h.units.parity(static_cast<int>(u))) continue;
            const int i = h.unit_target(static_cast<int>(u)), j = h.unit_source(static_cast<int>(u));
            m.add_to(i, j, c);
            const int z = static_cast<int>((h.target.zdeg(i) - h.source.zdeg(j)) * q);
            if (seen && z != zshift && m.at(i, j)) throw_domain("apply_frobenius: image not homogeneous in Z-degree");
            zshift = z;
            seen = true;
        }
    }
    if (m.is_zero()) zshift = 0;
    return make_map(frobenius_twist_space(h.source, r, h.p), frobenius_twist_space(h.target, r, h.p), std::move(m), 0, zshift);
}

// gamma_d(f) * gamma_{n-d}(1_W) for an even endomorphism f of W.
inline GammaElement phi_d(const LinearMapSS& fmap, int d, int n, int p) {
    if (fmap.parity != 0) throw_domain("phi_d needs an even endomorphism");
    if (!fmap.source.same_shape(fmap.target)) throw_domain("phi_d needs an endomorphism");
    auto ctx = make_context(fmap.source, fmap.target, p);
    if (d < 0 || n < 0) throw_domain("phi_d needs d, n >= 0");
    if (d > n) return GammaElement(ctx, n);
    GammaElement a = gamma_power(ctx, map_units(*ctx, fmap.matrix), d);
    GammaElement b = gamma_power(ctx, map_units(*ctx, Matrix::identity(fmap.source.dim(), p)), n - d);
    return product(a, b);
}

namespace detail {
// Apply a unit substitution to every monomial: each unit u becomes the combination images[u].
inline GammaElement substitute_units(const GammaElement& phi, HomContextPtr ctx, const std::vector<std::vector<std::pair<int, int>>>& images) {
    GammaElement out(ctx, phi.n());
    for (const auto& [e, c] : phi.terms()) {
        GammaElement acc(ctx, 0);
        acc.add_monomial(Exps(static_cast<size_t>(ctx->units.dim()), 0), c);
        for (size_t u = 0; u < e.size() && !acc.is_zero(); ++u)
            if (e[u]) acc = product(acc, gamma_power(ctx, images[u], e[u]));
        out.add(acc);
    }
    return out;
}
}  // namespace detail

// phi x 1_U: unit E(i,j) -> sum_k E((i,k),(j,k)).
inline GammaElement tensor_with_identity(const GammaElement& phi, const SuperSpace& u) {
    const HomContext& h = phi.ctx();
    auto ctx = make_context(tensor(h.source, u), tensor(h.target, u), h.p);
    std::vector<std::vector<std::pair<int, int>>> images(static_cast<size_t>(h.units.dim()));
    for (int x = 0; x < h.units.dim(); ++x) {
        const int i = h.unit_target(x), j = h.unit_source(x);
        for (int k = 0; k < u.dim(); ++k) images[x].emplace_back(ctx->unit(i * u.dim() + k, j * u.dim() + k), 1);
    }
    return detail::substitute_units(phi, ctx, images);
}

// 1_A x phi: unit E(i,j) -> sum_k (-1)^{|E(i,j)||a_k|} E((k,i),(k,j)).
inline GammaElement tensor_identity_left(const SuperSpace& a, const GammaElement& phi) {
    const HomContext& h = phi.ctx();
    Fp f(h.p);
    auto ctx = make_context(tensor(a, h.source), tensor(a, h.target), h.p);
    std::vector<std::vector<std::pair<int, int>>> images(static_cast<size_t>(h.units.dim()));
    for (int x = 0; x < h.units.dim(); ++x) {
        const int i = h.unit_target(x), j = h.unit_source(x);
        for (int k = 0; k < a.dim(); ++k) {
            const bool neg = h.units.parity(x) && a.parity(k);
            images[x].emplace_back(ctx->unit(k * h.target.dim() + i, k * h.source.dim() + j), f.sign(neg));
        }
    }
    return detail::substitute_units(phi, ctx, images);
}

// Reinterpret phi over spaces of the same dimensions, keeping unit coefficients.
inline GammaElement relabel(const GammaElement& phi, const SuperSpace& source, const SuperSpace& target) {
    if (source.dim() != phi.ctx().source.dim() || target.dim() != phi.ctx().target.dim()) throw_domain("relabel: dimension mismatch");
    auto ctx = make_context(source, target, phi.p());
    GammaElement out(ctx, phi.n());
    for (const auto& [e, c] : phi.terms()) out.add_monomial(e, c);
    return out;
}

}  // namespace supertroesch
