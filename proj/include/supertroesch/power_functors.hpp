#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exact_linalg.hpp"
#include "superspace.hpp"

namespace supertroesch {

enum class PowerKind { Sym, Ext, Div, Alt };

inline std::string kind_name(PowerKind k) {
    switch (k) {
        case PowerKind::Sym: return "Sym";
        case PowerKind::Ext: return "Ext";
        case PowerKind::Div: return "Div";
        case PowerKind::Alt: return "Alt";
    }
    return "?";
}

// Exponent vector indexed by basis position.
using Exps = std::vector<std::uint8_t>;
// Sequence of basis indices of a pure tensor.
using Word = std::vector<int>;
// Coefficients are nonzero residues mod p.
using SignedTensor = std::map<Word, int>;
using PowerCombination = std::map<Exps, int>;

struct PowerMonomial {
    PowerKind kind;
    Exps exps;
};

inline bool twisted(PowerKind k) { return k == PowerKind::Ext || k == PowerKind::Alt; }

// Ext and Alt carry the sign character of S_n on top of the Koszul sign.
inline PowerKind dual_kind(PowerKind k) {
    switch (k) {
        case PowerKind::Sym: return PowerKind::Div;
        case PowerKind::Ext: return PowerKind::Alt;
        case PowerKind::Div: return PowerKind::Sym;
        case PowerKind::Alt: return PowerKind::Ext;
    }
    return k;
}

template <class Key>
inline void add_term(std::map<Key, int>& c, const Key& k, int v, const Fp& f) {
    v = f.reduce(v);
    if (v == 0) return;
    auto it = c.find(k);
    if (it == c.end()) {
        c.emplace(k, v);
        return;
    }
    it->second = f.add(it->second, v);
    if (it->second == 0) c.erase(it);
}

template <class Key>
inline std::map<Key, int> scaled(const std::map<Key, int>& c, int s, const Fp& f) {
    std::map<Key, int> out;
    s = f.reduce(s);
    if (s == 0) return out;
    for (const auto& [k, v] : c) out.emplace(k, f.mul(v, s));
    return out;
}

template <class Key>
inline void add_into(std::map<Key, int>& acc, const std::map<Key, int>& c, const Fp& f, int s = 1) {
    for (const auto& [k, v] : c) add_term(acc, k, f.mul(v, f.reduce(s)), f);
}

inline int degree(const Exps& e) { return std::accumulate(e.begin(), e.end(), 0); }

inline int monomial_zdeg(const Exps& e, const SuperSpace& v) {
    int z = 0;
    for (size_t i = 0; i < e.size(); ++i) z += e[i] * v.zdeg(static_cast<int>(i));
    return z;
}

inline int monomial_parity(const Exps& e, const SuperSpace& v) {
    int q = 0;
    for (size_t i = 0; i < e.size(); ++i) q += e[i] * v.parity(static_cast<int>(i));
    return q % 2;
}

// Sym, Div: odd exponents at most 1. Ext, Alt: even exponents at most 1.
inline bool admissible(PowerKind k, const Exps& e, const SuperSpace& v) {
    if (static_cast<int>(e.size()) != v.dim()) return false;
    const int restricted = twisted(k) ? 0 : 1;
    for (size_t i = 0; i < e.size(); ++i)
        if (v.parity(static_cast<int>(i)) == restricted && e[i] > 1) return false;
    return true;
}

inline Word word_of(const Exps& e) {
    Word w;
    for (size_t i = 0; i < e.size(); ++i)
        for (int a = 0; a < e[i]; ++a) w.push_back(static_cast<int>(i));
    return w;
}

inline Exps exps_of(const Word& w, int dim) {
    Exps e(static_cast<size_t>(dim), 0);
    for (int i : w) {
        if (e[i] == 255) throw_domain("exponent overflow (degree above 255)");
        ++e[i];
    }
    return e;
}

// Whether exchanging adjacent factors a, b in kind k costs a sign.
inline bool swap_negative(PowerKind k, const SuperSpace& v, int a, int b) {
    return ((v.parity(a) & v.parity(b)) ^ (twisted(k) ? 1 : 0)) != 0;
}

// Sign of sorting a word into non-decreasing order; only strict inversions are exchanged.
inline bool sort_negative(PowerKind k, const SuperSpace& v, const Word& w) {
    bool neg = false;
    for (size_t i = 0; i < w.size(); ++i)
        for (size_t j = i + 1; j < w.size(); ++j)
            if (w[i] > w[j] && swap_negative(k, v, w[i], w[j])) neg = !neg;
    return neg;
}

namespace detail {
inline void enumerate_basis(PowerKind k, const SuperSpace& v, int pos, int remaining, Exps& cur, std::vector<Exps>& out) {
    if (pos == v.dim()) {
        if (remaining == 0) out.push_back(cur);
        return;
    }
    const int restricted = twisted(k) ? 0 : 1;
    const int cap = v.parity(pos) == restricted ? std::min(remaining, 1) : remaining;
    for (int a = cap; a >= 0; --a) {
        cur[pos] = static_cast<std::uint8_t>(a);
        enumerate_basis(k, v, pos + 1, remaining - a, cur, out);
    }
    cur[pos] = 0;
}
}  // namespace detail

// Admissible monomials of degree n in descending lexicographic exponent order.
inline std::vector<Exps> power_basis(PowerKind k, int n, const SuperSpace& v) {
    if (n < 0) throw_domain("power_basis needs n >= 0");
    if (n > 255) throw_domain("power_basis degree above 255");
    std::vector<Exps> out;
    Exps cur(static_cast<size_t>(v.dim()), 0);
    if (v.dim() == 0) {
        if (n == 0) out.push_back(cur);
        return out;
    }
    detail::enumerate_basis(k, v, 0, n, cur, out);
    return out;
}

inline bool permutation_odd(const std::vector<int>& sigma) {
    bool odd = false;
    for (size_t i = 0; i < sigma.size(); ++i)
        for (size_t j = i + 1; j < sigma.size(); ++j)
            if (sigma[i] > sigma[j]) odd = !odd;
    return odd;
}

// Right action: position k of (t.sigma) holds factor sigma(k) of t, with the Koszul sign;
// `with_sign_character` multiplies by sgn(sigma).
inline SignedTensor act_sigma(const SignedTensor& t, const std::vector<int>& sigma, const SuperSpace& v, int p,
                              bool with_sign_character = false) {
    Fp f(p);
    const int n = static_cast<int>(sigma.size());
    std::vector<int> seen(static_cast<size_t>(n), 0);
    for (int s : sigma) {
        if (s < 0 || s >= n || seen[s]) throw_domain("act_sigma: not a permutation");
        seen[s] = 1;
    }
    const bool sgn = with_sign_character && permutation_odd(sigma);
    SignedTensor out;
    for (const auto& [w, c] : t) {
        if (static_cast<int>(w.size()) != n) throw_domain("act_sigma: permutation length differs from tensor length");
        Word nw(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) nw[k] = w[sigma[k]];
        bool neg = sgn;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (sigma[i] > sigma[j] && v.parity(w[sigma[i]]) && v.parity(w[sigma[j]])) neg = !neg;
        add_term(out, nw, neg ? f.neg(c) : c, f);
    }
    return out;
}

// Sym/Ext: the sorted representative. Div/Alt: the signed orbit sum over distinct rearrangements.
inline SignedTensor lift_from_power(PowerKind k, const Exps& e, const SuperSpace& v, int p) {
    if (!admissible(k, e, v)) throw_domain("lift_from_power: inadmissible " + kind_name(k) + " monomial");
    Fp f(p);
    SignedTensor out;
    Word w = word_of(e);
    if (k == PowerKind::Sym || k == PowerKind::Ext) {
        out.emplace(w, 1);
        return out;
    }
    do {
        out.emplace(w, f.sign(sort_negative(k, v, w)));
    } while (std::next_permutation(w.begin(), w.end()));
    return out;
}

// Sym/Ext: quotient map. Div/Alt: coefficient at sorted representatives (input assumed invariant).
inline PowerCombination project_to_power(PowerKind k, const SignedTensor& t, const SuperSpace& v, int p) {
    Fp f(p);
    PowerCombination out;
    for (const auto& [w, c] : t) {
        if (k == PowerKind::Sym || k == PowerKind::Ext) {
            Exps e = exps_of(w, v.dim());
            if (!admissible(k, e, v)) continue;
            add_term(out, e, sort_negative(k, v, w) ? f.neg(c) : c, f);
        } else {
            if (!std::is_sorted(w.begin(), w.end())) continue;
            Exps e = exps_of(w, v.dim());
            if (!admissible(k, e, v)) continue;
            add_term(out, e, c, f);
        }
    }
    return out;
}

// Invariance under the (twisted, for Ext/Alt) action of the adjacent transpositions.
inline bool is_invariant(PowerKind k, const SignedTensor& t, const SuperSpace& v, int p) {
    if (t.empty()) return true;
    const int n = static_cast<int>(t.begin()->first.size());
    for (int i = 0; i + 1 < n; ++i) {
        std::vector<int> s(static_cast<size_t>(n));
        std::iota(s.begin(), s.end(), 0);
        std::swap(s[i], s[i + 1]);
        if (act_sigma(t, s, v, p, twisted(k)) != t) return false;
    }
    return true;
}

inline SignedTensor tensor_concat(const SignedTensor& a, const SignedTensor& b, int p) {
    Fp f(p);
    SignedTensor out;
    for (const auto& [wa, ca] : a)
        for (const auto& [wb, cb] : b) {
            Word w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            add_term(out, w, f.mul(ca, cb), f);
        }
    return out;
}

inline PowerCombination power_product(PowerKind k, const Exps& a, const Exps& b, const SuperSpace& v, int p) {
    if (a.size() != b.size() || static_cast<int>(a.size()) != v.dim()) throw_domain("power_product: space mismatch");
    if (!admissible(k, a, v) || !admissible(k, b, v)) throw_domain("power_product: inadmissible factor");
    Fp f(p);
    PowerCombination out;
    Word w = word_of(a);
    Word wb = word_of(b);
    w.insert(w.end(), wb.begin(), wb.end());
    Exps e(a.size());
    int coeff = 1;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] + b[i] > 255) throw_domain("exponent overflow (degree above 255)");
        e[i] = static_cast<std::uint8_t>(a[i] + b[i]);
        if (k == PowerKind::Div || k == PowerKind::Alt) coeff = f.mul(coeff, f.binom(a[i] + b[i], a[i]));
    }
    if (!admissible(k, e, v) || coeff == 0) return out;
    add_term(out, e, sort_negative(k, v, w) ? f.neg(coeff) : coeff, f);
    return out;
}

inline PowerCombination power_product(PowerKind k, const PowerCombination& x, const PowerCombination& y, const SuperSpace& v,
                                      int p) {
    Fp f(p);
    PowerCombination out;
    for (const auto& [a, ca] : x)
        for (const auto& [b, cb] : y) add_into(out, power_product(k, a, b, v, p), f, f.mul(ca, cb));
    return out;
}

// Shuffles of (a, b): sigma(k) names the source slot of output position k, blocks kept in order.
inline std::vector<std::vector<int>> minimal_shuffles(int a, int b) {
    std::vector<std::vector<int>> out;
    const int n = a + b;
    std::vector<int> mask(static_cast<size_t>(n), 0);
    std::fill(mask.begin(), mask.begin() + a, 1);
    do {
        std::vector<int> s(static_cast<size_t>(n));
        int x = 0, y = a;
        for (int k = 0; k < n; ++k) s[k] = mask[k] ? x++ : y++;
        out.push_back(s);
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return out;
}

// Shuffle-sum product on invariant tensors over the given right-coset representatives.
inline PowerCombination shuffle_product(PowerKind k, const Exps& a, const Exps& b, const SuperSpace& v, int p,
                                        const std::vector<std::vector<int>>& reps) {
    Fp f(p);
    SignedTensor t = tensor_concat(lift_from_power(k, a, v, p), lift_from_power(k, b, v, p), p);
    SignedTensor sum;
    for (const auto& s : reps) add_into(sum, act_sigma(t, s, v, p, twisted(k)), f);
    return project_to_power(k, sum, v, p);
}

using PowerPairs = std::map<std::pair<Exps, Exps>, int>;

inline PowerPairs coproduct_component(PowerKind k, const Exps& m, int a, int b, const SuperSpace& v, int p) {
    if (!admissible(k, m, v)) throw_domain("coproduct_component: inadmissible monomial");
    if (a < 0 || b < 0 || a + b != degree(m)) throw_domain("coproduct_component: a + b must equal the degree");
    Fp f(p);
    PowerPairs out;
    const Word w = word_of(m);
    const int n = static_cast<int>(w.size());
    if (k == PowerKind::Sym || k == PowerKind::Ext) {
        std::vector<int> mask(static_cast<size_t>(n), 0);
        std::fill(mask.begin(), mask.begin() + a, 1);
        do {
            Word left, right;
            bool neg = false;
            for (int i = 0; i < n; ++i) (mask[i] ? left : right).push_back(w[i]);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (!mask[i] && mask[j] && swap_negative(k, v, w[i], w[j])) neg = !neg;
            add_term(out, {exps_of(left, v.dim()), exps_of(right, v.dim())}, f.sign(neg), f);
        } while (std::prev_permutation(mask.begin(), mask.end()));
        return out;
    }
    // Div/Alt: split exponents; the sign is the lift coefficient of the concatenated sorted words.
    Exps left(m.size(), 0), right(m.size(), 0);
    auto rec = [&](auto&& self, size_t pos, int need) -> void {
        if (pos == m.size()) {
            if (need != 0) return;
            for (size_t i = 0; i < m.size(); ++i) right[i] = static_cast<std::uint8_t>(m[i] - left[i]);
            Word cw = word_of(left);
            Word rw = word_of(right);
            cw.insert(cw.end(), rw.begin(), rw.end());
            add_term(out, {left, right}, f.sign(sort_negative(k, v, cw)), f);
            return;
        }
        for (int c = std::min<int>(m[pos], need); c >= 0; --c) {
            left[pos] = static_cast<std::uint8_t>(c);
            self(self, pos + 1, need - c);
        }
        left[pos] = 0;
    };
    rec(rec, 0, a);
    return out;
}

// dim Hom(F, S^n_V) = dim F^#(V), reported as (even, odd).
inline std::pair<int, int> yoneda_hom_dim(PowerKind k, int n, const SuperSpace& v) {
    int even = 0, odd = 0;
    for (const auto& e : power_basis(dual_kind(k), n, v)) (monomial_parity(e, v) ? odd : even)++;
    return {even, odd};
}

}  // namespace supertroesch
