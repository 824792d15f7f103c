#pragma once

// Seeded randomized property suites shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "supertroesch/gamma_morphisms.hpp"
#include "supertroesch/p_complexes.hpp"
#include "supertroesch/power_functors.hpp"

namespace supertroesch::props {

struct PropertyResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    std::string first_failure;

    bool ok() const { return cases >= 200 && failures == 0; }
    void check(bool cond, const std::string& what) {
        if (cond) return;
        if (!failures) first_failure = what;
        ++failures;
    }
    std::string summary() const {
        std::ostringstream s;
        s << name << ": " << cases << " cases, " << failures << " failures";
        if (failures) s << " (first: " << first_failure << ")";
        return s.str();
    }
};

// Koszul action built only from adjacent supertwists along a bubble sort of sigma.
inline SignedTensor act_by_transpositions(const SignedTensor& t, const std::vector<int>& sigma, const SuperSpace& v, int p) {
    SignedTensor cur = t;
    const int n = static_cast<int>(sigma.size());
    std::vector<int> swaps;
    std::vector<int> s = sigma;
    for (int pass = 0; pass < n; ++pass)
        for (int i = 0; i + 1 < n; ++i)
            if (s[i] > s[i + 1]) {
                std::swap(s[i], s[i + 1]);
                swaps.push_back(i);
            }
    // s (identity now) = sigma composed with the recorded swaps; undo them in reverse.
    for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) {
        std::vector<int> tr(static_cast<size_t>(n));
        std::iota(tr.begin(), tr.end(), 0);
        std::swap(tr[*it], tr[*it + 1]);
        cur = act_sigma(cur, tr, v, p);
    }
    return cur;
}

struct Planted {
    PComplex complex;
    std::vector<CyclicBlock> blocks;
};

inline Matrix invert(const Matrix& m) {
    const int n = m.rows();
    Matrix out(n, n, m.p());
    for (int j = 0; j < n; ++j) {
        std::vector<int> e(static_cast<size_t>(n), 0);
        e[j] = 1;
        auto x = solve(m, e);
        if (!x) throw std::logic_error("singular");
        for (int i = 0; i < n; ++i) out.set(i, j, (*x)[i]);
    }
    return out;
}

// Direct sum of random cyclic blocks, then a random parity-preserving basis change per degree.
inline Planted plant(std::mt19937& rng, int p, int alpha, int max_total) {
    Planted out;
    std::map<int, std::vector<BasisElement>> basis;
    struct Vec {
        int block, k;
    };
    std::map<int, std::vector<Vec>> where;
    int total = 0;
    int id = 0;
    while (total < max_total) {
        const int len = 1 + static_cast<int>(rng() % p);
        if (total + len > max_total) break;
        const int shift = static_cast<int>(rng() % 4);
        const int parity = static_cast<int>(rng() % 2);
        out.blocks.push_back({shift, len, parity, 1});
        for (int k = 0; k < len; ++k) {
            const int deg = shift + k * alpha;
            basis[deg].push_back({"b" + std::to_string(id) + "_" + std::to_string(k), deg, parity});
            where[deg].push_back({static_cast<int>(out.blocks.size()) - 1, k});
        }
        total += len;
        ++id;
        if (rng() % 5 == 0) break;
    }
    PComplex& c = out.complex;
    c.p = p;
    c.alpha = alpha;
    for (auto& [deg, b] : basis) c.terms[deg] = SuperSpace{b, false};
    std::map<int, Matrix> change, change_inv;
    for (auto& [deg, t] : c.terms) {
        Matrix pm = Matrix::identity(t.dim(), p);
        const auto ev = parity_indices(t, 0), od = parity_indices(t, 1);
        for (const auto* idx : {&ev, &od}) {
            Matrix blk = oracle::random_invertible(rng, static_cast<int>(idx->size()), p);
            for (size_t a = 0; a < idx->size(); ++a)
                for (size_t b = 0; b < idx->size(); ++b) pm.set((*idx)[a], (*idx)[b], blk.at(static_cast<int>(a), static_cast<int>(b)));
        }
        change[deg] = pm;
        change_inv[deg] = invert(pm);
    }
    for (auto& [deg, t] : c.terms) {
        const int next = deg + alpha;
        if (!c.terms.count(next)) continue;
        Matrix d(c.dim(next), t.dim(), p);
        for (int j = 0; j < t.dim(); ++j) {
            const Vec v = where[deg][j];
            if (v.k + 1 >= out.blocks[v.block].length) continue;
            for (int i = 0; i < c.dim(next); ++i)
                if (where[next][i].block == v.block && where[next][i].k == v.k + 1) d.set(i, j, 1);
        }
        c.diffs[deg] = SparseMatrix::from_dense(matmul(change[next], matmul(d, change_inv[deg])));
    }
    std::sort(out.blocks.begin(), out.blocks.end());
    std::vector<CyclicBlock> merged;
    for (auto b : out.blocks) {
        if (!merged.empty() && merged.back().shift == b.shift && merged.back().length == b.length && merged.back().parity == b.parity)
            ++merged.back().multiplicity;
        else merged.push_back(b);
    }
    out.blocks = merged;
    return out;
}

// H_[s] of a direct sum of cyclic blocks: b_k survives iff L - s <= k < min(L, p - s).
inline CohomologyTable planted_cohomology(const Planted& pl) {
    CohomologyTable t;
    const PComplex& c = pl.complex;
    t.p = c.p;
    for (int s = 1; s < c.p; ++s) {
        for (const auto& [i, term] : c.terms) t.dims[{s, i}] = {0, 0};
        for (const auto& b : pl.blocks)
            for (int k = std::max(0, b.length - s); k < std::min(b.length, c.p - s); ++k) {
                auto& cell = t.dims[{s, b.shift + k * c.alpha}];
                (b.parity ? cell.second : cell.first) += b.multiplicity;
            }
    }
    return t;
}

// Jordan type of d on the total space, per parity, from ranks of powers of the full matrix.
inline std::map<std::pair<int, int>, int> ungraded_jordan_type(const PComplex& c) {
    std::map<int, int> offset;
    int n = 0;
    for (const auto& [i, t] : c.terms) {
        offset[i] = n;
        n += t.dim();
    }
    std::map<std::pair<int, int>, int> out;
    for (int par = 0; par < 2; ++par) {
        std::vector<int> idx;
        Matrix d(n, n, c.p);
        for (const auto& [i, t] : c.terms) {
            for (int x = 0; x < t.dim(); ++x)
                if (t.parity(x) == par) idx.push_back(offset[i] + x);
            if (!c.terms.count(i + c.alpha)) continue;
            SparseMatrix m = c.diff(i);
            for (int j = 0; j < m.cols(); ++j)
                for (const auto& e : m.column(j)) d.set(offset[i + c.alpha] + e.row, offset[i] + j, e.value);
        }
        Matrix dp = d.submatrix(idx, idx);
        std::vector<int> r(static_cast<size_t>(c.p + 2), 0);
        Matrix pw = Matrix::identity(dp.rows(), c.p);
        for (int m = 0; m <= c.p + 1; ++m) {
            r[m] = rank(pw);
            pw = matmul(dp, pw);
        }
        for (int j = 1; j <= c.p; ++j) {
            const int cnt = r[j - 1] - 2 * r[j] + r[j + 1];
            if (cnt) out[{j, par}] = cnt;
        }
    }
    return out;
}

inline PowerCombination unit_combination(int dim) { return {{Exps(static_cast<size_t>(dim), 0), 1}}; }

// phi_d(x y) = sum_l phi_l(x) phi_{d-l}(y) on S(Sh_1 (x) U).
inline PropertyResult leibniz_rule(unsigned seed = 36) {
    std::mt19937 rng(seed);
    PropertyResult res{"phi_d Leibniz rule", 0, 0, {}};
    for (int trial = 0; trial < 220; ++trial) {
        const int p = trial % 2 ? 3 : 5;
        const SuperSpace sh = build_Sh(p, 1);
        const SuperSpace u = trial % 3 == 0 ? k_space(1, 1) : (trial % 3 == 1 ? k_space(0, 1) : k_space(1, 0));
        const SuperSpace wu = tensor(sh, u);
        const LinearMapSS rho0 = rho(p, 1, 0);
        const int a = 1 + static_cast<int>(rng() % 2), b = 1 + static_cast<int>(rng() % 2);
        const int d = static_cast<int>(rng() % (a + b + 1));
        const auto ba = power_basis(PowerKind::Sym, a, wu), bb = power_basis(PowerKind::Sym, b, wu);
        if (ba.empty() || bb.empty()) continue;
        const Exps x = ba[rng() % ba.size()], y = bb[rng() % bb.size()];
        auto act = [&](int dd, int n, const Exps& m) { return SymAction(tensor_with_identity(phi_d(rho0, dd, n, p), u)).apply(m); };
        PowerCombination lhs;
        for (const auto& [e, c] : power_product(PowerKind::Sym, x, y, wu, p)) add_into(lhs, act(d, a + b, e), Fp(p), c);
        PowerCombination rhs;
        for (int l = 0; l <= d; ++l) {
            if (l > a || d - l > b) continue;
            add_into(rhs, power_product(PowerKind::Sym, act(l, a, x), act(d - l, b, y), wu, p), Fp(p));
        }
        res.check(lhs == rhs, "p=" + std::to_string(p) + " trial " + std::to_string(trial));
        ++res.cases;
    }
    return res;
}

// phi_d(x^p) = phi_{d/p}(x)^p when p | d, else 0, for even x.
inline PropertyResult pth_power_rule(unsigned seed = 37) {
    std::mt19937 rng(seed);
    PropertyResult res{"phi_d p-power rule", 0, 0, {}};
    for (int trial = 0; trial < 200; ++trial) {
        const int p = 3;
        const SuperSpace sh = build_Sh(p, 1);
        const SuperSpace u = trial % 2 ? k_space(1, 0) : k_space(1, 1);
        const SuperSpace wu = tensor(sh, u);
        const LinearMapSS rho0 = rho(p, 1, 0);
        PowerCombination x;
        for (int i = 0; i < wu.dim(); ++i) {
            Exps e(static_cast<size_t>(wu.dim()), 0);
            e[i] = 1;
            if (wu.parity(i) == 0 && rng() % 2) add_term(x, e, 1 + static_cast<int>(rng() % 2), Fp(p));
        }
        if (x.empty()) {
            Exps e(static_cast<size_t>(wu.dim()), 0);
            e[0] = 1;
            x[e] = 1;
        }
        PowerCombination xp = unit_combination(wu.dim());
        for (int k = 0; k < p; ++k) xp = power_product(PowerKind::Sym, xp, x, wu, p);
        const int d = static_cast<int>(rng() % (p + 1));
        auto act = [&](int dd, int n, const PowerCombination& m) {
            SymAction s(tensor_with_identity(phi_d(rho0, dd, n, p), u));
            PowerCombination out;
            for (const auto& [e, c] : m) add_into(out, s.apply(e), Fp(p), c);
            return out;
        };
        PowerCombination lhs = act(d, p, xp);
        PowerCombination rhs;
        if (d % p == 0) {
            PowerCombination y = act(d / p, 1, x);
            rhs = unit_combination(wu.dim());
            for (int k = 0; k < p; ++k) rhs = power_product(PowerKind::Sym, rhs, y, wu, p);
        }
        res.check(lhs == rhs, "d=" + std::to_string(d) + " trial " + std::to_string(trial));
        ++res.cases;
    }
    return res;
}

// Koszul action vs adjacent transpositions, the right-action law, and sign-twisted projection.
inline PropertyResult sign_laws(unsigned seed = 21) {
    std::mt19937 rng(seed);
    const SuperSpace v = k_space(2, 2);
    PropertyResult res{"symmetric group sign laws", 0, 0, {}};
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 5);
        Word w(static_cast<size_t>(n));
        for (auto& x : w) x = static_cast<int>(rng() % 4);
        std::vector<int> sigma(static_cast<size_t>(n));
        std::iota(sigma.begin(), sigma.end(), 0);
        std::shuffle(sigma.begin(), sigma.end(), rng);
        const SignedTensor t{{w, 1}};
        const std::string tag = "trial " + std::to_string(trial);
        res.check(act_sigma(t, sigma, v, 3) == act_by_transpositions(t, sigma, v, 3), tag + ": transposition route");
        std::vector<int> tau(static_cast<size_t>(n));
        std::iota(tau.begin(), tau.end(), 0);
        std::shuffle(tau.begin(), tau.end(), rng);
        std::vector<int> comp(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) comp[k] = sigma[tau[k]];
        for (bool ch : {false, true})
            res.check(act_sigma(act_sigma(t, sigma, v, 3, ch), tau, v, 3, ch) == act_sigma(t, comp, v, 3, ch), tag + ": right action");
        for (PowerKind k : {PowerKind::Sym, PowerKind::Ext}) {
            auto lhs = project_to_power(k, act_sigma(t, sigma, v, 3), v, 3);
            auto rhs = project_to_power(k, t, v, 3);
            if (twisted(k) && permutation_odd(sigma)) rhs = scaled(rhs, 2, Fp(3));
            res.check(lhs == rhs, tag + ": projection equivariance");
        }
        ++res.cases;
    }
    return res;
}

// Products computed from minimal shuffles agree with any other right-coset representatives.
inline PropertyResult shuffle_independence(unsigned seed = 22) {
    constexpr PowerKind kinds[] = {PowerKind::Sym, PowerKind::Ext, PowerKind::Div, PowerKind::Alt};
    std::mt19937 rng(seed);
    const SuperSpace v = k_space(2, 2);
    PropertyResult res{"shuffle representative independence", 0, 0, {}};
    for (int trial = 0; trial < 240; ++trial) {
        const PowerKind k = kinds[trial % 4];
        const int p = trial % 3 == 0 ? 5 : 3;
        const int a = static_cast<int>(rng() % 4), b = static_cast<int>(rng() % 4);
        const auto basis_a = power_basis(k, a, v), basis_b = power_basis(k, b, v);
        if (basis_a.empty() || basis_b.empty()) continue;
        const Exps x = basis_a[rng() % basis_a.size()], y = basis_b[rng() % basis_b.size()];
        const auto reps = minimal_shuffles(a, b);
        std::vector<std::vector<int>> alt;
        for (const auto& s : reps) {
            std::vector<int> h(static_cast<size_t>(a + b));
            std::iota(h.begin(), h.end(), 0);
            std::shuffle(h.begin(), h.begin() + a, rng);
            std::shuffle(h.begin() + a, h.end(), rng);
            std::vector<int> comp(s.size());
            for (size_t i = 0; i < s.size(); ++i) comp[i] = h[s[i]];
            alt.push_back(comp);
        }
        const std::string tag = kind_name(k) + " trial " + std::to_string(trial);
        if (k == PowerKind::Div || k == PowerKind::Alt) {
            const auto closed = power_product(k, x, y, v, p);
            res.check(shuffle_product(k, x, y, v, p, reps) == closed, tag + ": minimal shuffles");
            res.check(shuffle_product(k, x, y, v, p, alt) == closed, tag + ": other representatives");
        } else {
            res.check(shuffle_product(k, x, y, v, p, reps) == shuffle_product(k, x, y, v, p, alt), tag);
        }
        ++res.cases;
    }
    return res;
}

// Cyclic decomposition recovers the planted blocks and the ungraded Jordan type.
inline PropertyResult cyclic_decomposition(unsigned seed = 41) {
    std::mt19937 rng(seed);
    PropertyResult res{"cyclic decomposition vs planted blocks", 0, 0, {}};
    for (int trial = 0; trial < 250; ++trial) {
        const int p = trial % 3 == 0 ? 5 : 3;
        const int alpha = 1 + trial % 2;
        Planted pl = plant(rng, p, alpha, 12);
        validate(pl.complex);
        const CyclicDecomposition d = decompose_cyclic(pl.complex);
        const std::string tag = "trial " + std::to_string(trial);
        res.check(d.blocks == pl.blocks, tag + ": blocks");
        std::map<std::pair<int, int>, int> lengths;
        for (const auto& b : pl.blocks) lengths[{b.length, b.parity}] += b.multiplicity;
        res.check(ungraded_jordan_type(pl.complex) == lengths, tag + ": Jordan type");
        bool normal = true;
        for (const auto& b : pl.blocks) normal = normal && (b.length == 1 || b.length == p);
        res.check(is_normal(d) == normal, tag + ": normality");
        res.check(cohomology_table(pl.complex).dims == planted_cohomology(pl).dims, tag + ": slice cohomology");
        ++res.cases;
    }
    return res;
}

// H of a contraction matches the prediction from slice cohomology.
inline PropertyResult contraction(unsigned seed = 44) {
    std::mt19937 rng(seed);
    PropertyResult res{"contraction cohomology", 0, 0, {}};
    for (int trial = 0; trial < 250; ++trial) {
        const int p = trial % 3 == 0 ? 5 : 3;
        const int alpha = 1 + trial % 2;
        Planted pl = plant(rng, p, alpha, 12);
        const int s = 1 + static_cast<int>(rng() % (p - 1));
        const int t = static_cast<int>(rng() % ((p - s) * alpha));
        ChainComplex cc = contract(pl.complex, s, t);
        validate(cc);
        const auto want = contract_prediction(pl.complex, planted_cohomology(pl), s, t);
        for (const auto& [l, v] : cohomology(cc)) {
            auto it = want.find(l);
            const ParityDims expect = it == want.end() ? ParityDims{0, 0} : it->second;
            res.check(v == expect, "trial " + std::to_string(trial) + " degree " + std::to_string(l));
        }
        ++res.cases;
    }
    return res;
}

}  // namespace supertroesch::props
