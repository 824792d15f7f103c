#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exact_linalg.hpp"
#include "gamma_morphisms.hpp"
#include "p_complexes.hpp"
#include "power_functors.hpp"
#include "superspace.hpp"

namespace supertroesch {

inline constexpr long long kDefaultSizeBudget = 20'000;

// Largest graded piece any construction may build; SUPERTROESCH_BUDGET overrides.
inline long long size_budget() {
    if (const char* env = std::getenv("SUPERTROESCH_BUDGET")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
        throw_domain(std::string("SUPERTROESCH_BUDGET must be a positive integer, got '") + env + "'");
    }
    return kDefaultSizeBudget;
}

struct ExpsHash {
    size_t operator()(const Exps& e) const noexcept {
        size_t h = 1469598103934665603ull;
        for (auto x : e) h = (h ^ static_cast<size_t>(x + 1)) * 1099511628211ull;
        return h;
    }
};

inline void check_troesch_parameters(int p, int r) {
    if (p != 3 && p != 5) throw_domain("Troesch complexes are built for p in {3, 5}, got p=" + std::to_string(p));
    if (r < 1 || r > 2) throw_domain("Troesch complexes are built for r in {1, 2}, got r=" + std::to_string(r));
}

// d(r) on S^n(Sh_r): sum over s < r of gamma_{p^s}(rho_{r-1-s}) * gamma_{n-p^s}(1).
inline GammaElement formal_differential(int p, int r, int n) {
    check_troesch_parameters(p, r);
    GammaElement d;
    for (int s = 0; s < r; ++s) {
        GammaElement c = phi_d(rho(p, r, r - 1 - s), static_cast<int>(int_pow(p, s)), n, p);
        if (s == 0) d = c;
        else d.add(c);
    }
    return d;
}

// Number of Sym monomials of degree n in each Z-degree, without enumerating them.
inline std::map<int, long long> sym_piece_dims(int n, const SuperSpace& w) {
    std::vector<std::map<int, long long>> g(static_cast<size_t>(n + 1));
    g[0][0] = 1;
    for (int k = 0; k < w.dim(); ++k) {
        const int cap = w.parity(k) ? 1 : n;
        const int z = w.zdeg(k);
        for (int c = n; c >= 1; --c)
            for (int a = 1; a <= std::min(c, cap); ++a)
                for (const auto& [deg, cnt] : g[c - a]) g[c][deg + a * z] += cnt;
    }
    std::map<int, long long> out;
    for (const auto& [deg, cnt] : g[n])
        if (cnt) out[deg] = cnt;
    return out;
}

struct TroeschComplex {
    int p = 3;
    int r = 1;
    int n = 0;  // polynomial degree
    SuperSpace u;
    SuperSpace w;  // Sh_r (x) U
    std::map<int, std::vector<Exps>> basis;  // per Z-degree, descending lex order
    std::unordered_map<Exps, std::pair<int, int>, ExpsHash> index;  // monomial -> (zdeg, position)
    PComplex complex;

    int alpha() const { return static_cast<int>(int_pow(p, r - 1)); }
};

enum class BuildRoute { Direct, Formal };

namespace detail {

// rho_t (x) 1_U on the basis of Sh_r (x) U: image index or -1.
inline std::vector<int> rho_tensor_images(int p, int r, int t, const SuperSpace& u) {
    const int q = static_cast<int>(int_pow(p, r));
    const int step = static_cast<int>(int_pow(p, t));
    std::vector<int> img(static_cast<size_t>(q * u.dim()), -1);
    for (int i = 0; i < q; ++i)
        if (digit(i, t, p) <= p - 2)
            for (int j = 0; j < u.dim(); ++j) img[i * u.dim() + j] = (i + step) * u.dim() + j;
    return img;
}

// phi_d(f (x) 1) on one Sym monomial, where f sends basis element k to image[k] (or 0 when -1).
inline void convolve_monomial(const Exps& a, const std::vector<int>& image, int d, const SuperSpace& w, const Fp& f,
                              PowerCombination& out) {
    std::vector<int> support;
    for (size_t k = 0; k < a.size(); ++k)
        if (a[k] && image[k] >= 0) support.push_back(static_cast<int>(k));
    std::vector<int> c(a.size(), 0);
    auto emit = [&]() {
        int coeff = 1;
        Exps e = a;
        for (int k : support) {
            if (!c[k]) continue;
            coeff = f.mul(coeff, f.binom(a[k], c[k]));
            e[k] = static_cast<std::uint8_t>(e[k] - c[k]);
            e[image[k]] = static_cast<std::uint8_t>(e[image[k]] + c[k]);
        }
        if (!coeff || !admissible(PowerKind::Sym, e, w)) return;
        // Odd factors keep their positions; the sign is that of re-sorting them.
        Word odd;
        for (size_t k = 0; k < a.size(); ++k)
            if (a[k] && w.parity(static_cast<int>(k))) odd.push_back(c[k] ? image[k] : static_cast<int>(k));
        if (sort_negative(PowerKind::Sym, w, odd)) coeff = f.neg(coeff);
        add_term(out, e, coeff, f);
    };
    auto rec = [&](auto&& self, size_t pos, int remaining) -> void {
        if (pos == support.size()) {
            if (remaining == 0) emit();
            return;
        }
        const int k = support[pos];
        for (int x = std::min<int>(a[k], remaining); x >= 0; --x) {
            c[k] = x;
            self(self, pos + 1, remaining - x);
        }
        c[k] = 0;
    };
    rec(rec, 0, d);
}

}  // namespace detail

// Differential matrices of the single component phi_{p^s}(rho_{r-1-s}) of d(r).
inline std::map<int, std::vector<SparseMatrix::Triplet>> component_triplets(const TroeschComplex& tc, int s) {
    Fp f(tc.p);
    const std::vector<int> img = detail::rho_tensor_images(tc.p, tc.r, tc.r - 1 - s, tc.u);
    const int d = static_cast<int>(int_pow(tc.p, s));
    std::map<int, std::vector<SparseMatrix::Triplet>> out;
    for (const auto& [deg, mons] : tc.basis) {
        auto& trip = out[deg];
        for (size_t j = 0; j < mons.size(); ++j) {
            PowerCombination res;
            detail::convolve_monomial(mons[j], img, d, tc.w, f, res);
            for (const auto& [e, c] : res) {
                auto it = tc.index.find(e);
                if (it == tc.index.end() || it->second.first != deg + tc.alpha()) throw_internal("d(r) left the expected graded piece");
                trip.push_back({it->second.second, static_cast<int>(j), c});
            }
        }
    }
    return out;
}

inline std::map<int, SparseMatrix> component_matrices(const TroeschComplex& tc, int s) {
    std::map<int, SparseMatrix> out;
    for (auto& [deg, trip] : component_triplets(tc, s))
        out[deg] = SparseMatrix::from_triplets(static_cast<int>(tc.basis.count(deg + tc.alpha()) ? tc.basis.at(deg + tc.alpha()).size() : 0),
                                               static_cast<int>(tc.basis.at(deg).size()), tc.p, std::move(trip));
    return out;
}

// B_n(r)(U): terms are the Z-graded pieces of S^n(Sh_r (x) U), d = d(r) (x) 1_U.
inline TroeschComplex build_troesch(int p, int n, int r, const SuperSpace& u, BuildRoute route = BuildRoute::Direct) {
    check_troesch_parameters(p, r);
    if (n < 0) throw_domain("polynomial degree must be >= 0");
    TroeschComplex tc;
    tc.p = p;
    tc.r = r;
    tc.n = n;
    tc.u = u;
    tc.w = tensor(build_Sh(p, r), u);
    const long long budget = size_budget();
    for (const auto& [deg, cnt] : sym_piece_dims(n, tc.w))
        if (cnt > budget)
            throw BudgetError("graded piece of dimension " + std::to_string(cnt) + " in degree " + std::to_string(deg) + " exceeds the size budget " +
                                  std::to_string(budget),
                              cnt, budget);
    for (auto& e : power_basis(PowerKind::Sym, n, tc.w)) tc.basis[monomial_zdeg(e, tc.w)].push_back(std::move(e));
    tc.complex.p = p;
    tc.complex.alpha = tc.alpha();
    for (const auto& [deg, mons] : tc.basis) {
        std::vector<BasisElement> b;
        for (size_t j = 0; j < mons.size(); ++j) {
            tc.index.emplace(mons[j], std::make_pair(deg, static_cast<int>(j)));
            b.push_back({monomial_name(mons[j], tc.w), deg, monomial_parity(mons[j], tc.w)});
        }
        tc.complex.terms[deg] = SuperSpace{std::move(b), false};
    }
    const int a = tc.alpha();
    if (route == BuildRoute::Direct) {
        std::map<int, std::vector<SparseMatrix::Triplet>> all;
        for (int s = 0; s < r; ++s)
            for (auto& [deg, trip] : component_triplets(tc, s)) all[deg].insert(all[deg].end(), trip.begin(), trip.end());
        for (auto& [deg, trip] : all)
            if (tc.complex.dim(deg + a))
                tc.complex.diffs[deg] = SparseMatrix::from_triplets(tc.complex.dim(deg + a), tc.complex.dim(deg), p, std::move(trip));
    } else {
        const GammaElement d = tensor_with_identity(formal_differential(p, r, n), u);
        for (const auto& [deg, mons] : tc.basis) {
            auto it = tc.basis.find(deg + a);
            if (it == tc.basis.end()) continue;
            tc.complex.diffs[deg] = apply_sym_matrix(d, mons, it->second);
        }
    }
    return tc;
}

inline PComplex build_B(int p, int n, int r, const SuperSpace& u) { return build_troesch(p, n, r, u).complex; }

// A(U^(r)) monomial: exponents over the basis of U (even entries any, odd entries 0/1).
struct EtaImage {
    Exps source;   // monomial of S(U_0) (x) Lambda(U_1)
    Exps image;    // Sym monomial over Sh_r (x) U
    int coeff = 1;
    int zdeg = 0;
    int parity = 0;
    std::string label;
};

// eta on S^{m-l}(U_0) (x) Lambda^l(U_1): even u -> (sh_0 u)^{p^r}, odd u -> (sh_0 u)(sh_1 u)...(sh_{p^r-1} u).
inline std::vector<EtaImage> eta_images(int p, int m, int r, const SuperSpace& u) {
    check_troesch_parameters(p, r);
    const int q = static_cast<int>(int_pow(p, r));
    const SuperSpace w = tensor(build_Sh(p, r), u);
    Fp f(p);
    std::vector<EtaImage> out;
    for (const auto& src : power_basis(PowerKind::Sym, m, u)) {
        EtaImage e;
        e.source = src;
        e.image.assign(static_cast<size_t>(w.dim()), 0);
        Word odd;
        std::string label;
        for (int j = 0; j < u.dim(); ++j) {
            if (!src[j]) continue;
            if (!u.parity(j)) {
                if (src[j] * q > 255) throw_domain("eta image degree above 255");
                e.image[j] = static_cast<std::uint8_t>(src[j] * q);
            } else {
                for (int i = 0; i < q; ++i) {
                    e.image[i * u.dim() + j] = 1;
                    odd.push_back(i * u.dim() + j);
                }
                e.zdeg += q * (q - 1) / 2;
                e.parity ^= 1;
            }
            label += (label.empty() ? "" : "·") + u.basis[j].name + "(" + std::to_string(r) + ")" + (src[j] > 1 ? "^" + std::to_string(src[j]) : "");
        }
        e.coeff = f.sign(sort_negative(PowerKind::Sym, w, odd));
        e.label = label.empty() ? "1" : label;
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<int> eta_vector(const TroeschComplex& tc, const EtaImage& e) {
    auto it = tc.index.find(e.image);
    if (it == tc.index.end() || it->second.first != e.zdeg) throw_internal("eta image outside B");
    std::vector<int> v(static_cast<size_t>(tc.complex.dim(e.zdeg)), 0);
    v[it->second.second] = e.coeff;
    return v;
}

// dim S^{m-l}(U_0) (x) Lambda^l(U_1) in degree l * C(p^r, 2), parity l mod 2.
inline std::map<int, ParityDims> theorem_dims(int p, int m, int r, const SuperSpace& u) {
    const long long q = int_pow(p, r);
    const long long e = u.even_dim(), o = u.odd_dim();
    auto binom = [](long long a, long long b) -> long long {
        if (b < 0 || a < b) return 0;
        long long x = 1;
        for (long long i = 1; i <= b; ++i) x = x * (a - b + i) / i;
        return x;
    };
    std::map<int, ParityDims> out;
    for (int l = 0; l <= m; ++l) {
        const long long sym = e == 0 ? (m - l == 0 ? 1 : 0) : binom(e + m - l - 1, m - l);
        const long long dim = sym * binom(o, l);
        if (!dim) continue;
        const int deg = static_cast<int>(l * q * (q - 1) / 2);
        if (l % 2) out[deg].second += static_cast<int>(dim);
        else out[deg].first += static_cast<int>(dim);
    }
    return out;
}

struct TheoremReport {
    int p = 3, r = 1, degree = 0;
    bool normal = true;
    bool vanishing = true;  // only meaningful when p^r does not divide the degree
    bool dims = true;
    bool eta_cocycles = true;
    bool eta_span = true;
    std::string first_failure;
    CohomologyTable table;
    CyclicDecomposition decomposition;
    bool ok() const { return normal && vanishing && dims && eta_cocycles && eta_span; }
    void fail(bool& flag, const std::string& why) {
        if (ok()) first_failure = why;
        flag = false;
    }
};

// Checks the cohomology of B_N(r)(U) for an arbitrary polynomial degree N.
inline TheoremReport verify_theorem_B_degree(int p, int big_n, int r, const SuperSpace& u) {
    TroeschComplex tc = build_troesch(p, big_n, r, u);
    const PComplex& c = tc.complex;
    validate(c);
    TheoremReport rep;
    rep.p = p;
    rep.r = r;
    rep.degree = big_n;
    RankTable rt(c);
    rep.table = cohomology_table(c, rt);
    rep.decomposition = decompose_cyclic(c, rt);
    if (!is_normal(rep.decomposition)) rep.fail(rep.normal, "B is not a normal p-complex");
    const int q = static_cast<int>(int_pow(p, r));
    if (big_n % q) {
        for (const auto& [key, v] : rep.table.dims)
            if (v.first || v.second) {
                rep.fail(rep.vanishing, "nonzero H_[" + std::to_string(key.first) + "] in degree " + std::to_string(key.second));
                break;
            }
        return rep;
    }
    const int m = big_n / q;
    const auto want = theorem_dims(p, m, r, u);
    for (int s = 1; s < p; ++s)
        for (const auto& [i, t] : c.terms) {
            auto it = want.find(i);
            const ParityDims expect = it == want.end() ? ParityDims{0, 0} : it->second;
            if (rep.table.at(s, i) != expect) {
                rep.fail(rep.dims, "H_[" + std::to_string(s) + "] dimension mismatch in degree " + std::to_string(i));
            }
        }
    for (const auto& [i, expect] : want)
        if (!c.dim(i)) rep.fail(rep.dims, "expected cohomology in degree " + std::to_string(i) + " but B has no term there");
    std::map<int, std::vector<std::vector<int>>> reps;
    for (const auto& e : eta_images(p, m, r, u)) {
        // Each image is a single signed monomial, so its differential is one column of d.
        const int pos = tc.index.at(e.image).second;
        if (!c.diff(e.zdeg).column(pos).empty()) rep.fail(rep.eta_cocycles, "eta image " + e.label + " is not a cocycle");
        reps[e.zdeg].push_back(eta_vector(tc, e));
    }
    for (const auto& [i, vecs] : reps) {
        const int dim = c.dim(i);
        Matrix gens = Matrix::from_columns(vecs, dim, p);
        for (int s = 1; s < p; ++s) {
            const int src = i - (p - s) * c.alpha;
            Matrix im = c.dim(src) ? c.diff_power(src, p - s).to_dense() : Matrix(dim, 0, p);
            const ParityDims h = rep.table.at(s, i);
            if (rank(hconcat(im, gens)) - rank(im) != h.first + h.second)
                rep.fail(rep.eta_span, "eta images do not span H_[" + std::to_string(s) + "] in degree " + std::to_string(i));
        }
    }
    return rep;
}

// Cohomology of B_{p^r n}(r)(U).
inline TheoremReport verify_theorem_B(int p, int n, int r, const SuperSpace& u) {
    check_troesch_parameters(p, r);
    return verify_theorem_B_degree(p, n * static_cast<int>(int_pow(p, r)), r, u);
}

// T(S^n, r) = contraction of B_{p^r n}(r) with s = 1, t = 0.
inline ChainComplex build_T(int p, int n, int r, const SuperSpace& u) {
    check_troesch_parameters(p, r);
    return contract(build_B(p, n * static_cast<int>(int_pow(p, r)), r, u), 1, 0);
}

struct CorollaryReport {
    bool dims = true;
    bool bound = true;
    std::string first_failure;
    std::map<int, ParityDims> cohomology;
    bool ok() const { return dims && bound; }
};

// H^{l(p^r-1)}(T) = S^{n-l}(U_0) (x) Lambda^l(U_1), T^l = 0 above 2n(p^r-1).
inline CorollaryReport verify_corollary_T(int p, int n, int r, const SuperSpace& u) {
    const ChainComplex t = build_T(p, n, r, u);
    validate(t);
    CorollaryReport rep;
    rep.cohomology = cohomology(t);
    const int q = static_cast<int>(int_pow(p, r));
    std::map<int, ParityDims> want;
    for (const auto& [deg, d] : theorem_dims(p, n, r, u)) want[deg / (q * (q - 1) / 2) * (q - 1)] = d;
    for (const auto& [l, v] : rep.cohomology) {
        auto it = want.find(l);
        const ParityDims expect = it == want.end() ? ParityDims{0, 0} : it->second;
        if (v != expect && rep.ok()) {
            rep.dims = false;
            rep.first_failure = "H^" + std::to_string(l) + "(T) dimension mismatch";
        }
    }
    for (const auto& [l, expect] : want)
        if (!rep.cohomology.count(l) && rep.ok()) {
            rep.dims = false;
            rep.first_failure = "expected H^" + std::to_string(l) + "(T) but T has no term there";
        }
    if (t.max_degree() > 2 * n * (q - 1)) {
        if (rep.ok()) rep.first_failure = "T has a term in degree " + std::to_string(t.max_degree());
        rep.bound = false;
    }
    return rep;
}

// Split of B_n(r) by deg'' = sum of base-p digit 0 of the Sh indices and deg' = zdeg - deg''.
struct Bigrading {
    std::map<int, std::map<std::pair<int, int>, int>> counts;  // zdeg -> (deg', deg'') -> dim
    std::map<int, std::vector<std::pair<int, int>>> bidegree;  // zdeg -> per basis element
    std::map<int, SparseMatrix> d_prime;                        // components rho_t, t >= 1
    std::map<int, SparseMatrix> d_second;                       // (rho_0)_{p^{r-1}}
    bool components_homogeneous = true;
    bool commute = true;
    bool nilpotent = true;
};

inline Bigrading bigrade(const TroeschComplex& tc) {
    if (tc.r < 2) throw_domain("bigrade needs r >= 2");
    Bigrading out;
    const int sh_dim = static_cast<int>(int_pow(tc.p, tc.r));
    for (const auto& [deg, mons] : tc.basis)
        for (const auto& e : mons) {
            int second = 0;
            for (int i = 0; i < sh_dim; ++i)
                for (int j = 0; j < tc.u.dim(); ++j) second += e[i * tc.u.dim() + j] * digit(i, 0, tc.p);
            out.bidegree[deg].push_back({deg - second, second});
            ++out.counts[deg][{deg - second, second}];
        }
    const int a = tc.alpha();
    for (int s = 0; s < tc.r; ++s) {
        // Component s uses rho_{r-1-s}; only s = r-1 moves digit 0.
        auto mats = component_matrices(tc, s);
        for (auto& [deg, m] : mats) {
            for (int j = 0; j < m.cols(); ++j)
                for (const auto& e : m.column(j)) {
                    const auto from = out.bidegree[deg][j], to = out.bidegree[deg + a][e.row];
                    const bool ok = s == tc.r - 1 ? (to.first == from.first && to.second == from.second + a)
                                                  : (to.second == from.second && to.first == from.first + a);
                    if (!ok) out.components_homogeneous = false;
                }
            auto& target = s == tc.r - 1 ? out.d_second : out.d_prime;
            auto it = target.find(deg);
            if (it == target.end()) target.emplace(deg, std::move(m));
            else {
                Matrix sum = it->second.to_dense();
                Matrix add = m.to_dense();
                Fp f(tc.p);
                for (int i = 0; i < sum.rows(); ++i)
                    for (int j = 0; j < sum.cols(); ++j) sum.set(i, j, f.add(sum.at(i, j), add.at(i, j)));
                it->second = SparseMatrix::from_dense(sum);
            }
        }
    }
    auto get = [&](const std::map<int, SparseMatrix>& d, int deg) {
        auto it = d.find(deg);
        return it != d.end() ? it->second : SparseMatrix(tc.complex.dim(deg + a), tc.complex.dim(deg), tc.p);
    };
    for (const auto& [deg, t] : tc.complex.terms) {
        if (!(matmul(get(out.d_prime, deg + a), get(out.d_second, deg)) == matmul(get(out.d_second, deg + a), get(out.d_prime, deg))))
            out.commute = false;
        SparseMatrix p1 = SparseMatrix::identity(t.dim(), tc.p), p2 = p1;
        for (int k = 0; k < tc.p; ++k) {
            p1 = matmul(get(out.d_prime, deg + k * a), p1);
            p2 = matmul(get(out.d_second, deg + k * a), p2);
        }
        if (!p1.is_zero() || !p2.is_zero()) out.nilpotent = false;
    }
    return out;
}

// Comparison of C_n = Lambda^n(w_0..w_{p-1}) with D_n = (k[x]/x^p)^{(x) n}, for 1 <= n < p.
struct OddLineModel {
    int p = 3, n = 1;
    std::map<int, std::vector<std::vector<int>>> d_basis;  // degree -> exponent tuples b
    std::map<int, std::vector<std::vector<int>>> c_basis;  // degree -> increasing index tuples
    std::map<int, Matrix> phi, psi, s, d_d, d_c;           // keyed by source degree
};

inline OddLineModel build_odd_line_model(int p, int n) {
    if (n < 1 || n >= p) throw_domain("odd line model needs 1 <= n < p");
    Fp f(p);
    OddLineModel m;
    m.p = p;
    m.n = n;
    std::vector<int> b(static_cast<size_t>(n), 0);
    for (;;) {
        m.d_basis[std::accumulate(b.begin(), b.end(), 0)].push_back(b);
        if (std::is_sorted(b.begin(), b.end()) && std::adjacent_find(b.begin(), b.end()) == b.end())
            m.c_basis[std::accumulate(b.begin(), b.end(), 0)].push_back(b);
        int k = n - 1;
        while (k >= 0 && b[k] == p - 1) b[k--] = 0;
        if (k < 0) break;
        ++b[k];
    }
    auto find = [](const std::vector<std::vector<int>>& v, const std::vector<int>& x) {
        return static_cast<int>(std::find(v.begin(), v.end(), x) - v.begin());
    };
    std::vector<std::vector<int>> perms;
    std::vector<int> sigma(static_cast<size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    do perms.push_back(sigma);
    while (std::next_permutation(sigma.begin(), sigma.end()));
    const int inv_fact = f.inv(f.factorial(n));
    const int top = n * (p - 1);
    // One extra (empty) degree on top so every map has a target.
    for (int l = 0; l <= top + 1; ++l) {
        const auto& db = m.d_basis[l];
        const auto& cb = m.c_basis[l];
        const auto& db1 = m.d_basis[l + 1];
        const auto& cb1 = m.c_basis[l + 1];
        Matrix phi(static_cast<int>(cb.size()), static_cast<int>(db.size()), p);
        Matrix psi(static_cast<int>(db.size()), static_cast<int>(cb.size()), p);
        Matrix s(static_cast<int>(db.size()), static_cast<int>(db.size()), p);
        Matrix dd(static_cast<int>(db1.size()), static_cast<int>(db.size()), p);
        Matrix dc(static_cast<int>(cb1.size()), static_cast<int>(cb.size()), p);
        for (size_t j = 0; j < db.size(); ++j) {
            std::vector<int> x = db[j];
            // w_{b_1} ... w_{b_n}: zero on repeats, else the sign of sorting.
            if (std::set<int>(x.begin(), x.end()).size() == x.size()) {
                std::vector<int> sorted = x;
                std::sort(sorted.begin(), sorted.end());
                phi.set(find(cb, sorted), static_cast<int>(j), f.sign(permutation_odd(x)));
            }
            for (int i = 0; i < n; ++i) {
                if (x[i] + 1 >= p) continue;
                std::vector<int> y = x;
                ++y[i];
                dd.add_to(find(db1, y), static_cast<int>(j), 1);
            }
            for (const auto& perm : perms) {
                // sigma . x^b has exponent b_{sigma^{-1}(i)} at slot i.
                std::vector<int> y(static_cast<size_t>(n));
                for (int i = 0; i < n; ++i) y[perm[i]] = x[i];
                s.add_to(find(db, y), static_cast<int>(j), f.mul(inv_fact, f.sign(permutation_odd(perm))));
            }
        }
        for (size_t j = 0; j < cb.size(); ++j) {
            psi.set(find(db, cb[j]), static_cast<int>(j), 1);
            // Derivation w_i -> w_{i+1}, w_{p-1} -> 0.
            for (int i = 0; i < n; ++i) {
                std::vector<int> y = cb[j];
                if (y[i] + 1 >= p) continue;
                ++y[i];
                if (std::count(y.begin(), y.end(), y[i]) > 1) continue;
                dc.add_to(find(cb1, y), static_cast<int>(j), 1);
            }
        }
        m.phi[l] = phi;
        m.psi[l] = psi;
        m.s[l] = s;
        m.d_d[l] = dd;
        m.d_c[l] = dc;
    }
    return m;
}

// sigma acting on D_n in one degree.
inline Matrix odd_line_sigma(const OddLineModel& m, int l, const std::vector<int>& perm) {
    Fp f(m.p);
    const auto& db = m.d_basis.at(l);
    Matrix out(static_cast<int>(db.size()), static_cast<int>(db.size()), m.p);
    for (size_t j = 0; j < db.size(); ++j) {
        std::vector<int> y(static_cast<size_t>(m.n));
        for (int i = 0; i < m.n; ++i) y[perm[i]] = db[j][i];
        out.set(static_cast<int>(std::find(db.begin(), db.end(), y) - db.begin()), static_cast<int>(j), f.sign(permutation_odd(perm)));
    }
    return out;
}

}  // namespace supertroesch
