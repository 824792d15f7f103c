#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exact_linalg.hpp"
#include "superspace.hpp"

namespace supertroesch {

// Per-parity dimensions (even, odd).
using ParityDims = std::pair<int, int>;

inline ParityDims operator+(ParityDims a, ParityDims b) { return {a.first + b.first, a.second + b.second}; }

inline ParityDims parity_dims(const SuperSpace& v) { return {v.even_dim(), v.odd_dim()}; }

inline std::vector<int> parity_indices(const SuperSpace& v, int parity) {
    std::vector<int> idx;
    for (int i = 0; i < v.dim(); ++i)
        if (v.parity(i) == parity) idx.push_back(i);
    return idx;
}

// Terms C^i (i >= 0) and even differentials d: C^i -> C^{i+alpha} with d^p = 0.
struct PComplex {
    int p = 3;
    int alpha = 1;
    std::map<int, SuperSpace> terms;
    std::map<int, SparseMatrix> diffs;

    int dim(int i) const {
        auto it = terms.find(i);
        return it == terms.end() ? 0 : it->second.dim();
    }
    const SuperSpace& term(int i) const {
        static const SuperSpace empty;
        auto it = terms.find(i);
        return it == terms.end() ? empty : it->second;
    }
    // d: C^i -> C^{i+alpha}; zero matrix of the right shape when not stored.
    SparseMatrix diff(int i) const {
        auto it = diffs.find(i);
        if (it != diffs.end()) return it->second;
        return SparseMatrix(dim(i + alpha), dim(i), p);
    }
    // d^m: C^i -> C^{i+m*alpha}.
    SparseMatrix diff_power(int i, int m) const {
        SparseMatrix r = SparseMatrix::identity(dim(i), p);
        for (int k = 0; k < m; ++k) r = matmul(diff(i + k * alpha), r);
        return r;
    }
    int min_degree() const { return terms.empty() ? 0 : terms.begin()->first; }
    int max_degree() const { return terms.empty() ? -1 : terms.rbegin()->first; }
    long long total_dim() const {
        long long n = 0;
        for (const auto& [i, t] : terms) n += t.dim();
        return n;
    }
};

// Shapes, parity preservation and d^p = 0.
inline void validate(const PComplex& c) {
    Fp check(c.p);
    (void)check;
    if (c.alpha <= 0) throw_domain("p-complex step alpha must be positive");
    for (const auto& [i, t] : c.terms)
        if (i < 0) throw_domain("p-complex terms live in degrees >= 0");
    for (const auto& [i, m] : c.diffs) {
        if (m.rows() != c.dim(i + c.alpha) || m.cols() != c.dim(i)) throw_shape("p-complex differential", m.rows(), m.cols(), c.dim(i + c.alpha), c.dim(i));
        for (int j = 0; j < m.cols(); ++j)
            for (const auto& e : m.column(j))
                if (c.term(i + c.alpha).parity(e.row) != c.term(i).parity(j)) throw_domain("p-complex differential is not even");
    }
    for (const auto& [i, t] : c.terms)
        if (!c.diff_power(i, c.p).is_zero())
            throw Error(ErrorKind::Verification, "d^p != 0 starting in degree " + std::to_string(i));
}

// rank(d^m restricted to the parity block of C^i), for all degrees and 0 <= m <= p.
class RankTable {
public:
    explicit RankTable(const PComplex& c) : c_(c) {
        for (const auto& [i, t] : c.terms) {
            const auto ev = parity_indices(t, 0), od = parity_indices(t, 1);
            SparseMatrix pw = SparseMatrix::identity(t.dim(), c.p);
            ranks_[{i, 0}] = {static_cast<int>(ev.size()), static_cast<int>(od.size())};
            for (int m = 1; m <= c.p; ++m) {
                pw = matmul(c.diff(i + (m - 1) * c.alpha), pw);
                const SuperSpace& tgt = c.term(i + m * c.alpha);
                const auto tev = parity_indices(tgt, 0), tod = parity_indices(tgt, 1);
                ranks_[{i, m}] = {rank(pw.submatrix(tev, ev)), rank(pw.submatrix(tod, od))};
            }
        }
    }
    ParityDims rank(int i, int m) const {
        auto it = ranks_.find({i, m});
        return it == ranks_.end() ? ParityDims{0, 0} : it->second;
    }

private:
    static int rank(const SparseMatrix& m) { return supertroesch::rank(m); }
    const PComplex& c_;
    std::map<std::pair<int, int>, ParityDims> ranks_;
};

// dims[(s, i)] = dim H_[s]^i per parity.
struct CohomologyTable {
    int p = 3;
    std::map<std::pair<int, int>, ParityDims> dims;

    ParityDims at(int s, int i) const {
        auto it = dims.find({s, i});
        return it == dims.end() ? ParityDims{0, 0} : it->second;
    }
    // Nonzero entries of row s.
    std::map<int, ParityDims> row(int s) const {
        std::map<int, ParityDims> out;
        for (const auto& [k, v] : dims)
            if (k.first == s && (v.first || v.second)) out[k.second] = v;
        return out;
    }
    bool all_zero() const {
        for (const auto& [k, v] : dims)
            if (v.first || v.second) return false;
        return true;
    }
};

inline ParityDims cohomology_at(const PComplex& c, const RankTable& rt, int s, int i) {
    const ParityDims d = rt.rank(i, 0);
    const ParityDims ker_rank = rt.rank(i, s);
    const ParityDims in = rt.rank(i - (c.p - s) * c.alpha, c.p - s);
    return {d.first - ker_rank.first - in.first, d.second - ker_rank.second - in.second};
}

inline CohomologyTable cohomology_table(const PComplex& c, const RankTable& rt) {
    CohomologyTable t;
    t.p = c.p;
    for (int s = 1; s < c.p; ++s)
        for (const auto& [i, term] : c.terms) t.dims[{s, i}] = cohomology_at(c, rt, s, i);
    return t;
}

inline CohomologyTable cohomology_table(const PComplex& c) {
    RankTable rt(c);
    return cohomology_table(c, rt);
}

// Row s of the table: dim ker(d^s on C^i) - rank(d^{p-s} into C^i), by parity.
inline std::map<int, ParityDims> cohomology(const PComplex& c, int s) {
    if (s < 1 || s >= c.p) throw_domain("cohomology needs 1 <= s < p");
    RankTable rt(c);
    std::map<int, ParityDims> out;
    for (const auto& [i, term] : c.terms) out[i] = cohomology_at(c, rt, s, i);
    return out;
}

struct CyclicBlock {
    int shift;
    int length;
    int parity;
    int multiplicity;
    friend bool operator==(const CyclicBlock&, const CyclicBlock&) = default;
    friend auto operator<=>(const CyclicBlock&, const CyclicBlock&) = default;
};

struct CyclicDecomposition {
    int p = 3;
    int alpha = 1;
    std::vector<CyclicBlock> blocks;  // sorted by (shift, length, parity)
};

// N(i,j) = r_{j-1}(i) - r_j(i) - r_j(i-alpha) + r_{j+1}(i-alpha), per parity.
inline CyclicDecomposition decompose_cyclic(const PComplex& c, const RankTable& rt) {
    CyclicDecomposition out{c.p, c.alpha, {}};
    for (const auto& [i, t] : c.terms) {
        if (rt.rank(i, c.p).first || rt.rank(i, c.p).second) throw Error(ErrorKind::Verification, "d^p != 0 starting in degree " + std::to_string(i));
        for (int j = 1; j <= c.p; ++j) {
            auto r = [&](int deg, int m, int par) {
                if (m > c.p) return 0;
                const ParityDims v = rt.rank(deg, m);
                return par ? v.second : v.first;
            };
            for (int par = 0; par < 2; ++par) {
                const int n = r(i, j - 1, par) - r(i, j, par) - r(i - c.alpha, j, par) + r(i - c.alpha, j + 1, par);
                if (n < 0) throw_internal("negative cyclic block multiplicity");
                if (n > 0) out.blocks.push_back({i, j, par, n});
            }
        }
    }
    std::sort(out.blocks.begin(), out.blocks.end());
    return out;
}

inline CyclicDecomposition decompose_cyclic(const PComplex& c) {
    RankTable rt(c);
    return decompose_cyclic(c, rt);
}

inline bool is_normal(const CyclicDecomposition& d) {
    for (const auto& b : d.blocks)
        if (b.length >= 2 && b.length <= d.p - 1) return false;
    return true;
}

inline bool is_normal(const PComplex& c) { return is_normal(decompose_cyclic(c)); }

struct ChainComplex {
    int p = 3;
    std::map<int, SuperSpace> terms;
    std::map<int, SparseMatrix> diffs;  // l -> l + 1

    int dim(int l) const {
        auto it = terms.find(l);
        return it == terms.end() ? 0 : it->second.dim();
    }
    const SuperSpace& term(int l) const {
        static const SuperSpace empty;
        auto it = terms.find(l);
        return it == terms.end() ? empty : it->second;
    }
    SparseMatrix diff(int l) const {
        auto it = diffs.find(l);
        if (it != diffs.end()) return it->second;
        return SparseMatrix(dim(l + 1), dim(l), p);
    }
    int max_degree() const { return terms.empty() ? -1 : terms.rbegin()->first; }
};

inline void validate(const ChainComplex& c) {
    for (const auto& [l, m] : c.diffs)
        if (m.rows() != c.dim(l + 1) || m.cols() != c.dim(l)) throw_shape("chain differential", m.rows(), m.cols(), c.dim(l + 1), c.dim(l));
    for (const auto& [l, t] : c.terms)
        if (!matmul(c.diff(l + 1), c.diff(l)).is_zero()) throw Error(ErrorKind::Verification, "d^2 != 0 starting in degree " + std::to_string(l));
}

inline ParityDims block_rank(const SparseMatrix& m, const SuperSpace& src, const SuperSpace& tgt) {
    return {rank(m.submatrix(parity_indices(tgt, 0), parity_indices(src, 0))), rank(m.submatrix(parity_indices(tgt, 1), parity_indices(src, 1)))};
}

// H^l per parity for every degree holding a term.
inline std::map<int, ParityDims> cohomology(const ChainComplex& c) {
    std::map<int, ParityDims> ranks;
    for (const auto& [l, t] : c.terms) ranks[l] = block_rank(c.diff(l), t, c.term(l + 1));
    std::map<int, ParityDims> out;
    for (const auto& [l, t] : c.terms) {
        const ParityDims d = parity_dims(t);
        const ParityDims out_r = ranks[l];
        ParityDims in_r{0, 0};
        if (auto it = ranks.find(l - 1); it != ranks.end()) in_r = it->second;
        out[l] = {d.first - out_r.first - in_r.first, d.second - out_r.second - in_r.second};
    }
    return out;
}

// Degree 2i holds C^{t+p i alpha}, degree 2i+1 holds C^{t+(p i+s) alpha}; d^s then d^{p-s}.
inline ChainComplex contract(const PComplex& c, int s, int t) {
    if (s < 1 || s >= c.p) throw_domain("contract needs 1 <= s < p");
    if (t < 0 || t >= (c.p - s) * c.alpha) throw_domain("contract needs 0 <= t < (p-s)*alpha");
    ChainComplex out;
    out.p = c.p;
    const int top = c.max_degree();
    for (int i = 0;; ++i) {
        const int e = t + c.p * i * c.alpha;
        const int o = t + (c.p * i + s) * c.alpha;
        if (e > top) break;
        if (c.dim(e)) out.terms[2 * i] = c.term(e);
        if (c.dim(o)) out.terms[2 * i + 1] = c.term(o);
        if (c.dim(e) && c.dim(o)) out.diffs[2 * i] = c.diff_power(e, s);
        const int next = t + c.p * (i + 1) * c.alpha;
        if (c.dim(o) && c.dim(next)) out.diffs[2 * i + 1] = c.diff_power(o, c.p - s);
    }
    return out;
}

// H^{2i}(C_[s,t]) = H_[s]^{t+p i alpha}(C), H^{2i+1}(C_[s,t]) = H_[p-s]^{t+(p i+s) alpha}(C).
inline std::map<int, ParityDims> contract_prediction(const PComplex& c, const CohomologyTable& h, int s, int t) {
    std::map<int, ParityDims> out;
    const int top = c.max_degree();
    for (int i = 0;; ++i) {
        const int e = t + c.p * i * c.alpha;
        const int o = t + (c.p * i + s) * c.alpha;
        if (e > top) break;
        if (c.dim(e)) out[2 * i] = h.at(s, e);
        if (c.dim(o)) out[2 * i + 1] = h.at(c.p - s, o);
    }
    return out;
}

struct TensorIndex {
    // For degree n: list of (i, j, offset) with C^i (x) D^j placed at offset.
    std::map<int, std::vector<std::tuple<int, int, int>>> blocks;
};

inline PComplex tensor_pcomplex(const PComplex& c, const PComplex& d, TensorIndex* index = nullptr) {
    if (c.alpha != d.alpha || c.p != d.p) throw Error(ErrorKind::DimensionMismatch, "tensor_pcomplex: alpha or p mismatch");
    PComplex out;
    out.p = c.p;
    out.alpha = c.alpha;
    TensorIndex idx;
    for (const auto& [i, ci] : c.terms)
        for (const auto& [j, dj] : d.terms) {
            if (ci.dim() == 0 || dj.dim() == 0) continue;
            auto& blocks = idx.blocks[i + j];
            int offset = 0;
            for (auto& [a, b, off] : blocks) offset = std::max(offset, off + c.dim(a) * d.dim(b));
            blocks.emplace_back(i, j, offset);
        }
    for (auto& [n, blocks] : idx.blocks) {
        std::vector<BasisElement> basis;
        for (auto& [i, j, off] : blocks) {
            SuperSpace t = tensor(c.term(i), d.term(j));
            for (auto& b : t.basis) basis.push_back(b);
        }
        out.terms[n] = SuperSpace{std::move(basis), false};
    }
    auto locate = [&](int n, int i, int j) -> int {
        auto it = idx.blocks.find(n);
        if (it == idx.blocks.end()) return -1;
        for (auto& [a, b, off] : it->second)
            if (a == i && b == j) return off;
        return -1;
    };
    for (auto& [n, blocks] : idx.blocks) {
        std::vector<SparseMatrix::Triplet> trip;
        const int target_n = n + c.alpha;
        for (auto& [i, j, off] : blocks) {
            const int dd = d.dim(j);
            // d x (x) y
            if (int to = locate(target_n, i + c.alpha, j); to >= 0) {
                SparseMatrix dc = c.diff(i);
                for (int x = 0; x < c.dim(i); ++x)
                    for (const auto& e : dc.column(x))
                        for (int y = 0; y < dd; ++y) trip.push_back({to + e.row * dd + y, off + x * dd + y, e.value});
            }
            // x (x) d y
            if (int to = locate(target_n, i, j + d.alpha); to >= 0) {
                SparseMatrix ddm = d.diff(j);
                const int dd2 = d.dim(j + d.alpha);
                for (int x = 0; x < c.dim(i); ++x)
                    for (int y = 0; y < dd; ++y)
                        for (const auto& e : ddm.column(y)) trip.push_back({to + x * dd2 + e.row, off + x * dd + y, e.value});
            }
        }
        if (!trip.empty() || out.dim(target_n))
            out.diffs[n] = SparseMatrix::from_triplets(out.dim(target_n), out.dim(n), c.p, std::move(trip));
    }
    if (index) *index = idx;
    return out;
}

// Representatives of H_[1]^i: kernel vectors of d independent modulo im d^{p-1}.
inline std::vector<std::vector<int>> cocycle_representatives(const PComplex& c, int i) {
    std::vector<std::vector<int>> reps;
    const int n = c.dim(i);
    if (n == 0) return reps;
    Matrix ker = kernel_basis(c.diff(i).to_dense());
    const int src = i - (c.p - 1) * c.alpha;
    Matrix im = c.dim(src) ? image_basis(c.diff_power(src, c.p - 1).to_dense()) : Matrix(n, 0, c.p);
    // Keep homogeneous kernel vectors: split each kernel column by parity.
    Matrix acc = im;
    int base = rank(acc);
    for (int par = 0; par < 2; ++par)
        for (int k = 0; k < ker.cols(); ++k) {
            std::vector<int> v = ker.column(k);
            for (int x = 0; x < n; ++x)
                if (c.term(i).parity(x) != par) v[x] = 0;
            Matrix col = Matrix::from_columns({v}, n, c.p);
            Matrix trial = hconcat(acc, col);
            const int r = rank(trial);
            if (r > base) {
                acc = trial;
                base = r;
                reps.push_back(v);
            }
        }
    return reps;
}

struct KunnethReport {
    bool dims_ok = true;
    bool span_ok = true;
    std::string first_failure;
    bool ok() const { return dims_ok && span_ok; }
};

inline KunnethReport kunneth_check(const PComplex& c, const PComplex& d) {
    if (c.alpha != d.alpha) throw Error(ErrorKind::DimensionMismatch, "kunneth_check: alpha mismatch");
    if (!is_normal(c) || !is_normal(d)) throw_domain("kunneth_check needs normal p-complexes");
    KunnethReport rep;
    TensorIndex idx;
    PComplex cd = tensor_pcomplex(c, d, &idx);
    const CohomologyTable hc = cohomology_table(c), hd = cohomology_table(d), hcd = cohomology_table(cd);
    for (int s = 1; s < c.p; ++s)
        for (const auto& [n, t] : cd.terms) {
            ParityDims expect{0, 0};
            for (const auto& [i, ci] : c.terms) {
                const ParityDims a = hc.at(s, i), b = hd.at(s, n - i);
                expect.first += a.first * b.first + a.second * b.second;
                expect.second += a.first * b.second + a.second * b.first;
            }
            if (hcd.at(s, n) != expect && rep.dims_ok) {
                rep.dims_ok = false;
                rep.first_failure = "dimension mismatch in degree " + std::to_string(n) + " for s=" + std::to_string(s);
            }
        }
    for (const auto& [n, blocks] : idx.blocks) {
        const int dim = cd.dim(n);
        std::vector<std::vector<int>> prods;
        for (auto& [i, j, off] : blocks) {
            const int dd = d.dim(j);
            for (const auto& x : cocycle_representatives(c, i))
                for (const auto& y : cocycle_representatives(d, j)) {
                    std::vector<int> v(static_cast<size_t>(dim), 0);
                    for (int a = 0; a < c.dim(i); ++a)
                        for (int b = 0; b < dd; ++b) v[off + a * dd + b] = Fp(c.p).mul(x[a], y[b]);
                    prods.push_back(v);
                }
        }
        Matrix pm = Matrix::from_columns(prods, dim, c.p);
        if (!pm.cols()) pm = Matrix(dim, 0, c.p);
        if (pm.cols() && !matmul(cd.diff(n).to_dense(), pm).is_zero() && rep.span_ok) {
            rep.span_ok = false;
            rep.first_failure = "product of cocycles is not a cocycle in degree " + std::to_string(n);
        }
        const int src = n - (c.p - 1) * c.alpha;
        Matrix im = cd.dim(src) ? cd.diff_power(src, c.p - 1).to_dense() : Matrix(dim, 0, c.p);
        const ParityDims h = hcd.at(1, n);
        if (rank(hconcat(im, pm)) - rank(im) != h.first + h.second && rep.span_ok) {
            rep.span_ok = false;
            rep.first_failure = "products of cocycles do not span cohomology in degree " + std::to_string(n);
        }
    }
    return rep;
}

}  // namespace supertroesch
