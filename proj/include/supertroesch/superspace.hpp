#pragma once

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "exact_linalg.hpp"

namespace supertroesch {

struct BasisElement {
    std::string name;
    int zdeg = 0;
    int parity = 0;  // 0 even, 1 odd

    friend bool operator==(const BasisElement&, const BasisElement&) = default;
};

struct SuperSpace {
    std::vector<BasisElement> basis;
    bool pi_wrapped = false;

    int dim() const noexcept { return static_cast<int>(basis.size()); }
    int parity(int i) const { return basis[i].parity; }
    int zdeg(int i) const { return basis[i].zdeg; }
    int even_dim() const noexcept {
        int n = 0;
        for (const auto& b : basis) n += b.parity == 0;
        return n;
    }
    int odd_dim() const noexcept { return dim() - even_dim(); }

    // Same dimension, parities and zdegs element by element; names are ignored.
    bool same_shape(const SuperSpace& o) const {
        if (dim() != o.dim()) return false;
        for (int i = 0; i < dim(); ++i)
            if (basis[i].zdeg != o.basis[i].zdeg || basis[i].parity != o.basis[i].parity) return false;
        return true;
    }
    friend bool operator==(const SuperSpace&, const SuperSpace&) = default;
};

inline SuperSpace make_space(std::vector<BasisElement> basis) {
    std::set<std::string> names;
    for (auto& b : basis) {
        if (b.parity != 0 && b.parity != 1) throw_domain("parity must be 0 or 1");
        if (!names.insert(b.name).second) throw_domain("duplicate basis name '" + b.name + "'");
    }
    return SuperSpace{std::move(basis), false};
}

// k^{m|n}: m even generators e1..em followed by n odd generators o1..on, all in zdeg 0.
inline SuperSpace k_space(int m, int n) {
    if (m < 0 || n < 0) throw_domain("k^{m|n} needs m, n >= 0");
    std::vector<BasisElement> b;
    for (int i = 1; i <= m; ++i) b.push_back({"e" + std::to_string(i), 0, 0});
    for (int i = 1; i <= n; ++i) b.push_back({"o" + std::to_string(i), 0, 1});
    return make_space(std::move(b));
}

inline long long int_pow(long long base, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// Basis index i * dim(W) + j for v_i (x) w_j.
inline SuperSpace tensor(const SuperSpace& v, const SuperSpace& w) {
    std::vector<BasisElement> b;
    b.reserve(static_cast<size_t>(v.dim()) * w.dim());
    for (const auto& x : v.basis)
        for (const auto& y : w.basis) b.push_back({x.name + "⊗" + y.name, x.zdeg + y.zdeg, (x.parity + y.parity) % 2});
    SuperSpace s{std::move(b), false};
    return s;
}

inline SuperSpace parity_shift(const SuperSpace& v) {
    SuperSpace s = v;
    for (auto& b : s.basis) {
        b.parity ^= 1;
        b.name = "π" + b.name;
    }
    s.pi_wrapped = !v.pi_wrapped;
    return s;
}

inline SuperSpace frobenius_twist_space(const SuperSpace& v, int r, int p) {
    if (r < 0) throw_domain("frobenius twist needs r >= 0");
    if (r == 0) return v;
    SuperSpace s = v;
    const long long scale = int_pow(p, r);
    for (auto& b : s.basis) {
        b.zdeg = static_cast<int>(b.zdeg * scale);
        b.name += "(" + std::to_string(r) + ")";
    }
    return s;
}

inline SuperSpace dual_space(const SuperSpace& v) {
    SuperSpace s = v;
    for (auto& b : s.basis) {
        b.zdeg = -b.zdeg;
        b.name += "*";
    }
    return s;
}

// Matrix unit E(i, j) sends source basis j to target basis i; index i * dim(V) + j.
inline int hom_unit(const SuperSpace& v, int i, int j) { return i * v.dim() + j; }

inline SuperSpace hom_space(const SuperSpace& v, const SuperSpace& w) {
    std::vector<BasisElement> b;
    b.reserve(static_cast<size_t>(v.dim()) * w.dim());
    for (int i = 0; i < w.dim(); ++i)
        for (int j = 0; j < v.dim(); ++j)
            b.push_back({"E(" + w.basis[i].name + "," + v.basis[j].name + ")", w.basis[i].zdeg - v.basis[j].zdeg,
                         (w.basis[i].parity + v.basis[j].parity) % 2});
    return SuperSpace{std::move(b), false};
}

inline SuperSpace build_Sh(int p, int r) {
    if (r < 1) throw_domain("Sh(r) needs r >= 1");
    Fp check(p);
    const int n = static_cast<int>(int_pow(p, r));
    std::vector<BasisElement> b;
    for (int i = 0; i < n; ++i) b.push_back({"sh" + std::to_string(i), i, 0});
    return make_space(std::move(b));
}

inline SuperSpace build_PiSh(int p, int r) { return parity_shift(build_Sh(p, r)); }

struct LinearMapSS {
    SuperSpace source;
    SuperSpace target;
    Matrix matrix;  // dim(target) x dim(source)
    int parity = 0;
    int zshift = 0;

    // Every nonzero entry respects the declared parity and zshift.
    bool homogeneous() const {
        if (matrix.rows() != target.dim() || matrix.cols() != source.dim()) return false;
        for (int i = 0; i < matrix.rows(); ++i)
            for (int j = 0; j < matrix.cols(); ++j) {
                if (!matrix.at(i, j)) continue;
                if ((target.parity(i) + source.parity(j)) % 2 != parity) return false;
                if (target.zdeg(i) - source.zdeg(j) != zshift) return false;
            }
        return true;
    }
};

inline LinearMapSS make_map(SuperSpace source, SuperSpace target, Matrix m, int parity, int zshift) {
    LinearMapSS f{std::move(source), std::move(target), std::move(m), parity, zshift};
    if (f.matrix.rows() != f.target.dim() || f.matrix.cols() != f.source.dim())
        throw_shape("linear map", f.matrix.rows(), f.matrix.cols(), f.target.dim(), f.source.dim());
    if (!f.homogeneous()) throw_domain("linear map is not homogeneous of the declared parity and zshift");
    return f;
}

inline LinearMapSS identity_map(const SuperSpace& v, int p) { return make_map(v, v, Matrix::identity(v.dim(), p), 0, 0); }

inline LinearMapSS compose_maps(const LinearMapSS& f, const LinearMapSS& g) {
    if (!g.target.same_shape(f.source)) throw_shape("compose_maps", f.matrix.rows(), f.matrix.cols(), g.matrix.rows(), g.matrix.cols());
    return LinearMapSS{g.source, f.target, matmul(f.matrix, g.matrix), (f.parity + g.parity) % 2, f.zshift + g.zshift};
}

// Base-p digit s of i.
inline int digit(long long i, int s, int p) { return static_cast<int>((i / int_pow(p, s)) % p); }

// rho_s on Sh_r: sh_i -> sh_{i + p^s} when digit s of i is at most p - 2, else 0.
inline LinearMapSS rho(int p, int r, int s) {
    if (s < 0 || s >= r) throw_domain("rho(r, s) needs 0 <= s < r (r=" + std::to_string(r) + ", s=" + std::to_string(s) + ")");
    SuperSpace sh = build_Sh(p, r);
    const int step = static_cast<int>(int_pow(p, s));
    Matrix m(sh.dim(), sh.dim(), p);
    for (int i = 0; i < sh.dim(); ++i)
        if (digit(i, s, p) <= p - 2) m.set(i + step, i, 1);
    return make_map(sh, sh, std::move(m), 0, step);
}

// Space literals: "k^{m|n}", "Sh(r)", "PiSh(r)".
inline SuperSpace parse_space(const std::string& text, int p) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    auto parse_int = [&](const std::string& t) {
        if (t.empty() || t.size() > 6) throw_domain("bad integer in space literal '" + text + "'");
        for (char c : t)
            if (!std::isdigit(static_cast<unsigned char>(c))) throw_domain("bad integer in space literal '" + text + "'");
        return std::stoi(t);
    };
    if (s.rfind("k^{", 0) == 0 && s.back() == '}') {
        const std::string inner = s.substr(3, s.size() - 4);
        const auto bar = inner.find('|');
        if (bar == std::string::npos) throw_domain("space literal '" + text + "' lacks '|'");
        return k_space(parse_int(inner.substr(0, bar)), parse_int(inner.substr(bar + 1)));
    }
    if (s.rfind("Sh(", 0) == 0 && s.back() == ')') return build_Sh(p, parse_int(s.substr(3, s.size() - 4)));
    if (s.rfind("PiSh(", 0) == 0 && s.back() == ')') return build_PiSh(p, parse_int(s.substr(5, s.size() - 6)));
    throw_domain("unrecognized space literal '" + text + "'");
}

}  // namespace supertroesch
