#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace supertroesch {

// Arithmetic in GF(p), p in {3, 5, 7}. Residues are ints in [0, p).
class Fp {
public:
    explicit Fp(int p) : p_(p) {
        if (p != 3 && p != 5 && p != 7) throw_domain("modulus must be one of 3, 5, 7 (got " + std::to_string(p) + ")");
    }
    int p() const noexcept { return p_; }
    int reduce(long long a) const noexcept {
        long long r = a % p_;
        return static_cast<int>(r < 0 ? r + p_ : r);
    }
    int add(int a, int b) const noexcept { int s = a + b; return s >= p_ ? s - p_ : s; }
    int sub(int a, int b) const noexcept { int s = a - b; return s < 0 ? s + p_ : s; }
    int neg(int a) const noexcept { return a == 0 ? 0 : p_ - a; }
    int mul(int a, int b) const noexcept { return (a * b) % p_; }
    int pow(int a, long long e) const noexcept {
        int r = 1, b = reduce(a);
        while (e > 0) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }
    int inv(int a) const {
        if (reduce(a) == 0) throw_domain("inverse of zero in GF(" + std::to_string(p_) + ")");
        return pow(a, p_ - 2);
    }
    int sign(bool negative) const noexcept { return negative ? p_ - 1 : 1; }

    // C(n, k) mod p by Lucas' theorem.
    int binom(long long n, long long k) const noexcept {
        if (k < 0 || n < 0 || k > n) return 0;
        int r = 1;
        while (n > 0 || k > 0) {
            int nd = static_cast<int>(n % p_), kd = static_cast<int>(k % p_);
            if (kd > nd) return 0;
            r = mul(r, small_binom(nd, kd));
            n /= p_;
            k /= p_;
        }
        return r;
    }
    // n! mod p; zero once n >= p.
    int factorial(int n) const noexcept {
        int r = 1;
        for (int i = 2; i <= n; ++i) r = mul(r, reduce(i));
        return r;
    }

private:
    int small_binom(int n, int k) const noexcept {
        long long num = 1, den = 1;
        for (int i = 0; i < k; ++i) {
            num = num * (n - i) % p_;
            den = den * (i + 1) % p_;
        }
        return mul(static_cast<int>(num), inv(static_cast<int>(den)));
    }
    int p_;
};

struct FpScalar {
    int value = 0;
    int modulus = 3;

    FpScalar() = default;
    FpScalar(long long v, int p) : value(Fp(p).reduce(v)), modulus(p) {}

    friend FpScalar operator+(FpScalar a, FpScalar b) { check(a, b); return {a.value + b.value, a.modulus}; }
    friend FpScalar operator-(FpScalar a, FpScalar b) { check(a, b); return {a.value - b.value, a.modulus}; }
    friend FpScalar operator*(FpScalar a, FpScalar b) { check(a, b); return {a.value * b.value, a.modulus}; }
    FpScalar operator-() const { return {-value, modulus}; }
    FpScalar inverse() const { return {Fp(modulus).inv(value), modulus}; }
    friend bool operator==(FpScalar a, FpScalar b) { return a.value == b.value && a.modulus == b.modulus; }

private:
    static void check(FpScalar a, FpScalar b) {
        if (a.modulus != b.modulus) throw Error(ErrorKind::DimensionMismatch, "scalar modulus mismatch");
    }
};

inline std::string shape_string(int rows, int cols) { return std::to_string(rows) + "x" + std::to_string(cols); }

[[noreturn]] inline void throw_shape(const std::string& op, int r1, int c1, int r2, int c2) {
    throw Error(ErrorKind::DimensionMismatch,
                op + ": shape " + shape_string(r1, c1) + " incompatible with " + shape_string(r2, c2));
}

class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, int p) : rows_(rows), cols_(cols), p_(p), data_(static_cast<size_t>(rows) * cols, 0) {
        Fp check(p);
        (void)check;
        if (rows < 0 || cols < 0) throw_domain("negative matrix shape");
    }
    static Matrix identity(int n, int p) {
        Matrix m(n, n, p);
        for (int i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }
    static Matrix from_rows(const std::vector<std::vector<int>>& rows, int p) {
        int r = static_cast<int>(rows.size());
        int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
        Matrix m(r, c, p);
        Fp f(p);
        for (int i = 0; i < r; ++i) {
            if (static_cast<int>(rows[i].size()) != c) throw_shape("from_rows", 1, c, 1, static_cast<int>(rows[i].size()));
            for (int j = 0; j < c; ++j) m.set(i, j, f.reduce(rows[i][j]));
        }
        return m;
    }
    static Matrix from_columns(const std::vector<std::vector<int>>& cols, int rows, int p) {
        Matrix m(rows, static_cast<int>(cols.size()), p);
        for (size_t j = 0; j < cols.size(); ++j) {
            if (static_cast<int>(cols[j].size()) != rows) throw_shape("from_columns", rows, 1, static_cast<int>(cols[j].size()), 1);
            for (int i = 0; i < rows; ++i) m.set(i, static_cast<int>(j), Fp(p).reduce(cols[j][i]));
        }
        return m;
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int p() const noexcept { return p_; }
    int at(int i, int j) const noexcept { return data_[static_cast<size_t>(i) * cols_ + j]; }
    void set(int i, int j, int v) noexcept { data_[static_cast<size_t>(i) * cols_ + j] = static_cast<std::uint8_t>(v); }
    void add_to(int i, int j, int v) noexcept {
        auto& x = data_[static_cast<size_t>(i) * cols_ + j];
        x = static_cast<std::uint8_t>((x + v) % p_);
    }
    const std::uint8_t* row_ptr(int i) const noexcept { return data_.data() + static_cast<size_t>(i) * cols_; }
    std::uint8_t* row_ptr(int i) noexcept { return data_.data() + static_cast<size_t>(i) * cols_; }

    bool is_zero() const noexcept {
        return std::all_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v == 0; });
    }
    std::vector<int> column(int j) const {
        std::vector<int> v(rows_);
        for (int i = 0; i < rows_; ++i) v[i] = at(i, j);
        return v;
    }
    Matrix transpose() const {
        Matrix t(cols_, rows_, p_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t.set(j, i, at(i, j));
        return t;
    }
    Matrix submatrix(const std::vector<int>& row_idx, const std::vector<int>& col_idx) const {
        Matrix s(static_cast<int>(row_idx.size()), static_cast<int>(col_idx.size()), p_);
        for (size_t a = 0; a < row_idx.size(); ++a)
            for (size_t b = 0; b < col_idx.size(); ++b) s.set(static_cast<int>(a), static_cast<int>(b), at(row_idx[a], col_idx[b]));
        return s;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.p_ == b.p_ && a.data_ == b.data_;
    }
    std::string to_string() const {
        std::ostringstream os;
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << at(i, j);
            os << "\n";
        }
        return os.str();
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    int p_ = 3;
    std::vector<std::uint8_t> data_;
};

struct SparseEntry {
    int row;
    std::uint8_t value;
};

// Column-major sparse matrix; each column holds row-sorted nonzero entries.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, int p) : rows_(rows), cols_(cols), p_(p), columns_(static_cast<size_t>(cols)) {
        Fp check(p);
        (void)check;
    }

    struct Triplet {
        int row;
        int col;
        int value;
    };
    static SparseMatrix from_triplets(int rows, int cols, int p, std::vector<Triplet> triplets) {
        SparseMatrix m(rows, cols, p);
        Fp f(p);
        std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
            return a.col != b.col ? a.col < b.col : a.row < b.row;
        });
        for (size_t k = 0; k < triplets.size();) {
            const int r = triplets[k].row, c = triplets[k].col;
            if (r < 0 || r >= rows || c < 0 || c >= cols) throw_shape("from_triplets", rows, cols, r, c);
            int v = 0;
            for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) v = f.add(v, f.reduce(triplets[k].value));
            if (v != 0) m.columns_[c].push_back({r, static_cast<std::uint8_t>(v)});
        }
        return m;
    }
    static SparseMatrix from_dense(const Matrix& d) {
        SparseMatrix m(d.rows(), d.cols(), d.p());
        for (int j = 0; j < d.cols(); ++j)
            for (int i = 0; i < d.rows(); ++i)
                if (int v = d.at(i, j)) m.columns_[j].push_back({i, static_cast<std::uint8_t>(v)});
        return m;
    }
    static SparseMatrix identity(int n, int p) {
        SparseMatrix m(n, n, p);
        for (int i = 0; i < n; ++i) m.columns_[i].push_back({i, 1});
        return m;
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int p() const noexcept { return p_; }
    const std::vector<SparseEntry>& column(int j) const { return columns_[j]; }
    size_t nonzeros() const noexcept {
        size_t n = 0;
        for (const auto& c : columns_) n += c.size();
        return n;
    }
    bool is_zero() const noexcept { return nonzeros() == 0; }
    int at(int i, int j) const {
        const auto& c = columns_[j];
        auto it = std::lower_bound(c.begin(), c.end(), i, [](const SparseEntry& e, int r) { return e.row < r; });
        return it != c.end() && it->row == i ? it->value : 0;
    }
    Matrix to_dense() const {
        Matrix d(rows_, cols_, p_);
        for (int j = 0; j < cols_; ++j)
            for (const auto& e : columns_[j]) d.set(e.row, j, e.value);
        return d;
    }
    SparseMatrix submatrix(const std::vector<int>& row_idx, const std::vector<int>& col_idx) const {
        std::vector<int> new_row(static_cast<size_t>(rows_), -1);
        for (size_t a = 0; a < row_idx.size(); ++a) new_row[row_idx[a]] = static_cast<int>(a);
        SparseMatrix s(static_cast<int>(row_idx.size()), static_cast<int>(col_idx.size()), p_);
        for (size_t b = 0; b < col_idx.size(); ++b) {
            for (const auto& e : columns_[col_idx[b]])
                if (new_row[e.row] >= 0) s.columns_[b].push_back({new_row[e.row], e.value});
            std::sort(s.columns_[b].begin(), s.columns_[b].end(), [](const SparseEntry& x, const SparseEntry& y) { return x.row < y.row; });
        }
        return s;
    }
    friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.p_ != b.p_) return false;
        for (int j = 0; j < a.cols_; ++j) {
            const auto& x = a.columns_[j];
            const auto& y = b.columns_[j];
            if (x.size() != y.size()) return false;
            for (size_t k = 0; k < x.size(); ++k)
                if (x[k].row != y[k].row || x[k].value != y[k].value) return false;
        }
        return true;
    }

private:
    friend SparseMatrix matmul(const SparseMatrix&, const SparseMatrix&);
    int rows_ = 0;
    int cols_ = 0;
    int p_ = 3;
    std::vector<std::vector<SparseEntry>> columns_;
};

inline constexpr int kDenseColumnLimit = 2048;

namespace detail {

struct Echelon {
    Matrix reduced;           // reduced row echelon form
    std::vector<int> pivots;  // pivot column per nonzero row
};

// Row reduction with the first nonzero entry at or below the current row as pivot.
inline Echelon row_reduce(Matrix m, bool full) {
    Fp f(m.p());
    const int rows = m.rows(), cols = m.cols(), p = m.p();
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (m.at(i, c) != 0) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != r) std::swap_ranges(m.row_ptr(piv), m.row_ptr(piv) + cols, m.row_ptr(r));
        std::uint8_t* pr = m.row_ptr(r);
        const int iv = f.inv(pr[c]);
        if (iv != 1)
            for (int j = c; j < cols; ++j) pr[j] = static_cast<std::uint8_t>(pr[j] * iv % p);
        for (int i = full ? 0 : r + 1; i < rows; ++i) {
            if (i == r) continue;
            std::uint8_t* ri = m.row_ptr(i);
            if (ri[c] == 0) continue;
            const int factor = p - ri[c];
            for (int j = c; j < cols; ++j)
                if (pr[j]) ri[j] = static_cast<std::uint8_t>((ri[j] + factor * pr[j]) % p);
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(pivots)};
}

inline int sparse_rank_elimination(const SparseMatrix& a) {
    // Eliminate rows of the transpose: each column of `a` becomes a sparse row.
    Fp f(a.p());
    const int p = a.p();
    std::unordered_map<int, std::vector<std::pair<int, int>>> pivot_rows;  // leading index -> normalized row
    int rank = 0;
    std::vector<std::pair<int, int>> row, tmp;
    for (int j = 0; j < a.cols(); ++j) {
        row.clear();
        for (const auto& e : a.column(j)) row.emplace_back(e.row, e.value);
        while (!row.empty()) {
            auto it = pivot_rows.find(row.front().first);
            if (it == pivot_rows.end()) {
                const int iv = f.inv(row.front().second);
                for (auto& e : row) e.second = f.mul(e.second, iv);
                pivot_rows.emplace(row.front().first, row);
                ++rank;
                break;
            }
            const auto& piv = it->second;
            const int factor = p - row.front().second;
            tmp.clear();
            size_t x = 0, y = 0;
            while (x < row.size() || y < piv.size()) {
                if (y == piv.size() || (x < row.size() && row[x].first < piv[y].first)) {
                    tmp.push_back(row[x++]);
                } else if (x == row.size() || piv[y].first < row[x].first) {
                    tmp.emplace_back(piv[y].first, f.mul(factor, piv[y].second));
                    ++y;
                } else {
                    int v = f.add(row[x].second, f.mul(factor, piv[y].second));
                    if (v) tmp.emplace_back(row[x].first, v);
                    ++x;
                    ++y;
                }
            }
            row.swap(tmp);
        }
    }
    return rank;
}

}  // namespace detail

inline int rank(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    return static_cast<int>(detail::row_reduce(m, false).pivots.size());
}

// Dense elimination below kDenseColumnLimit columns, sparse elimination above.
inline int rank(const SparseMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0 || m.is_zero()) return 0;
    if (m.cols() < kDenseColumnLimit) return rank(m.to_dense());
    return detail::sparse_rank_elimination(m);
}

inline int rank_sparse_path(const SparseMatrix& m) { return detail::sparse_rank_elimination(m); }

// Columns of the result span ker(m); one column per free variable.
inline Matrix kernel_basis(const Matrix& m) {
    const int cols = m.cols();
    auto ech = detail::row_reduce(m, true);
    std::vector<int> is_pivot(static_cast<size_t>(cols), -1);
    for (size_t r = 0; r < ech.pivots.size(); ++r) is_pivot[ech.pivots[r]] = static_cast<int>(r);
    std::vector<int> free_cols;
    for (int c = 0; c < cols; ++c)
        if (is_pivot[c] < 0) free_cols.push_back(c);
    Fp f(m.p());
    Matrix k(cols, static_cast<int>(free_cols.size()), m.p());
    for (size_t t = 0; t < free_cols.size(); ++t) {
        const int fc = free_cols[t];
        k.set(fc, static_cast<int>(t), 1);
        for (size_t r = 0; r < ech.pivots.size(); ++r)
            if (int v = ech.reduced.at(static_cast<int>(r), fc)) k.set(ech.pivots[r], static_cast<int>(t), f.neg(v));
    }
    return k;
}

// Pivot columns of m: an independent spanning set of the column space.
inline Matrix image_basis(const Matrix& m) {
    auto ech = detail::row_reduce(m, false);
    std::vector<int> all_rows(static_cast<size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) all_rows[i] = i;
    return m.submatrix(all_rows, ech.pivots);
}

// Solution with every free variable set to zero, or nullopt when inconsistent.
inline std::optional<std::vector<int>> solve(const Matrix& a, const std::vector<int>& b) {
    if (static_cast<int>(b.size()) != a.rows()) throw_shape("solve", a.rows(), a.cols(), static_cast<int>(b.size()), 1);
    Matrix aug(a.rows(), a.cols() + 1, a.p());
    Fp f(a.p());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) aug.set(i, j, a.at(i, j));
        aug.set(i, a.cols(), f.reduce(b[i]));
    }
    auto ech = detail::row_reduce(aug, true);
    std::vector<int> x(static_cast<size_t>(a.cols()), 0);
    for (size_t r = 0; r < ech.pivots.size(); ++r) {
        if (ech.pivots[r] == a.cols()) return std::nullopt;
        x[ech.pivots[r]] = ech.reduced.at(static_cast<int>(r), a.cols());
    }
    return x;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows() || a.p() != b.p()) throw_shape("matmul", a.rows(), a.cols(), b.rows(), b.cols());
    Matrix c(a.rows(), b.cols(), a.p());
    const int p = a.p();
    std::vector<int> acc(static_cast<size_t>(b.cols()));
    for (int i = 0; i < a.rows(); ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        const std::uint8_t* ar = a.row_ptr(i);
        for (int k = 0; k < a.cols(); ++k) {
            if (!ar[k]) continue;
            const std::uint8_t* br = b.row_ptr(k);
            for (int j = 0; j < b.cols(); ++j) acc[j] += ar[k] * br[j];
            if (k % 64 == 63)
                for (auto& v : acc) v %= p;
        }
        std::uint8_t* cr = c.row_ptr(i);
        for (int j = 0; j < b.cols(); ++j) cr[j] = static_cast<std::uint8_t>(acc[j] % p);
    }
    return c;
}

inline SparseMatrix matmul(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols() != b.rows() || a.p() != b.p()) throw_shape("matmul", a.rows(), a.cols(), b.rows(), b.cols());
    SparseMatrix c(a.rows(), b.cols(), a.p());
    Fp f(a.p());
    std::vector<int> acc(static_cast<size_t>(a.rows()), 0);
    std::vector<int> touched;
    for (int j = 0; j < b.cols(); ++j) {
        touched.clear();
        for (const auto& eb : b.column(j))
            for (const auto& ea : a.column(eb.row)) {
                if (acc[ea.row] == 0) touched.push_back(ea.row);
                acc[ea.row] = f.add(acc[ea.row], f.mul(ea.value, eb.value));
            }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (int r : touched) {
            if (acc[r]) c.columns_[j].push_back({r, static_cast<std::uint8_t>(acc[r])});
            acc[r] = 0;
        }
    }
    return c;
}

inline Matrix matpow(const Matrix& m, int k) {
    if (m.rows() != m.cols()) throw_shape("matpow", m.rows(), m.cols(), m.rows(), m.cols());
    if (k < 0) throw_domain("matpow: negative exponent");
    Matrix r = Matrix::identity(m.rows(), m.p());
    for (int i = 0; i < k; ++i) r = matmul(r, m);
    return r;
}

inline SparseMatrix matpow(const SparseMatrix& m, int k) {
    if (m.rows() != m.cols()) throw_shape("matpow", m.rows(), m.cols(), m.rows(), m.cols());
    if (k < 0) throw_domain("matpow: negative exponent");
    SparseMatrix r = SparseMatrix::identity(m.rows(), m.p());
    for (int i = 0; i < k; ++i) r = matmul(r, m);
    return r;
}

inline Matrix hconcat(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw_shape("hconcat", a.rows(), a.cols(), b.rows(), b.cols());
    Matrix c(a.rows(), a.cols() + b.cols(), a.p());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) c.set(i, j, a.at(i, j));
        for (int j = 0; j < b.cols(); ++j) c.set(i, a.cols() + j, b.at(i, j));
    }
    return c;
}

inline std::vector<int> mat_vec(const Matrix& m, const std::vector<int>& v) {
    if (static_cast<int>(v.size()) != m.cols()) throw_shape("mat_vec", m.rows(), m.cols(), static_cast<int>(v.size()), 1);
    Fp f(m.p());
    std::vector<int> out(static_cast<size_t>(m.rows()), 0);
    for (int i = 0; i < m.rows(); ++i) {
        long long s = 0;
        for (int j = 0; j < m.cols(); ++j) s += m.at(i, j) * v[j];
        out[i] = f.reduce(s);
    }
    return out;
}

}  // namespace supertroesch
