#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "numeric.hpp"

namespace ck {

/// Sparse integer matrix in column-major form. Boundary and chain-map
/// entries are signs, so int64 storage never overflows; anything needing
/// arbitrary precision (SNF, homology coordinates) converts to cpp_int.
struct SparseIntMat {
    std::size_t rows = 0, cols = 0;
    std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> col_data;

    SparseIntMat() = default;
    SparseIntMat(std::size_t r, std::size_t c) : rows(r), cols(c), col_data(c) {}

    static SparseIntMat identity(std::size_t n) {
        SparseIntMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.col_data[i].push_back({static_cast<std::uint32_t>(i), 1});
        return m;
    }

    void add_entry(std::size_t r, std::size_t c, std::int64_t v) {
        col_data[c].push_back({static_cast<std::uint32_t>(r), v});
    }

    /// Sorts columns by row, merges duplicates, drops zeros.
    void compress() {
        for (auto& col : col_data) {
            std::sort(col.begin(), col.end(), [](auto& a, auto& b) { return a.first < b.first; });
            std::size_t out = 0;
            for (std::size_t i = 0; i < col.size();) {
                std::uint32_t r = col[i].first;
                std::int64_t sum = 0;
                while (i < col.size() && col[i].first == r) sum += col[i++].second;
                if (sum != 0) col[out++] = {r, sum};
            }
            col.resize(out);
        }
    }

    std::size_t nnz() const {
        std::size_t t = 0;
        for (auto& col : col_data) t += col.size();
        return t;
    }

    bool is_zero() const { return nnz() == 0; }

    SparseIntMat transpose() const {
        SparseIntMat t(cols, rows);
        for (std::size_t c = 0; c < cols; ++c)
            for (auto& [r, v] : col_data[c]) t.col_data[r].push_back({static_cast<std::uint32_t>(c), v});
        t.compress();
        return t;
    }

    /// this (r x k) * rhs (k x c).
    SparseIntMat times(const SparseIntMat& rhs) const {
        if (cols != rhs.rows) raise(errc::internal_error, "matrix product shape mismatch");
        SparseIntMat out(rows, rhs.cols);
        std::map<std::uint32_t, std::int64_t> acc;
        for (std::size_t c = 0; c < rhs.cols; ++c) {
            acc.clear();
            for (auto& [mid, v] : rhs.col_data[c])
                for (auto& [r, w] : col_data[mid]) acc[r] += v * w;
            for (auto& [r, v] : acc)
                if (v != 0) out.col_data[c].push_back({r, v});
        }
        return out;
    }

    bool equal(const SparseIntMat& o) const {
        if (rows != o.rows || cols != o.cols) return false;
        return col_data == o.col_data;
    }
};

/// Sparse integer vector (chain) with arbitrary-precision coefficients.
using SparseZVec = std::vector<std::pair<std::uint32_t, Int>>;

inline SparseZVec zvec_normalize(SparseZVec v) {
    std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.first < b.first; });
    SparseZVec out;
    for (std::size_t i = 0; i < v.size();) {
        std::uint32_t r = v[i].first;
        Int sum = 0;
        while (i < v.size() && v[i].first == r) sum += v[i++].second;
        if (sum != 0) out.push_back({r, sum});
    }
    return out;
}

inline SparseZVec apply_matrix(const SparseIntMat& m, const SparseZVec& x) {
    SparseZVec out;
    for (auto& [c, coeff] : x)
        for (auto& [r, v] : m.col_data[c]) out.push_back({r, coeff * v});
    return zvec_normalize(std::move(out));
}

// ---------------------------------------------------------------------------
// Rank over F_p (persistence-style column reduction)
// ---------------------------------------------------------------------------

namespace fp {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    while (e) {
        if (e & 1) r = mulmod(r, b, p);
        b = mulmod(b, b, p);
        e >>= 1;
    }
    return r;
}

inline std::uint64_t invmod(std::uint64_t a, std::uint64_t p) { return powmod(a % p, p - 2, p); }

constexpr std::uint64_t prime1 = (1ULL << 61) - 1; // Mersenne
constexpr std::uint64_t prime2 = 2147483647ULL;    // 2^31 - 1, Mersenne

} // namespace fp

/// Rank of the matrix over F_p. Works on whichever orientation has fewer
/// columns; reduction pairs each column with the pivot of its lowest row.
inline std::size_t rank_mod_p(const SparseIntMat& m_in, std::uint64_t p) {
    const SparseIntMat* m = &m_in;
    SparseIntMat t;
    if (m_in.cols > m_in.rows) {
        t = m_in.transpose();
        m = &t;
    }
    using Col = std::vector<std::pair<std::uint32_t, std::uint64_t>>;
    std::vector<Col> pivots;
    std::vector<std::int64_t> pivot_of_row(m->rows, -1);
    std::size_t rank = 0;
    Col col, merged;
    for (std::size_t j = 0; j < m->cols; ++j) {
        col.clear();
        for (auto& [r, v] : m->col_data[j]) {
            std::int64_t res = v % static_cast<std::int64_t>(p);
            if (res < 0) res += static_cast<std::int64_t>(p);
            if (res != 0) col.push_back({r, static_cast<std::uint64_t>(res)});
        }
        while (!col.empty()) {
            std::uint32_t low = col.back().first;
            std::int64_t piv = pivot_of_row[low];
            if (piv < 0) {
                pivot_of_row[low] = static_cast<std::int64_t>(pivots.size());
                pivots.push_back(col);
                ++rank;
                break;
            }
            const Col& pc = pivots[static_cast<std::size_t>(piv)];
            // col -= factor * pc, with factor chosen to kill the low entry.
            std::uint64_t factor = fp::mulmod(col.back().second, fp::invmod(pc.back().second, p), p);
            merged.clear();
            std::size_t a = 0, b = 0;
            while (a < col.size() || b < pc.size()) {
                if (b == pc.size() || (a < col.size() && col[a].first < pc[b].first)) {
                    merged.push_back(col[a++]);
                } else if (a == col.size() || pc[b].first < col[a].first) {
                    std::uint64_t sub = p - fp::mulmod(factor, pc[b].second, p);
                    if (sub != p && sub != 0) merged.push_back({pc[b].first, sub % p});
                    ++b;
                } else {
                    std::uint64_t val = (col[a].second + p - fp::mulmod(factor, pc[b].second, p)) % p;
                    if (val != 0) merged.push_back({col[a].first, val});
                    ++a;
                    ++b;
                }
            }
            col.swap(merged);
        }
    }
    return rank;
}

/// Rank over the rationals. Ranks mod p only ever undercount, so two large
/// Mersenne primes agreeing is taken as exact; on the rare disagreement the
/// larger value is the sharper lower bound and is returned.
inline std::size_t rank_exact(const SparseIntMat& m) {
    std::size_t r1 = rank_mod_p(m, fp::prime1);
    if (m.nnz() == 0) return 0;
    std::size_t r2 = rank_mod_p(m, fp::prime2);
    return std::max(r1, r2);
}

/// rank of [[G, 0], [F, D]]; see rank_of_induced_map for the use.
inline SparseIntMat block_matrix(const SparseIntMat& g, const SparseIntMat& f, const SparseIntMat& d) {
    if (g.cols != f.cols) raise(errc::internal_error, "block matrix shape mismatch");
    SparseIntMat out(g.rows + f.rows, g.cols + d.cols);
    for (std::size_t c = 0; c < g.cols; ++c) {
        for (auto& [r, v] : g.col_data[c]) out.col_data[c].push_back({r, v});
        for (auto& [r, v] : f.col_data[c])
            out.col_data[c].push_back({static_cast<std::uint32_t>(g.rows + r), v});
    }
    for (std::size_t c = 0; c < d.cols; ++c)
        for (auto& [r, v] : d.col_data[c])
            out.col_data[g.cols + c].push_back({static_cast<std::uint32_t>(g.rows + r), v});
    return out;
}

/// Rank over Q of the map induced on degree-k homology by a chain map F,
/// where G is the source's boundary out of degree k and D the target's
/// boundary into degree k:
///   rank H_k(f) = rank [[G,0],[F,D]] - rank G - rank D.
/// (The block matrix sends (z, w) to (Gz, Fz + Dw); its rank splits as
/// rank G plus dim(F ker G + im D).)
inline std::size_t rank_of_induced_map(const SparseIntMat& g, const SparseIntMat& f, const SparseIntMat& d) {
    std::size_t block = rank_exact(block_matrix(g, f, d));
    std::size_t rg = rank_exact(g);
    std::size_t rd = rank_exact(d);
    std::size_t ker_quota = rg + rd;
    if (block < ker_quota) raise(errc::internal_error, "block rank below component ranks");
    return block - ker_quota;
}

inline bool solvable_mod_p(const SparseIntMat& a, const SparseZVec& b, std::uint64_t p) {
    SparseIntMat aug(a.rows, a.cols + 1);
    aug.col_data = a.col_data;
    aug.col_data.emplace_back();
    bool nonzero = false;
    for (auto& [r, v] : b) {
        Int red = v % Int(p);
        if (red < 0) red += Int(p);
        if (red != 0) {
            aug.col_data[a.cols].push_back({r, static_cast<std::int64_t>(red)});
            nonzero = true;
        }
    }
    if (!nonzero) return true;
    // The augmented column is last, so reduction hits it after all of A.
    return rank_mod_p(aug, p) == rank_mod_p(a, p);
}

/// Is b in the column span of A over Q? (two-prime check)
inline bool solvable_over_q(const SparseIntMat& a, const SparseZVec& b) {
    return solvable_mod_p(a, b, fp::prime1) && solvable_mod_p(a, b, fp::prime2);
}

// ---------------------------------------------------------------------------
// Dense arbitrary-precision matrices (SNF transforms, induced maps)
// ---------------------------------------------------------------------------

using DenseIntMat = std::vector<std::vector<Int>>;

inline DenseIntMat dense_identity(std::size_t n) {
    DenseIntMat m(n, std::vector<Int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline DenseIntMat dense_from_sparse(const SparseIntMat& s) {
    DenseIntMat m(s.rows, std::vector<Int>(s.cols, 0));
    for (std::size_t c = 0; c < s.cols; ++c)
        for (auto& [r, v] : s.col_data[c]) m[r][c] = v;
    return m;
}

inline DenseIntMat dense_mul(const DenseIntMat& a, const DenseIntMat& b) {
    if (a.empty() || b.empty()) return {};
    std::size_t n = a.size(), k = b.size(), c = b[0].size();
    DenseIntMat out(n, std::vector<Int>(c, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (std::size_t j = 0; j < c; ++j)
                if (b[t][j] != 0) out[i][j] += a[i][t] * b[t][j];
        }
    return out;
}

inline bool dense_is_identity(const DenseIntMat& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            if (a[i][j] != Int(i == j ? 1 : 0)) return false;
    return true;
}

/// Exact rank of a small dense rational matrix by Gaussian elimination.
inline std::size_t dense_rank_q(DenseIntMat m) {
    std::size_t rank = 0;
    if (m.empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    std::vector<std::vector<Rat>> a(rows, std::vector<Rat>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = Rat(m[i][j]);
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t piv = row;
        while (piv < rows && a[piv][col] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[row]);
        for (std::size_t i = row + 1; i < rows; ++i) {
            if (a[i][col] == 0) continue;
            Rat f = a[i][col] / a[row][col];
            for (std::size_t j = col; j < cols; ++j) a[i][j] -= f * a[row][j];
        }
        ++row;
        ++rank;
    }
    return rank;
}

} // namespace ck
