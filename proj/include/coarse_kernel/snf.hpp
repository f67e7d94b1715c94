#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "matrix.hpp"

namespace ck {

/// Smith normal form U * A * V = diag(d_1, ..., d_r), d_1 | d_2 | ... with
/// unimodular transforms (and their inverses, so homology bases convert both
/// ways). All arithmetic in arbitrary precision.
struct SNFResult {
    std::size_t rows = 0, cols = 0;
    std::vector<Int> diag; // nonzero invariant factors
    bool has_transforms = false;
    DenseIntMat u, u_inv, v, v_inv;

    std::size_t rank() const { return diag.size(); }
};

namespace detail {

class DenseSNF {
public:
    DenseSNF(DenseIntMat a, std::size_t rows, std::size_t cols, bool with_transforms)
        : a_(std::move(a)), with_t_(with_transforms), r_(rows), c_(cols) {
        if (a_.size() != r_) a_.resize(r_, std::vector<Int>(c_, 0));
        for (auto& row : a_)
            if (row.size() != c_) row.resize(c_, 0);
        if (with_t_) {
            u_ = dense_identity(r_);
            uin_ = dense_identity(r_);
            v_ = dense_identity(c_);
            vin_ = dense_identity(c_);
        }
    }

    void run() {
        std::size_t t = 0;
        while (t < r_ && t < c_) {
            auto piv = find_min_entry(t);
            if (!piv) break;
            swap_rows(t, piv->first);
            swap_cols(t, piv->second);
            bool stable = false;
            while (!stable) {
                stable = true;
                // Clear column t with row operations.
                for (std::size_t i = t + 1; i < r_; ++i) {
                    if (a_[i][t] == 0) continue;
                    Int q = a_[i][t] / a_[t][t];
                    if (q != 0) row_sub(i, t, q);
                    if (a_[i][t] != 0) {
                        // Remainder is strictly smaller; make it the pivot.
                        swap_rows(t, i);
                        stable = false;
                    }
                }
                if (!stable) continue;
                // Clear row t with column operations.
                for (std::size_t j = t + 1; j < c_; ++j) {
                    if (a_[t][j] == 0) continue;
                    Int q = a_[t][j] / a_[t][t];
                    if (q != 0) col_sub(j, t, q);
                    if (a_[t][j] != 0) {
                        swap_cols(t, j);
                        stable = false;
                    }
                }
                if (!stable) continue;
                // Divisibility: the pivot must divide the whole remainder.
                for (std::size_t i = t + 1; i < r_ && stable; ++i)
                    for (std::size_t j = t + 1; j < c_ && stable; ++j)
                        if (a_[i][j] % a_[t][t] != 0) {
                            row_add(t, i); // pulls the offending row into play
                            stable = false;
                        }
            }
            if (a_[t][t] < 0) negate_row(t);
            ++t;
        }
    }

    SNFResult result() && {
        SNFResult res;
        res.rows = r_;
        res.cols = c_;
        for (std::size_t t = 0; t < std::min(r_, c_); ++t) {
            if (a_[t][t] == 0) break;
            res.diag.push_back(a_[t][t]);
        }
        res.has_transforms = with_t_;
        if (with_t_) {
            res.u = std::move(u_);
            res.u_inv = std::move(uin_);
            res.v = std::move(v_);
            res.v_inv = std::move(vin_);
        }
        return res;
    }

private:
    std::optional<std::pair<std::size_t, std::size_t>> find_min_entry(std::size_t t) const {
        std::optional<std::pair<std::size_t, std::size_t>> best;
        Int best_abs = 0;
        for (std::size_t i = t; i < r_; ++i)
            for (std::size_t j = t; j < c_; ++j) {
                if (a_[i][j] == 0) continue;
                Int mag = boost::multiprecision::abs(a_[i][j]);
                if (!best || mag < best_abs) {
                    best = {i, j};
                    best_abs = mag;
                    if (best_abs == 1) return best;
                }
            }
        return best;
    }

    void row_sub(std::size_t i, std::size_t j, const Int& q) { // R_i -= q R_j
        for (std::size_t col = 0; col < c_; ++col) a_[i][col] -= q * a_[j][col];
        if (with_t_) {
            for (std::size_t col = 0; col < r_; ++col) u_[i][col] -= q * u_[j][col];
            for (std::size_t row = 0; row < r_; ++row) uin_[row][j] += q * uin_[row][i];
        }
    }

    void row_add(std::size_t i, std::size_t j) { // R_i += R_j
        Int minus_one = -1;
        row_sub(i, j, minus_one);
    }

    void col_sub(std::size_t j, std::size_t i, const Int& q) { // C_j -= q C_i
        for (std::size_t row = 0; row < r_; ++row) a_[row][j] -= q * a_[row][i];
        if (with_t_) {
            for (std::size_t row = 0; row < c_; ++row) v_[row][j] -= q * v_[row][i];
            for (std::size_t col = 0; col < c_; ++col) vin_[i][col] += q * vin_[j][col];
        }
    }

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        std::swap(a_[i], a_[j]);
        if (with_t_) {
            std::swap(u_[i], u_[j]);
            for (std::size_t row = 0; row < r_; ++row) std::swap(uin_[row][i], uin_[row][j]);
        }
    }

    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t row = 0; row < r_; ++row) std::swap(a_[row][i], a_[row][j]);
        if (with_t_) {
            for (std::size_t row = 0; row < c_; ++row) std::swap(v_[row][i], v_[row][j]);
            std::swap(vin_[i], vin_[j]);
        }
    }

    void negate_row(std::size_t i) {
        for (std::size_t col = 0; col < c_; ++col) a_[i][col] = -a_[i][col];
        if (with_t_) {
            for (std::size_t col = 0; col < r_; ++col) u_[i][col] = -u_[i][col];
            for (std::size_t row = 0; row < r_; ++row) uin_[row][i] = -uin_[row][i];
        }
    }

    DenseIntMat a_;
    bool with_t_;
    std::size_t r_ = 0, c_ = 0;
    DenseIntMat u_, uin_, v_, vin_;
};

/// Sparse phase: peel off +-1 pivots (Markowitz-lite choice), leaving a
/// dense core. Eliminating a unit pivot splits off an invariant factor 1.
inline std::size_t peel_unit_pivots(const SparseIntMat& a, DenseIntMat& core) {
    std::vector<std::map<std::uint32_t, Int>> cols(a.cols);
    std::vector<std::set<std::uint32_t>> row_cols(a.rows);
    for (std::size_t c = 0; c < a.cols; ++c)
        for (auto& [r, v] : a.col_data[c]) {
            cols[c][r] = v;
            row_cols[r].insert(static_cast<std::uint32_t>(c));
        }
    std::size_t units = 0;
    while (true) {
        // Pick a +-1 entry minimizing fill (row_nnz-1)*(col_nnz-1).
        std::optional<std::pair<std::uint32_t, std::uint32_t>> best;
        unsigned long long best_cost = 0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (cols[c].empty()) continue;
            for (auto& [r, v] : cols[c]) {
                if (v != 1 && v != -1) continue;
                unsigned long long cost = static_cast<unsigned long long>(row_cols[r].size() - 1) *
                                          static_cast<unsigned long long>(cols[c].size() - 1);
                if (!best || cost < best_cost) {
                    best = {r, static_cast<std::uint32_t>(c)};
                    best_cost = cost;
                    if (cost == 0) break;
                }
            }
            if (best && best_cost == 0) break;
        }
        if (!best) break;
        auto [pr, pc] = *best;
        Int pivot = cols[pc][pr]; // +-1
        // Schur update: a[i][j] -= a[i][pc] * a[pr][j] / pivot.
        std::vector<std::pair<std::uint32_t, Int>> col_entries(cols[pc].begin(), cols[pc].end());
        std::vector<std::uint32_t> row_entries(row_cols[pr].begin(), row_cols[pr].end());
        for (std::uint32_t j : row_entries) {
            if (j == pc) continue;
            Int factor = cols[j][pr] / pivot;
            if (factor == 0) continue;
            for (auto& [i, vi] : col_entries) {
                if (i == pr) continue;
                Int& cell = cols[j][i];
                bool was_zero = (cell == 0);
                cell -= vi * factor;
                if (cell == 0) {
                    cols[j].erase(i);
                    row_cols[i].erase(j);
                } else if (was_zero) {
                    row_cols[i].insert(j);
                }
            }
            cols[j].erase(pr);
        }
        for (auto& [i, vi] : col_entries) row_cols[i].erase(pc);
        cols[pc].clear();
        row_cols[pr].clear();
        ++units;
    }
    // Collect the remaining core densely with compacted indices.
    std::map<std::uint32_t, std::size_t> row_index;
    std::map<std::uint32_t, std::size_t> col_index;
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (auto& [r, v] : cols[c]) {
            if (!row_index.count(r)) row_index[r] = row_index.size();
            if (!col_index.count(static_cast<std::uint32_t>(c)))
                col_index[static_cast<std::uint32_t>(c)] = col_index.size();
        }
    core.assign(row_index.size(), std::vector<Int>(col_index.size(), 0));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (auto& [r, v] : cols[c]) core[row_index[r]][col_index[static_cast<std::uint32_t>(c)]] = v;
    return units;
}

} // namespace detail

struct SNFOptions {
    bool with_transforms = false;
    std::size_t dense_guard = 2048;      // max dense dimension for the transform path
    std::size_t core_guard = 1024;       // max dense core after unit peeling
};

inline SNFResult smith_normal_form(const SparseIntMat& a, const SNFOptions& opts = {}) {
    if (opts.with_transforms) {
        if (a.rows > opts.dense_guard || a.cols > opts.dense_guard)
            raise(errc::budget_exceeded, "matrix too large for SNF with transforms (" +
                                             std::to_string(a.rows) + "x" + std::to_string(a.cols) + ")");
        detail::DenseSNF engine(dense_from_sparse(a), a.rows, a.cols, true);
        engine.run();
        auto res = std::move(engine).result();
        res.rows = a.rows;
        res.cols = a.cols;
        return res;
    }
    DenseIntMat core;
    std::size_t units = detail::peel_unit_pivots(a, core);
    if (core.size() > opts.core_guard || (core.size() && core[0].size() > opts.core_guard))
        raise(errc::budget_exceeded, "SNF dense core too large (" + std::to_string(core.size()) + ")");
    const std::size_t core_rows = core.size();
    const std::size_t core_cols = core.empty() ? 0 : core[0].size();
    detail::DenseSNF engine(std::move(core), core_rows, core_cols, false);
    engine.run();
    auto tail = std::move(engine).result();
    SNFResult res;
    res.rows = a.rows;
    res.cols = a.cols;
    res.diag.assign(units, Int(1));
    res.diag.insert(res.diag.end(), tail.diag.begin(), tail.diag.end());
    return res;
}

/// Solve A x = b over the integers through a transform-bearing SNF of A:
/// with U A V = D, x = V y where y_i = (U b)_i / d_i. Returns nullopt when
/// some coordinate fails the divisibility test or lies outside the rank.
inline std::optional<std::vector<Int>> snf_solve(const SNFResult& f, const std::vector<Int>& b) {
    if (!f.has_transforms) raise(errc::internal_error, "snf_solve needs transforms");
    if (b.size() != f.rows) raise(errc::internal_error, "snf_solve shape mismatch");
    std::vector<Int> ub(f.rows, 0);
    for (std::size_t i = 0; i < f.rows; ++i)
        for (std::size_t j = 0; j < f.rows; ++j)
            if (f.u[i][j] != 0 && b[j] != 0) ub[i] += f.u[i][j] * b[j];
    std::vector<Int> y(f.cols, 0);
    for (std::size_t i = 0; i < f.rows; ++i) {
        if (i < f.diag.size()) {
            if (ub[i] % f.diag[i] != 0) return std::nullopt;
            y[i] = ub[i] / f.diag[i];
        } else if (ub[i] != 0) {
            return std::nullopt;
        }
    }
    std::vector<Int> x(f.cols, 0);
    for (std::size_t i = 0; i < f.cols; ++i)
        for (std::size_t j = 0; j < f.cols; ++j)
            if (f.v[i][j] != 0 && y[j] != 0) x[i] += f.v[i][j] * y[j];
    return x;
}

/// Z-basis of ker A as dense columns (c x (c - rank)), from V's tail.
inline DenseIntMat snf_kernel_basis(const SNFResult& f) {
    if (!f.has_transforms) raise(errc::internal_error, "kernel basis needs transforms");
    std::size_t z = f.cols - f.rank();
    DenseIntMat k(f.cols, std::vector<Int>(z, 0));
    for (std::size_t j = 0; j < z; ++j)
        for (std::size_t i = 0; i < f.cols; ++i) k[i][j] = f.v[i][f.rank() + j];
    return k;
}

} // namespace ck
