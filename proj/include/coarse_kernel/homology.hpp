#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "snf.hpp"

namespace ck {

inline SNFResult smith_normal_form_dense(DenseIntMat a, std::size_t rows, std::size_t cols,
                                         bool with_transforms) {
    detail::DenseSNF engine(std::move(a), rows, cols, with_transforms);
    engine.run();
    auto res = std::move(engine).result();
    res.rows = rows;
    res.cols = cols;
    return res;
}

/// Finitely generated abelian group in a fixed chain basis: free rank,
/// torsion orders, and (when built with generators) the machinery to
/// express any cycle in homology coordinates.
struct HomologyGroup {
    int degree = 0;
    long long betti = 0;
    std::vector<Int> torsion; // invariant factors > 1

    struct Internals {
        SparseIntMat dk;        // boundary out of degree k
        SparseIntMat dk1;       // boundary into degree k
        DenseIntMat kernel;     // chain_dim x z, Z-basis of ker dk
        SNFResult kernel_snf;   // for solving kernel * x = chain
        SNFResult a_snf;        // of the image-in-kernel-coordinates matrix
        std::size_t z = 0;      // kernel rank
    };
    std::shared_ptr<const Internals> internals;
    std::vector<SparseZVec> generators; // free generators as chains

    bool has_generators() const { return internals != nullptr; }

    struct Coords {
        std::vector<Int> free_part;
        std::vector<Int> torsion_part; // reduced mod the matching order
    };

    /// Homology coordinates of a cycle (raises bad_class for non-cycles).
    Coords coords_of_cycle(const SparseZVec& chain) const {
        if (!internals) raise(errc::internal_error, "homology group lacks generator machinery");
        const auto& in = *internals;
        std::vector<Int> b(in.kernel.size(), 0);
        for (auto& [r, v] : chain) {
            if (r >= b.size()) raise(errc::bad_class, "chain coordinate out of range");
            b[r] += v;
        }
        auto x = snf_solve(in.kernel_snf, b);
        if (!x) raise(errc::bad_class, "chain is not a cycle of this group");
        // h = U_A * x in the kernel-coordinate presentation.
        const auto& u = in.a_snf.u;
        std::vector<Int> h(in.z, 0);
        for (std::size_t i = 0; i < in.z; ++i)
            for (std::size_t j = 0; j < in.z; ++j)
                if (u[i][j] != 0 && (*x)[j] != 0) h[i] += u[i][j] * (*x)[j];
        Coords out;
        std::size_t arank = in.a_snf.rank();
        for (std::size_t i = arank; i < in.z; ++i) out.free_part.push_back(h[i]);
        for (std::size_t i = 0; i < arank; ++i) {
            if (in.a_snf.diag[i] > 1) {
                Int m = h[i] % in.a_snf.diag[i];
                if (m < 0) m += in.a_snf.diag[i];
                out.torsion_part.push_back(m);
            }
        }
        return out;
    }

    bool class_is_zero(const SparseZVec& chain) const {
        auto c = coords_of_cycle(chain);
        for (auto& v : c.free_part)
            if (v != 0) return false;
        for (auto& v : c.torsion_part)
            if (v != 0) return false;
        return true;
    }
};

struct HomologyOptions {
    bool with_generators = false;
    std::size_t dense_guard = 2048; // transform-SNF dimension cap
};

/// Integer homology of one degree of a chain complex, given the boundary
/// out of the degree (dk) and into it (dk1). Checks dk * dk1 = 0.
inline HomologyGroup homology_group(const SparseIntMat& dk, const SparseIntMat& dk1,
                                    const HomologyOptions& opts = {}) {
    if (dk.cols != dk1.rows) raise(errc::invalid_complex, "boundary shapes disagree");
    if (!dk.times(dk1).is_zero()) raise(errc::invalid_complex, "boundary squared is nonzero");
    HomologyGroup g;
    if (!opts.with_generators) {
        std::size_t rk = rank_exact(dk);
        auto snf1 = smith_normal_form(dk1);
        g.betti = static_cast<long long>(dk.cols - rk) - static_cast<long long>(snf1.rank());
        for (auto& d : snf1.diag)
            if (d > 1) g.torsion.push_back(d);
        if (g.betti < 0) raise(errc::internal_error, "negative betti rank");
        return g;
    }
    auto in = std::make_shared<HomologyGroup::Internals>();
    in->dk = dk;
    in->dk1 = dk1;
    SNFOptions topts;
    topts.with_transforms = true;
    topts.dense_guard = opts.dense_guard;
    auto snf_k = smith_normal_form(dk, topts);
    in->kernel = snf_kernel_basis(snf_k);
    in->z = in->kernel.empty() ? 0 : in->kernel[0].size();
    // SNF of the kernel matrix itself, to solve kernel * x = chain.
    {
        SparseIntMat km(dk.cols, in->z);
        for (std::size_t i = 0; i < dk.cols; ++i)
            for (std::size_t j = 0; j < in->z; ++j)
                if (in->kernel[i][j] != 0) {
                    if (in->kernel[i][j] > std::numeric_limits<std::int64_t>::max() ||
                        in->kernel[i][j] < std::numeric_limits<std::int64_t>::min())
                        raise(errc::internal_error, "kernel coefficient overflow");
                    km.add_entry(i, j, static_cast<std::int64_t>(in->kernel[i][j]));
                }
        in->kernel_snf = smith_normal_form(km, topts);
    }
    // Express each boundary image in kernel coordinates.
    DenseIntMat a(in->z, std::vector<Int>(dk1.cols, 0));
    for (std::size_t c = 0; c < dk1.cols; ++c) {
        std::vector<Int> b(dk.cols, 0);
        for (auto& [r, v] : dk1.col_data[c]) b[r] = v;
        auto x = snf_solve(in->kernel_snf, b);
        if (!x) raise(errc::invalid_complex, "boundary image is not a cycle");
        for (std::size_t i = 0; i < in->z; ++i) a[i][c] = (*x)[i];
    }
    in->a_snf = smith_normal_form_dense(std::move(a), in->z, dk1.cols, true);
    g.betti = static_cast<long long>(in->z - in->a_snf.rank());
    for (auto& d : in->a_snf.diag)
        if (d > 1) g.torsion.push_back(d);
    // Free generators: kernel * (columns of U_A^{-1} past the rank).
    for (std::size_t j = in->a_snf.rank(); j < in->z; ++j) {
        SparseZVec gen;
        for (std::size_t i = 0; i < in->kernel.size(); ++i) {
            Int sum = 0;
            for (std::size_t t = 0; t < in->z; ++t)
                if (in->kernel[i][t] != 0 && in->a_snf.u_inv[t][j] != 0)
                    sum += in->kernel[i][t] * in->a_snf.u_inv[t][j];
            if (sum != 0) gen.push_back({static_cast<std::uint32_t>(i), sum});
        }
        g.generators.push_back(std::move(gen));
    }
    g.internals = std::move(in);
    return g;
}

/// Betti rank over a field: F_p for prime p, rationals when p == 0.
inline long long betti_rank_field(const SparseIntMat& dk, const SparseIntMat& dk1, std::uint64_t p = 0) {
    if (!dk.times(dk1).is_zero()) raise(errc::invalid_complex, "boundary squared is nonzero");
    std::size_t rk = p ? rank_mod_p(dk, p) : rank_exact(dk);
    std::size_t rk1 = p ? rank_mod_p(dk1, p) : rank_exact(dk1);
    return static_cast<long long>(dk.cols - rk) - static_cast<long long>(rk1);
}

/// Map induced on homology, as an integer matrix between the free parts in
/// the chosen generator bases; torsion images tracked separately.
struct InducedMap {
    const HomologyGroup* source = nullptr;
    const HomologyGroup* target = nullptr;
    DenseIntMat free_matrix; // target.betti x source.betti

    std::size_t rank() const { return free_matrix.empty() ? 0 : dense_rank_q(free_matrix); }
};

inline InducedMap induced_map_on_homology(const SparseIntMat& chain_map, const HomologyGroup& src,
                                          const HomologyGroup& tgt) {
    if (!src.has_generators() || !tgt.has_generators())
        raise(errc::internal_error, "induced map needs generator-bearing groups");
    InducedMap m;
    m.source = &src;
    m.target = &tgt;
    m.free_matrix.assign(tgt.betti, std::vector<Int>(src.betti, 0));
    for (std::size_t j = 0; j < src.generators.size(); ++j) {
        SparseZVec w = apply_matrix(chain_map, src.generators[j]);
        if (!apply_matrix(tgt.internals->dk, w).empty())
            raise(errc::broken_chain_map, "image of a cycle is not a cycle");
        auto coords = tgt.coords_of_cycle(w);
        for (std::size_t i = 0; i < coords.free_part.size(); ++i) m.free_matrix[i][j] = coords.free_part[i];
    }
    return m;
}

inline std::size_t persistent_rank(const InducedMap& m) { return m.rank(); }

} // namespace ck
