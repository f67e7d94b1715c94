#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cover.hpp"
#include "matrix.hpp"

namespace ck {

using vertex_id = std::uint32_t;

/// Finite simplicial complex with simplices stored per dimension as
/// strictly sorted vertex tuples in lexicographic order.
class SimplicialComplex {
public:
    SimplicialComplex() = default;
    explicit SimplicialComplex(std::size_t n_vertices) : n_vertices_(n_vertices) {
        levels_.resize(1);
        levels_[0].reserve(n_vertices);
        for (vertex_id v = 0; v < n_vertices; ++v) levels_[0].push_back(v);
    }

    std::size_t vertex_count() const { return n_vertices_; }

    int dimension() const { return static_cast<int>(levels_.size()) - 1; }

    std::size_t simplex_count(int k) const {
        if (k < 0 || k > dimension()) return 0;
        return levels_[k].size() / (k + 1);
    }

    std::size_t total_simplices() const {
        std::size_t t = 0;
        for (int k = 0; k <= dimension(); ++k) t += simplex_count(k);
        return t;
    }

    std::span<const vertex_id> simplex(int k, std::size_t i) const {
        return {levels_[k].data() + i * (k + 1), static_cast<std::size_t>(k + 1)};
    }

    /// Index of a sorted vertex tuple among the k-simplices, if present.
    std::optional<std::size_t> find(int k, std::span<const vertex_id> verts) const {
        if (k < 0 || k > dimension() || verts.size() != static_cast<std::size_t>(k + 1)) return std::nullopt;
        const auto& flat = levels_[k];
        std::size_t lo = 0, hi = flat.size() / (k + 1);
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            const vertex_id* s = flat.data() + mid * (k + 1);
            int cmp = 0;
            for (int t = 0; t <= k; ++t) {
                if (s[t] != verts[t]) {
                    cmp = s[t] < verts[t] ? -1 : 1;
                    break;
                }
            }
            if (cmp < 0)
                lo = mid + 1;
            else if (cmp > 0)
                hi = mid;
            else
                return mid;
        }
        return std::nullopt;
    }

    /// Appends a level-k simplex; tuples must arrive strictly sorted and in
    /// lexicographic order (construction-time invariant, checked).
    void push_simplex(int k, std::span<const vertex_id> verts) {
        if (k != static_cast<int>(levels_.size()) - 1 && k != static_cast<int>(levels_.size()))
            raise(errc::internal_error, "simplices must be pushed level by level");
        if (k == static_cast<int>(levels_.size())) levels_.emplace_back();
        auto& flat = levels_[k];
        for (int t = 0; t + 1 <= k; ++t)
            if (verts[t] >= verts[t + 1]) raise(errc::internal_error, "simplex vertices not strictly sorted");
        if (!flat.empty()) {
            const vertex_id* prev = flat.data() + flat.size() - (k + 1);
            int cmp = 0;
            for (int t = 0; t <= k; ++t)
                if (prev[t] != verts[t]) {
                    cmp = prev[t] < verts[t] ? -1 : 1;
                    break;
                }
            if (cmp >= 0) raise(errc::internal_error, "simplices not pushed in lexicographic order");
        }
        flat.insert(flat.end(), verts.begin(), verts.end());
    }

    /// Face closure and sortedness; exhaustive, for tests and validation.
    void validate_faces() const {
        std::vector<vertex_id> face;
        for (int k = 1; k <= dimension(); ++k) {
            for (std::size_t i = 0; i < simplex_count(k); ++i) {
                auto s = simplex(k, i);
                for (int drop = 0; drop <= k; ++drop) {
                    face.clear();
                    for (int t = 0; t <= k; ++t)
                        if (t != drop) face.push_back(s[t]);
                    if (!find(k - 1, face))
                        raise(errc::invalid_complex, "missing face of a stored simplex");
                }
            }
        }
    }

private:
    std::size_t n_vertices_ = 0;
    std::vector<std::vector<vertex_id>> levels_; // levels_[k]: flat (k+1)-tuples
};

struct NerveOptions {
    std::size_t simplex_budget = 2'000'000; // per complex, all dimensions
};

/// Nerve of an indexed cover, complete up to dim_cap: a (k+1)-tuple of
/// member indices spans a k-simplex iff the members' common intersection is
/// nonempty. Enumeration expands cliques of the intersection graph level by
/// level and keeps the running intersection bitset per simplex.
inline SimplicialComplex nerve(const IndexedCover& cover, int dim_cap, const NerveOptions& opts = {}) {
    if (dim_cap < 0) raise(errc::spec_error, "nerve needs dim_cap >= 0");
    const std::size_t v = cover.size();
    SimplicialComplex cx(v);
    if (dim_cap == 0 || v == 0) return cx;

    // Vertex adjacency of the intersection graph.
    std::vector<boost::dynamic_bitset<>> adj(v, boost::dynamic_bitset<>(v));
    for (std::size_t i = 0; i < v; ++i)
        for (std::size_t j = i + 1; j < v; ++j)
            if (cover.bits[i].intersects(cover.bits[j])) {
                adj[i].set(j);
                adj[j].set(i);
            }

    std::size_t total = v;
    // Per-simplex state for the current level.
    std::vector<boost::dynamic_bitset<>> inter;  // common point intersection
    std::vector<boost::dynamic_bitset<>> cand;   // remaining vertex candidates (> last vertex)
    std::vector<vertex_id> tuples;               // flat tuples of the current level

    // Level 1 seeds.
    {
        std::vector<vertex_id> pair(2);
        for (std::size_t i = 0; i < v; ++i) {
            for (std::size_t j = adj[i].find_next(i); j != boost::dynamic_bitset<>::npos; j = adj[i].find_next(j)) {
                pair[0] = static_cast<vertex_id>(i);
                pair[1] = static_cast<vertex_id>(j);
                cx.push_simplex(1, pair);
                inter.push_back(cover.bits[i] & cover.bits[j]);
                boost::dynamic_bitset<> c = adj[i] & adj[j];
                c >>= 0; // no-op, keeps c sized
                cand.push_back(std::move(c));
                tuples.insert(tuples.end(), pair.begin(), pair.end());
                if (++total > opts.simplex_budget)
                    raise(errc::budget_exceeded, "nerve exceeds simplex budget at dimension 1");
            }
        }
    }

    for (int k = 2; k <= dim_cap; ++k) {
        std::vector<boost::dynamic_bitset<>> next_inter, next_cand;
        std::vector<vertex_id> next_tuples;
        std::vector<vertex_id> tup(k + 1);
        const std::size_t count = inter.size();
        bool any = false;
        for (std::size_t s = 0; s < count; ++s) {
            const vertex_id* base = tuples.data() + s * k;
            const vertex_id last = base[k - 1];
            for (std::size_t w = cand[s].find_next(last); w != boost::dynamic_bitset<>::npos;
                 w = cand[s].find_next(w)) {
                if (!inter[s].intersects(cover.bits[w])) continue;
                for (int t = 0; t < k; ++t) tup[t] = base[t];
                tup[k] = static_cast<vertex_id>(w);
                cx.push_simplex(k, tup);
                any = true;
                next_inter.push_back(inter[s] & cover.bits[w]);
                next_cand.push_back(cand[s] & adj[w]);
                next_tuples.insert(next_tuples.end(), tup.begin(), tup.end());
                if (++total > opts.simplex_budget)
                    raise(errc::budget_exceeded,
                          "nerve exceeds simplex budget at dimension " + std::to_string(k));
            }
        }
        inter = std::move(next_inter);
        cand = std::move(next_cand);
        tuples = std::move(next_tuples);
        if (!any) break;
    }
    return cx;
}

/// Does a vertex set span a simplex of the cover's nerve? Checked directly
/// against the cover (no enumeration), so it works beyond dim_cap.
inline bool spans_simplex(const IndexedCover& cover, std::vector<vertex_id> verts) {
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    if (verts.empty()) return false;
    boost::dynamic_bitset<> common = cover.bits[verts[0]];
    for (std::size_t i = 1; i < verts.size(); ++i) common &= cover.bits[verts[i]];
    return common.any();
}

/// A nerve together with its frontier subcomplex L: the full subcomplex on
/// the vertices whose member meets the frontier set. Relative chains over
/// (N, L) stand in for locally finite chains of the untruncated model.
struct SimplicialPair {
    SimplicialComplex complex;
    std::vector<char> vertex_in_l; // per vertex

    bool in_l(std::span<const vertex_id> verts) const {
        for (vertex_id v : verts)
            if (!vertex_in_l[v]) return false;
        return !verts.empty();
    }

    std::size_t l_vertex_count() const {
        return static_cast<std::size_t>(std::count(vertex_in_l.begin(), vertex_in_l.end(), char(1)));
    }
};

inline SimplicialPair frontier_subcomplex(SimplicialComplex nerve_cx, const IndexedCover& cover,
                                          const std::vector<point_id>& frontier) {
    const FiniteMetricSpace& s = *cover.ambient;
    boost::dynamic_bitset<> f(s.size());
    for (point_id x : frontier) {
        s.check_id(x);
        f.set(x);
    }
    SimplicialPair pair;
    pair.vertex_in_l.assign(cover.size(), 0);
    for (std::size_t m = 0; m < cover.size(); ++m)
        if (cover.bits[m].intersects(f)) pair.vertex_in_l[m] = 1;
    pair.complex = std::move(nerve_cx);
    return pair;
}

/// Relative chain complex of a pair: per degree the free abelian group on
/// simplices outside L, with boundary faces landing in L dropped.
struct RelativeChainComplex {
    const SimplicialPair* pair = nullptr;
    int top_degree = -1;
    std::vector<std::vector<std::int64_t>> kept;     // kept[k]: simplex index -> rel index or -1
    std::vector<std::vector<std::size_t>> basis;     // basis[k]: rel index -> simplex index
    std::vector<SparseIntMat> boundary;              // boundary[k]: C_k -> C_{k-1}

    std::size_t dim(int k) const {
        if (k < 0 || k > top_degree) return 0;
        return basis[k].size();
    }

    const SparseIntMat& d(int k) const {
        static const SparseIntMat empty{};
        if (k < 1 || k > top_degree) return empty;
        return boundary[k];
    }
};

inline RelativeChainComplex relative_chain_complex(const SimplicialPair& pair, int top_degree) {
    const SimplicialComplex& cx = pair.complex;
    RelativeChainComplex rc;
    rc.pair = &pair;
    rc.top_degree = top_degree;
    rc.kept.resize(top_degree + 1);
    rc.basis.resize(top_degree + 1);
    rc.boundary.resize(top_degree + 1);
    for (int k = 0; k <= top_degree; ++k) {
        const std::size_t count = cx.simplex_count(k);
        rc.kept[k].assign(count, -1);
        for (std::size_t i = 0; i < count; ++i) {
            if (!pair.in_l(cx.simplex(k, i))) {
                rc.kept[k][i] = static_cast<std::int64_t>(rc.basis[k].size());
                rc.basis[k].push_back(i);
            }
        }
    }
    std::vector<vertex_id> face;
    for (int k = 1; k <= top_degree; ++k) {
        SparseIntMat m(rc.basis[k - 1].size(), rc.basis[k].size());
        for (std::size_t col = 0; col < rc.basis[k].size(); ++col) {
            auto s = cx.simplex(k, rc.basis[k][col]);
            for (int drop = 0; drop <= k; ++drop) {
                face.clear();
                for (int t = 0; t <= k; ++t)
                    if (t != drop) face.push_back(s[t]);
                auto idx = cx.find(k - 1, face);
                if (!idx) raise(errc::invalid_complex, "boundary face missing from complex");
                std::int64_t rel = rc.kept[k - 1][*idx];
                if (rel < 0) continue; // face lies in L
                m.add_entry(static_cast<std::size_t>(rel), col, (drop % 2 == 0) ? 1 : -1);
            }
        }
        m.compress();
        rc.boundary[k] = std::move(m);
    }
    return rc;
}

/// Simplicial map between complexes, given by a vertex map; validation
/// checks every simplex image spans a target simplex.
struct SimplicialMap {
    const SimplicialComplex* source = nullptr;
    const SimplicialComplex* target = nullptr;
    std::vector<vertex_id> vertex_map;
};

inline SimplicialMap induced_simplicial_map(const RefinementProjection& p, const SimplicialComplex& source,
                                            const SimplicialComplex& target, const SimplicialPair* source_pair = nullptr,
                                            const SimplicialPair* target_pair = nullptr) {
    SimplicialMap m;
    m.source = &source;
    m.target = &target;
    m.vertex_map.assign(p.map.begin(), p.map.end());
    std::vector<vertex_id> image;
    for (int k = 1; k <= source.dimension(); ++k) {
        for (std::size_t i = 0; i < source.simplex_count(k); ++i) {
            auto s = source.simplex(k, i);
            image.clear();
            for (vertex_id v : s) image.push_back(m.vertex_map[v]);
            std::sort(image.begin(), image.end());
            image.erase(std::unique(image.begin(), image.end()), image.end());
            if (!target.find(static_cast<int>(image.size()) - 1, image))
                raise(errc::not_simplicial, "projection image does not span a target simplex");
        }
    }
    if (source_pair && target_pair) {
        for (vertex_id v = 0; v < source.vertex_count(); ++v)
            if (source_pair->vertex_in_l[v] && !target_pair->vertex_in_l[m.vertex_map[v]])
                raise(errc::not_simplicial, "frontier vertex maps outside the target frontier");
    }
    return m;
}

/// Sign of the permutation sorting `image`; 0 if a vertex repeats.
/// `image` is sorted in place.
inline int sort_sign(std::vector<vertex_id>& image) {
    int sign = 1;
    for (std::size_t i = 1; i < image.size(); ++i) {
        for (std::size_t j = i; j > 0 && image[j] < image[j - 1]; --j) {
            std::swap(image[j], image[j - 1]);
            sign = -sign;
        }
    }
    for (std::size_t i = 1; i < image.size(); ++i)
        if (image[i] == image[i - 1]) return 0;
    return sign;
}

/// Chain-map matrices for a simplicial map of pairs: simplex -> signed
/// image simplex, 0 on degenerate images and on images inside the target
/// frontier subcomplex.
inline std::vector<SparseIntMat> chain_map_matrices(const SimplicialMap& m, const RelativeChainComplex& src,
                                                    const RelativeChainComplex& tgt, int top_degree) {
    std::vector<SparseIntMat> out(top_degree + 1);
    std::vector<vertex_id> image;
    for (int k = 0; k <= top_degree; ++k) {
        SparseIntMat f(tgt.dim(k), src.dim(k));
        for (std::size_t col = 0; col < src.basis[k].size(); ++col) {
            auto s = m.source->simplex(k, src.basis[k][col]);
            image.assign(s.begin(), s.end());
            for (auto& v : image) v = m.vertex_map[v];
            int sign = sort_sign(image);
            if (sign == 0) continue;
            auto idx = m.target->find(k, image);
            if (!idx) raise(errc::not_simplicial, "chain map image missing from target complex");
            std::int64_t rel = tgt.kept[k][*idx];
            if (rel < 0) continue; // image lies in the target frontier subcomplex
            f.add_entry(static_cast<std::size_t>(rel), col, sign);
        }
        f.compress();
        out[k] = std::move(f);
    }
    return out;
}

} // namespace ck
