#pragma once

#include <optional>
#include <string>
#include <vector>

#include "homology.hpp"
#include "simplicial.hpp"

namespace ck {

/// One stage of a direct system of (relative) chain complexes, restricted
/// to a single degree: the two boundary matrices around that degree, the
/// cached betti rank, and optionally a generator-bearing homology group.
struct SystemStage {
    Rat scale = Rat(0);
    SparseIntMat dk;   // boundary out of the degree
    SparseIntMat dk1;  // boundary into the degree
    long long betti = 0;
    std::optional<HomologyGroup> group;
    std::optional<vertex_id> cone_vertex; // member covering the whole space
    std::size_t chain_dim = 0;            // dim C_k
    std::vector<std::vector<vertex_id>> basis_simplices; // relative basis, degree k and k+1
};

/// Direct system of homology groups in one degree, carried at chain level:
/// consecutive chain maps generate every composite f^{i,j}, so the
/// functorial identities hold by construction.
class DirectHomologySystem {
public:
    int degree = 0;
    std::vector<SystemStage> stages;
    std::vector<SparseIntMat> steps; // chain map of stage i -> i+1 in the degree

    std::size_t horizon() const { return stages.size(); }

    void check_range(std::size_t i, std::size_t j) const {
        if (i > j || j >= horizon())
            raise(errc::stage_out_of_range,
                  "stage pair (" + std::to_string(i) + ", " + std::to_string(j) + ") outside horizon " +
                      std::to_string(horizon()));
    }

    /// Composite chain map f^{i,j} (identity when i == j).
    SparseIntMat chain_composite(std::size_t i, std::size_t j) const {
        check_range(i, j);
        SparseIntMat acc = SparseIntMat::identity(stages[i].chain_dim);
        for (std::size_t t = i; t < j; ++t) acc = steps[t].times(acc);
        return acc;
    }

    /// rank of H_k(f^{i,j}) over Q.
    long long rank(std::size_t i, std::size_t j) const {
        check_range(i, j);
        if (i == j) return stages[i].betti;
        return static_cast<long long>(
            rank_of_induced_map(stages[i].dk, chain_composite(i, j), stages[j].dk1));
    }

    /// Induced map on homology in the generator bases (needs groups).
    InducedMap induced(std::size_t i, std::size_t j) const {
        check_range(i, j);
        if (!stages[i].group || !stages[j].group)
            raise(errc::budget_exceeded, "homology generators not materialized for these stages");
        return induced_map_on_homology(chain_composite(i, j), *stages[i].group, *stages[j].group);
    }
};

/// Upper-triangular table of persistent ranks r_{i,j} = rank H(f^{i,j}).
struct RankTable {
    std::size_t horizon = 0;
    std::vector<std::vector<long long>> r; // r[i][j - i]

    long long at(std::size_t i, std::size_t j) const { return r[i][j - i]; }
};

inline RankTable persistent_rank_table(const DirectHomologySystem& sys) {
    RankTable t;
    t.horizon = sys.horizon();
    t.r.resize(t.horizon);
    for (std::size_t i = 0; i < t.horizon; ++i) {
        SparseIntMat acc = SparseIntMat::identity(sys.stages[i].chain_dim);
        for (std::size_t j = i; j < t.horizon; ++j) {
            if (j > i) acc = sys.steps[j - 1].times(acc);
            long long v = (i == j) ? sys.stages[i].betti
                                   : static_cast<long long>(rank_of_induced_map(
                                         sys.stages[i].dk, acc, sys.stages[j].dk1));
            t.r[i].push_back(v);
        }
    }
    // Ranks of composites through more maps cannot grow.
    for (std::size_t i = 0; i < t.horizon; ++i)
        for (std::size_t j = i; j + 1 < t.horizon; ++j)
            if (t.at(i, j) < t.at(i, j + 1))
                raise(errc::internal_error, "persistent rank table is not monotone");
    return t;
}

struct StableRank {
    long long rank = 0;
    bool undetermined = true;
    std::optional<std::size_t> stabilization_stage; // earliest start of the stable window
};

/// The last w values of r_{i,J} must agree, and within that window the
/// ranks must already be constant along j; otherwise the verdict is
/// undetermined and the last value is reported.
inline StableRank stable_rank(const RankTable& t, std::size_t w) {
    if (w < 2) raise(errc::spec_error, "stabilization window must be >= 2");
    if (t.horizon < w)
        raise(errc::horizon_too_small, "horizon " + std::to_string(t.horizon) +
                                           " is below the stabilization window " + std::to_string(w));
    const std::size_t je = t.horizon - 1;
    StableRank out;
    long long value = t.at(je, je);
    bool ok = true;
    for (std::size_t i = t.horizon - w; i <= je; ++i) {
        if (t.at(i, je) != value) ok = false;
        for (std::size_t j = i + 1; j <= je; ++j)
            if (t.at(i, j) != value) ok = false;
    }
    out.rank = value;
    out.undetermined = !ok;
    if (ok) {
        std::size_t start = t.horizon - w;
        while (start > 0) {
            bool still = true;
            for (std::size_t j = start - 1; j <= je && still; ++j)
                if (t.at(start - 1, j) != value) still = false;
            if (!still) break;
            --start;
        }
        out.stabilization_stage = start;
    }
    return out;
}

/// The induced map f^{i,j} on homology (spec op `compose`).
inline InducedMap compose(const DirectHomologySystem& sys, std::size_t i, std::size_t j) {
    return sys.induced(i, j);
}

// ---------------------------------------------------------------------------
// Element triviality (the finite-stage criterion)
// ---------------------------------------------------------------------------

struct TrivialityResult {
    std::optional<std::size_t> trivial_at; // least stage where the class dies
    bool integer_verified = false;         // false means only Q-level evidence
    std::string note;
};

namespace detail {

/// Cone contraction: with v the index of a member equal to the whole
/// space, h(sigma) = +- (v cup sigma) satisfies d h + h d = id in degrees
/// >= 1, so h z is an explicit boundary preimage of any cycle z. Valid in
/// the relative complex too (v lies in L whenever L is nonempty).
inline std::optional<SparseZVec> cone_preimage(const SimplicialPair& pair, const RelativeChainComplex& rc,
                                               int k, vertex_id v, const SparseZVec& z) {
    SparseZVec out;
    std::vector<vertex_id> coned;
    for (auto& [idx, coeff] : z) {
        auto s = pair.complex.simplex(k, rc.basis[k][idx]);
        bool contains_v = false;
        for (vertex_id u : s)
            if (u == v) contains_v = true;
        if (contains_v) continue; // h vanishes on simplices through the apex
        coned.clear();
        int pos = 0;
        for (vertex_id u : s) {
            if (u < v) ++pos;
        }
        for (vertex_id u : s) coned.push_back(u);
        coned.insert(coned.begin() + pos, v);
        auto found = pair.complex.find(k + 1, coned);
        if (!found) return std::nullopt; // complex not coned at this vertex
        std::int64_t rel = rc.kept[k + 1][*found];
        if (rel < 0) continue; // lands in L, zero relatively
        Int sign = (pos % 2 == 0) ? 1 : -1;
        out.push_back({static_cast<std::uint32_t>(rel), sign * coeff});
    }
    return zvec_normalize(std::move(out));
}

} // namespace detail

/// Walks the system forward from stage i looking for the least stage where
/// the class image vanishes. Vanishing over Z is certified (via a cone
/// contraction, generator machinery, or an integer solve); a class that
/// survives to the horizon is only "nontrivial up to the horizon".
struct SystemStageContext {
    const SimplicialPair* pair = nullptr;
    const RelativeChainComplex* rc = nullptr;
};

inline TrivialityResult element_is_limit_trivial(const DirectHomologySystem& sys, std::size_t stage,
                                                 const SparseZVec& class_chain,
                                                 const std::vector<SystemStageContext>& ctx = {}) {
    sys.check_range(stage, stage);
    TrivialityResult res;
    SparseZVec w = zvec_normalize(class_chain);
    for (auto& [r, v] : w)
        if (r >= sys.stages[stage].chain_dim) raise(errc::bad_class, "class chain outside the stage basis");
    if (!apply_matrix(sys.stages[stage].dk, w).empty()) raise(errc::bad_class, "class chain is not a cycle");
    for (std::size_t j = stage; j < sys.horizon(); ++j) {
        if (j > stage) w = apply_matrix(sys.steps[j - 1], w);
        if (w.empty()) {
            res.trivial_at = j;
            res.integer_verified = true;
            res.note = "image chain is zero";
            return res;
        }
        if (!solvable_over_q(sys.stages[j].dk1, w)) continue; // nonzero over Q, certainly nonzero over Z
        // The image bounds over Q; certify over Z.
        if (j < ctx.size() && ctx[j].pair && ctx[j].rc && sys.stages[j].cone_vertex) {
            auto pre = detail::cone_preimage(*ctx[j].pair, *ctx[j].rc, sys.degree, *sys.stages[j].cone_vertex, w);
            if (pre) {
                SparseZVec back = apply_matrix(sys.stages[j].dk1, *pre);
                SparseZVec diff = back;
                for (auto& [r, v] : w) diff.push_back({r, -v});
                if (zvec_normalize(std::move(diff)).empty()) {
                    res.trivial_at = j;
                    res.integer_verified = true;
                    res.note = "cone contraction at stage " + std::to_string(j);
                    return res;
                }
            }
        }
        if (sys.stages[j].group && sys.stages[j].group->has_generators()) {
            if (sys.stages[j].group->class_is_zero(w)) {
                res.trivial_at = j;
                res.integer_verified = true;
                res.note = "generator coordinates vanish at stage " + std::to_string(j);
                return res;
            }
            continue; // nonzero torsion class; keep walking
        }
        // Last resort: integer solve d w' = w when the matrix is small.
        if (sys.stages[j].dk1.rows <= 2048 && sys.stages[j].dk1.cols <= 2048) {
            SNFOptions t;
            t.with_transforms = true;
            auto f = smith_normal_form(sys.stages[j].dk1, t);
            std::vector<Int> b(sys.stages[j].dk1.rows, 0);
            for (auto& [r, v] : w) b[r] += v;
            if (snf_solve(f, b)) {
                res.trivial_at = j;
                res.integer_verified = true;
                res.note = "integer solve at stage " + std::to_string(j);
                return res;
            }
            continue;
        }
        res.trivial_at = j;
        res.integer_verified = false;
        res.note = "class bounds over Q at stage " + std::to_string(j) +
                   "; integer verification skipped (budget)";
        return res;
    }
    res.trivial_at = std::nullopt;
    res.note = "nontrivial up to the horizon";
    return res;
}

// ---------------------------------------------------------------------------
// Truncated colimit
// ---------------------------------------------------------------------------

/// For a truncated system the colimit is canonically the last group, with
/// the canonical maps phi_i = f^{i,J}. A finite-stage approximant, not the
/// true limit.
struct TruncatedColimit {
    std::size_t final_stage = 0;
    const HomologyGroup* group = nullptr;
    std::vector<InducedMap> canonical; // phi_i for each stage i <= J
};

inline TruncatedColimit truncated_colimit(const DirectHomologySystem& sys, std::size_t j) {
    sys.check_range(j, j);
    if (!sys.stages[j].group)
        raise(errc::budget_exceeded, "final-stage homology group not materialized");
    TruncatedColimit out;
    out.final_stage = j;
    out.group = &*sys.stages[j].group;
    for (std::size_t i = 0; i <= j; ++i) out.canonical.push_back(sys.induced(i, j));
    return out;
}

} // namespace ck
