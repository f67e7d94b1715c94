#pragma once

#include <algorithm>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "limit.hpp"

namespace ck {

// ---------------------------------------------------------------------------
// Coarse separation
// ---------------------------------------------------------------------------

struct SeparationRow {
    Rat r;
    Rat d;
    std::size_t component_count = 0;
    std::size_t deep_count = 0;
    std::vector<point_id> witnesses; // one point per deep component, d(., A) >= d
    bool separated = false;          // at least two deep components
};

struct SeparationReport {
    std::vector<point_id> subset;
    Rat adjacency_scale = Rat(1);
    std::vector<SeparationRow> rows;
    bool separated_at_tested_scales = false;
    // Finite-scale approximation: the verdict covers the tested (r, d) grid
    // only, never the asymptotic definition.
};

/// Components of X - N_r(A) and their depth, swept over r. A component is
/// d-deep iff it contains a point at distance >= d from A; default depth
/// rule d = 2r + 4.
inline SeparationReport check_separation(const FiniteMetricSpace& s, const SubspaceRef& a,
                                         std::vector<Rat> r_values,
                                         const std::vector<Rat>& d_values = {},
                                         const Rat& adjacency_scale = Rat(1)) {
    if (a.members.size() == s.size()) raise(errc::empty_complement, "subset equals the whole space");
    if (r_values.empty()) raise(errc::spec_error, "no r values to test");
    if (!d_values.empty() && d_values.size() != r_values.size())
        raise(errc::spec_error, "d values must match r values");
    SeparationReport rep;
    rep.subset = a.members;
    rep.adjacency_scale = adjacency_scale;
    // Distance to A per point, computed once.
    std::vector<Dist> dist_to_a(s.size());
    for (point_id x = 0; x < s.size(); ++x) dist_to_a[x] = s.distance_to_set(x, a.members);
    rep.separated_at_tested_scales = true;
    for (std::size_t t = 0; t < r_values.size(); ++t) {
        SeparationRow row;
        row.r = r_values[t];
        row.d = d_values.empty() ? Rat(2 * row.r + 4) : d_values[t];
        std::vector<point_id> complement;
        for (point_id x = 0; x < s.size(); ++x)
            if (!dist_leq(dist_to_a[x], row.r)) complement.push_back(x);
        auto comps = s.components(complement, adjacency_scale);
        row.component_count = comps.size();
        for (auto& comp : comps) {
            std::optional<point_id> witness;
            for (point_id x : comp) {
                if (dist_cmp(dist_to_a[x], row.d) >= 0) {
                    if (!witness || dist_to_a[x] > dist_to_a[*witness]) witness = x;
                }
            }
            if (witness) {
                ++row.deep_count;
                row.witnesses.push_back(*witness);
            }
        }
        row.separated = row.deep_count >= 2;
        if (!row.separated) rep.separated_at_tested_scales = false;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// The scale-lambda oracle complex
// ---------------------------------------------------------------------------

struct OracleOptions {
    std::size_t point_budget = 12;
};

/// Exhaustive small-instance oracle: vertices are the points themselves and
/// a subset spans a simplex iff some witness point y lies within lambda of
/// every element. Enumerated by brute force over subsets, independently of
/// the nerve machinery it validates.
inline SimplicialComplex cx_lambda_complex(const FiniteMetricSpace& s, const Rat& lambda, int dim_cap,
                                           const OracleOptions& opts = {}) {
    if (s.size() > opts.point_budget)
        raise(errc::oracle_budget, "oracle needs at most " + std::to_string(opts.point_budget) + " points");
    if (lambda <= 0) raise(errc::spec_error, "oracle scale must be positive");
    const std::size_t n = s.size();
    SimplicialComplex cx(n);
    std::vector<std::vector<char>> in_ball(n, std::vector<char>(n, 0)); // in_ball[y][x]: d(y,x) <= lambda
    for (point_id y = 0; y < n; ++y)
        for (point_id x = 0; x < n; ++x) in_ball[y][x] = s.within(y, x, lambda) ? 1 : 0;
    auto has_witness = [&](const std::vector<vertex_id>& subset) {
        for (point_id y = 0; y < n; ++y) {
            bool all = true;
            for (vertex_id x : subset)
                if (!in_ball[y][x]) {
                    all = false;
                    break;
                }
            if (all) return true;
        }
        return false;
    };
    std::vector<vertex_id> subset;
    for (int k = 1; k <= dim_cap; ++k) {
        subset.assign(k + 1, 0);
        bool pushed_any = false;
        // Lexicographic enumeration of all (k+1)-subsets of the points.
        std::vector<vertex_id> idx(k + 1);
        for (int t = 0; t <= k; ++t) idx[t] = t;
        if (static_cast<std::size_t>(k + 1) > n) break;
        while (true) {
            if (has_witness(idx)) {
                cx.push_simplex(k, idx);
                pushed_any = true;
            }
            int t = k;
            while (t >= 0 && idx[t] == n - (k + 1) + t) --t;
            if (t < 0) break;
            ++idx[t];
            for (int u = t + 1; u <= k; ++u) idx[u] = idx[u - 1] + 1;
        }
        if (!pushed_any) break;
    }
    return cx;
}

struct OracleComparison {
    int degree;
    long long oracle_rank;
    long long nerve_rank;
    std::vector<Int> oracle_torsion;
    std::vector<Int> nerve_torsion;
    bool equal() const {
        return oracle_rank == nerve_rank && oracle_torsion == nerve_torsion;
    }
};

/// Homology (rank and torsion) of the oracle complex against the ball-cover
/// nerve, degree by degree.
inline std::vector<OracleComparison> oracle_compare(const FiniteMetricSpace& s, const Rat& lambda,
                                                    const std::vector<int>& degrees,
                                                    const OracleOptions& opts = {}) {
    int max_deg = 0;
    for (int d : degrees) max_deg = std::max(max_deg, d);
    const int dim_cap = max_deg + 1;
    auto oracle = cx_lambda_complex(s, lambda, dim_cap, opts);
    auto cover = ball_cover(s, lambda);
    auto nerve_cx = nerve(cover, dim_cap);
    // Absolute homology on both sides (empty frontier).
    SimplicialPair op;
    op.complex = std::move(oracle);
    op.vertex_in_l.assign(s.size(), 0);
    SimplicialPair np;
    np.complex = std::move(nerve_cx);
    np.vertex_in_l.assign(cover.size(), 0);
    auto orc = relative_chain_complex(op, dim_cap);
    auto nrc = relative_chain_complex(np, dim_cap);
    std::vector<OracleComparison> out;
    for (int d : degrees) {
        OracleComparison cmp;
        cmp.degree = d;
        SparseIntMat od0(0, orc.dim(0)), nd0(0, nrc.dim(0));
        const SparseIntMat& odk = d == 0 ? od0 : orc.d(d);
        const SparseIntMat& ndk = d == 0 ? nd0 : nrc.d(d);
        auto og = homology_group(odk, orc.d(d + 1));
        auto ng = homology_group(ndk, nrc.d(d + 1));
        cmp.oracle_rank = og.betti;
        cmp.nerve_rank = ng.betti;
        cmp.oracle_torsion = og.torsion;
        cmp.nerve_torsion = ng.torsion;
        out.push_back(std::move(cmp));
    }
    return out;
}

// ---------------------------------------------------------------------------
// The full pipeline: system -> nerves -> relative homology -> limits
// ---------------------------------------------------------------------------

struct PipelineOptions {
    CoverStrategy strategy{"ball-doubling", Rat(1)};
    std::vector<int> degrees{0, 1};
    std::size_t horizon = 4;
    std::size_t window = 2; // stabilization window w
    bool allow_cap_override = false;
    std::size_t simplex_budget = 2'000'000;
    std::size_t group_budget = 220;    // max chain dim for generator machinery
    std::size_t torsion_budget = 60'000; // max nnz of d_{k+1} for integer torsion
    std::size_t workers = 1;
};

struct DegreeStageRow {
    std::size_t stage;
    Rat scale;
    long long rank;
    std::optional<std::vector<Int>> torsion; // nullopt: skipped over budget
};

struct DegreeLimitReport {
    int degree = 0;
    RankTable table;
    StableRank stable;
    std::vector<DegreeStageRow> stage_rows;
    std::vector<std::string> warnings;
};

struct AsdimBoundsReport {
    bool lower_defined = false;       // false encodes "-infinity"
    long long lower_bound = 0;        // max degree with determined nonzero stable rank
    bool upper_defined = false;
    long long upper_bound_witness = 0; // min over families of (max multiplicity - 1)
    std::vector<Rat> witness_scales;
    std::vector<int> witness_multiplicities;
    std::vector<std::string> caveats;
};

struct PipelineResult {
    AntiCechSystem system;
    std::vector<SimplicialPair> pairs;
    std::vector<RelativeChainComplex> complexes;
    std::vector<SparseIntMat> projections_by_degree_unused; // reserved
    std::vector<DegreeLimitReport> degree_reports;
    std::vector<DirectHomologySystem> systems; // parallel to degree_reports
    AsdimBoundsReport bounds;
    std::vector<std::string> warnings;
    int dim_cap = 0;
};

namespace detail {

inline std::optional<vertex_id> find_cone_vertex(const IndexedCover& c) {
    for (std::size_t m = 0; m < c.size(); ++m)
        if (c.bits[m].count() == c.ambient->size()) return static_cast<vertex_id>(m);
    return std::nullopt;
}

} // namespace detail

/// Builds the anti-Cech system, the nerves relative to the frontier, the
/// chain maps induced by refinement projections, and the per-degree direct
/// systems with persistent rank tables and stable ranks.
inline PipelineResult run_homology_pipeline(const FiniteMetricSpace& s, const PipelineOptions& opts) {
    if (opts.degrees.empty()) raise(errc::config_error, "no degrees requested");
    PipelineResult res;
    int max_deg = 0;
    for (int d : opts.degrees) {
        if (d < 0) raise(errc::config_error, "negative degree");
        max_deg = std::max(max_deg, d);
    }
    res.dim_cap = max_deg + 1;

    AntiCechOptions aopts;
    aopts.allow_cap_override = opts.allow_cap_override;
    res.system = build_anti_cech(s, opts.strategy, opts.horizon, aopts);
    for (auto& w : res.system.warnings) res.warnings.push_back(w);
    const std::size_t stages = res.system.size();

    NerveOptions nopts;
    nopts.simplex_budget = opts.simplex_budget;
    res.pairs.reserve(stages);
    res.complexes.reserve(stages);
    for (std::size_t i = 0; i < stages; ++i) {
        auto nv = nerve(res.system.stages[i], res.dim_cap, nopts);
        res.pairs.push_back(frontier_subcomplex(std::move(nv), res.system.stages[i], s.frontier()));
        log::info("stage " + std::to_string(i) + " nerve: " +
                  std::to_string(res.pairs.back().complex.total_simplices()) + " simplices");
    }
    for (std::size_t i = 0; i < stages; ++i)
        res.complexes.push_back(relative_chain_complex(res.pairs[i], res.dim_cap));

    // Consecutive refinement projections and their chain maps per degree.
    std::vector<std::vector<SparseIntMat>> step_mats(stages > 0 ? stages - 1 : 0);
    for (std::size_t i = 0; i + 1 < stages; ++i) {
        auto proj = refinement_projection(res.system.stages[i], res.system.stages[i + 1], TieBreak::smallest);
        auto smap = induced_simplicial_map(proj, res.pairs[i].complex, res.pairs[i + 1].complex,
                                           &res.pairs[i], &res.pairs[i + 1]);
        step_mats[i] = chain_map_matrices(smap, res.complexes[i], res.complexes[i + 1], res.dim_cap);
    }

    auto build_degree = [&](int deg) {
        DirectHomologySystem sys;
        sys.degree = deg;
        for (std::size_t i = 0; i < stages; ++i) {
            SystemStage st;
            st.scale = res.system.scales[i];
            st.chain_dim = res.complexes[i].dim(deg);
            st.dk = (deg == 0) ? SparseIntMat(0, st.chain_dim) : res.complexes[i].d(deg);
            st.dk1 = res.complexes[i].d(deg + 1);
            if (st.dk1.rows != st.chain_dim) st.dk1 = SparseIntMat(st.chain_dim, 0);
            st.betti = static_cast<long long>(st.chain_dim - rank_exact(st.dk)) -
                       static_cast<long long>(rank_exact(st.dk1));
            st.cone_vertex = detail::find_cone_vertex(res.system.stages[i]);
            if (st.chain_dim <= opts.group_budget && st.dk.rows <= opts.group_budget &&
                st.dk1.cols <= opts.group_budget) {
                HomologyOptions hopts;
                hopts.with_generators = true;
                st.group = homology_group(st.dk, st.dk1, hopts);
            }
            sys.stages.push_back(std::move(st));
        }
        for (std::size_t i = 0; i + 1 < stages; ++i) sys.steps.push_back(step_mats[i][deg]);
        DegreeLimitReport rep;
        rep.degree = deg;
        rep.table = persistent_rank_table(sys);
        rep.stable = stable_rank(rep.table, opts.window);
        for (std::size_t i = 0; i < stages; ++i) {
            DegreeStageRow row;
            row.stage = i;
            row.scale = res.system.scales[i];
            row.rank = sys.stages[i].betti;
            if (sys.stages[i].group) {
                row.torsion = sys.stages[i].group->torsion;
            } else if (sys.stages[i].dk1.nnz() <= opts.torsion_budget) {
                auto snf1 = smith_normal_form(sys.stages[i].dk1);
                std::vector<Int> tor;
                for (auto& d : snf1.diag)
                    if (d > 1) tor.push_back(d);
                row.torsion = std::move(tor);
            } else {
                rep.warnings.push_back("torsion skipped (budget) at stage " + std::to_string(i));
            }
            rep.stage_rows.push_back(std::move(row));
        }
        if (rep.stable.undetermined)
            rep.warnings.push_back("stable rank undetermined within the horizon");
        return std::pair<DirectHomologySystem, DegreeLimitReport>{std::move(sys), std::move(rep)};
    };

    std::vector<int> degrees = opts.degrees;
    std::sort(degrees.begin(), degrees.end());
    degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
    if (opts.workers > 1 && degrees.size() > 1) {
        std::vector<std::future<std::pair<DirectHomologySystem, DegreeLimitReport>>> futs;
        for (int d : degrees)
            futs.push_back(std::async(std::launch::async, [&, d] { return build_degree(d); }));
        for (auto& f : futs) {
            auto [sys, rep] = f.get();
            res.systems.push_back(std::move(sys));
            res.degree_reports.push_back(std::move(rep));
        }
    } else {
        for (int d : degrees) {
            auto [sys, rep] = build_degree(d);
            res.systems.push_back(std::move(sys));
            res.degree_reports.push_back(std::move(rep));
        }
    }
    return res;
}

/// Witness data from one constructed cover family.
struct WitnessFamily {
    std::string kind;
    std::vector<Rat> scales;
    std::vector<int> multiplicities;
    int max_multiplicity = 0;
};

inline WitnessFamily witness_from_system(const AntiCechSystem& sys, const std::string& kind) {
    WitnessFamily w;
    w.kind = kind;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        w.scales.push_back(sys.scales[i]);
        w.multiplicities.push_back(sys.stages[i].multiplicity);
        w.max_multiplicity = std::max(w.max_multiplicity, sys.stages[i].multiplicity);
    }
    return w;
}

struct AsdimResult {
    PipelineResult pipeline;
    AsdimBoundsReport bounds;
    std::vector<WitnessFamily> families;
};

/// Corollary-style asdim bounds: the lower bound is the top degree with a
/// determined nonzero stable rank; the upper-bound witness is the smallest
/// (max multiplicity - 1) over the cover families actually constructed,
/// with the scale range recorded.
inline AsdimResult asdim_bounds(const FiniteMetricSpace& s, const PipelineOptions& opts) {
    AsdimResult out;
    out.pipeline = run_homology_pipeline(s, opts);
    AsdimBoundsReport& b = out.bounds;
    for (auto& rep : out.pipeline.degree_reports) {
        if (!rep.stable.undetermined && rep.stable.rank > 0) {
            if (!b.lower_defined || rep.degree > b.lower_bound) {
                b.lower_defined = true;
                b.lower_bound = rep.degree;
            }
        }
        if (rep.stable.undetermined)
            b.caveats.push_back("degree " + std::to_string(rep.degree) + " undetermined within horizon");
    }
    if (!b.lower_defined) b.caveats.push_back("no degree with determined nonzero stable rank (lower bound -inf)");
    out.families.push_back(witness_from_system(out.pipeline.system, out.pipeline.system.stages[0].kind));
    // A brick family on lattice windows witnesses multiplicity n+1.
    if (s.is_lattice_cloud()) {
        try {
            AntiCechOptions aopts;
            aopts.allow_cap_override = opts.allow_cap_override;
            auto brick_sys = build_anti_cech(s, {"brick-doubling", opts.strategy.base}, opts.horizon, aopts);
            out.families.push_back(witness_from_system(brick_sys, "brick"));
        } catch (const error& e) {
            b.caveats.push_back(std::string("brick witness unavailable: ") + e.what());
        }
    }
    for (auto& fam : out.families) {
        if (fam.max_multiplicity <= 0) continue;
        long long candidate = fam.max_multiplicity - 1;
        if (!b.upper_defined || candidate < b.upper_bound_witness) {
            b.upper_defined = true;
            b.upper_bound_witness = candidate;
            b.witness_scales = fam.scales;
            b.witness_multiplicities = fam.multiplicities;
        }
    }
    if (out.pipeline.system.window_capped)
        b.caveats.push_back("scale range limited by the window cap");
    if (b.lower_defined && b.upper_defined && b.lower_bound > b.upper_bound_witness)
        b.caveats.push_back("DIAGNOSTIC: lower bound exceeds the witness upper bound; "
                            "window likely disproportionate");
    out.pipeline.bounds = b;
    return out;
}

// ---------------------------------------------------------------------------
// The separation -> asdim scenario
// ---------------------------------------------------------------------------

struct ScenarioReport {
    int model_dim = 0;
    SeparationReport separation;
    bool separated = false;
    std::optional<AsdimResult> subspace_asdim;
    bool prediction_applicable = false; // separation detected
    bool prediction_holds = false;      // lower bound >= n-1 with determined rank
    std::vector<std::string> findings;
};

/// Runs the separation check for A inside a declared-dimension lattice
/// window and, when A separates, tests the homological prediction that A
/// carries degree-(n-1) relative homology (so its asdim lower bound is at
/// least n-1). Mismatches are reported as findings, never as errors.
inline ScenarioReport pd_scenario(const FiniteMetricSpace& s, const SubspaceRef& a,
                                  std::vector<Rat> r_values, PipelineOptions popts) {
    if (s.info().kind != "grid" && s.info().kind != "path")
        raise(errc::unsupported_scenario, "scenario needs a generated lattice window with declared dimension");
    const int n = s.info().model_dim;
    if (n < 1) raise(errc::unsupported_scenario, "model dimension undeclared");
    ScenarioReport rep;
    rep.model_dim = n;
    if (r_values.empty()) r_values = {Rat(1), Rat(2), Rat(3)};
    rep.separation = check_separation(s, a, r_values);
    rep.separated = rep.separation.separated_at_tested_scales;
    if (!rep.separated) {
        rep.findings.push_back("A does not separate at the tested scales; no asdim claim");
        return rep;
    }
    rep.prediction_applicable = true;
    auto sub = s.subspace(a.members);
    popts.degrees.clear();
    for (int d = 0; d < n; ++d) popts.degrees.push_back(d);
    rep.subspace_asdim = asdim_bounds(sub, popts);
    const auto& b = rep.subspace_asdim->bounds;
    rep.prediction_holds = b.lower_defined && b.lower_bound >= n - 1;
    if (rep.prediction_holds) {
        rep.findings.push_back("separated and degree-" + std::to_string(n - 1) +
                               " stable rank is nonzero: consistent");
    } else {
        rep.findings.push_back("FINDING: A separates but its determined asdim lower bound is " +
                               (b.lower_defined ? std::to_string(b.lower_bound) : std::string("-inf")) +
                               " < " + std::to_string(n - 1) +
                               " (possible truncation artifact or bug)");
    }
    return rep;
}

} // namespace ck
