#pragma once

#include <boost/dynamic_bitset.hpp>
#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "space.hpp"

namespace ck {

/// Axis-aligned lattice box, used as member metadata where it applies
/// (bricks, Linf balls on grid windows). Enables O(dim) depth formulas.
struct LatticeBox {
    std::vector<long long> lo, hi; // inclusive
};

/// An indexed family of nonempty uniformly bounded subsets covering the
/// space. Two equal subsets under different indices stay distinct vertices
/// of the nerve.
struct IndexedCover {
    const FiniteMetricSpace* ambient = nullptr;
    std::vector<std::vector<point_id>> members;       // each sorted ascending
    std::vector<boost::dynamic_bitset<>> bits;        // membership bitsets
    std::vector<std::vector<std::int32_t>> point_members; // member indices per point
    Rat diameter_bound = Rat(0);                      // declared R
    int multiplicity = 0;                             // cached
    Dist certified_lebesgue;                          // cached sound lower bound
    Dist point_formula_lebesgue;                      // the min-max depth bound
    std::string kind = "custom";
    Rat scale = Rat(0);
    std::vector<point_id> centers;                    // ball covers
    std::vector<std::optional<LatticeBox>> boxes;     // per-member box metadata

    std::size_t size() const { return members.size(); }
};

namespace detail {

inline bool full_lattice_window(const FiniteMetricSpace& s) {
    if (!s.is_lattice_cloud()) return false;
    const auto& c = s.cloud();
    unsigned long long total = 1;
    for (std::size_t k = 0; k < c.dim; ++k) {
        auto [lo, hi] = s.lattice_range(k);
        total *= static_cast<unsigned long long>(hi - lo + 1);
        if (total > s.size()) return false;
    }
    return total == s.size();
}

/// Exact distance from x to the complement of a box member inside a full
/// lattice window, valid for L1 and Linf alike (the nearest outside point
/// differs in a single coordinate).
inline std::optional<Rat> box_depth(const FiniteMetricSpace& s, point_id x, const LatticeBox& box) {
    const auto& c = s.cloud();
    long long best = -1;
    for (std::size_t k = 0; k < c.dim; ++k) {
        auto [wlo, whi] = s.lattice_range(k);
        long long xc = s.lattice_coord(x, k);
        if (box.lo[k] > wlo) {
            long long d = xc - box.lo[k] + 1;
            if (best < 0 || d < best) best = d;
        }
        if (box.hi[k] < whi) {
            long long d = box.hi[k] - xc + 1;
            if (best < 0 || d < best) best = d;
        }
    }
    if (best < 0) return std::nullopt; // member is the whole window
    return Rat(best);
}

inline Dist member_diameter(const FiniteMetricSpace& s, const std::vector<point_id>& member,
                            bool box_shaped = false) {
    if (s.is_lattice_cloud()) {
        const auto& c = s.cloud();
        std::vector<long long> lo(c.dim), hi(c.dim);
        for (std::size_t i = 0; i < member.size(); ++i)
            for (std::size_t k = 0; k < c.dim; ++k) {
                long long v = s.lattice_coord(member[i], k);
                if (i == 0 || v < lo[k]) lo[k] = v;
                if (i == 0 || v > hi[k]) hi[k] = v;
            }
        // The Linf diameter of any lattice set is its largest axis extent;
        // for L1/L2 the extent formula is exact only on full boxes.
        if (c.norm == Norm::linf) {
            long long best = 0;
            for (std::size_t k = 0; k < c.dim; ++k) best = std::max(best, hi[k] - lo[k]);
            return Dist::rational(Rat(best));
        }
        if (box_shaped) {
            if (c.norm == Norm::l1) {
                long long sum = 0;
                for (std::size_t k = 0; k < c.dim; ++k) sum += hi[k] - lo[k];
                return Dist::rational(Rat(sum));
            }
            Rat sq = 0;
            for (std::size_t k = 0; k < c.dim; ++k) sq += Rat(hi[k] - lo[k]) * Rat(hi[k] - lo[k]);
            return Dist::sqrt_of(sq);
        }
    }
    Dist best = Dist::zero();
    for (std::size_t i = 0; i < member.size(); ++i)
        for (std::size_t j = i + 1; j < member.size(); ++j) {
            Dist d = s.distance(member[i], member[j]);
            if (best < d) best = d;
        }
    return best;
}

} // namespace detail

/// min over points x of max over members U containing x of d(x, X-U).
/// Any subset of diameter <= the returned value lies inside some member.
/// A member equal to X contributes window diameter + 1.
inline Dist lebesgue_lower_bound(const IndexedCover& c) {
    const FiniteMetricSpace& s = *c.ambient;
    const Dist whole = Dist::rational(dist_rat_upper(s.diameter()) + 1);
    const bool window = detail::full_lattice_window(s);
    std::optional<Dist> result;
    for (point_id x = 0; x < s.size(); ++x) {
        std::optional<Dist> best;
        for (std::int32_t m : c.point_members[x]) {
            Dist depth;
            if (window && c.boxes[m]) {
                auto d = detail::box_depth(s, x, *c.boxes[m]);
                depth = d ? Dist::rational(*d) : whole;
            } else if (c.bits[m].count() == s.size()) {
                depth = whole;
            } else {
                std::optional<Dist> mind;
                for (point_id y = 0; y < s.size(); ++y) {
                    if (c.bits[m][y]) continue;
                    Dist d = s.distance(x, y);
                    if (!mind || d < *mind) mind = d;
                }
                depth = *mind;
            }
            if (!best || *best < depth) best = depth;
        }
        if (!best) raise(errc::spec_error, "family does not cover point " + std::to_string(x));
        if (!result || *best < *result) result = *best;
    }
    return *result;
}

/// Exact box-fit Lebesgue bound for lattice clouds: the largest r such that
/// the points of every coordinate window of side r+1 lie inside a single
/// member. Sound for L1/L2/Linf: a set of diameter r spans at most r per
/// axis, so it sits inside such a window.
inline Dist box_lebesgue(const IndexedCover& c) {
    const FiniteMetricSpace& s = *c.ambient;
    if (!s.is_lattice_cloud()) raise(errc::unsupported_space, "box-fit bound needs a lattice window");
    const auto& cl = s.cloud();
    const std::size_t dim = cl.dim;
    std::vector<long long> lo(dim), hi(dim);
    long long max_extent = 0;
    for (std::size_t k = 0; k < dim; ++k) {
        auto [a, b] = s.lattice_range(k);
        lo[k] = a;
        hi[k] = b;
        max_extent = std::max(max_extent, b - a);
    }
    auto passes = [&](long long r) -> bool {
        std::vector<long long> anchor = lo;
        boost::dynamic_bitset<> box(s.size());
        while (true) {
            box.reset();
            point_id first = s.size();
            for (point_id x = 0; x < s.size(); ++x) {
                bool inside = true;
                for (std::size_t k = 0; k < dim; ++k) {
                    long long v = s.lattice_coord(x, k);
                    if (v < anchor[k] || v > anchor[k] + r) {
                        inside = false;
                        break;
                    }
                }
                if (inside) {
                    box.set(x);
                    if (first == s.size()) first = x;
                }
            }
            if (first != s.size()) {
                bool hosted = false;
                for (std::int32_t m : c.point_members[first]) {
                    if (box.is_subset_of(c.bits[m])) {
                        hosted = true;
                        break;
                    }
                }
                if (!hosted) return false;
            }
            std::size_t k = dim;
            while (k > 0) {
                --k;
                if (++anchor[k] <= hi[k] - r) break;
                anchor[k] = lo[k];
                if (k == 0) return true;
            }
            if (k == 0 && anchor[0] == lo[0]) return true;
        }
    };
    long long r = 0;
    while (r < max_extent + 1 && passes(r + 1)) ++r;
    return Dist::rational(Rat(r));
}

namespace detail {

inline void finalize_cover(IndexedCover& c) {
    const FiniteMetricSpace& s = *c.ambient;
    if (c.members.empty()) raise(errc::spec_error, "cover with no members");
    c.bits.clear();
    c.bits.reserve(c.members.size());
    for (auto& member : c.members) {
        if (member.empty()) raise(errc::spec_error, "empty cover member");
        std::sort(member.begin(), member.end());
        member.erase(std::unique(member.begin(), member.end()), member.end());
        boost::dynamic_bitset<> b(s.size());
        for (point_id x : member) {
            s.check_id(x);
            b.set(x);
        }
        c.bits.push_back(std::move(b));
    }
    if (c.boxes.size() != c.members.size()) c.boxes.assign(c.members.size(), std::nullopt);
    c.point_members.assign(s.size(), {});
    for (std::size_t m = 0; m < c.members.size(); ++m)
        for (point_id x : c.members[m]) c.point_members[x].push_back(static_cast<std::int32_t>(m));
    c.multiplicity = 0;
    for (point_id x = 0; x < s.size(); ++x) {
        if (c.point_members[x].empty())
            raise(errc::spec_error, "family does not cover point " + std::to_string(x));
        c.multiplicity = std::max<int>(c.multiplicity, static_cast<int>(c.point_members[x].size()));
    }
    const bool window_boxes = full_lattice_window(s);
    for (std::size_t m = 0; m < c.members.size(); ++m) {
        Dist d = member_diameter(s, c.members[m], window_boxes && c.boxes[m].has_value());
        if (dist_cmp(d, c.diameter_bound) > 0)
            raise(errc::spec_error, "member " + std::to_string(m) + " exceeds the declared diameter bound");
    }
    c.point_formula_lebesgue = lebesgue_lower_bound(c);
    c.certified_lebesgue = c.point_formula_lebesgue;
    if (s.is_lattice_cloud()) {
        Dist bf = box_lebesgue(c);
        if (c.certified_lebesgue < bf) c.certified_lebesgue = bf;
    }
}

} // namespace detail

/// General-purpose constructor for hand-built covers (tests, ingestion).
inline IndexedCover make_cover(const FiniteMetricSpace& s, std::vector<std::vector<point_id>> members,
                               Rat diameter_bound, std::string kind = "custom", Rat scale = Rat(0)) {
    IndexedCover c;
    c.ambient = &s;
    c.members = std::move(members);
    c.diameter_bound = std::move(diameter_bound);
    c.kind = std::move(kind);
    c.scale = std::move(scale);
    detail::finalize_cover(c);
    return c;
}

/// The cover by all balls of radius lambda, indexed by point id.
inline IndexedCover ball_cover(const FiniteMetricSpace& s, const Rat& lambda) {
    if (lambda <= 0) raise(errc::spec_error, "ball cover needs lambda > 0");
    IndexedCover c;
    c.ambient = &s;
    c.kind = "ball";
    c.scale = lambda;
    c.diameter_bound = 2 * lambda;
    c.members.reserve(s.size());
    c.centers.reserve(s.size());
    const bool linf_boxes = s.is_lattice_cloud() && s.cloud().norm == Norm::linf;
    for (point_id x = 0; x < s.size(); ++x) {
        c.members.push_back(s.ball(x, lambda));
        c.centers.push_back(x);
    }
    if (linf_boxes && boost::multiprecision::denominator(lambda) == 1) {
        const auto& cl = s.cloud();
        long long lam = static_cast<long long>(boost::multiprecision::numerator(lambda));
        c.boxes.reserve(c.members.size());
        for (point_id x = 0; x < s.size(); ++x) {
            LatticeBox box;
            for (std::size_t k = 0; k < cl.dim; ++k) {
                auto [wlo, whi] = s.lattice_range(k);
                long long v = s.lattice_coord(x, k);
                box.lo.push_back(std::max(wlo, v - lam));
                box.hi.push_back(std::min(whi, v + lam));
            }
            c.boxes.push_back(box);
        }
    }
    detail::finalize_cover(c);
    return c;
}

/// Ball cover with centers thinned to a greedy net: centers are picked in
/// ascending id order subject to pairwise separation >= spacing, then a
/// fix-up pass adds any point left uncovered. spacing <= lambda keeps the
/// certified Lebesgue bound of the result above lambda + 1 on lattice
/// windows, which is what lets doubled scales chain into an anti-Cech
/// system without nerve blowup.
inline IndexedCover net_ball_cover(const FiniteMetricSpace& s, const Rat& lambda, const Rat& spacing) {
    if (lambda <= 0) raise(errc::spec_error, "ball cover needs lambda > 0");
    if (spacing < 1) raise(errc::spec_error, "net spacing must be >= 1");
    std::vector<point_id> centers;
    for (point_id x = 0; x < s.size(); ++x) {
        bool far = true;
        for (point_id c : centers) {
            if (s.within(x, c, spacing - 1)) { // d < spacing, exact for integer metrics
                far = false;
                break;
            }
        }
        if (far) centers.push_back(x);
    }
    // Coverage fix-up (needed for non-integer metrics where d < spacing can
    // still exceed lambda).
    for (point_id x = 0; x < s.size(); ++x) {
        bool covered = false;
        for (point_id c : centers)
            if (s.within(x, c, lambda)) {
                covered = true;
                break;
            }
        if (!covered) centers.push_back(x);
    }
    std::sort(centers.begin(), centers.end());
    IndexedCover c;
    c.ambient = &s;
    c.kind = "net-ball";
    c.scale = lambda;
    c.diameter_bound = 2 * lambda;
    const bool linf_boxes = s.is_lattice_cloud() && s.cloud().norm == Norm::linf &&
                            boost::multiprecision::denominator(lambda) == 1;
    for (point_id x : centers) {
        c.members.push_back(s.ball(x, lambda));
        c.centers.push_back(x);
        if (linf_boxes) {
            const auto& cl = s.cloud();
            long long lam = static_cast<long long>(boost::multiprecision::numerator(lambda));
            LatticeBox box;
            for (std::size_t k = 0; k < cl.dim; ++k) {
                auto [wlo, whi] = s.lattice_range(k);
                long long v = s.lattice_coord(x, k);
                box.lo.push_back(std::max(wlo, v - lam));
                box.hi.push_back(std::min(whi, v + lam));
            }
            c.boxes.push_back(box);
        }
    }
    detail::finalize_cover(c);
    return c;
}

/// Multiplicity: max over points of the number of members containing it.
inline int multiplicity(const IndexedCover& c) { return c.multiplicity; }

/// Shifted-brick cover of a lattice window: n+1 families of cubes with a
/// one-cell gap inside each family, family t shifted diagonally by
/// t * (side + 1) / (n + 1). Within a family cubes are disjoint, so the
/// multiplicity is at most n + 1 by construction. The cube side is `scale`
/// rounded up to the nearest value congruent to n mod n+1, which keeps the
/// family gap at 1; that alignment is what makes the multiplicity n + 1
/// attainable and the box-fit Lebesgue bound equal to (side - n) / (n + 1).
inline IndexedCover brick_cover(const FiniteMetricSpace& s, long scale) {
    if (!s.is_lattice_cloud() || !detail::full_lattice_window(s))
        raise(errc::unsupported_space, "brick cover needs a full lattice window");
    if (scale < 1) raise(errc::spec_error, "brick scale must be >= 1");
    const auto& cl = s.cloud();
    const int n = static_cast<int>(cl.dim);
    while (scale % (n + 1) != n % (n + 1)) ++scale;
    std::vector<long long> lo(n), hi(n);
    long long max_extent = 0;
    for (int k = 0; k < n; ++k) {
        auto [a, b] = s.lattice_range(k);
        lo[k] = a;
        hi[k] = b;
        max_extent = std::max(max_extent, b - a + 1);
    }
    IndexedCover c;
    c.ambient = &s;
    c.kind = "brick";
    c.scale = Rat(scale);
    if (scale >= max_extent) {
        // Degenerate window: a single brick covers everything.
        std::vector<point_id> all(s.size());
        for (point_id x = 0; x < s.size(); ++x) all[x] = x;
        c.members.push_back(std::move(all));
        LatticeBox box;
        box.lo = lo;
        box.hi = hi;
        c.boxes.push_back(box);
        c.diameter_bound = dist_rat_upper(s.diameter());
        detail::finalize_cover(c);
        return c;
    }
    long long g = 1;
    while ((scale + g) % (n + 1) != 0) ++g;
    const long long period = scale + g;
    const long long shift = period / (n + 1);
    std::vector<std::vector<point_id>> members;
    std::vector<std::optional<LatticeBox>> boxes;
    for (int t = 0; t <= n; ++t) {
        // Per-axis admissible starts for family t.
        std::vector<std::vector<long long>> starts(n);
        for (int k = 0; k < n; ++k) {
            long long first = lo[k] - scale + 1;
            long long offset = t * shift;
            long long a = first + ((offset - first) % period + period) % period;
            for (; a <= hi[k]; a += period) starts[k].push_back(a);
        }
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            LatticeBox box;
            for (int k = 0; k < n; ++k) {
                long long a = starts[k][idx[k]];
                box.lo.push_back(std::max(lo[k], a));
                box.hi.push_back(std::min(hi[k], a + scale - 1));
            }
            std::vector<point_id> member;
            for (point_id x = 0; x < s.size(); ++x) {
                bool inside = true;
                for (int k = 0; k < n; ++k) {
                    long long v = s.lattice_coord(x, k);
                    if (v < box.lo[k] || v > box.hi[k]) {
                        inside = false;
                        break;
                    }
                }
                if (inside) member.push_back(x);
            }
            if (!member.empty()) {
                members.push_back(std::move(member));
                boxes.push_back(box);
            }
            int k = n;
            bool done = false;
            while (k > 0) {
                --k;
                if (++idx[k] < starts[k].size()) break;
                idx[k] = 0;
                if (k == 0) done = true;
            }
            if (done) break;
        }
    }
    c.members = std::move(members);
    c.boxes = std::move(boxes);
    Rat bound(0);
    for (std::size_t m = 0; m < c.members.size(); ++m) {
        Dist d = detail::member_diameter(s, c.members[m], /*box_shaped=*/true);
        Rat r = dist_rat_upper(d);
        if (r > bound) bound = r;
    }
    c.diameter_bound = bound;
    detail::finalize_cover(c);
    return c;
}

// ---------------------------------------------------------------------------
// Anti-Cech systems
// ---------------------------------------------------------------------------

struct CoverStrategy {
    std::string kind = "ball-doubling"; // ball-doubling | brick-doubling
    Rat base = Rat(1);
};

struct AntiCechOptions {
    bool allow_cap_override = false;
    std::size_t full_cover_threshold = 256; // below this, ball stages use every point as a center
};

struct AntiCechSystem {
    const FiniteMetricSpace* ambient = nullptr;
    std::vector<IndexedCover> stages;
    std::vector<Rat> scales;
    std::vector<bool> certified; // per consecutive pair
    std::vector<std::string> warnings;
    bool window_capped = false;

    std::size_t size() const { return stages.size(); }
};

/// Window cap: stages whose declared diameter bound exceeds
/// (diameter + 1) / 4 are refused by default; past that point the frontier
/// zones of a window meet and truncation artifacts dominate the relative
/// homology readings. Zero-diameter spaces are exempt (every cover is the
/// trivial one-member cover).
inline Rat window_cap(const FiniteMetricSpace& s) {
    return (dist_rat_upper(s.diameter()) + 1) / 4;
}

inline AntiCechSystem build_anti_cech(const FiniteMetricSpace& s, const CoverStrategy& strategy,
                                      std::size_t max_stages, const AntiCechOptions& opts = {}) {
    if (max_stages == 0) raise(errc::spec_error, "anti-Cech system needs at least one stage");
    AntiCechSystem sys;
    sys.ambient = &s;
    const Rat cap = window_cap(s);

    auto push_stage = [&](IndexedCover cover, const Rat& scale) {
        if (!sys.stages.empty()) {
            const IndexedCover& prev = sys.stages.back();
            if (!(dist_cmp(cover.certified_lebesgue, prev.diameter_bound) > 0)) {
                raise(errc::not_anti_cech,
                      "stage pair (" + rat_to_string(prev.scale) + ", " + rat_to_string(scale) +
                          "): certified Lebesgue bound " + cover.certified_lebesgue.str() +
                          " does not exceed the previous diameter bound " + rat_to_string(prev.diameter_bound));
            }
            sys.certified.push_back(true);
        }
        sys.stages.push_back(std::move(cover));
        sys.scales.push_back(scale);
    };

    const bool cap_active = dist_cmp(s.diameter(), Rat(0)) > 0;

    if (strategy.kind == "ball-doubling") {
        if (strategy.base <= 0) raise(errc::spec_error, "ball-doubling needs base scale > 0");
        Rat lambda = strategy.base;
        for (std::size_t i = 0; i < max_stages; ++i) {
            if (!opts.allow_cap_override && cap_active && Rat(2 * lambda) > cap) {
                sys.window_capped = true;
                sys.warnings.push_back("window cap: stopped at scale " + rat_to_string(lambda) +
                                       " (diameter bound " + rat_to_string(2 * lambda) + " > cap " +
                                       rat_to_string(cap) + ")");
                break;
            }
            if (s.size() <= opts.full_cover_threshold || !s.is_lattice_cloud()) {
                push_stage(ball_cover(s, lambda), lambda);
            } else {
                // Net spacing lambda keeps the box-fit bound at lambda + 1,
                // one above the previous diameter bound 2*lambda_prev.
                Rat spacing = (i == 0) ? lambda + 1 : lambda;
                if (spacing < 1) spacing = 1;
                push_stage(net_ball_cover(s, lambda, spacing), lambda);
            }
            lambda *= 2;
        }
    } else if (strategy.kind == "brick-doubling") {
        if (!s.is_lattice_cloud() || !detail::full_lattice_window(s))
            raise(errc::unsupported_space, "brick-doubling needs a full lattice window");
        const int n = static_cast<int>(s.cloud().dim);
        long base = 2;
        if (boost::multiprecision::denominator(strategy.base) == 1)
            base = static_cast<long>(boost::multiprecision::numerator(strategy.base));
        long m = std::max<long>(base, 2);
        while (m % (n + 1) != n % (n + 1)) ++m; // align so the family gap is 1
        for (std::size_t i = 0; i < max_stages; ++i) {
            // Prospective diameter bound of a side-m brick in this norm.
            Rat prospective = (s.cloud().norm == Norm::l1) ? Rat(n * (m - 1)) : Rat(m - 1);
            if (!opts.allow_cap_override && cap_active && prospective > cap) {
                sys.window_capped = true;
                sys.warnings.push_back("window cap: stopped at scale " + std::to_string(m) +
                                       " (diameter bound " + rat_to_string(prospective) + " > cap " +
                                       rat_to_string(cap) + ")");
                break;
            }
            push_stage(brick_cover(s, m), Rat(m));
            m = (n + 1) * (m + 1) - 1; // keeps stage scales aligned mod n+1
        }
    } else {
        raise(errc::spec_error, "unknown cover strategy '" + strategy.kind + "'");
    }
    if (sys.stages.empty())
        raise(errc::not_anti_cech, "no stage fits under the window cap " + rat_to_string(cap) +
                                       "; pass the cap override to force larger scales");
    return sys;
}

/// Re-derives the per-pair certification flags (used on ingested systems).
inline std::vector<bool> verify_anti_cech(const AntiCechSystem& sys) {
    std::vector<bool> flags;
    for (std::size_t i = 0; i + 1 < sys.stages.size(); ++i)
        flags.push_back(dist_cmp(sys.stages[i + 1].certified_lebesgue, sys.stages[i].diameter_bound) > 0);
    return flags;
}

// ---------------------------------------------------------------------------
// Refinement projections
// ---------------------------------------------------------------------------

enum class TieBreak { smallest, largest };

struct RefinementProjection {
    const IndexedCover* source = nullptr;
    const IndexedCover* target = nullptr;
    std::vector<std::uint32_t> map; // source index -> target index
};

inline RefinementProjection refinement_projection(const IndexedCover& from, const IndexedCover& to,
                                                  TieBreak tie = TieBreak::smallest) {
    if (from.ambient != to.ambient) raise(errc::spec_error, "refinement across different spaces");
    RefinementProjection p;
    p.source = &from;
    p.target = &to;
    p.map.reserve(from.size());
    for (std::size_t u = 0; u < from.size(); ++u) {
        std::optional<std::uint32_t> chosen;
        // Candidates must contain the first point of U; walk them in index
        // order so the tie-break is deterministic.
        point_id probe = from.members[u][0];
        for (std::int32_t v : to.point_members[probe]) {
            if (from.bits[u].is_subset_of(to.bits[v])) {
                if (!chosen || (tie == TieBreak::largest ? static_cast<std::uint32_t>(v) > *chosen
                                                         : static_cast<std::uint32_t>(v) < *chosen))
                    chosen = static_cast<std::uint32_t>(v);
            }
        }
        if (!chosen)
            raise(errc::not_a_refinement,
                  "source member " + std::to_string(u) + " is contained in no target member");
        p.map.push_back(*chosen);
    }
    return p;
}

} // namespace ck
