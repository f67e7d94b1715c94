#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "log.hpp"
#include "numeric.hpp"
#include "rng.hpp"

namespace ck {

using point_id = std::uint32_t;

enum class Norm { l1, l2, linf };

inline const char* norm_name(Norm n) {
    switch (n) {
    case Norm::l1: return "l1";
    case Norm::l2: return "l2";
    case Norm::linf: return "linf";
    }
    return "?";
}

inline Norm norm_from_string(const std::string& s) {
    if (s == "l1" || s == "L1") return Norm::l1;
    if (s == "l2" || s == "L2") return Norm::l2;
    if (s == "linf" || s == "Linf" || s == "LINF" || s == "loo") return Norm::linf;
    raise(errc::config_error, "unknown norm '" + s + "'");
}

/// Provenance of a space. Pipelines use it to pick cover strategies
/// (brick covers need a lattice window) and scenario checks need the
/// declared model dimension.
struct SpaceInfo {
    std::string kind = "unknown";
    int model_dim = -1;   // declared dimension of the infinite model (grids)
    long side = 0;        // window side for grid-like spaces
    std::uint64_t seed = 0;
};

class FiniteMetricSpace {
public:
    struct GraphData {
        std::vector<std::vector<std::pair<point_id, Rat>>> adj;
        bool unit = true;
    };
    struct CloudData {
        std::size_t dim = 0;
        Norm norm = Norm::l1;
        std::vector<std::vector<Rat>> coords; // coords[point][axis]
    };
    struct MatrixData {
        std::vector<std::vector<Dist>> d; // dense, symmetric
    };

    FiniteMetricSpace(GraphData g, std::vector<point_id> frontier, SpaceInfo info)
        : backend_(std::move(g)), frontier_(std::move(frontier)), info_(std::move(info)) {
        init_graph();
        finish_init();
    }

    FiniteMetricSpace(CloudData c, std::vector<point_id> frontier, SpaceInfo info)
        : backend_(std::move(c)), frontier_(std::move(frontier)), info_(std::move(info)) {
        init_cloud();
        finish_init();
    }

    FiniteMetricSpace(MatrixData m, std::vector<point_id> frontier, SpaceInfo info)
        : backend_(std::move(m)), frontier_(std::move(frontier)), info_(std::move(info)) {
        n_ = std::get<MatrixData>(backend_).d.size();
        finish_init();
    }

    std::size_t size() const { return n_; }

    const SpaceInfo& info() const { return info_; }

    const std::vector<point_id>& frontier() const { return frontier_; }

    bool in_frontier(point_id x) const {
        return std::binary_search(frontier_.begin(), frontier_.end(), x);
    }

    void set_frontier(std::vector<point_id> f) {
        std::sort(f.begin(), f.end());
        f.erase(std::unique(f.begin(), f.end()), f.end());
        for (point_id x : f) check_id(x);
        frontier_ = std::move(f);
    }

    void check_id(point_id x) const {
        if (x >= n_) raise(errc::id_out_of_range, "point id " + std::to_string(x) + " out of range (n=" + std::to_string(n_) + ")");
    }

    Dist distance(point_id x, point_id y) const {
        check_id(x);
        check_id(y);
        if (const auto* g = std::get_if<GraphData>(&backend_)) {
            if (g->unit) return Dist::rational(Rat(unit_rows_[x][y]));
            return Dist::rational(rat_rows_[x][y]);
        }
        if (const auto* c = std::get_if<CloudData>(&backend_)) return cloud_distance(*c, x, y);
        return std::get<MatrixData>(backend_).d[x][y];
    }

    /// d(x, y) <= r, exact.
    bool within(point_id x, point_id y, const Rat& r) const {
        if (const auto* g = std::get_if<GraphData>(&backend_)) {
            if (g->unit) return Rat(unit_rows_[x][y]) <= r;
            return rat_rows_[x][y] <= r;
        }
        if (const auto* c = std::get_if<CloudData>(&backend_)) return cloud_within(*c, x, y, r);
        return dist_leq(std::get<MatrixData>(backend_).d[x][y], r);
    }

    Dist diameter() const { return diameter_; }

    /// Closed ball of radius lambda around x, ascending point ids.
    std::vector<point_id> ball(point_id x, const Rat& lambda) const {
        check_id(x);
        if (lambda < 0) raise(errc::spec_error, "negative ball radius");
        std::vector<point_id> out;
        for (point_id y = 0; y < n_; ++y)
            if (within(x, y, lambda)) out.push_back(y);
        return out;
    }

    Dist distance_to_set(point_id x, const std::vector<point_id>& a) const {
        if (a.empty()) raise(errc::empty_subspace, "distance to empty subset");
        Dist best = distance(x, a[0]);
        for (std::size_t i = 1; i < a.size(); ++i) {
            Dist d = distance(x, a[i]);
            if (d < best) best = d;
        }
        return best;
    }

    /// N_R(A) = { x : d(x, A) <= R }, ascending ids.
    std::vector<point_id> neighborhood(const std::vector<point_id>& a, const Rat& r) const {
        if (a.empty()) raise(errc::empty_subspace, "neighborhood of empty subset");
        if (r < 0) raise(errc::spec_error, "negative neighborhood radius");
        for (point_id x : a) check_id(x);
        std::vector<point_id> out;
        for (point_id x = 0; x < n_; ++x) {
            for (point_id y : a) {
                if (within(x, y, r)) {
                    out.push_back(x);
                    break;
                }
            }
        }
        return out;
    }

    /// Partition of `members` into connected components of the graph with
    /// edges { d <= scale }. Components ordered by smallest member id.
    std::vector<std::vector<point_id>> components(std::vector<point_id> members, const Rat& scale) const {
        if (scale < 0) raise(errc::spec_error, "negative component scale");
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (point_id x : members) check_id(x);
        std::vector<std::vector<point_id>> comps;
        std::vector<bool> used(members.size(), false);
        for (std::size_t seed = 0; seed < members.size(); ++seed) {
            if (used[seed]) continue;
            std::vector<point_id> comp;
            std::vector<std::size_t> queue{seed};
            used[seed] = true;
            while (!queue.empty()) {
                std::size_t cur = queue.back();
                queue.pop_back();
                comp.push_back(members[cur]);
                for (std::size_t j = 0; j < members.size(); ++j) {
                    if (!used[j] && within(members[cur], members[j], scale)) {
                        used[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
        return comps;
    }

    bool is_cloud() const { return std::holds_alternative<CloudData>(backend_); }

    /// Cloud whose coordinates are all integers: the lattice window case.
    /// Brick covers and box-fit Lebesgue certificates require this.
    bool is_lattice_cloud() const { return lattice_; }

    const CloudData& cloud() const {
        if (!is_cloud()) raise(errc::unsupported_space, "operation requires a point-cloud backend");
        return std::get<CloudData>(backend_);
    }

    long long lattice_coord(point_id x, std::size_t axis) const { return int_coords_[x * cloud().dim + axis]; }

    std::pair<long long, long long> lattice_range(std::size_t axis) const {
        return {axis_lo_[axis], axis_hi_[axis]};
    }

    /// Ambient-restricted subspace as a standalone space: cloud backends keep
    /// their coordinates, graph backends get a dense distance matrix. The
    /// frontier is the ambient frontier intersected with the subset.
    FiniteMetricSpace subspace(const std::vector<point_id>& members_in) const {
        if (members_in.empty()) raise(errc::empty_subspace, "empty subspace");
        std::vector<point_id> members = members_in;
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (point_id x : members) check_id(x);
        std::vector<point_id> sub_frontier;
        for (std::size_t i = 0; i < members.size(); ++i)
            if (in_frontier(members[i])) sub_frontier.push_back(static_cast<point_id>(i));
        SpaceInfo sub_info;
        sub_info.kind = "subspace(" + info_.kind + ")";
        if (const auto* c = std::get_if<CloudData>(&backend_)) {
            CloudData sub;
            sub.dim = c->dim;
            sub.norm = c->norm;
            for (point_id x : members) sub.coords.push_back(c->coords[x]);
            return FiniteMetricSpace(std::move(sub), std::move(sub_frontier), std::move(sub_info));
        }
        MatrixData m;
        m.d.resize(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            m.d[i].resize(members.size());
            for (std::size_t j = 0; j < members.size(); ++j) m.d[i][j] = distance(members[i], members[j]);
        }
        return FiniteMetricSpace(std::move(m), std::move(sub_frontier), std::move(sub_info));
    }

private:
    void init_graph() {
        auto& g = std::get<GraphData>(backend_);
        n_ = g.adj.size();
        if (n_ == 0) raise(errc::spec_error, "empty graph");
        if (n_ > 8192) raise(errc::unsupported_space, "graph too large for dense distance precomputation");
        if (g.unit) {
            unit_rows_.assign(n_, {});
            for (point_id s = 0; s < n_; ++s) {
                auto& row = unit_rows_[s];
                row.assign(n_, -1);
                std::queue<point_id> q;
                q.push(s);
                row[s] = 0;
                while (!q.empty()) {
                    point_id x = q.front();
                    q.pop();
                    for (auto& [y, w] : g.adj[x]) {
                        if (row[y] < 0) {
                            row[y] = row[x] + 1;
                            q.push(y);
                        }
                    }
                }
                for (auto v : row)
                    if (v < 0) raise(errc::spec_error, "graph metric requires a connected graph");
            }
        } else {
            rat_rows_.assign(n_, {});
            for (point_id s = 0; s < n_; ++s) dijkstra(g, s, rat_rows_[s]);
        }
    }

    void dijkstra(const GraphData& g, point_id s, std::vector<Rat>& dist) const {
        dist.assign(n_, Rat(-1));
        using Item = std::pair<Rat, point_id>;
        auto cmp = [](const Item& a, const Item& b) { return a.first > b.first; };
        std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
        dist[s] = 0;
        pq.push({Rat(0), s});
        std::vector<bool> done(n_, false);
        while (!pq.empty()) {
            auto [d, x] = pq.top();
            pq.pop();
            if (done[x]) continue;
            done[x] = true;
            for (auto& [y, w] : g.adj[x]) {
                if (w < 0) raise(errc::spec_error, "negative edge weight");
                Rat nd = d + w;
                if (dist[y] < 0 || nd < dist[y]) {
                    dist[y] = nd;
                    pq.push({nd, y});
                }
            }
        }
        for (auto& v : dist)
            if (v < 0) raise(errc::spec_error, "graph metric requires a connected graph");
    }

    void init_cloud() {
        auto& c = std::get<CloudData>(backend_);
        n_ = c.coords.size();
        if (n_ == 0) raise(errc::spec_error, "empty point cloud");
        for (auto& row : c.coords)
            if (row.size() != c.dim) raise(errc::spec_error, "inconsistent point-cloud dimension");
        lattice_ = true;
        for (auto& row : c.coords)
            for (auto& q : row)
                if (boost::multiprecision::denominator(q) != 1) lattice_ = false;
        if (lattice_) {
            int_coords_.reserve(n_ * c.dim);
            axis_lo_.assign(c.dim, 0);
            axis_hi_.assign(c.dim, 0);
            for (std::size_t i = 0; i < n_; ++i) {
                for (std::size_t k = 0; k < c.dim; ++k) {
                    long long v = static_cast<long long>(boost::multiprecision::numerator(c.coords[i][k]));
                    int_coords_.push_back(v);
                    if (i == 0 || v < axis_lo_[k]) axis_lo_[k] = v;
                    if (i == 0 || v > axis_hi_[k]) axis_hi_[k] = v;
                }
            }
        }
    }

    static Dist cloud_distance(const CloudData& c, point_id x, point_id y) {
        switch (c.norm) {
        case Norm::l1: {
            Rat s = 0;
            for (std::size_t k = 0; k < c.dim; ++k) s += boost::multiprecision::abs(Rat(c.coords[x][k] - c.coords[y][k]));
            return Dist::rational(s);
        }
        case Norm::linf: {
            Rat best = 0;
            for (std::size_t k = 0; k < c.dim; ++k) {
                Rat a = boost::multiprecision::abs(Rat(c.coords[x][k] - c.coords[y][k]));
                if (a > best) best = a;
            }
            return Dist::rational(best);
        }
        case Norm::l2: {
            Rat s = 0;
            for (std::size_t k = 0; k < c.dim; ++k) {
                Rat d = c.coords[x][k] - c.coords[y][k];
                s += d * d;
            }
            return Dist::sqrt_of(s);
        }
        }
        raise(errc::internal_error, "bad norm");
    }

    static bool cloud_within(const CloudData& c, point_id x, point_id y, const Rat& r) {
        if (c.norm == Norm::l2) {
            Rat s = 0;
            for (std::size_t k = 0; k < c.dim; ++k) {
                Rat d = c.coords[x][k] - c.coords[y][k];
                s += d * d;
            }
            return s <= r * r;
        }
        return dist_leq(cloud_distance(c, x, y), r);
    }

    void finish_init() {
        std::sort(frontier_.begin(), frontier_.end());
        frontier_.erase(std::unique(frontier_.begin(), frontier_.end()), frontier_.end());
        for (point_id x : frontier_) check_id(x);
        compute_diameter();
    }

    void compute_diameter() {
        diameter_ = Dist::zero();
        if (const auto* g = std::get_if<GraphData>(&backend_)) {
            if (g->unit) {
                long best = 0;
                for (auto& row : unit_rows_)
                    for (auto v : row) best = std::max<long>(best, v);
                diameter_ = Dist::rational(Rat(best));
            } else {
                Rat best = 0;
                for (auto& row : rat_rows_)
                    for (auto& v : row)
                        if (v > best) best = v;
                diameter_ = Dist::rational(best);
            }
            return;
        }
        if (const auto* c = std::get_if<CloudData>(&backend_)) {
            if (lattice_ && c->norm != Norm::l2) {
                // Bounding-box extents give the exact diameter for L1/Linf
                // lattice windows, skipping the quadratic pair scan.
                Rat d = 0;
                for (std::size_t k = 0; k < c->dim; ++k) {
                    Rat e(axis_hi_[k] - axis_lo_[k]);
                    if (c->norm == Norm::l1)
                        d += e;
                    else
                        d = std::max(d, e, [](const Rat& a, const Rat& b) { return a < b; });
                }
                diameter_ = Dist::rational(d);
                return;
            }
            Dist best = Dist::zero();
            for (point_id x = 0; x < n_; ++x)
                for (point_id y = x + 1; y < n_; ++y) {
                    Dist d = cloud_distance(*c, x, y);
                    if (best < d) best = d;
                }
            diameter_ = best;
            return;
        }
        const auto& m = std::get<MatrixData>(backend_);
        Dist best = Dist::zero();
        for (auto& row : m.d)
            for (auto& v : row)
                if (best < v) best = v;
        diameter_ = best;
    }

    std::variant<GraphData, CloudData, MatrixData> backend_;
    std::vector<point_id> frontier_;
    SpaceInfo info_;
    std::size_t n_ = 0;
    bool lattice_ = false;
    std::vector<std::vector<std::int32_t>> unit_rows_;
    std::vector<std::vector<Rat>> rat_rows_;
    std::vector<long long> int_coords_;
    std::vector<long long> axis_lo_, axis_hi_;
    Dist diameter_;
};

/// A subset of an ambient space; the induced metric is the ambient
/// restriction, never an intrinsic path metric.
struct SubspaceRef {
    const FiniteMetricSpace* ambient = nullptr;
    std::vector<point_id> members;

    SubspaceRef() = default;
    SubspaceRef(const FiniteMetricSpace& s, std::vector<point_id> m) : ambient(&s), members(std::move(m)) {
        if (members.empty()) raise(errc::empty_subspace, "empty subspace");
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (point_id x : members) ambient->check_id(x);
    }
};

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

enum class FrontierRule { window_boundary, explicit_ids, none };

struct GeneratorSpec {
    std::string kind; // grid | path | cycle | tree | random-geometric
    int n = 1;        // grid dimension
    long side = 0;    // grid side / path length (number of points)
    long length = 0;  // path/cycle length (number of points)
    int arity = 2;    // tree
    int depth = 1;    // tree
    long n_points = 0;
    Rat radius = Rat(0);
    std::uint64_t seed = 0;
    Norm metric = Norm::l1;
    FrontierRule frontier_rule = FrontierRule::window_boundary;
    std::vector<point_id> explicit_frontier;
};

inline FiniteMetricSpace generate_grid(int n, long side, Norm norm, FrontierRule rule,
                                       const std::vector<point_id>& explicit_frontier) {
    if (n < 1 || side < 1) raise(errc::spec_error, "grid needs dim >= 1 and side >= 1");
    std::size_t total = 1;
    for (int k = 0; k < n; ++k) {
        total *= static_cast<std::size_t>(side);
        if (total > 2'000'000) raise(errc::spec_error, "grid too large");
    }
    FiniteMetricSpace::CloudData cloud;
    cloud.dim = static_cast<std::size_t>(n);
    cloud.norm = norm;
    cloud.coords.resize(total, std::vector<Rat>(n));
    std::vector<long> digits(n, 0);
    for (std::size_t id = 0; id < total; ++id) {
        for (int k = 0; k < n; ++k) cloud.coords[id][k] = Rat(digits[k]);
        for (int k = n - 1; k >= 0; --k) {
            if (++digits[k] < side) break;
            digits[k] = 0;
        }
    }
    std::vector<point_id> frontier;
    if (rule == FrontierRule::window_boundary) {
        for (std::size_t id = 0; id < total; ++id)
            for (int k = 0; k < n; ++k) {
                const Rat& c = cloud.coords[id][k];
                if (c == 0 || c == side - 1) {
                    if (side > 1) frontier.push_back(static_cast<point_id>(id));
                    break;
                }
            }
    } else if (rule == FrontierRule::explicit_ids) {
        frontier = explicit_frontier;
    }
    SpaceInfo info;
    info.kind = "grid";
    info.model_dim = n;
    info.side = side;
    return FiniteMetricSpace(std::move(cloud), std::move(frontier), std::move(info));
}

inline FiniteMetricSpace generate_path(long length, FrontierRule rule,
                                       const std::vector<point_id>& explicit_frontier) {
    if (length < 1) raise(errc::spec_error, "path needs length >= 1");
    auto s = generate_grid(1, length, Norm::l1, rule, explicit_frontier);
    SpaceInfo info = s.info();
    info.kind = "path";
    return FiniteMetricSpace(FiniteMetricSpace::CloudData(s.cloud()), std::vector<point_id>(s.frontier()),
                             std::move(info));
}

inline FiniteMetricSpace generate_cycle(long length) {
    if (length < 3) raise(errc::spec_error, "cycle needs length >= 3");
    FiniteMetricSpace::GraphData g;
    g.adj.resize(length);
    for (long i = 0; i < length; ++i) {
        long j = (i + 1) % length;
        g.adj[i].push_back({static_cast<point_id>(j), Rat(1)});
        g.adj[j].push_back({static_cast<point_id>(i), Rat(1)});
    }
    SpaceInfo info;
    info.kind = "cycle";
    info.side = length;
    return FiniteMetricSpace(std::move(g), {}, std::move(info));
}

inline FiniteMetricSpace generate_tree(int arity, int depth, FrontierRule rule,
                                       const std::vector<point_id>& explicit_frontier) {
    if (arity < 1 || depth < 0) raise(errc::spec_error, "tree needs arity >= 1, depth >= 0");
    std::vector<std::pair<point_id, point_id>> edges;
    std::vector<int> level{0};
    std::size_t next = 1;
    for (std::size_t x = 0; x < level.size(); ++x) {
        if (level[x] == depth) continue;
        for (int c = 0; c < arity; ++c) {
            edges.push_back({static_cast<point_id>(x), static_cast<point_id>(next)});
            level.push_back(level[x] + 1);
            ++next;
            if (next > 500'000) raise(errc::spec_error, "tree too large");
        }
    }
    FiniteMetricSpace::GraphData g;
    g.adj.resize(next);
    for (auto& [a, b] : edges) {
        g.adj[a].push_back({b, Rat(1)});
        g.adj[b].push_back({a, Rat(1)});
    }
    std::vector<point_id> frontier;
    if (rule == FrontierRule::window_boundary) {
        for (std::size_t x = 0; x < level.size(); ++x)
            if (level[x] == depth && depth > 0) frontier.push_back(static_cast<point_id>(x));
    } else if (rule == FrontierRule::explicit_ids) {
        frontier = explicit_frontier;
    }
    SpaceInfo info;
    info.kind = "tree";
    return FiniteMetricSpace(std::move(g), std::move(frontier), std::move(info));
}

/// Random geometric graph: n points in the unit square (coordinates are
/// dyadic rationals), unit-weight edges between pairs at L2 distance <= radius.
inline FiniteMetricSpace generate_random_geometric(long n_points, const Rat& radius, std::uint64_t seed) {
    if (n_points < 1) raise(errc::spec_error, "random-geometric needs n >= 1");
    if (radius <= 0) raise(errc::spec_error, "random-geometric needs radius > 0");
    SplitMix64 rng(seed);
    const long long den = 1 << 16;
    std::vector<std::pair<long long, long long>> pts;
    pts.reserve(n_points);
    for (long i = 0; i < n_points; ++i) {
        long long x = static_cast<long long>(rng.below(den + 1));
        long long y = static_cast<long long>(rng.below(den + 1));
        pts.push_back({x, y});
    }
    FiniteMetricSpace::GraphData g;
    g.adj.resize(n_points);
    Rat r2 = radius * radius;
    for (long i = 0; i < n_points; ++i)
        for (long j = i + 1; j < n_points; ++j) {
            Rat dx = Rat(pts[i].first - pts[j].first, den);
            Rat dy = Rat(pts[i].second - pts[j].second, den);
            if (dx * dx + dy * dy <= r2) {
                g.adj[i].push_back({static_cast<point_id>(j), Rat(1)});
                g.adj[j].push_back({static_cast<point_id>(i), Rat(1)});
            }
        }
    SpaceInfo info;
    info.kind = "random-geometric";
    info.seed = seed;
    return FiniteMetricSpace(std::move(g), {}, std::move(info));
}

inline FiniteMetricSpace generate(const GeneratorSpec& spec) {
    if (spec.kind == "grid")
        return generate_grid(spec.n, spec.side, spec.metric, spec.frontier_rule, spec.explicit_frontier);
    if (spec.kind == "path")
        return generate_path(spec.length > 0 ? spec.length : spec.side, spec.frontier_rule, spec.explicit_frontier);
    if (spec.kind == "cycle") return generate_cycle(spec.length > 0 ? spec.length : spec.side);
    if (spec.kind == "tree") return generate_tree(spec.arity, spec.depth, spec.frontier_rule, spec.explicit_frontier);
    if (spec.kind == "random-geometric") return generate_random_geometric(spec.n_points, spec.radius, spec.seed);
    raise(errc::spec_error, "unknown generator kind '" + spec.kind + "'");
}

// ---------------------------------------------------------------------------
// Subset selectors
// ---------------------------------------------------------------------------

struct SubsetSelector {
    std::string kind = "none"; // none | hyperplane | ball | explicit
    int axis = 0;
    long value = 0;
    std::optional<point_id> center;  // default: the window midpoint
    Rat radius = Rat(0);
    std::vector<point_id> ids;
};

inline point_id window_center(const FiniteMetricSpace& s) {
    if (s.is_lattice_cloud()) {
        const auto& c = s.cloud();
        std::vector<long long> want(c.dim);
        for (std::size_t k = 0; k < c.dim; ++k) {
            auto [lo, hi] = s.lattice_range(k);
            want[k] = (lo + hi) / 2;
        }
        for (point_id x = 0; x < s.size(); ++x) {
            bool ok = true;
            for (std::size_t k = 0; k < c.dim; ++k)
                if (s.lattice_coord(x, k) != want[k]) {
                    ok = false;
                    break;
                }
            if (ok) return x;
        }
    }
    return static_cast<point_id>(s.size() / 2);
}

inline SubspaceRef apply_selector(const FiniteMetricSpace& s, const SubsetSelector& sel) {
    if (sel.kind == "explicit") return SubspaceRef(s, sel.ids);
    if (sel.kind == "hyperplane") {
        if (!s.is_lattice_cloud()) raise(errc::unsupported_space, "hyperplane selector needs a lattice window");
        std::vector<point_id> members;
        for (point_id x = 0; x < s.size(); ++x)
            if (s.lattice_coord(x, static_cast<std::size_t>(sel.axis)) == sel.value) members.push_back(x);
        if (members.empty()) raise(errc::spec_error, "hyperplane selector produced an empty subset");
        return SubspaceRef(s, std::move(members));
    }
    if (sel.kind == "ball") {
        point_id c = sel.center ? *sel.center : window_center(s);
        auto members = s.ball(c, sel.radius);
        return SubspaceRef(s, std::move(members));
    }
    raise(errc::spec_error, "selector kind '" + sel.kind + "' cannot produce a subset");
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

/// Text edge list: one `u v w` per line (w optional, rational, default 1).
inline FiniteMetricSpace load_edge_list(std::istream& in) {
    std::vector<std::tuple<long, long, Rat>> edges;
    long max_id = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long u, v;
        std::string w;
        if (!(ls >> u >> v)) raise(errc::io_error, "bad edge-list line: '" + line + "'");
        Rat weight(1);
        if (ls >> w) weight = rat_from_string(w);
        if (u < 0 || v < 0) raise(errc::io_error, "negative vertex id");
        if (weight < 0) raise(errc::io_error, "negative edge weight");
        edges.push_back({u, v, weight});
        max_id = std::max({max_id, u, v});
    }
    if (max_id < 0) raise(errc::io_error, "empty edge list");
    FiniteMetricSpace::GraphData g;
    g.adj.resize(max_id + 1);
    for (auto& [u, v, w] : edges) {
        if (w != 1) g.unit = false;
        g.adj[u].push_back({static_cast<point_id>(v), w});
        g.adj[v].push_back({static_cast<point_id>(u), w});
    }
    SpaceInfo info;
    info.kind = "edge-list";
    return FiniteMetricSpace(std::move(g), {}, std::move(info));
}

inline FiniteMetricSpace load_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open '" + path + "'");
    return load_edge_list(in);
}

/// CSV point cloud: one row per point, columns are exact coordinates.
inline FiniteMetricSpace load_point_cloud(std::istream& in, Norm norm) {
    FiniteMetricSpace::CloudData cloud;
    cloud.norm = norm;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<Rat> row;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            cell.erase(std::remove_if(cell.begin(), cell.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; }),
                       cell.end());
            if (!cell.empty()) row.push_back(rat_from_string(cell));
        }
        if (row.empty()) continue;
        if (cloud.coords.empty()) cloud.dim = row.size();
        cloud.coords.push_back(std::move(row));
    }
    if (cloud.coords.empty()) raise(errc::io_error, "empty point cloud");
    SpaceInfo info;
    info.kind = "point-cloud";
    return FiniteMetricSpace(std::move(cloud), {}, std::move(info));
}

inline FiniteMetricSpace load_point_cloud_file(const std::string& path, Norm norm) {
    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open '" + path + "'");
    return load_point_cloud(in, norm);
}

} // namespace ck
