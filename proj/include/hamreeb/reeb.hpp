#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "hamreeb/core.hpp"
#include "hamreeb/critical_points.hpp"
#include "hamreeb/mesh.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"

namespace hamreeb {

enum class NodeKind { Min, Max, Saddle, BoundaryLevel, DegenerateDeclared };

inline std::string to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Min: return "min";
        case NodeKind::Max: return "max";
        case NodeKind::Saddle: return "saddle";
        case NodeKind::BoundaryLevel: return "boundary";
        case NodeKind::DegenerateDeclared: return "degenerate";
    }
    return "?";
}

struct ReebNode {
    int id = -1;
    NodeKind kind = NodeKind::Min;
    double value = 0.0;
    ChartPoint anchor;              // a point of the singular level component
    std::vector<int> critical_ids;  // indices into the crit list, if any
    int boundary_id = -1;           // index of the boundary loop, if any
    int degree = 0;
};

struct ReebEdge {
    int id = -1;
    int node_lo = -1, node_hi = -1;
    double v_lo = 0.0, v_hi = 0.0;  // open f-range of the regular cylinder
    std::vector<std::pair<double, ChartPoint>> samples;  // (value, point on the level component)
};

/// Point of the quotient space: either a node or an interior edge point.
struct GraphPoint {
    bool is_node = false;
    int id = -1;
    double param = 0.0;  // position of f(x) in the edge range, strictly inside (0,1)
};

class ReebError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Kronrod-Reeb graph of a PL field on a triangulated surface, with the
/// labelling needed to evaluate the quotient map on arbitrary points.
struct ReebGraph {
    std::shared_ptr<const TriMesh> mesh;
    ScalarField field;
    std::vector<ReebNode> nodes;
    std::vector<ReebEdge> edges;
    bool circle_cut = false;  // circle-valued field handled by cutting at 0
    double period = 0.0;

    // quotient machinery
    std::vector<double> level_values;          // distinct node values, ascending
    std::vector<double> level_margins;         // PL slop around each node value
    struct BandInfo {
        std::unordered_map<int, int> tri2comp;
        std::vector<int> comp2node;  // -1 for regular pass-through components
        std::vector<int> comp2edge;  // set for regular components
    };
    std::vector<BandInfo> bands;               // one per distinct node value
    std::vector<std::unordered_map<int, int>> interval_edge_of_tri;  // per interval

    bool connected() const {
        if (nodes.empty()) return true;
        std::vector<std::vector<int>> adj(nodes.size());
        for (const auto& e : edges) {
            adj[e.node_lo].push_back(e.node_hi);
            adj[e.node_hi].push_back(e.node_lo);
        }
        std::vector<bool> seen(nodes.size(), false);
        std::vector<int> stack = {0};
        seen[0] = true;
        while (!stack.empty()) {
            const int n = stack.back();
            stack.pop_back();
            for (int m : adj[n])
                if (!seen[m]) {
                    seen[m] = true;
                    stack.push_back(m);
                }
        }
        for (bool b : seen)
            if (!b) return false;
        return true;
    }

    int first_betti_number() const {
        return (int)edges.size() - (int)nodes.size() + (connected() ? 1 : 0);
    }
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    void init(int n) {
        parent.resize(n);
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

/// Interior PL criticality census via lower/upper link component counts.
struct PlCensus {
    std::vector<int> minima, maxima, saddles;  // vertex ids
};

inline PlCensus pl_criticality_census(const TriMesh& m) {
    const int nv = m.vertex_count();
    // incident triangles per vertex
    std::vector<std::vector<int>> star(nv);
    for (int t = 0; t < m.triangle_count(); ++t)
        for (int k = 0; k < 3; ++k) star[m.triangles[t][k]].push_back(t);

    PlCensus census;
    for (int v = 0; v < nv; ++v) {
        if (m.boundary_flag[v]) continue;  // boundary circles are declared nodes
        // link edges (b, c) opposite to v
        std::vector<std::pair<int, int>> link;
        for (int t : star[v]) {
            int b = -1, c = -1;
            for (int k = 0; k < 3; ++k)
                if (m.triangles[t][k] == v) {
                    b = m.triangles[t][(k + 1) % 3];
                    c = m.triangles[t][(k + 2) % 3];
                }
            link.push_back({b, c});
        }
        auto count_components = [&](bool lower) {
            std::map<int, int> comp;
            int n_comp = 0;
            auto in_side = [&](int u) { return lower ? m.value_less(u, v) : m.value_less(v, u); };
            // union-find over link vertices through link edges
            std::map<int, int> parent;
            std::function<int(int)> find = [&](int a) {
                while (parent[a] != a) a = parent[a] = parent[parent[a]];
                return a;
            };
            for (const auto& [b, c] : link) {
                if (in_side(b) && !parent.count(b)) parent[b] = b;
                if (in_side(c) && !parent.count(c)) parent[c] = c;
                if (in_side(b) && in_side(c)) parent[find(b)] = find(c);
            }
            std::set<int> roots;
            for (const auto& [u, _] : parent) roots.insert(find(u));
            (void)comp;
            (void)n_comp;
            return (int)roots.size();
        };
        const int lo = count_components(true);
        const int hi = count_components(false);
        if (lo == 0)
            census.minima.push_back(v);
        else if (hi == 0)
            census.maxima.push_back(v);
        else if (lo >= 2)
            census.saddles.push_back(v);
    }
    return census;
}

inline NodeKind node_kind_of(CriticalKind k) {
    switch (k) {
        case CriticalKind::NondegMin: return NodeKind::Min;
        case CriticalKind::NondegMax: return NodeKind::Max;
        case CriticalKind::NondegSaddle: return NodeKind::Saddle;
        default: return NodeKind::DegenerateDeclared;
    }
}

/// Connected components of a value band [lo, hi] over the mesh: triangles
/// whose PL range meets the band, connected through shared edges meeting it.
struct BandComponents {
    std::unordered_map<int, int> tri2comp;
    int count = 0;
};

inline BandComponents band_components(const TriMesh& m, double lo, double hi) {
    BandComponents bc;
    auto in_band = [&](int t) {
        double mn = 1e300, mx = -1e300;
        for (int k = 0; k < 3; ++k) {
            mn = std::min(mn, m.values[m.triangles[t][k]]);
            mx = std::max(mx, m.values[m.triangles[t][k]]);
        }
        return mn <= hi && mx >= lo;
    };
    auto edge_in_band = [&](int t, int k) {
        const double a = m.values[m.triangles[t][k]];
        const double b = m.values[m.triangles[t][(k + 1) % 3]];
        return std::min(a, b) <= hi && std::max(a, b) >= lo;
    };
    std::vector<int> stack;
    for (int t0 = 0; t0 < m.triangle_count(); ++t0) {
        if (bc.tri2comp.count(t0) || !in_band(t0)) continue;
        const int comp = bc.count++;
        stack.push_back(t0);
        bc.tri2comp[t0] = comp;
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            for (int k = 0; k < 3; ++k) {
                const int nb = m.tri_neighbors[t][k];
                if (nb < 0 || bc.tri2comp.count(nb) || !edge_in_band(t, k)) continue;
                if (!in_band(nb)) continue;
                bc.tri2comp[nb] = comp;
                stack.push_back(nb);
            }
        }
    }
    return bc;
}

/// Components of the level set {f = v}: crossing triangles connected through
/// crossing edges, with an interpolated representative point per component.
struct LevelComponents {
    std::unordered_map<int, int> tri2comp;
    std::vector<ChartPoint> rep;
    int count = 0;
};

inline LevelComponents level_components(const TriMesh& m, double v) {
    LevelComponents lc;
    auto below = [&](int vert) { return m.values[vert] <= v; };
    auto crosses_tri = [&](int t) {
        int n_below = 0;
        for (int k = 0; k < 3; ++k) n_below += below(m.triangles[t][k]);
        return n_below == 1 || n_below == 2;
    };
    auto crosses_edge = [&](int t, int k) {
        return below(m.triangles[t][k]) != below(m.triangles[t][(k + 1) % 3]);
    };
    std::vector<int> stack;
    for (int t0 = 0; t0 < m.triangle_count(); ++t0) {
        if (lc.tri2comp.count(t0) || !crosses_tri(t0)) continue;
        const int comp = lc.count++;
        stack.push_back(t0);
        lc.tri2comp[t0] = comp;
        // representative: interpolate on a crossing edge
        for (int k = 0; k < 3; ++k)
            if (crosses_edge(t0, k)) {
                const int a = m.triangles[t0][k], b = m.triangles[t0][(k + 1) % 3];
                const double t = (v - m.values[a]) / (m.values[b] - m.values[a]);
                const Vec2 p = m.tri_coords[t0][k] + (m.tri_coords[t0][(k + 1) % 3] -
                                                      m.tri_coords[t0][k]) *
                                                         t;
                lc.rep.push_back(m.surface->canonicalize({m.tri_chart[t0], p}));
                break;
            }
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            for (int k = 0; k < 3; ++k) {
                const int nb = m.tri_neighbors[t][k];
                if (nb < 0 || lc.tri2comp.count(nb) || !crosses_edge(t, k)) continue;
                lc.tri2comp[nb] = comp;
                stack.push_back(nb);
            }
        }
    }
    return lc;
}

}  // namespace detail

/// Build the Kronrod-Reeb graph by a banded sweep: level components at
/// midpoints between consecutive node values become edge germs, and band
/// connectivity around each node value either glues germs across (regular
/// pass-through) or attaches them to the node.
inline ReebGraph build_reeb_graph(const std::shared_ptr<const TriMesh>& mesh_ptr,
                                  const ScalarField& f,
                                  const std::vector<CriticalPoint>& crit_list);

namespace detail {

inline ReebGraph build_circle_cut_graph(const std::shared_ptr<const TriMesh>& mesh_ptr,
                                        const ScalarField& f,
                                        const std::vector<CriticalPoint>& crit_list) {
    // Circle-valued fields are in scope only without critical points (the
    // flat-torus type (D) case); the codomain is cut at the regular value 0.
    if (!crit_list.empty())
        throw ReebError("circle-valued Reeb graphs require a critical-point-free field");
    const TriMesh& m = *mesh_ptr;
    const double p = f.period;
    if (p <= 0) throw ReebError("circle-valued field without period");

    ReebGraph g;
    g.mesh = mesh_ptr;
    g.field = f;
    g.circle_cut = true;
    g.period = p;

    std::vector<double> lifted(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) lifted[v] = wrap_periodic(m.values[v], p);

    // seam triangles wrap in value; their low corners conceptually gain +p
    auto tri_wraps = [&](int t) {
        double mn = 1e300, mx = -1e300;
        for (int k = 0; k < 3; ++k) {
            mn = std::min(mn, lifted[m.triangles[t][k]]);
            mx = std::max(mx, lifted[m.triangles[t][k]]);
        }
        return mx - mn > p / 2;
    };
    // the cut must be resolved by the mesh: wrapped triangles may only touch
    // vertices at lifted value ~0 on their low side
    for (int t = 0; t < m.triangle_count(); ++t) {
        if (!tri_wraps(t)) continue;
        for (int k = 0; k < 3; ++k) {
            const double v = lifted[m.triangles[t][k]];
            if (v > p / 2) continue;  // high side
            if (v > 1e-9 * p)
                throw ReebError("circle cut level is not resolved by the mesh");
        }
    }

    // cylinders of the cut-open surface: two triangles are separated exactly
    // when their shared edge lies on the cut circle and they approach it from
    // opposite sides of the period
    std::vector<bool> on_cut(m.vertex_count(), false);
    for (int v = 0; v < m.vertex_count(); ++v) on_cut[v] = lifted[v] < 1e-9 * std::max(p, 1.0);
    std::vector<int> comp(m.triangle_count(), -1);
    int n_comp = 0;
    std::vector<int> stack;
    for (int t0 = 0; t0 < m.triangle_count(); ++t0) {
        if (comp[t0] >= 0) continue;
        comp[t0] = n_comp;
        stack.push_back(t0);
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            for (int k = 0; k < 3; ++k) {
                const int nb = m.tri_neighbors[t][k];
                if (nb < 0 || comp[nb] >= 0) continue;
                const int a = m.triangles[t][k], b = m.triangles[t][(k + 1) % 3];
                if (on_cut[a] && on_cut[b] && tri_wraps(t) != tri_wraps(nb)) continue;
                comp[nb] = comp[t];
                stack.push_back(nb);
            }
        }
        ++n_comp;
    }

    // cut-level circles: components of {lifted = 0} along mesh edges
    // (each is one node; each surface cylinder is one loop-or-chain edge)
    UnionFind uf;
    uf.init(m.vertex_count());
    for (int t = 0; t < m.triangle_count(); ++t)
        for (int k = 0; k < 3; ++k) {
            const int a = m.triangles[t][k], b = m.triangles[t][(k + 1) % 3];
            if (on_cut[a] && on_cut[b]) uf.unite(a, b);
        }
    std::map<int, int> cut_node;  // uf root -> node id
    for (int v = 0; v < m.vertex_count(); ++v) {
        if (!on_cut[v]) continue;
        const int root = uf.find(v);
        if (cut_node.count(root)) continue;
        ReebNode n;
        n.id = (int)g.nodes.size();
        n.kind = NodeKind::BoundaryLevel;  // artificial cut node
        n.value = 0.0;
        n.anchor = m.vertices[v];
        cut_node[root] = n.id;
        g.nodes.push_back(n);
    }
    if (g.nodes.empty()) throw ReebError("circle cut level not found on the mesh");

    // attach each cylinder to the cut circles at its low and high ends
    std::vector<int> lo_node(n_comp, -1), hi_node(n_comp, -1);
    for (int t = 0; t < m.triangle_count(); ++t)
        for (int k = 0; k < 3; ++k) {
            const int a = m.triangles[t][k];
            if (!on_cut[a]) continue;
            const int node = cut_node[uf.find(a)];
            if (tri_wraps(t))
                hi_node[comp[t]] = node;  // wrapped triangles see the cut from below p
            else if (lo_node[comp[t]] < 0)
                lo_node[comp[t]] = node;
        }
    g.interval_edge_of_tri.assign(1, {});
    for (int c = 0; c < n_comp; ++c) {
        ReebEdge e;
        e.id = (int)g.edges.size();
        e.node_lo = lo_node[c] >= 0 ? lo_node[c] : hi_node[c];
        e.node_hi = hi_node[c] >= 0 ? hi_node[c] : lo_node[c];
        if (e.node_lo < 0) throw ReebError("circle cut: cylinder not attached to the cut level");
        e.v_lo = 0.0;
        e.v_hi = p;
        g.edges.push_back(e);
    }
    for (int t = 0; t < m.triangle_count(); ++t) g.interval_edge_of_tri[0][t] = comp[t];
    // midpoint representatives
    auto lc = level_components(m, p / 2);
    for (const auto& [t, c] : lc.tri2comp) {
        auto& e = g.edges[comp[t]];
        if (e.samples.empty()) e.samples.push_back({p / 2, lc.rep[c]});
    }
    g.level_values = {0.0};
    g.level_margins = {1e-9 * p};
    for (const auto& e : g.edges) {
        g.nodes[e.node_lo].degree++;
        g.nodes[e.node_hi].degree++;
    }
    return g;
}

}  // namespace detail

inline ReebGraph build_reeb_graph(const std::shared_ptr<const TriMesh>& mesh_ptr,
                                  const ScalarField& f,
                                  const std::vector<CriticalPoint>& crit_list) {
    const TriMesh& m = *mesh_ptr;
    if (m.values.size() != m.vertices.size())
        throw std::invalid_argument("build_reeb_graph: mesh values missing (sample_field first)");
    if (f.codomain == Codomain::Circle)
        return detail::build_circle_cut_graph(mesh_ptr, f, crit_list);

    ReebGraph g;
    g.mesh = mesh_ptr;
    g.field = f;

    // --- PL criticality census, cross-validated against the crit list -----
    // Matched census vertices also calibrate the value margins below: PL
    // level topology changes exactly at critical vertex values.
    const auto census = detail::pl_criticality_census(m);
    const double match_radius = 3.0 * m.resolution;
    std::vector<std::pair<int, int>> census_matches;  // (vertex, crit index)
    auto matches_kind = [&](int vert, NodeKind want) {
        for (size_t ci = 0; ci < crit_list.size(); ++ci) {
            const NodeKind have = detail::node_kind_of(crit_list[ci].kind);
            // degenerate points have no prescribed PL signature
            if (have != want && have != NodeKind::DegenerateDeclared) continue;
            if (m.surface->distance(m.vertices[vert], crit_list[ci].position) < match_radius) {
                census_matches.push_back({vert, (int)ci});
                return true;
            }
        }
        return false;
    };
    for (int v : census.minima)
        if (!matches_kind(v, NodeKind::Min))
            throw ReebError("PL minimum without a matching critical point (resolution too coarse)");
    for (int v : census.maxima)
        if (!matches_kind(v, NodeKind::Max))
            throw ReebError("PL maximum without a matching critical point (resolution too coarse)");
    for (int v : census.saddles)
        if (!matches_kind(v, NodeKind::Saddle))
            throw ReebError("PL saddle without a matching critical point (resolution too coarse)");

    // --- nodes ------------------------------------------------------------
    for (size_t i = 0; i < crit_list.size(); ++i) {
        ReebNode n;
        n.id = (int)g.nodes.size();
        n.kind = detail::node_kind_of(crit_list[i].kind);
        n.value = crit_list[i].value;
        n.anchor = crit_list[i].position;
        n.critical_ids = {(int)i};
        g.nodes.push_back(n);
    }
    // boundary loops of the mesh
    {
        std::map<int, int> next;
        for (int t = 0; t < m.triangle_count(); ++t)
            for (int k = 0; k < 3; ++k)
                if (m.tri_neighbors[t][k] < 0) next[m.triangles[t][k]] = m.triangles[t][(k + 1) % 3];
        std::map<int, bool> seen;
        int loop_id = 0;
        for (const auto& [v0, v1] : next) {
            if (seen[v0]) continue;
            double value = 0;
            int count = 0, v = v0;
            while (!seen[v]) {
                seen[v] = true;
                value += m.values[v];
                ++count;
                v = next.at(v);
            }
            ReebNode n;
            n.id = (int)g.nodes.size();
            n.kind = NodeKind::BoundaryLevel;
            n.value = value / count;
            n.anchor = m.vertices[v0];
            n.boundary_id = loop_id++;
            g.nodes.push_back(n);
        }
    }
    if (g.nodes.empty()) throw ReebError("no critical points and no boundary: empty graph");

    // --- distinct node values and PL margins --------------------------------
    double scale = 1.0;
    for (const auto& n : g.nodes) scale = std::max(scale, std::abs(n.value));
    const double cluster_tol = 1e-9 * scale;
    std::vector<double> vs;
    for (const auto& n : g.nodes) vs.push_back(n.value);
    std::sort(vs.begin(), vs.end());
    for (double v : vs)
        if (g.level_values.empty() || v - g.level_values.back() > cluster_tol)
            g.level_values.push_back(v);
    const int K = (int)g.level_values.size();
    auto value_index = [&](double v) {
        for (int j = 0; j < K; ++j)
            if (std::abs(v - g.level_values[j]) <= cluster_tol) return j;
        throw ReebError("node value missing from the level table");
    };

    g.level_margins.assign(K, 1e-9 * scale);
    for (const auto& [vert, ci] : census_matches) {
        const int j = value_index(crit_list[ci].value);
        const double slop = std::abs(m.values[vert] - crit_list[ci].value);
        g.level_margins[j] = std::max(g.level_margins[j], 1.5 * slop + 1e-12);
    }
    for (int j = 0; j + 1 < K; ++j)
        if (g.level_margins[j] + g.level_margins[j + 1] >
            0.8 * (g.level_values[j + 1] - g.level_values[j]))
            throw ReebError("node values too close for this resolution");

    // --- level components at interval midpoints ----------------------------
    std::vector<detail::LevelComponents> levels(std::max(0, K - 1));
    std::vector<double> mids(std::max(0, K - 1));
    std::vector<int> comp_offset(std::max(0, K - 1), 0);
    int total_comps = 0;
    for (int i = 0; i + 1 < K; ++i) {
        mids[i] = (g.level_values[i] + g.level_values[i + 1]) / 2;
        levels[i] = detail::level_components(m, mids[i]);
        comp_offset[i] = total_comps;
        total_comps += levels[i].count;
    }
    detail::UnionFind germs;
    germs.init(total_comps);

    // --- bands around each node value --------------------------------------
    struct Attachment {
        int node;
        int germ;
        bool below;  // the germ lies below the node value
    };
    std::vector<Attachment> attachments;
    g.bands.resize(K);

    auto locate_tri = [&](const ChartPoint& z) {
        const int t = m.locate(z, 1e-7);
        if (t < 0) throw ReebError("point location failed during the sweep");
        return t;
    };

    for (int j = 0; j < K; ++j) {
        const double lo = j == 0 ? -std::numeric_limits<double>::infinity() : mids[j - 1];
        const double hi = j == K - 1 ? std::numeric_limits<double>::infinity() : mids[j];
        const auto bc = detail::band_components(m, lo, hi);
        auto& binfo = g.bands[j];
        binfo.tri2comp = bc.tri2comp;
        binfo.comp2node.assign(bc.count, -1);
        binfo.comp2edge.assign(bc.count, -1);

        // nodes at this value, located in their band component
        std::vector<std::vector<int>> comp_nodes(bc.count);
        for (auto& n : g.nodes) {
            if (value_index(n.value) != j) continue;
            const int t = locate_tri(n.anchor);
            auto it = bc.tri2comp.find(t);
            if (it == bc.tri2comp.end())
                throw ReebError("node anchor missing from its value band");
            comp_nodes[it->second].push_back(n.id);
        }
        // non-generic: several criticals on one singular component collapse
        // into a single node
        std::vector<int> merged_node(bc.count, -1);
        for (int c = 0; c < bc.count; ++c) {
            if (comp_nodes[c].empty()) continue;
            const int keep = comp_nodes[c][0];
            merged_node[c] = keep;
            for (size_t i = 1; i < comp_nodes[c].size(); ++i) {
                auto& dup = g.nodes[comp_nodes[c][i]];
                auto& tgt = g.nodes[keep];
                tgt.critical_ids.insert(tgt.critical_ids.end(), dup.critical_ids.begin(),
                                        dup.critical_ids.end());
                dup.id = -keep - 2;  // mark merged; compacted later
                if (tgt.kind != dup.kind) tgt.kind = NodeKind::Saddle;
            }
            binfo.comp2node[c] = keep;
        }

        // touched germs below / above per band component
        std::vector<std::vector<int>> touch_lo(bc.count), touch_hi(bc.count);
        auto collect = [&](int interval, std::vector<std::vector<int>>& into) {
            if (interval < 0 || interval >= (int)levels.size()) return;
            for (const auto& [t, lvl_comp] : levels[interval].tri2comp) {
                auto it = bc.tri2comp.find(t);
                if (it == bc.tri2comp.end()) continue;
                auto& v = into[it->second];
                const int germ = comp_offset[interval] + lvl_comp;
                if (std::find(v.begin(), v.end(), germ) == v.end()) v.push_back(germ);
            }
        };
        collect(j - 1, touch_lo);
        collect(j, touch_hi);

        for (int c = 0; c < bc.count; ++c) {
            if (merged_node[c] >= 0) {
                for (int germ : touch_lo[c]) attachments.push_back({merged_node[c], germ, true});
                for (int germ : touch_hi[c]) attachments.push_back({merged_node[c], germ, false});
            } else {
                // regular pass-through: exactly one germ on each side
                if (touch_lo[c].size() != 1 || touch_hi[c].size() != 1)
                    throw ReebError(
                        "regular band with unexpected level topology (resolution too coarse)");
                germs.unite(touch_lo[c][0], touch_hi[c][0]);
                binfo.comp2edge[c] = touch_lo[c][0];  // germ id; edge id after assembly
            }
        }
    }

    // compact merged nodes
    {
        std::vector<int> remap(g.nodes.size(), -1);
        std::vector<ReebNode> kept;
        for (auto& n : g.nodes) {
            if (n.id < -1) continue;
            remap[&n - g.nodes.data()] = (int)kept.size();
            n.id = (int)kept.size();
            kept.push_back(n);
        }
        for (auto& n : g.nodes)
            if (n.id < -1) remap[&n - g.nodes.data()] = remap[-n.id - 2];
        for (auto& a : attachments) a.node = remap[a.node];
        for (auto& b : g.bands)
            for (auto& cn : b.comp2node)
                if (cn >= 0) cn = remap[cn];
        g.nodes = std::move(kept);
    }

    // --- assemble edges from germ classes ----------------------------------
    std::map<int, int> class2edge;
    auto edge_of_class = [&](int root) {
        auto it = class2edge.find(root);
        if (it != class2edge.end()) return it->second;
        ReebEdge e;
        e.id = (int)g.edges.size();
        class2edge[root] = e.id;
        g.edges.push_back(e);
        return e.id;
    };
    for (int i = 0; i + 1 < K; ++i)
        for (int c = 0; c < levels[i].count; ++c) {
            const int eid = edge_of_class(germs.find(comp_offset[i] + c));
            g.edges[eid].samples.push_back({mids[i], levels[i].rep[c]});
        }
    for (const auto& a : attachments) {
        const int eid = edge_of_class(germs.find(a.germ));
        auto& e = g.edges[eid];
        // the germ below the node attaches the node as the edge's top end
        if (a.below)
            e.node_hi = a.node;
        else
            e.node_lo = a.node;
    }
    for (auto& e : g.edges) {
        if (e.node_lo < 0 || e.node_hi < 0)
            throw ReebError("edge with a missing endpoint (sweep inconsistency)");
        e.v_lo = g.nodes[e.node_lo].value;
        e.v_hi = g.nodes[e.node_hi].value;
        std::sort(e.samples.begin(), e.samples.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        g.nodes[e.node_lo].degree++;
        g.nodes[e.node_hi].degree++;
    }
    for (auto& b : g.bands)
        for (auto& ce : b.comp2edge)
            if (ce >= 0) ce = edge_of_class(germs.find(ce));

    // interval labels for the quotient map: shrunken regular bands
    g.interval_edge_of_tri.assign(std::max(0, K - 1), {});
    for (int i = 0; i + 1 < K; ++i) {
        const double lo = g.level_values[i] + g.level_margins[i];
        const double hi = g.level_values[i + 1] - g.level_margins[i + 1];
        const auto bc = detail::band_components(m, lo, hi);
        std::vector<int> comp_edge(bc.count, -1);
        for (const auto& [t, lvl_comp] : levels[i].tri2comp) {
            auto it = bc.tri2comp.find(t);
            if (it == bc.tri2comp.end()) continue;
            comp_edge[it->second] = edge_of_class(germs.find(comp_offset[i] + lvl_comp));
        }
        for (const auto& [t, c] : bc.tri2comp)
            if (comp_edge[c] >= 0) g.interval_edge_of_tri[i][t] = comp_edge[c];
        // band components linked to the nodes above/below keep edge labels via
        // the regular bands; stray unlabeled components indicate PL trouble
        for (const auto& [t, c] : bc.tri2comp)
            if (comp_edge[c] < 0)
                throw ReebError("unlabelled regular band component (resolution too coarse)");
    }

    // saddle degree sanity (the local model allows 3 or 4 incident edges)
    for (const auto& n : g.nodes) {
        if (n.kind == NodeKind::Saddle && (n.degree < 3 || n.degree > 4))
            throw ReebError("saddle node with unexpected degree");
        if ((n.kind == NodeKind::Min || n.kind == NodeKind::Max) && n.degree != 1)
            throw ReebError("extreme node with degree != 1");
    }
    return g;
}

/// Quotient map: node or edge point containing x.
inline GraphPoint quotient_point(const ReebGraph& g, const ChartPoint& x) {
    const TriMesh& m = *g.mesh;
    const double v_raw = g.field.value(x);
    const double v = g.circle_cut ? wrap_periodic(v_raw, g.period) : v_raw;
    int t = m.locate(x, 1e-7);
    if (t < 0) throw std::invalid_argument("quotient_point: point outside the mesh");

    if (g.circle_cut) {
        const auto& labels = g.interval_edge_of_tri[0];
        auto it = labels.find(t);
        if (it == labels.end()) throw std::runtime_error("quotient_point: unlabelled triangle");
        const ReebEdge& e = g.edges[it->second];
        if (v < 1e-9 * g.period || g.period - v < 1e-9 * g.period)
            return {true, e.node_lo, 0.0};
        return {false, e.id, v / g.period};
    }

    const auto& V = g.level_values;
    const int K = (int)V.size();
    // node proximity: inside a margin around a node value
    for (int j = 0; j < K; ++j) {
        if (std::abs(v - V[j]) > g.level_margins[j]) continue;
        const auto& b = g.bands[j];
        auto it = b.tri2comp.find(t);
        if (it != b.tri2comp.end() && b.comp2node[it->second] >= 0)
            return {true, b.comp2node[it->second], 0.0};
        break;  // in the margin of a value but on a pass-through component
    }
    // interval lookup
    int i = int(std::upper_bound(V.begin(), V.end(), v) - V.begin()) - 1;
    i = std::clamp(i, 0, K - 2);
    auto lookup = [&](int interval, int tri) -> std::optional<int> {
        if (interval < 0 || interval >= (int)g.interval_edge_of_tri.size()) return std::nullopt;
        auto it = g.interval_edge_of_tri[interval].find(tri);
        if (it == g.interval_edge_of_tri[interval].end()) return std::nullopt;
        return it->second;
    };
    std::optional<int> eid = lookup(i, t);
    if (!eid) eid = lookup(i - 1, t);
    if (!eid) eid = lookup(i + 1, t);
    if (!eid) {
        // margin slivers: resolve through the enclosing band component
        for (int j : {i, i + 1}) {
            if (j < 0 || j >= K) continue;
            const auto& b = g.bands[j];
            auto it = b.tri2comp.find(t);
            if (it == b.tri2comp.end()) continue;
            if (b.comp2node[it->second] >= 0) return {true, b.comp2node[it->second], 0.0};
            if (b.comp2edge[it->second] >= 0) {
                eid = b.comp2edge[it->second];
                break;
            }
        }
    }
    if (!eid) throw std::runtime_error("quotient_point: no label for the containing triangle");
    const ReebEdge& e = g.edges[*eid];
    const double param = std::clamp((v - e.v_lo) / (e.v_hi - e.v_lo), 0.0, 1.0);
    return {false, e.id, param};
}

/// A surface point on the given edge with f = v, found by gradient
/// continuation from the nearest stored level sample.
inline ChartPoint point_on_edge_at_value(const ReebGraph& g, int edge, double v) {
    const ReebEdge& e = g.edges.at(edge);
    if (e.samples.empty()) throw std::runtime_error("edge without level samples");
    const ScalarField& f = g.field;
    auto best = e.samples[0];
    for (const auto& s : e.samples)
        if (std::abs(s.first - v) < std::abs(best.first - v)) best = s;
    ChartPoint z = best.second;
    // march d z / ds = grad f / |grad f|^2 so that f moves linearly to v
    const int steps = std::max(8, (int)std::ceil(std::abs(v - best.first) /
                                                 (0.02 * (e.v_hi - e.v_lo) + 1e-300)));
    const double dv = (v - best.first) / steps;
    for (int s = 0; s < steps; ++s) {
        const Vec2 gr = f.gradient(z);
        const double n2 = gr.norm2();
        if (n2 < 1e-20) throw std::runtime_error("gradient continuation stalled");
        z.p += gr * (dv / n2);
        z = g.mesh->surface->prefer_chart(g.mesh->surface->canonicalize(z));
    }
    for (int it = 0; it < 8; ++it) {  // Newton polish onto the exact level
        const double r = f.value_difference(f.value(z), v);
        if (std::abs(r) < 1e-13) break;
        const Vec2 gr = f.gradient(z);
        z.p = z.p - gr * (r / gr.norm2());
    }
    return g.mesh->surface->prefer_chart(z);
}

}  // namespace hamreeb
