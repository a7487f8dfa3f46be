#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hamreeb/counterexample.hpp"
#include "hamreeb/flow.hpp"
#include "hamreeb/graph_function.hpp"
#include "hamreeb/mesh.hpp"
#include "hamreeb/obstruction.hpp"
#include "hamreeb/reeb.hpp"
#include "hamreeb/report.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"

namespace hamreeb {

/// 17 significant digits: round-trips every double exactly.
inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// --- surface ---------------------------------------------------------------

inline Json surface_to_json(const SurfaceModel& s) {
    Json j;
    j["kind"] = to_string(s.kind);
    Json params;
    switch (s.kind) {
        case SurfaceKind::Disk: params["radius"] = s.params.radius; break;
        case SurfaceKind::Annulus:
            params["period_x"] = s.params.period_x;
            params["height"] = s.params.height;
            break;
        case SurfaceKind::FlatTorus:
            params["period_x"] = s.params.period_x;
            params["period_y"] = s.params.period_y;
            break;
        case SurfaceKind::Sphere: break;
        case SurfaceKind::PlanarSublevel:
            params["level"] = s.params.level;
            params["bbox"] = s.params.bbox;
            break;
    }
    j["params"] = params;
    Json charts = Json::array();
    for (const auto& c : s.charts) {
        Json cj;
        cj["id"] = c.id;
        const auto box = c.bbox();
        cj["bbox"] = box;
        cj["periodic_x"] = c.period_x() > 0;
        cj["periodic_y"] = c.period_y() > 0;
        charts.push_back(cj);
    }
    j["charts"] = charts;
    Json transitions = Json::array();
    for (const auto& t : s.transitions)
        transitions.push_back(Json{{"from", t.from}, {"to", t.to}});
    j["transitions"] = transitions;
    j["boundary_components"] = s.boundary.size();
    return j;
}

// --- mesh file ---------------------------------------------------------------
// Text format: a header line, then vertices (chart id + 2 floats), triangles
// (3 indices), values, boundary flags.  Floats carry 17 significant digits.

inline void write_mesh(const TriMesh& m, std::ostream& os) {
    os << "hamreeb-mesh 1\n";
    os << "vertices " << m.vertex_count() << "\n";
    for (int i = 0; i < m.vertex_count(); ++i)
        os << m.vertices[i].chart << " " << fmt17(m.vertices[i].p.x) << " "
           << fmt17(m.vertices[i].p.y) << "\n";
    os << "triangles " << m.triangle_count() << "\n";
    for (const auto& t : m.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "values " << m.values.size() << "\n";
    for (double v : m.values) os << fmt17(v) << "\n";
    os << "boundary " << m.boundary_flag.size() << "\n";
    for (bool b : m.boundary_flag) os << (b ? 1 : 0) << "\n";
}

inline TriMesh read_mesh(std::istream& is, const std::shared_ptr<const SurfaceModel>& surface,
                         double resolution) {
    TriMesh m;
    m.surface = surface;
    m.resolution = resolution;
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "hamreeb-mesh" || version != 1)
        throw std::invalid_argument("read_mesh: not a hamreeb mesh file");
    std::string section;
    size_t n = 0;
    is >> section >> n;
    if (section != "vertices") throw std::invalid_argument("read_mesh: malformed file");
    for (size_t i = 0; i < n; ++i) {
        int chart;
        double x, y;
        is >> chart >> x >> y;
        m.vertices.push_back({chart, x, y});
    }
    is >> section >> n;
    if (section != "triangles") throw std::invalid_argument("read_mesh: malformed file");
    for (size_t i = 0; i < n; ++i) {
        std::array<int, 3> t{};
        is >> t[0] >> t[1] >> t[2];
        m.triangles.push_back(t);
        m.tri_chart.push_back(m.vertices[t[0]].chart);
    }
    is >> section >> n;
    if (section != "values") throw std::invalid_argument("read_mesh: malformed file");
    m.values.resize(n);
    for (size_t i = 0; i < n; ++i) is >> m.values[i];
    is >> section >> n;
    if (section != "boundary") throw std::invalid_argument("read_mesh: malformed file");
    m.boundary_flag.resize(n);
    for (size_t i = 0; i < n; ++i) {
        int b;
        is >> b;
        m.boundary_flag[i] = b != 0;
    }
    if (!is) throw std::invalid_argument("read_mesh: truncated file");
    detail::fill_tri_coords(m);
    detail::build_neighbors(m);
    return m;
}

// --- field definitions -------------------------------------------------------
// {name: "..."} or {poly: [[i, j, c], ...], codomain: "line" | "circle",
// period?: p}

inline ScalarField field_from_json(const Json& j, const SurfaceModel& s) {
    if (j.contains("name")) return builtins::field(j["name"].get<std::string>(), s);
    if (!j.contains("poly")) throw std::invalid_argument("field json: need 'name' or 'poly'");
    Poly2 p;
    for (const auto& term : j["poly"])
        p.terms.push_back(
            {term.at(0).get<int>(), term.at(1).get<int>(), term.at(2).get<double>()});
    ScalarField f = make_polynomial_field(p, (int)s.charts.size());
    if (j.value("codomain", "line") == std::string("circle")) {
        f.codomain = Codomain::Circle;
        f.period = j.value("period", 1.0);
        if (f.period <= 0) throw std::invalid_argument("field json: circle period must be positive");
    }
    return f;
}

// --- Reeb graph --------------------------------------------------------------

inline Json reeb_to_json(const ReebGraph& g) {
    Json j;
    Json nodes = Json::array();
    for (const auto& n : g.nodes)
        nodes.push_back(Json{{"id", n.id}, {"kind", to_string(n.kind)}, {"value", n.value}});
    Json edges = Json::array();
    for (const auto& e : g.edges)
        edges.push_back(Json{{"id", e.id}, {"from", e.node_lo}, {"to", e.node_hi}});
    j["nodes"] = nodes;
    j["edges"] = edges;
    return j;
}

inline std::string reeb_to_dot(const ReebGraph& g) {
    std::ostringstream os;
    os << "graph reeb {\n";
    for (const auto& n : g.nodes)
        os << "  n" << n.id << " [label=\"" << to_string(n.kind) << " @ " << n.value << "\"];\n";
    for (const auto& e : g.edges) os << "  n" << e.node_lo << " -- n" << e.node_hi << ";\n";
    os << "}\n";
    return os.str();
}

// --- graph functions ----------------------------------------------------------
// keyed by node / edge ids

inline Json graph_function_to_json(const GraphFunction& gf) {
    Json j;
    Json nodes = Json::object();
    for (const auto& [id, v] : gf.node_values) nodes[std::to_string(id)] = v;
    Json edges = Json::object();
    for (const auto& [id, prof] : gf.edge_profiles) {
        Json pts = Json::array();
        for (const auto& [t, v] : prof.points) pts.push_back(Json::array({t, v}));
        edges[std::to_string(id)] = Json{{"breakpoints", pts}};
    }
    j["nodes"] = nodes;
    j["edges"] = edges;
    return j;
}

inline GraphFunction graph_function_from_json(const Json& j) {
    GraphFunction gf;
    for (const auto& [key, v] : j.at("nodes").items())
        gf.node_values[std::stoi(key)] = v.get<double>();
    if (j.contains("edges"))
        for (const auto& [key, e] : j.at("edges").items()) {
            GraphFunction::Profile prof;
            for (const auto& p : e.at("breakpoints"))
                prof.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            gf.edge_profiles[std::stoi(key)] = prof;
        }
    return gf;
}

// --- trajectories --------------------------------------------------------------

inline void write_trajectory_csv(const std::vector<TrajectorySample>& traj, std::ostream& os) {
    os << "t,chart,x,y,f\n";
    for (const auto& s : traj)
        os << fmt17(s.t) << "," << s.z.chart << "," << fmt17(s.z.p.x) << "," << fmt17(s.z.p.y)
           << "," << fmt17(s.f_value) << "\n";
}

// --- scenario / obstruction reports ---------------------------------------------

inline Json scenario_to_json(const ScenarioResult& r) {
    Json j;
    j["name"] = r.name;
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back(Json{{"description", c.description},
                              {"value", c.value},
                              {"expected", c.expected},
                              {"tolerance", c.tolerance},
                              {"passed", c.passed}});
    j["checks"] = checks;
    j["artifacts"] = r.artifacts;
    j["conclusion"] = r.conclusion;
    j["passed"] = r.passed();
    return j;
}

inline Json obstruction_to_json(const ObstructionReport& r) {
    Json j;
    j["involution"] = r.involution;
    j["level"] = r.level;
    Json pairing = Json::array();
    for (const auto& [a, b] : r.pairing) pairing.push_back(Json::array({a, b}));
    j["pairing"] = pairing;
    j["volume_mismatch"] = r.volume_mismatch;
    j["tolerance"] = r.tolerance;
    j["obstructed"] = r.obstructed;
    j["involution_preserves_f"] = r.involution_preserves_f;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

}  // namespace hamreeb
