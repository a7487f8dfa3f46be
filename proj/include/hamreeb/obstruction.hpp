#pragma once

#include <map>
#include <string>
#include <vector>

#include "hamreeb/area_form.hpp"
#include "hamreeb/builtins.hpp"
#include "hamreeb/core.hpp"
#include "hamreeb/critical_points.hpp"
#include "hamreeb/mesh.hpp"
#include "hamreeb/quadrature.hpp"
#include "hamreeb/sampling.hpp"
#include "hamreeb/scalar_field.hpp"

namespace hamreeb {

struct SublevelComponent {
    int id = -1;
    ChartPoint seed;        // the lowest vertex of the component
    double omega_volume = 0.0;
    std::vector<int> contains_critical;  // indices into the supplied crit list
    std::vector<int> vertex_root;        // internal: union-find roots (empty after build)
};

struct SublevelComponentSet {
    double level = 0.0;
    std::vector<SublevelComponent> components;
    std::vector<int> comp_of_vertex;  // -1 for vertices above the level
};

/// Connected components of {f <= a} on the mesh, with omega-volumes from the
/// marching-triangles clipped quadrature.
inline SublevelComponentSet sublevel_components(const ScalarField& f, const TriMesh& mesh,
                                                const AreaForm& omega, double a,
                                                const std::vector<CriticalPoint>& crit_list = {},
                                                double critical_value_tol = 1e-9) {
    if (mesh.values.size() != mesh.vertices.size())
        throw std::invalid_argument("sublevel_components: mesh values missing");
    for (const auto& cp : crit_list)
        if (std::abs(cp.value - a) < critical_value_tol)
            throw std::invalid_argument("sublevel_components: level is a critical value");

    SublevelComponentSet out;
    out.level = a;
    const int nv = mesh.vertex_count();
    std::vector<int> parent(nv);
    for (int i = 0; i < nv; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int t = 0; t < mesh.triangle_count(); ++t)
        for (int k = 0; k < 3; ++k) {
            const int u = mesh.triangles[t][k], v = mesh.triangles[t][(k + 1) % 3];
            if (mesh.values[u] <= a && mesh.values[v] <= a) parent[find(u)] = find(v);
        }

    std::map<int, int> root_to_comp;
    out.comp_of_vertex.assign(nv, -1);
    for (int i = 0; i < nv; ++i) {
        if (mesh.values[i] > a) continue;
        const int root = find(i);
        auto it = root_to_comp.find(root);
        if (it == root_to_comp.end()) {
            it = root_to_comp.insert({root, (int)out.components.size()}).first;
            SublevelComponent c;
            c.id = it->second;
            c.seed = mesh.vertices[i];
            out.components.push_back(c);
        }
        out.comp_of_vertex[i] = it->second;
    }
    // seeds: the lowest vertex of each component
    std::vector<int> seed_vertex(out.components.size(), -1);
    for (int i = 0; i < nv; ++i) {
        const int c = out.comp_of_vertex[i];
        if (c < 0) continue;
        if (seed_vertex[c] < 0 || mesh.value_less(i, seed_vertex[c])) seed_vertex[c] = i;
    }
    for (size_t c = 0; c < out.components.size(); ++c)
        out.components[c].seed = mesh.vertices[seed_vertex[c]];

    // volumes: clip by the PL sublevel, restricted per component; a triangle's
    // clip polygon belongs to the component of its inside vertices
    std::vector<int> tri_comp(mesh.triangle_count(), -1);
    for (int t = 0; t < mesh.triangle_count(); ++t)
        for (int k = 0; k < 3; ++k) {
            const int vtx = mesh.triangles[t][k];
            if (out.comp_of_vertex[vtx] >= 0) {
                tri_comp[t] = out.comp_of_vertex[vtx];
                break;
            }
        }
    for (auto& comp : out.components) {
        Region r = Region::sublevel(a);
        const int want = comp.id;
        r.tri_filter = [&tri_comp, want](int t) { return tri_comp[t] == want; };
        comp.omega_volume = integrate_density(mesh, omega, r);
        if (comp.omega_volume <= 0)
            throw std::runtime_error("sublevel_components: non-positive component volume");
    }

    // critical points inside components
    for (size_t i = 0; i < crit_list.size(); ++i) {
        if (crit_list[i].value > a) continue;
        const int t = mesh.locate(crit_list[i].position, 1e-7);
        if (t < 0) continue;
        if (tri_comp[t] >= 0) out.components[tri_comp[t]].contains_critical.push_back((int)i);
    }
    return out;
}

struct ObstructionReport {
    std::string involution;
    double level = 0.0;
    std::vector<std::pair<int, int>> pairing;  // component -> image component
    double volume_mismatch = 0.0;              // max relative difference over swapped pairs
    double tolerance = 0.0;
    bool obstructed = false;
    bool involution_preserves_f = false;
};

/// Volume obstruction of the paper's non-surjectivity lemma: an f-preserving
/// involution that swaps sublevel components of different omega-volume admits
/// no omega-preserving representative in its isotopy class.  Equal volumes
/// are reported as "not obstructed" (the lemma gives only this direction).
inline ObstructionReport j0_obstruction(const ScalarField& f, const TriMesh& mesh,
                                        const AreaForm& omega, double a,
                                        const Involution& involution,
                                        const std::vector<CriticalPoint>& crit_list = {},
                                        uint64_t seed = 71) {
    ObstructionReport rep;
    rep.involution = involution.name;
    rep.level = a;

    // the involution must preserve f (lie in S(f))
    Rng rng(seed);
    double worst = 0;
    for (const auto& z : random_surface_points(*mesh.surface, 200, rng, 1e-3))
        worst = std::max(worst, f.value_distance(f.value(involution.map(z)), f.value(z)));
    rep.involution_preserves_f = worst < 1e-8;
    if (!rep.involution_preserves_f)
        throw std::invalid_argument("j0_obstruction: involution does not preserve f");

    const auto comps = sublevel_components(f, mesh, omega, a, crit_list);
    const auto& cs = comps.components;

    // pair components through the involution image of their seeds
    std::vector<int> image(cs.size(), -1);
    for (size_t i = 0; i < cs.size(); ++i) {
        const ChartPoint w = involution.map(cs[i].seed);
        const int t = mesh.locate(w, 1e-7);
        if (t < 0) throw std::runtime_error("j0_obstruction: involution image left the mesh");
        for (int k = 0; k < 3; ++k) {
            const int c = comps.comp_of_vertex[mesh.triangles[t][k]];
            if (c >= 0) {
                image[i] = c;
                break;
            }
        }
        if (image[i] < 0)
            throw std::runtime_error("j0_obstruction: involution does not permute components");
        rep.pairing.push_back({(int)i, image[i]});
    }
    for (size_t i = 0; i < cs.size(); ++i)
        if (image[image[i]] != (int)i)
            throw std::runtime_error("j0_obstruction: pairing is not an involution");

    // discretization bound: the clipped volume is accurate to the band the
    // level curve sweeps over one mesh cell
    double grad_on_level = 0.0;
    for (const auto& c : cs)
        grad_on_level = std::max(grad_on_level, f.gradient(c.seed).norm());
    for (size_t i = 0; i < cs.size(); ++i) {
        if (image[i] == (int)i) continue;
        const double vi = cs[i].omega_volume, vj = cs[image[i]].omega_volume;
        rep.volume_mismatch = std::max(rep.volume_mismatch,
                                       std::abs(vi - vj) / std::max(vi, vj));
    }
    const double min_vol = [&] {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : cs) m = std::min(m, c.omega_volume);
        return m;
    }();
    rep.tolerance = 1e-3 + 2 * mesh.resolution * mesh.resolution / std::max(min_vol, 1e-12);
    rep.obstructed = rep.volume_mismatch > rep.tolerance;
    return rep;
}

}  // namespace hamreeb
