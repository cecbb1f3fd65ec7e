#include "delaunay.hpp"
#include "plantflow/errors.hpp"
#include "plantflow/mesh.hpp"
#include "predicates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace plantflow {

namespace {

using detail::Segment;
using detail::Triangulator;

enum class Reflect { X, Y, Diagonal };

Vec2 reflect(const Vec2& p, Reflect r) {
    switch (r) {
        case Reflect::X: return {1.0 - p.x(), p.y()};
        case Reflect::Y: return {p.x(), 1.0 - p.y()};
        case Reflect::Diagonal: return {p.y(), p.x()};
    }
    return p;
}

// Fundamental region of the cell's mirror symmetry group, counter-clockwise,
// the reflections that rebuild the full cell from it, and which pairs of
// opposite sides lie inside it and must be split in lock-step.
struct Fundamental {
    std::vector<Vec2> polygon;
    std::vector<Reflect> unfold;
    bool twin_x = false, twin_y = false;
};

Fundamental fundamental_region(const UnitCellGeometry& g) {
    Fundamental f;
    if (g.mirror_diagonal()) {
        f.polygon = {{0.5, 0.5}, {1.0, 0.5}, {1.0, 1.0}};
        f.unfold = {Reflect::Diagonal, Reflect::X, Reflect::Y};
    } else if (g.mirror_x() && g.mirror_y()) {
        f.polygon = {{0.5, 0.5}, {1.0, 0.5}, {1.0, 1.0}, {0.5, 1.0}};
        f.unfold = {Reflect::X, Reflect::Y};
    } else if (g.mirror_y()) {
        f.polygon = {{0.0, 0.5}, {1.0, 0.5}, {1.0, 1.0}, {0.0, 1.0}};
        f.unfold = {Reflect::Y};
        f.twin_x = true;
    } else if (g.mirror_x()) {
        f.polygon = {{0.5, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.5, 1.0}};
        f.unfold = {Reflect::X};
        f.twin_y = true;
    } else {
        f.polygon = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
        f.twin_x = f.twin_y = true;
    }
    return f;
}

bool inside_closed(const std::vector<Vec2>& poly, const Vec2& p) {
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (detail::orient2d(poly[i], poly[(i + 1) % poly.size()], p) < 0) return false;
    return true;
}

bool on_edge(const Vec2& a, const Vec2& b, const Vec2& p) {
    if (detail::orient2d(a, b, p) != 0) return false;
    const Vec2 lo = a.cwiseMin(b), hi = a.cwiseMax(b);
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
}

struct Region {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> cells;
    std::vector<Subdomain> tags;
};

// Tags every triangle by the connected component it belongs to when
// constraint segments are treated as walls. Returns the triangles whose
// barycentre disagrees with their component's tag.
std::vector<int> tag_components(const UnitCellGeometry& geom, const Triangulator& tri,
                                 const std::vector<std::array<int, 3>>& cells, std::vector<Subdomain>& tags) {
    const auto& pts = tri.points();
    std::set<std::pair<int, int>> walls;
    for (const auto& s : tri.segments()) walls.insert(std::minmax(s.v0, s.v1));
    std::map<std::pair<int, int>, std::vector<int>> by_edge;
    for (int c = 0; c < static_cast<int>(cells.size()); ++c)
        for (int i = 0; i < 3; ++i) by_edge[std::minmax(cells[c][i], cells[c][(i + 1) % 3])].push_back(c);

    auto area = [&](int c) {
        return 0.5 * cross(pts[cells[c][1]] - pts[cells[c][0]], pts[cells[c][2]] - pts[cells[c][0]]);
    };
    auto bary = [&](int c) { return Vec2((pts[cells[c][0]] + pts[cells[c][1]] + pts[cells[c][2]]) / 3.0); };

    std::vector<int> comp(cells.size(), -1);
    std::vector<std::vector<int>> members;
    for (int seed = 0; seed < static_cast<int>(cells.size()); ++seed) {
        if (comp[seed] >= 0) continue;
        const int id = static_cast<int>(members.size());
        members.emplace_back();
        std::vector<int> stack{seed};
        comp[seed] = id;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            members[id].push_back(c);
            for (int i = 0; i < 3; ++i) {
                const auto key = std::minmax(cells[c][i], cells[c][(i + 1) % 3]);
                if (walls.count(key)) continue;
                for (int nb : by_edge[key])
                    if (comp[nb] < 0) {
                        comp[nb] = id;
                        stack.push_back(nb);
                    }
            }
        }
    }
    std::vector<Subdomain> comp_tag(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
        const int biggest = *std::max_element(members[k].begin(), members[k].end(),
                                              [&](int a, int b) { return area(a) < area(b); });
        comp_tag[k] = geom.classify(bary(biggest));
    }
    tags.resize(cells.size());
    std::vector<int> mismatched;
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
        tags[c] = comp_tag[comp[c]];
        if (geom.classify(bary(c)) != tags[c]) mismatched.push_back(c);
    }
    return mismatched;
}

Region mesh_fundamental(const UnitCellGeometry& geom, const Fundamental& fr, const UnitCellMeshOptions& opt) {
    std::vector<CurvePiece> pieces;
    for (const auto& p : geom.pieces())
        if (inside_closed(fr.polygon, p.point(0.5))) pieces.push_back(p);

    Triangulator tri(fr.polygon, [&pieces](int curve, double t) { return pieces[curve].point(t); });

    std::map<std::pair<double, double>, int> vid;
    auto add_point = [&](const Vec2& p) {
        auto it = vid.find({p.x(), p.y()});
        if (it != vid.end()) return it->second;
        const int id = tri.insert(p);
        vid.emplace(std::make_pair(p.x(), p.y()), id);
        return id;
    };
    for (const auto& c : fr.polygon) add_point(c);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        Segment s;
        s.v0 = add_point(pieces[k].a);
        s.v1 = add_point(pieces[k].b);
        s.curve = pieces[k].type == CurvePiece::Type::Arc ? static_cast<int>(k) : -1;
        s.marker = 1 + static_cast<int>(pieces[k].kind);
        tri.add_segment(s);
    }

    // Points on the region boundary, completed so that periodic twin sides
    // carry identical vertex positions.
    std::vector<Vec2> boundary_points;
    for (const auto& [key, id] : vid) boundary_points.emplace_back(key.first, key.second);
    auto complete_twins = [&](int axis) {
        std::set<double> values;
        for (const auto& p : boundary_points)
            if (p[axis] == 0.0 || p[axis] == 1.0) values.insert(p[1 - axis]);
        for (double v : values)
            for (double side : {0.0, 1.0}) {
                Vec2 q;
                q[axis] = side;
                q[1 - axis] = v;
                if (!vid.count({q.x(), q.y()})) {
                    add_point(q);
                    boundary_points.push_back(q);
                }
            }
    };
    if (fr.twin_x) complete_twins(0);
    if (fr.twin_y) complete_twins(1);

    std::map<std::pair<int, double>, int> twin_lookup;  // (side code, coordinate) -> segment
    std::vector<std::pair<int, int>> twin_pairs;
    const std::size_t nc = fr.polygon.size();
    for (std::size_t i = 0; i < nc; ++i) {
        const Vec2 a = fr.polygon[i], b = fr.polygon[(i + 1) % nc];
        std::vector<std::pair<double, int>> on;
        const Vec2 d = b - a;
        for (const auto& p : boundary_points)
            if (on_edge(a, b, p)) on.emplace_back((p - a).dot(d), vid.at({p.x(), p.y()}));
        std::sort(on.begin(), on.end());
        // Orient periodic sides in increasing coordinate so twins match.
        int side_code = -1, axis = -1;
        if (a.x() == b.x() && (a.x() == 0.0 || a.x() == 1.0) && fr.twin_x) {
            side_code = a.x() == 0.0 ? 0 : 1;
            axis = 1;
        }
        if (a.y() == b.y() && (a.y() == 0.0 || a.y() == 1.0) && fr.twin_y) {
            side_code = a.y() == 0.0 ? 2 : 3;
            axis = 0;
        }
        for (std::size_t k = 0; k + 1 < on.size(); ++k) {
            Segment s;
            s.v0 = on[k].second;
            s.v1 = on[k + 1].second;
            s.marker = 0;
            if (side_code >= 0) {
                const auto& pts = tri.points();
                if (pts[s.v0][axis] > pts[s.v1][axis]) std::swap(s.v0, s.v1);
                const int id = tri.add_segment(s);
                twin_lookup[{side_code, pts[s.v0][axis]}] = id;
            } else {
                tri.add_segment(s);
            }
        }
    }
    for (const auto& [key, id] : twin_lookup) {
        if (key.first == 1 || key.first == 3) continue;
        auto it = twin_lookup.find({key.first + 1, key.second});
        if (it == twin_lookup.end()) throw MeshError("periodic twin segment missing");
        twin_pairs.emplace_back(id, it->second);
    }
    for (auto [a, b] : twin_pairs) tri.link_twins(a, b);

    detail::RefineOptions ro;
    ro.h = opt.h;
    ro.min_angle_deg = opt.min_angle_deg;
    ro.max_vertices = opt.max_vertices;

    Region out;
    for (int attempt = 0; attempt < 40; ++attempt) {
        tri.refine(ro);
        auto cells = tri.region_triangles();
        std::vector<Subdomain> tags;
        const auto bad = tag_components(geom, tri, cells, tags);
        if (bad.empty()) {
            out.vertices = tri.points();
            out.cells = std::move(cells);
            out.tags = std::move(tags);
            return out;
        }
        // Barycentres falling between a chord and its arc: refine the
        // curved segments touching those triangles.
        std::set<int> to_split;
        const auto& segs = tri.segments();
        for (int c : bad) {
            for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
                if (segs[s].curve < 0) continue;
                int shared = 0;
                for (int k = 0; k < 3; ++k)
                    if (cells[c][k] == segs[s].v0 || cells[c][k] == segs[s].v1) ++shared;
                if (shared >= 1) to_split.insert(s);
            }
        }
        if (to_split.empty()) throw MeshError("cell tags disagree with the geometry away from curved interfaces");
        for (auto it = to_split.rbegin(); it != to_split.rend(); ++it) tri.split_segment(*it);
    }
    throw MeshError("could not resolve curved interfaces consistently");
}

}  // namespace

SimplicialMesh mesh_unit_cell(const UnitCellGeometry& geom, double h) {
    UnitCellMeshOptions opt;
    opt.h = h;
    return mesh_unit_cell(geom, opt);
}

SimplicialMesh mesh_unit_cell(const UnitCellGeometry& geom, const UnitCellMeshOptions& options) {
    if (!(options.h > 0.0) || options.h >= 0.5)
        throw MeshError("unit-cell mesh size h must lie in (0, 0.5); got " + std::to_string(options.h));
    if (!(options.min_angle_deg > 0.0) || options.min_angle_deg > 30.0)
        throw MeshError("minimum angle threshold must lie in (0, 30] degrees");

    if (!geom.has_symplast()) {
        int n = static_cast<int>(std::ceil(1.0 / options.h - 1e-9));
        if (n % 2) ++n;
        return structured_unit_square(n);
    }

    const Fundamental fr = fundamental_region(geom);
    Region r = mesh_fundamental(geom, fr, options);

    // Drop the super-triangle and unused vertices, then unfold by reflection.
    std::vector<Vec2> verts;
    std::vector<std::array<int, 3>> cells;
    std::vector<Subdomain> tags = r.tags;
    {
        std::vector<int> remap(r.vertices.size(), -1);
        for (const auto& c : r.cells) {
            std::array<int, 3> t{};
            for (int k = 0; k < 3; ++k) {
                if (remap[c[k]] < 0) {
                    remap[c[k]] = static_cast<int>(verts.size());
                    verts.push_back(r.vertices[c[k]]);
                }
                t[k] = remap[c[k]];
            }
            cells.push_back(t);
        }
    }
    for (Reflect op : fr.unfold) {
        const int nv = static_cast<int>(verts.size());
        const int nc = static_cast<int>(cells.size());
        for (int v = 0; v < nv; ++v) verts.push_back(reflect(verts[v], op));
        for (int c = 0; c < nc; ++c) {
            const auto& t = cells[c];
            cells.push_back({t[0] + nv, t[2] + nv, t[1] + nv});
            tags.push_back(tags[c]);
        }
    }

    SimplicialMesh m;
    m.periodic = true;
    m.h = options.h;
    std::map<std::pair<double, double>, int> index;
    std::vector<int> merged(verts.size());
    for (std::size_t v = 0; v < verts.size(); ++v) {
        auto [it, inserted] = index.emplace(std::make_pair(verts[v].x(), verts[v].y()), m.num_vertices());
        if (inserted) m.vertices.push_back(verts[v]);
        merged[v] = it->second;
    }
    for (const auto& t : cells) m.cells.push_back({merged[t[0]], merged[t[1]], merged[t[2]]});
    m.cell_tags = std::move(tags);
    m.build_topology();

    const double area_err = std::abs(m.area_of(Subdomain::Z) + m.area_of(Subdomain::AW) + m.area_of(Subdomain::AS) - 1.0);
    if (area_err > 1e-10) throw MeshError("triangulation does not cover the unit cell");
    if (m.min_angle_deg() < options.min_angle_deg - 1e-9)
        throw MeshError("mesh contains a sliver below the angle threshold (" + std::to_string(m.min_angle_deg()) +
                        " deg)");
    for (const auto& e : m.edges)
        if (e.tag == FacetTag::Periodic && e.partner < 0) throw MeshError("unpaired periodic facet");
    return m;
}

}  // namespace plantflow
