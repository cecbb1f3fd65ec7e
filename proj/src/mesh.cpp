#include "plantflow/mesh.hpp"

#include "plantflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

namespace plantflow {

std::string to_string(FacetTag t) {
    switch (t) {
        case FacetTag::Interior: return "interior";
        case FacetTag::GammaZ: return "gamma_z";
        case FacetTag::GammaAS: return "gamma_as";
        case FacetTag::GammaAW: return "gamma_aw";
        case FacetTag::Periodic: return "periodic";
        case FacetTag::Exterior: return "exterior";
    }
    return "?";
}

double SimplicialMesh::cell_area(int c) const {
    const auto& t = cells[c];
    return 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
}

Vec2 SimplicialMesh::centroid(int c) const {
    const auto& t = cells[c];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

Vec2 SimplicialMesh::edge_midpoint(int e) const {
    return 0.5 * (vertices[edges[e].v[0]] + vertices[edges[e].v[1]]);
}

double SimplicialMesh::area_of(Subdomain s) const {
    double a = 0.0;
    for (int c = 0; c < num_cells(); ++c)
        if (cell_tags[c] == s) a += cell_area(c);
    return a;
}

double SimplicialMesh::min_angle_deg() const {
    double best = 180.0;
    for (const auto& t : cells) {
        for (int i = 0; i < 3; ++i) {
            const Vec2 u = vertices[t[(i + 1) % 3]] - vertices[t[i]];
            const Vec2 w = vertices[t[(i + 2) % 3]] - vertices[t[i]];
            const double ang = std::atan2(std::abs(cross(u, w)), u.dot(w)) * 180.0 / std::numbers::pi;
            best = std::min(best, ang);
        }
    }
    return best;
}

std::vector<int> SimplicialMesh::periodic_representatives() const {
    std::vector<int> parent(vertices.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[b] = a;
    };
    for (int v = 0; v < num_vertices(); ++v) {
        if (!periodic_x.empty() && periodic_x[v] >= 0) unite(v, periodic_x[v]);
        if (!periodic_y.empty() && periodic_y[v] >= 0) unite(v, periodic_y[v]);
    }
    std::vector<int> rep(vertices.size());
    for (int v = 0; v < num_vertices(); ++v) rep[v] = find(v);
    return rep;
}

namespace {

std::vector<int> match_sides(const std::vector<Vec2>& verts, int axis, double lo, double hi, double tol) {
    // Pair vertices on coordinate `axis` == lo with those on == hi by the
    // other coordinate.
    const int other = 1 - axis;
    std::vector<std::pair<double, int>> low, high;
    for (int v = 0; v < static_cast<int>(verts.size()); ++v) {
        if (std::abs(verts[v][axis] - lo) <= tol) low.emplace_back(verts[v][other], v);
        if (std::abs(verts[v][axis] - hi) <= tol) high.emplace_back(verts[v][other], v);
    }
    std::sort(low.begin(), low.end());
    std::sort(high.begin(), high.end());
    if (low.size() != high.size())
        throw MeshError("periodic sides carry different vertex counts (" + std::to_string(low.size()) + " vs " +
                        std::to_string(high.size()) + ")");
    std::vector<int> image(verts.size(), -1);
    for (std::size_t i = 0; i < low.size(); ++i) {
        if (std::abs(low[i].first - high[i].first) > tol)
            throw MeshError("periodic sides are not congruent within tolerance");
        image[low[i].second] = high[i].second;
        image[high[i].second] = low[i].second;
    }
    return image;
}

}  // namespace

void SimplicialMesh::build_topology(const std::vector<BoundarySegment>* boundary_segments) {
    const double tol = 1e-12 * std::max(1.0, diameter());
    if (periodic) {
        periodic_x = match_sides(vertices, 0, lower.x(), upper.x(), tol);
        periodic_y = match_sides(vertices, 1, lower.y(), upper.y(), tol);
    } else {
        periodic_x.assign(vertices.size(), -1);
        periodic_y.assign(vertices.size(), -1);
    }

    edges.clear();
    cell_edges.assign(cells.size(), {-1, -1, -1});
    std::map<std::pair<int, int>, int> index;
    for (int c = 0; c < num_cells(); ++c) {
        for (int i = 0; i < 3; ++i) {
            int a = cells[c][(i + 1) % 3], b = cells[c][(i + 2) % 3];
            const auto key = std::minmax(a, b);
            auto it = index.find({key.first, key.second});
            if (it == index.end()) {
                MeshEdge e;
                e.v = {key.first, key.second};
                e.cell = {c, -1};
                index.emplace(std::make_pair(key.first, key.second), num_edges());
                cell_edges[c][i] = num_edges();
                edges.push_back(e);
            } else {
                auto& e = edges[it->second];
                if (e.cell[1] >= 0) throw MeshError("non-manifold edge in mesh");
                e.cell[1] = c;
                cell_edges[c][i] = it->second;
            }
        }
    }

    auto on_side = [&](const Vec2& p, int axis, double value) { return std::abs(p[axis] - value) <= tol; };

    for (int ei = 0; ei < num_edges(); ++ei) {
        auto& e = edges[ei];
        const Vec2& p = vertices[e.v[0]];
        const Vec2& q = vertices[e.v[1]];
        e.length = (q - p).norm();
        if (e.cell[1] >= 0) {
            const Subdomain s0 = cell_tags[e.cell[0]], s1 = cell_tags[e.cell[1]];
            if (s0 == s1) {
                e.tag = FacetTag::Interior;
            } else {
                auto has = [&](Subdomain s) { return s0 == s || s1 == s; };
                if (has(Subdomain::Z) && has(Subdomain::AW)) e.tag = FacetTag::GammaZ;
                else if (has(Subdomain::Z) && has(Subdomain::AS)) e.tag = FacetTag::GammaAS;
                else if (has(Subdomain::AS) && has(Subdomain::AW)) e.tag = FacetTag::GammaAW;
                else throw MeshError("unexpected subdomain pair across an edge");
                const Subdomain first = has(Subdomain::Z) ? Subdomain::Z : Subdomain::AS;
                if (s0 != first) std::swap(e.cell[0], e.cell[1]);
            }
        } else if (periodic) {
            e.tag = FacetTag::Periodic;
        } else {
            e.tag = FacetTag::Exterior;
            if (boundary_segments) {
                const Vec2 mid = 0.5 * (p + q);
                for (int s = 0; s < static_cast<int>(boundary_segments->size()); ++s) {
                    const auto& seg = (*boundary_segments)[s];
                    const Vec2 d = seg.b - seg.a;
                    const double len2 = d.squaredNorm();
                    const double t = (mid - seg.a).dot(d) / len2;
                    if (t < -1e-12 || t > 1 + 1e-12) continue;
                    if (std::abs(cross(d, mid - seg.a)) <= tol * std::sqrt(len2)) {
                        e.boundary_id = s;
                        break;
                    }
                }
            }
        }
        Vec2 n = perp(q - p).normalized();
        if (n.dot(0.5 * (p + q) - centroid(e.cell[0])) < 0) n = -n;
        e.normal = n;
    }

    if (periodic) {
        for (int ei = 0; ei < num_edges(); ++ei) {
            auto& e = edges[ei];
            if (e.tag != FacetTag::Periodic) continue;
            const Vec2& p = vertices[e.v[0]];
            const Vec2& q = vertices[e.v[1]];
            const std::vector<int>* map = nullptr;
            if ((on_side(p, 0, lower.x()) && on_side(q, 0, lower.x())) ||
                (on_side(p, 0, upper.x()) && on_side(q, 0, upper.x())))
                map = &periodic_x;
            else if ((on_side(p, 1, lower.y()) && on_side(q, 1, lower.y())) ||
                     (on_side(p, 1, upper.y()) && on_side(q, 1, upper.y())))
                map = &periodic_y;
            if (!map) throw MeshError("boundary edge of a periodic mesh is not on the cell boundary");
            const int a = (*map)[e.v[0]], b = (*map)[e.v[1]];
            const auto key = std::minmax(a, b);
            auto it = index.find({key.first, key.second});
            if (a < 0 || b < 0 || it == index.end()) throw MeshError("periodic edge has no partner");
            e.partner = it->second;
        }
    }
}

SimplicialMesh structured_unit_square(int n) {
    if (n < 1) throw MeshError("structured mesh needs at least one division");
    SimplicialMesh m;
    m.periodic = true;
    m.h = 1.0 / n;
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) m.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            m.cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    m.cell_tags.assign(m.cells.size(), Subdomain::AW);
    m.build_topology();
    return m;
}

SimplicialMesh mesh_macro_domain(const MacroDomainSpec& spec) {
    if (!(spec.x1 > spec.x0) || !(spec.y1 > spec.y0)) throw MeshError("macroscopic rectangle has empty extent");
    if (!(spec.h > 0.0)) throw MeshError("macroscopic mesh size must be positive");
    MacroDomainSpec s = spec;
    if (s.segments.empty()) s = MacroDomainSpec::rectangle(spec.x0, spec.y0, spec.x1, spec.y1, spec.h);
    const double net = boundary_net_flux(s);
    if (std::abs(net) > 1e-12)
        throw CompatibilityError("boundary data violates the Darcy compatibility condition: net flux " +
                                 std::to_string(net) + " != 0");
    const int nx = std::max(1, static_cast<int>(std::ceil((s.x1 - s.x0) / s.h - 1e-9)));
    const int ny = std::max(1, static_cast<int>(std::ceil((s.y1 - s.y0) / s.h - 1e-9)));
    SimplicialMesh m;
    m.periodic = false;
    m.lower = Vec2(s.x0, s.y0);
    m.upper = Vec2(s.x1, s.y1);
    m.h = std::max((s.x1 - s.x0) / nx, (s.y1 - s.y0) / ny);
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double x = i == nx ? s.x1 : s.x0 + (s.x1 - s.x0) * i / nx;
            const double y = j == ny ? s.y1 : s.y0 + (s.y1 - s.y0) * j / ny;
            m.vertices.emplace_back(x, y);
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            m.cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    m.cell_tags.assign(m.cells.size(), Subdomain::Macro);
    m.build_topology(&s.segments);
    for (const auto& e : m.edges)
        if (e.tag == FacetTag::Exterior && e.boundary_id < 0)
            throw MeshError("boundary facet not covered by any boundary segment");
    return m;
}

SimplicialMesh tile_unit_cell(const SimplicialMesh& cell, int n, std::vector<int>* tile_of_cell,
                              std::vector<int>* source_cell) {
    if (n < 1) throw MeshError("tiling needs at least one cell per side");
    SimplicialMesh m;
    m.periodic = false;
    m.h = cell.h / n;
    std::map<std::pair<double, double>, int> index;
    std::vector<int> local(cell.vertices.size());
    if (tile_of_cell) tile_of_cell->clear();
    if (source_cell) source_cell->clear();
    for (int tj = 0; tj < n; ++tj)
        for (int ti = 0; ti < n; ++ti) {
            for (int v = 0; v < cell.num_vertices(); ++v) {
                const Vec2& p = cell.vertices[v];
                const Vec2 q((ti + p.x()) / n, (tj + p.y()) / n);
                auto [it, inserted] = index.emplace(std::make_pair(q.x(), q.y()), m.num_vertices());
                if (inserted) m.vertices.push_back(q);
                local[v] = it->second;
            }
            for (int c = 0; c < cell.num_cells(); ++c) {
                const auto& t = cell.cells[c];
                m.cells.push_back({local[t[0]], local[t[1]], local[t[2]]});
                m.cell_tags.push_back(cell.cell_tags[c]);
                if (tile_of_cell) tile_of_cell->push_back(tj * n + ti);
                if (source_cell) source_cell->push_back(c);
            }
        }
    const auto sides = MacroDomainSpec::rectangle(0, 0, 1, 1, m.h).segments;
    m.build_topology(&sides);
    return m;
}

}  // namespace plantflow
