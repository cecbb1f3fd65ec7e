#pragma once

#include "plantflow/geometry.hpp"
#include "plantflow/linalg.hpp"

#include <array>
#include <vector>

namespace plantflow {

enum class FacetTag : int { Interior = 0, GammaZ = 1, GammaAS = 2, GammaAW = 3, Periodic = 4, Exterior = 5 };

std::string to_string(FacetTag t);

struct MeshEdge {
    std::array<int, 2> v{-1, -1};
    /// cell[0] is the symplast side of Γz/Γas and the AS side of Γaw; for
    /// boundary edges cell[1] = -1.
    std::array<int, 2> cell{-1, -1};
    FacetTag tag = FacetTag::Interior;
    /// Boundary segment index on macroscopic meshes, -1 otherwise.
    int boundary_id = -1;
    /// Opposite edge under the periodic identification, -1 if none.
    int partner = -1;
    /// Unit normal pointing from cell[0] to cell[1] (outward on the boundary).
    Vec2 normal = Vec2::Zero();
    double length = 0.0;
};

/// Triangle mesh with subdomain tags, an edge table and the periodic
/// identification of opposite sides of the unit cell.
class SimplicialMesh {
public:
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> cells;  // counter-clockwise
    std::vector<Subdomain> cell_tags;
    std::vector<MeshEdge> edges;
    std::vector<std::array<int, 3>> cell_edges;  // edge opposite local vertex i
    /// Vertex images under x -> x ± 1 and y -> y ± 1 (-1 if none). Each map
    /// is an involution on the vertices it touches.
    std::vector<int> periodic_x, periodic_y;
    /// Bounding box of the meshed domain.
    Vec2 lower = Vec2::Zero(), upper = Vec2::Ones();
    bool periodic = false;
    double h = 0.0;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }

    double cell_area(int c) const;
    Vec2 centroid(int c) const;
    Vec2 edge_midpoint(int e) const;
    double area_of(Subdomain s) const;
    double min_angle_deg() const;
    double diameter() const { return (upper - lower).norm(); }

    /// Representative of each vertex's periodic equivalence class.
    std::vector<int> periodic_representatives() const;

    /// Rebuilds the edge table from cells, tags and periodic maps.
    /// `boundary_segments` classifies exterior edges on macroscopic meshes.
    void build_topology(const std::vector<BoundarySegment>* boundary_segments = nullptr);
};

struct UnitCellMeshOptions {
    double h = 0.1;
    double min_angle_deg = 20.0;
    int max_vertices = 400000;
};

/// Conforming Delaunay-refined mesh of the unit cell. Cells are tagged with
/// the geometry classifier and all interfaces are mesh edges.
SimplicialMesh mesh_unit_cell(const UnitCellGeometry& geom, const UnitCellMeshOptions& options);
SimplicialMesh mesh_unit_cell(const UnitCellGeometry& geom, double h);

/// Structured right-triangle mesh (Delaunay) of the macroscopic rectangle.
/// Throws CompatibilityError when ∮ v_D ≠ 0.
SimplicialMesh mesh_macro_domain(const MacroDomainSpec& spec);

/// Structured periodic n × n mesh of [0,1]^2 with uniform diagonals.
SimplicialMesh structured_unit_square(int n);

/// Copies of a unit-cell mesh scaled by 1/n and tiled n × n over [0,1]^2.
/// Shared vertices are merged; returns the tile index of every cell.
SimplicialMesh tile_unit_cell(const SimplicialMesh& cell, int n, std::vector<int>* tile_of_cell = nullptr,
                              std::vector<int>* source_cell = nullptr);

}  // namespace plantflow
