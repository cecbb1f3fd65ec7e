#include "oracles.hpp"

#include "plantflow/errors.hpp"
#include "plantflow/geometry.hpp"
#include "plantflow/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace plantflow;
using namespace plantflow::testing;

namespace {

UnitCellSpec plain_disk(double radius, double wall) {
    UnitCellSpec s;
    s.shape = SymplastShape::Disk;
    s.radius = radius;
    s.wall_thickness = wall;
    return s;
}

int count_edges(const SimplicialMesh& m, FacetTag tag) {
    int n = 0;
    for (const auto& e : m.edges) n += e.tag == tag;
    return n;
}

}  // namespace

TEST(UnitCell, DiskAreaIsExact) {
    const UnitCellGeometry g(plain_disk(0.3, 0.2));
    EXPECT_NEAR(g.area(Subdomain::Z), M_PI * 0.09, 1e-14);
    EXPECT_NEAR(g.area(Subdomain::AS), 0.0, 1e-14);
    EXPECT_NEAR(g.area(Subdomain::Z) + g.area(Subdomain::AW) + g.area(Subdomain::AS), 1.0, 1e-14);
}

TEST(UnitCell, OverflowingSymplastIsRejected) {
    EXPECT_THROW(UnitCellGeometry(plain_disk(0.6, 0.45)), GeometryError);
    EXPECT_THROW(UnitCellGeometry(plain_disk(0.45, 0.1)), GeometryError);
}

TEST(UnitCell, ChannelAreaMatchesMonteCarlo) {
    UnitCellSpec s = plain_disk(0.3, 0.15);
    s.plasmodesmata = {{Side::Left, 0.05}, {Side::Top, 0.05}};
    const UnitCellGeometry g(s);
    const double mc = monte_carlo_area(g, Subdomain::AS, 1000000, 7);
    EXPECT_LT(relative(g.area(Subdomain::AS), mc), 0.005);
}

TEST(UnitCell, OverlappingChannelsAreRejected) {
    UnitCellSpec s = plain_disk(0.3, 0.1);
    s.plasmodesmata = {{Side::Left, 0.05}, {Side::Left, 0.05}};
    EXPECT_THROW(UnitCellGeometry{s}, GeometryError);
}

TEST(UnitCell, ClassifierIsPeriodic) {
    const UnitCellGeometry g(default_cell());
    for (const Vec2 p : {Vec2(0.5, 0.5), Vec2(0.02, 0.5), Vec2(0.1, 0.1), Vec2(0.5, 0.98)})
        EXPECT_EQ(g.classify(p), g.classify(p + Vec2(1.0, -1.0)));
    EXPECT_EQ(g.classify(Vec2(0.5, 0.5)), Subdomain::Z);
    EXPECT_EQ(g.classify(Vec2(0.02, 0.5)), Subdomain::AS);
    EXPECT_EQ(g.classify(Vec2(0.05, 0.05)), Subdomain::AW);
}

TEST(UnitCell, SymmetryFlags) {
    const UnitCellGeometry four(fourfold_cell());
    EXPECT_TRUE(four.mirror_x());
    EXPECT_TRUE(four.mirror_y());
    EXPECT_TRUE(four.mirror_diagonal());
    const UnitCellGeometry def(default_cell());
    EXPECT_FALSE(def.mirror_x());
    EXPECT_TRUE(def.mirror_y());
}

class CellMeshTest : public ::testing::TestWithParam<UnitCellSpec> {};

TEST_P(CellMeshTest, TagsPartitionTheCell) {
    const UnitCellGeometry g(GetParam());
    const SimplicialMesh m = mesh_unit_cell(g, 0.1);
    const double total = m.area_of(Subdomain::Z) + m.area_of(Subdomain::AW) + m.area_of(Subdomain::AS);
    EXPECT_NEAR(total, 1.0, 1e-10);
    for (int c = 0; c < m.num_cells(); ++c) EXPECT_EQ(m.cell_tags[c], g.classify(m.centroid(c)));
    EXPECT_GE(m.min_angle_deg(), 20.0 - 1e-9);
}

TEST_P(CellMeshTest, InterfaceFacetsSeparateDifferentTags) {
    const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(GetParam()), 0.1);
    for (const auto& e : m.edges) {
        if (e.tag != FacetTag::GammaZ && e.tag != FacetTag::GammaAS && e.tag != FacetTag::GammaAW) continue;
        ASSERT_GE(e.cell[1], 0);
        EXPECT_NE(m.cell_tags[e.cell[0]], m.cell_tags[e.cell[1]]);
    }
}

TEST_P(CellMeshTest, PeriodicMapsAreCongruentInvolutions) {
    const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(GetParam()), 0.1);
    ASSERT_TRUE(m.periodic);
    const double tol = 1e-12 * m.diameter();
    int paired = 0;
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (const int w = m.periodic_x[v]; w >= 0) {
            ++paired;
            EXPECT_EQ(m.periodic_x[w], v);
            EXPECT_NEAR(std::abs(m.vertices[v].x() - m.vertices[w].x()), 1.0, tol);
            EXPECT_NEAR(m.vertices[v].y(), m.vertices[w].y(), tol);
        }
        if (const int w = m.periodic_y[v]; w >= 0) {
            EXPECT_EQ(m.periodic_y[w], v);
            EXPECT_NEAR(std::abs(m.vertices[v].y() - m.vertices[w].y()), 1.0, tol);
            EXPECT_NEAR(m.vertices[v].x(), m.vertices[w].x(), tol);
        }
    }
    EXPECT_GT(paired, 0);
    for (const auto& e : m.edges)
        if (e.tag == FacetTag::Periodic) {
            ASSERT_GE(e.partner, 0);
            EXPECT_EQ(m.edges[e.partner].partner, &e - m.edges.data());
        }
}

INSTANTIATE_TEST_SUITE_P(Cells, CellMeshTest,
                         ::testing::Values(plain_disk(0.3, 0.2), fourfold_cell(), default_cell(), all_darcy_cell()));

TEST(CellMesh, SymplastFacetsLieOnTheCircle) {
    const double h = 0.1;
    const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(plain_disk(0.3, 0.2)), h);
    const Vec2 c(0.5, 0.5);
    int n = 0;
    for (int e = 0; e < m.num_edges(); ++e) {
        if (m.edges[e].tag != FacetTag::GammaZ) continue;
        ++n;
        for (int v : m.edges[e].v) EXPECT_NEAR((m.vertices[v] - c).norm(), 0.3, 1e-12);
        EXPECT_LT(std::abs((m.edge_midpoint(e) - c).norm() - 0.3), h * h);
        // Oriented from the symplast to the apoplast.
        EXPECT_GT(m.edges[e].normal.dot(m.edge_midpoint(e) - c), 0.0);
        EXPECT_EQ(m.cell_tags[m.edges[e].cell[0]], Subdomain::Z);
    }
    EXPECT_GT(n, 0);
}

TEST(CellMesh, RefinementDoublesInterfaceFacets) {
    const UnitCellGeometry g(plain_disk(0.3, 0.2));
    const int coarse = count_edges(mesh_unit_cell(g, 0.1), FacetTag::GammaZ);
    const int fine = count_edges(mesh_unit_cell(g, 0.05), FacetTag::GammaZ);
    const double ratio = static_cast<double>(fine) / coarse;
    EXPECT_GE(ratio, 1.7);
    EXPECT_LE(ratio, 2.3);
}

TEST(CellMesh, TooCoarseMeshIsRejected) {
    EXPECT_THROW(mesh_unit_cell(UnitCellGeometry(plain_disk(0.3, 0.2)), 0.6), MeshError);
}

TEST(MacroMesh, UnitSquareBoundaryTags) {
    const SimplicialMesh m = mesh_macro_domain(MacroDomainSpec::rectangle(0, 0, 1, 1, 0.25));
    EXPECT_GE(m.num_cells(), 32);
    double area = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        EXPECT_EQ(m.cell_tags[c], Subdomain::Macro);
        area += m.cell_area(c);
    }
    EXPECT_NEAR(area, 1.0, 1e-14);
    for (const auto& e : m.edges)
        if (e.cell[1] < 0) {
            EXPECT_EQ(e.tag, FacetTag::Exterior);
            EXPECT_GE(e.boundary_id, 0);
            EXPECT_LT(e.boundary_id, 4);
        }
}

TEST(MacroMesh, BoundaryFluxCompatibility) {
    EXPECT_NO_THROW(mesh_macro_domain(MacroDomainSpec::rectangle(0, 0, 1, 1, 0.25, 1.0, -1.0, 0.0, 0.0)));
    EXPECT_THROW(mesh_macro_domain(MacroDomainSpec::rectangle(0, 0, 1, 1, 0.25, 1.0, 0.0, 0.0, 0.0)),
                 CompatibilityError);
}

TEST(TiledMesh, CoversTheSquare) {
    const SimplicialMesh cell = mesh_unit_cell(UnitCellGeometry(default_cell()), 0.2);
    std::vector<int> tile;
    const SimplicialMesh m = tile_unit_cell(cell, 3, &tile);
    EXPECT_EQ(m.num_cells(), 9 * cell.num_cells());
    std::vector<double> area(9, 0.0);
    for (int c = 0; c < m.num_cells(); ++c) area[tile[c]] += m.cell_area(c);
    for (double a : area) EXPECT_NEAR(a, 1.0 / 9.0, 1e-13);
    EXPECT_NEAR(m.area_of(Subdomain::Z), cell.area_of(Subdomain::Z), 1e-12);
    for (const auto& e : m.edges) EXPECT_NE(e.tag, FacetTag::Periodic);
}
