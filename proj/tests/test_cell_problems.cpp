#include "oracles.hpp"

#include "plantflow/cell_problems.hpp"
#include "plantflow/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

using namespace plantflow;
using namespace plantflow::testing;

namespace {

CellFlowParams default_params() { return default_config().flow_params(); }

const SimplicialMesh& default_mesh() {
    static const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(default_cell()), 0.1);
    return m;
}

/// Mirror image of a periodic cell mesh under y -> 1 - y.
SimplicialMesh reflect_y(const SimplicialMesh& m) {
    SimplicialMesh r;
    r.vertices = m.vertices;
    for (Vec2& p : r.vertices) p.y() = 1.0 - p.y();
    r.cells = m.cells;
    for (auto& c : r.cells) std::swap(c[1], c[2]);
    r.cell_tags = m.cell_tags;
    r.periodic_x = m.periodic_x;
    r.periodic_y = m.periodic_y;
    r.lower = m.lower;
    r.upper = m.upper;
    r.periodic = m.periodic;
    r.h = m.h;
    r.build_topology();
    return r;
}

/// Lookup of vertices by rounded coordinates.
class VertexIndex {
public:
    explicit VertexIndex(const SimplicialMesh& m) {
        for (int v = 0; v < m.num_vertices(); ++v) index_[key(m.vertices[v])] = v;
    }
    int find(const Vec2& p) const {
        const auto it = index_.find(key(p));
        return it == index_.end() ? -1 : it->second;
    }

private:
    static std::pair<long, long> key(const Vec2& p) { return {std::lround(p.x() * 1e9), std::lround(p.y() * 1e9)}; }
    std::map<std::pair<long, long>, int> index_;
};

}  // namespace

TEST(Permeability, AllDarcyCellIsExact) {
    const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(all_darcy_cell()), 0.125);
    CellFlowParams p;
    p.k_aw = 0.7 * Mat2::Identity();
    const CellFlowSolver solver(m, p);
    for (int i = 0; i < 2; ++i) {
        const CellFlowSolution s = solver.solve_permeability(i);
        EXPECT_NEAR(s.integral()(i), 0.7, 1e-12);
        EXPECT_NEAR(s.integral()(1 - i), 0.0, 1e-12);
        EXPECT_LT(s.field.pressure_a.cwiseAbs().maxCoeff(), 1e-12);
        for (int c = 0; c < m.num_cells(); ++c) {
            const Vec2 w = solver.system().darcy_velocity(s.field.flux_a, c, m.centroid(c));
            EXPECT_NEAR(w(i), 0.7, 1e-12);
            EXPECT_NEAR(w(1 - i), 0.0, 1e-12);
        }
    }
}

TEST(Permeability, AssembledResidualIsSmall) {
    const CellFlowSolver solver(default_mesh(), default_params());
    const CellFlowSolution s = solver.solve_permeability(0);
    const VectorX x = solver.system().encode(s.field);
    const VectorX rhs = solver.system().body_force(Vec2(1.0, 0.0));
    const double res = (solver.system().matrix() * x - rhs).norm() / rhs.norm();
    EXPECT_LT(res, 1e-9);
    EXPECT_LT(s.residual, 1e-9);
}

TEST(Permeability, EnergyIdentity) {
    const CellFlowSolver solver(default_mesh(), default_params());
    for (int i = 0; i < 2; ++i) {
        const CellFlowSolution s = solver.solve_permeability(i);
        EXPECT_GT(s.forcing_work, 0.0);
        EXPECT_LT(relative(s.energy, s.forcing_work), 1e-8);
        EXPECT_LT(relative(solver.system().energy(s.field), s.integral()(i)), 1e-8);
    }
}

TEST(Permeability, DivergenceFreeAndBalanced) {
    const CellFlowSolver solver(default_mesh(), default_params());
    for (int i = 0; i < 2; ++i) {
        const CellFlowSolution s = solver.solve_permeability(i);
        const double scale = s.integral().norm();
        EXPECT_LT(s.max_divergence, 1e-8 * scale);
        EXPECT_LT(s.interface_defect, 1e-8 * scale);
    }
}

TEST(Permeability, MirrorImageSolvesTheMirroredProblem) {
    const SimplicialMesh& m = default_mesh();
    const SimplicialMesh r = reflect_y(m);
    const CellFlowParams p = default_params();
    const CellFlowSolver a(m, p), b(r, p);
    for (int i = 0; i < 2; ++i) {
        const CellFlowSolution sa = a.solve_permeability(i), sb = b.solve_permeability(i);
        const double sign = i == 0 ? 1.0 : -1.0;
        for (int c = 0; c < m.num_cells(); ++c) {
            // Pressures are odd in y for the vertical forcing and even otherwise.
            EXPECT_NEAR(sb.field.pressure_z(c), sign * sa.field.pressure_z(c), 1e-8);
            EXPECT_NEAR(sb.field.pressure_a(c), sign * sa.field.pressure_a(c), 1e-8);
            EXPECT_NEAR(sb.field.pressure_sp(c), sign * sa.field.pressure_sp(c), 1e-8);
        }
        for (int v = 0; v < m.num_vertices(); ++v) {
            if (a.system().node_of_vertex(v) < 0) continue;
            const Vec2 wa = sa.field.node_velocity[a.system().node_of_vertex(v)];
            const Vec2 wb = sb.field.node_velocity[b.system().node_of_vertex(v)];
            EXPECT_NEAR(wb.x(), sign * wa.x(), 1e-8);
            EXPECT_NEAR(wb.y(), -sign * wa.y(), 1e-8);
        }
        EXPECT_NEAR(sb.integral().x(), sign * sa.integral().x(), 1e-10);
        EXPECT_NEAR(sb.integral().y(), -sign * sa.integral().y(), 1e-10);
    }
}

TEST(Permeability, LinearInTheForcing) {
    const CellFlowSolver solver(default_mesh(), default_params());
    const FlowSystem& sys = solver.system();
    const VectorX x1 = sys.solve_raw(sys.body_force(Vec2(1.0, 0.0)));
    const VectorX x2 = sys.solve_raw(sys.body_force(Vec2(0.0, 1.0)));
    const VectorX x = sys.solve_raw(sys.body_force(Vec2(0.3, -1.7)));
    EXPECT_LT((x - (0.3 * x1 - 1.7 * x2)).norm(), 1e-10 * x.norm());
}

TEST(Permeability, NonSpdTensorIsRejected) {
    CellFlowParams p = default_params();
    p.k_ap << 1.0, 2.0, 2.0, 1.0;
    EXPECT_THROW(CellFlowSolver(default_mesh(), p), ParameterError);
    p = default_params();
    p.kappa_z = 0.0;
    EXPECT_THROW(CellFlowSolver(default_mesh(), p), ParameterError);
}

TEST(Osmotic, ZeroForcingGivesZero) {
    CellFlowParams p = default_params();
    p.delta_z = p.delta_as = 0.0;
    const CellFlowSolution s = solve_osmotic_cell(default_mesh(), p);
    EXPECT_LT(s.field.flux_a.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(s.field.pressure_z.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(s.field.pressure_a.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Osmotic, ScalesLinearly) {
    const CellFlowSolver solver(default_mesh(), default_params());
    const CellFlowSolution one = solver.solve_osmotic(), two = solver.solve_osmotic(2.0, 2.0);
    EXPECT_LT((two.field.flux_a - 2.0 * one.field.flux_a).norm(), 1e-10 * two.field.flux_a.norm());
    EXPECT_LT((two.field.pressure_z - 2.0 * one.field.pressure_z).norm(), 1e-10 * two.field.pressure_z.norm());
    const CellFlowSolution z = solver.solve_osmotic(1.0, 0.0), as = solver.solve_osmotic(0.0, 1.0);
    EXPECT_LT((z.field.flux_a + as.field.flux_a - one.field.flux_a).norm(), 1e-10 * one.field.flux_a.norm());
}

TEST(Osmotic, InterfaceFluxBalance) {
    const CellFlowSolver solver(default_mesh(), default_params());
    const CellFlowSolution s = solver.solve_osmotic();
    const double fa = solver.system().interface_flux_a(s.field), fz = solver.system().interface_flux_z(s.field);
    EXPECT_NEAR(fa, fz, 1e-10);
    EXPECT_LT(s.max_divergence, 1e-8);
}

TEST(FlowSystem, InfSupConstantIsPositive) {
    const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(default_cell()), 0.25);
    const FlowSystem sys(m, default_params().flow_coefficients());
    EXPECT_GT(sys.inf_sup_estimate(), 1e-6);
}

TEST(FlowSystem, RequiresPeriodicMesh) {
    const SimplicialMesh m = mesh_macro_domain(MacroDomainSpec::rectangle(0, 0, 1, 1, 0.25));
    EXPECT_THROW(CellFlowSolver(m, default_params()), GeometryError);
}

TEST(Diffusion, ConstantTensorGivesZero) {
    const SimplicialMesh m = structured_unit_square(8);
    const CellTensorField d = [](int) { return Mat2{{2.0, 0.3}, {0.3, 1.0}}; };
    for (int i = 0; i < 2; ++i) EXPECT_LT(solve_diffusion_cell(m, CellSide::Full, i, d).values.norm(), 1e-12);
}

TEST(Diffusion, TwoLayerProfile) {
    const SimplicialMesh m = structured_unit_square(16);
    const CellTensorField d = layered_diffusion(m, 1.0, 3.0);
    const ScalarCellSolver solver(m, CellSide::Full, d);
    EXPECT_LT(solver.solve_diffusion(0).values.norm(), 1e-12);
    const ScalarCellSolution w = solver.solve_diffusion(1);
    // Flux continuity gives slopes 1/2 and -1/2 in the two strips, shifted to mean zero.
    for (int v = 0; v < m.num_vertices(); ++v) {
        const double y = m.vertices[v].y();
        const double exact = y <= 0.5 ? 0.5 * y - 0.125 : 0.125 - 0.5 * (y - 0.5);
        EXPECT_NEAR(w.values(v), exact, 1e-10);
    }
    EXPECT_NEAR(solver.mean(w), 0.0, 1e-12);
    EXPECT_LT(solver.periodicity_defect(w), 1e-12);
}

TEST(Diffusion, CheckerboardIsOddUnderHalfTurn) {
    const SimplicialMesh m = structured_unit_square(16);
    const CellTensorField d = [&m](int c) {
        const Vec2 x = m.centroid(c);
        return ((x.x() < 0.5) == (x.y() < 0.5) ? 1.0 : 4.0) * Mat2::Identity();
    };
    const ScalarCellSolver solver(m, CellSide::Full, d);
    const VertexIndex index(m);
    for (int i = 0; i < 2; ++i) {
        const ScalarCellSolution w = solver.solve_diffusion(i);
        EXPECT_GT(w.values.norm(), 1e-3);
        for (int v = 0; v < m.num_vertices(); ++v) {
            const int u = index.find(Vec2(1.0, 1.0) - m.vertices[v]);
            ASSERT_GE(u, 0);
            EXPECT_NEAR(w.values(u), -w.values(v), 1e-8);
        }
    }
}

TEST(Diffusion, PerforatedSideMustBeNonEmpty) {
    const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(all_darcy_cell()), 0.125);
    EXPECT_THROW(ScalarCellSolver(m, CellSide::S, [](int) { return Mat2::Identity(); }), GeometryError);
}

TEST(Convection, ZeroVelocityGivesZero) {
    const SimplicialMesh& m = default_mesh();
    const std::vector<Vec2> v(m.num_cells(), Vec2::Zero());
    const ScalarCellSolution z = solve_convection_cell(m, CellSide::A, v, [](int) { return Mat2::Identity(); }, 1.0);
    EXPECT_LT(z.values.norm(), 1e-14);
}

TEST(Convection, ConstantVelocityOnFullCellGivesZero) {
    const SimplicialMesh m = structured_unit_square(8);
    const std::vector<Vec2> v(m.num_cells(), Vec2(0.4, -0.2));
    const ScalarCellSolution z = solve_convection_cell(m, CellSide::Full, v, [](int) { return Mat2::Identity(); }, 1.0);
    EXPECT_LT(z.values.norm(), 1e-12);
}

TEST(Convection, FlowCellVelocityOnPerforatedSide) {
    const SimplicialMesh& m = default_mesh();
    const CellFlowSolver flow(m, default_params());
    const CellFlowSolution w = flow.solve_permeability(0);
    std::vector<Vec2> v = flow.cell_average_a(w.field);
    for (Vec2& x : v) x *= 50.0;
    const ScalarCellSolver solver(m, CellSide::A, [](int) { return Mat2::Identity(); });
    const ScalarCellSolution z = solver.solve_convection(v, 1.0);
    EXPECT_LT(z.residual, 1e-9);
    EXPECT_LT(z.compatibility_defect, 1e-10);
    EXPECT_GT(z.values.norm(), 0.0);
    EXPECT_NEAR(solver.mean(z), 0.0, 1e-12);
}
