#include "oracles.hpp"

#include "plantflow/effective_tensors.hpp"
#include "plantflow/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace plantflow;
using namespace plantflow::testing;

namespace {

const CellModel& default_model() {
    static const SimplicialMesh mesh = mesh_unit_cell(UnitCellGeometry(default_cell()), 0.1);
    static const RunConfig cfg = default_config();
    static const CellModel model(mesh, cfg.flow_params(), cfg.diffusion);
    return model;
}

const CellModel& fourfold_model() {
    static const SimplicialMesh mesh = mesh_unit_cell(UnitCellGeometry(fourfold_cell()), 0.1);
    static const RunConfig cfg = default_config();
    static const CellModel model(mesh, cfg.flow_params(), cfg.diffusion);
    return model;
}

Mat2 layered_tensor(int n) {
    const SimplicialMesh m = structured_unit_square(n);
    const ScalarCellSolver solver(m, CellSide::Full, layered_diffusion(m, 1.0, 3.0));
    return assemble_diffusion_tensor(solver, {solver.solve_diffusion(0), solver.solve_diffusion(1)});
}

}  // namespace

TEST(CheckSpd, AnalyticCases) {
    const SpdReport id = check_spd(MatrixX::Identity(2, 2));
    EXPECT_TRUE(id.spd());
    EXPECT_EQ(id.symmetry_defect, 0.0);
    MatrixX t(2, 2);
    t << 1.0, 2.0, 2.0, 1.0;
    const SpdReport r = check_spd(t);
    EXPECT_TRUE(r.symmetric);
    EXPECT_FALSE(r.positive_definite);
    EXPECT_NEAR(r.eigenvalues(0), -1.0, 1e-14);
    EXPECT_NEAR(r.eigenvalues(1), 3.0, 1e-14);
    t << 1.0, 0.5, 0.0, 1.0;
    EXPECT_FALSE(check_spd(t).symmetric);
}

TEST(Permeability, AllDarcyCellGivesScalarTensor) {
    const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(all_darcy_cell()), 0.125);
    CellFlowParams p;
    p.k_aw = 0.7 * Mat2::Identity();
    const CellFlowSolver solver(m, p);
    const Mat2 k = assemble_permeability({solver.solve_permeability(0), solver.solve_permeability(1)});
    EXPECT_LT((k - 0.7 * Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Permeability, MissingSolutionIsAnError) {
    const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(all_darcy_cell()), 0.25);
    const CellFlowSolver solver(m, CellFlowParams{});
    EXPECT_THROW(assemble_permeability({solver.solve_permeability(0)}), StateError);
    EXPECT_THROW(assemble_osmotic_vector(solver.solve_permeability(0)), StateError);
}

TEST(Permeability, DefaultCellIsSymmetricPositiveDefinite) {
    const EffectiveCoefficients& c = default_model().coefficients();
    EXPECT_LT(std::abs(c.K(0, 1) - c.K(1, 0)) / c.K.norm(), 1e-8);
    EXPECT_TRUE(c.K_report.spd());
    EXPECT_TRUE(check_spd(c.K).spd());
    EXPECT_TRUE(c.A_a_report.spd());
    EXPECT_TRUE(c.A_s_report.spd());
}

TEST(Permeability, ShrinkingInclusionApproachesDarcyValue) {
    CellFlowParams p;
    p.k_aw = p.k_ap = p.k_sp = 0.01 * Mat2::Identity();
    // The deviation from the homogeneous wall value 0.02 vanishes with the inclusion.
    double previous = std::numeric_limits<double>::infinity();
    for (double r : {0.3, 0.2, 0.1, 0.05}) {
        UnitCellSpec s;
        s.radius = r;
        s.wall_thickness = 0.1;
        const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(s), 0.05);
        const CellFlowSolver solver(m, p);
        const double trace = assemble_permeability({solver.solve_permeability(0), solver.solve_permeability(1)}).trace();
        const double deviation = std::abs(trace - 0.02);
        EXPECT_LT(deviation, previous) << "radius " << r;
        previous = deviation;
    }
    EXPECT_LT(previous, 0.05 * 0.02);
}

TEST(Permeability, FourfoldCellIsIsotropic) {
    const EffectiveCoefficients& c = fourfold_model().coefficients();
    EXPECT_LT(std::abs(c.K(0, 1)), 1e-8 * c.K.trace() / 2.0);
    EXPECT_LT(std::abs(c.K(1, 0)), 1e-8 * c.K.trace() / 2.0);
    EXPECT_LT(std::abs(c.K(0, 0) - c.K(1, 1)), 1e-8 * c.K.trace() / 2.0);
    EXPECT_LT(std::abs(c.A_a(0, 0) - c.A_a(1, 1)), 1e-8 * c.A_a.trace());
}

TEST(Osmotic, FourfoldCellHasNoPreferredDirection) {
    EXPECT_LT(fourfold_model().coefficients().M.norm(), 1e-8);
}

TEST(Osmotic, DefaultCellPointsTowardTheWiderChannel) {
    const Vec2 m = default_model().coefficients().M;
    EXPECT_GT(std::abs(m.x()), 1e-6);
    EXPECT_LT(std::abs(m.y()), 1e-8);
}

TEST(Osmotic, LinearInDelta) {
    const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(default_cell()), 0.1);
    CellFlowParams p = default_config().flow_params();
    const Vec2 m1 = assemble_osmotic_vector(solve_osmotic_cell(m, p));
    p.delta_z *= 2.0;
    p.delta_as *= 2.0;
    const Vec2 m2 = assemble_osmotic_vector(solve_osmotic_cell(m, p));
    EXPECT_LT((m2 - 2.0 * m1).norm(), 1e-10 * m2.norm());
    p.delta_z = p.delta_as = 0.0;
    EXPECT_EQ(assemble_osmotic_vector(solve_osmotic_cell(m, p)).norm(), 0.0);
}

TEST(Diffusion, ConstantTensorOnFullCell) {
    const SimplicialMesh m = structured_unit_square(8);
    const Mat2 d{{2.0, 0.3}, {0.3, 1.0}};
    const ScalarCellSolver solver(m, CellSide::Full, [&](int) { return d; });
    const Mat2 a = assemble_diffusion_tensor(solver, {solver.solve_diffusion(0), solver.solve_diffusion(1)});
    EXPECT_LT((a - d).norm(), 1e-12);
}

TEST(Diffusion, LayeredMediumMeans) {
    const Mat2 a = layered_tensor(64);
    EXPECT_LT(relative(a(0, 0), 2.0), 0.01);
    EXPECT_LT(relative(a(1, 1), 1.5), 0.01);
    EXPECT_LT(std::abs(a(0, 1)), 1e-10);
    const Mat2 coarse = layered_tensor(8);
    EXPECT_LE(std::abs(a(1, 1) - 1.5), std::abs(coarse(1, 1) - 1.5) + 1e-12);
}

TEST(Diffusion, PerforatedSidesRespectBounds) {
    const CellModel& model = default_model();
    for (CellSide side : {CellSide::A, CellSide::S}) {
        const ScalarCellSolver& s = model.scalar(side);
        const Mat2 a = side == CellSide::A ? model.coefficients().A_a : model.coefficients().A_s;
        const DiffusionBounds b = diffusion_bounds(s);
        EXPECT_TRUE(b.contains(a));
        EXPECT_EQ(b.lower, 0.0);
        EXPECT_NEAR(b.upper, s.mean_diffusion().eigenvalues().real().maxCoeff(), 1e-14);
    }
}

TEST(Diffusion, FullCellBoundsAreVoigtAndReuss) {
    const SimplicialMesh m = structured_unit_square(16);
    const ScalarCellSolver solver(m, CellSide::Full, layered_diffusion(m, 1.0, 3.0));
    const DiffusionBounds b = diffusion_bounds(solver);
    EXPECT_NEAR(b.lower, 1.5, 1e-12);
    EXPECT_NEAR(b.upper, 2.0, 1e-12);
}

TEST(EffectiveVelocity, ZeroAndConstantFields) {
    const SimplicialMesh m = structured_unit_square(8);
    const ScalarCellSolver solver(m, CellSide::Full, [](int) { return Mat2::Identity(); });
    const std::vector<Vec2> zero(m.num_cells(), Vec2::Zero());
    EXPECT_EQ(assemble_effective_velocity(solver, zero, solver.solve_convection(zero, 1.0), 1.0).norm(), 0.0);
    const std::vector<Vec2> v(m.num_cells(), Vec2(0.4, -0.25));
    const Vec2 h = assemble_effective_velocity(solver, v, solver.solve_convection(v, 1.0), 1.0);
    EXPECT_NEAR(h.x(), 0.4, 1e-12);
    EXPECT_NEAR(h.y(), -0.25, 1e-12);
    const std::vector<Vec2> fast(m.num_cells(), Vec2(3.0, 0.5));
    const Vec2 s = assemble_effective_velocity(solver, fast, solver.solve_convection(fast, 1.0), 1.0);
    EXPECT_NEAR(s.x(), 1.0, 1e-12);
    EXPECT_NEAR(s.y(), 0.5, 1e-12);
}

TEST(EffectiveVelocity, MismatchedFieldIsRejected) {
    const SimplicialMesh m = structured_unit_square(4);
    const ScalarCellSolver solver(m, CellSide::Full, [](int) { return Mat2::Identity(); });
    const std::vector<Vec2> v(m.num_cells(), Vec2::Zero());
    const ScalarCellSolution z = solver.solve_convection(v, 1.0);
    EXPECT_THROW(assemble_effective_velocity(solver, std::vector<Vec2>(3, Vec2::Zero()), z, 1.0), StateError);
}

TEST(CellModel, VelocityIsLinearInTheMacroscopicData) {
    const CellModel& model = default_model();
    EXPECT_EQ(model.effective_velocity(CellSide::A, Vec2::Zero(), 0.0, 1.0).norm(), 0.0);
    // With the cutoff inactive the map is linear.
    const Vec2 g(0.02, -0.01);
    for (CellSide side : {CellSide::A, CellSide::S}) {
        const Vec2 h1 = model.effective_velocity(side, g, 0.3, 10.0);
        const Vec2 h2 = model.effective_velocity(side, 2.0 * g, 0.6, 10.0);
        EXPECT_GT(h1.norm(), 0.0);
        EXPECT_LT((h2 - 2.0 * h1).norm(), 1e-10 * h2.norm());
    }
}
