#include "oracles.hpp"

#include "plantflow/errors.hpp"
#include "plantflow/macro_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace plantflow;
using namespace plantflow::testing;

namespace {

using Theta = std::array<std::array<TransporterState, 2>, 2>;

MacroPhysics quiet_physics() {
    MacroPhysics p;
    p.K = Mat2::Identity();
    p.A_a = 0.1 * Mat2::Identity();
    p.A_s = 0.05 * Mat2::Identity();
    p.area_a = 0.6;
    p.area_s = 0.5;
    p.length_z = 1.8;
    p.length_as = 0.3;
    return p;
}

MacroPhysics active_physics() {
    MacroPhysics p = quiet_physics();
    p.K = Mat2{{2.0, 0.0}, {0.0, 1.0}};
    p.M = Vec2(0.5, 0.2);
    p.growth_a = 0.8;
    p.capacity_a = 3.0;
    p.growth_s = 0.4;
    p.capacity_s = 2.0;
    for (auto& side : p.transporters)
        for (auto& t : side) {
            t.k1 = 1.0;
            t.k2 = 0.5;
            t.k3 = 0.7;
            t.gamma_free = 0.1;
            t.regulation = {0.3, 1.0};
        }
    return p;
}

Theta theta(double free, double bound) {
    Theta t;
    for (auto& side : t)
        for (auto& c : side) c = {free, bound};
    return t;
}

double bump(const Vec2& x) { return 1.0 + 0.5 * std::cos(M_PI * x.x()) * std::cos(M_PI * x.y()); }
double wave(const Vec2& x) { return 1.2 + 0.6 * std::sin(M_PI * x.x()) * x.y(); }

struct UnitSquare {
    MacroDomainSpec domain;
    SimplicialMesh mesh;
    UnitSquare(double h, double q = 0.0) : domain(MacroDomainSpec::rectangle(0, 0, 1, 1, h, -q, q, 0, 0)), mesh(mesh_macro_domain(domain)) {}
};

std::vector<double> v_d(double q) { return {-q, q, 0.0, 0.0}; }

}  // namespace

TEST(Darcy, UniformFlowIsExact) {
    const UnitSquare s(0.125, 0.3);
    const DarcySolver solver(s.mesh, Mat2::Identity(), v_d(0.3));
    const DarcySolution sol = solver.solve(Vec2::Zero(), VectorX::Zero(s.mesh.num_vertices()));
    for (int c = 0; c < s.mesh.num_cells(); ++c) {
        const Vec2 v = solver.cell_velocity(sol, c);
        EXPECT_NEAR(v.x(), 0.3, 1e-10);
        EXPECT_NEAR(v.y(), 0.0, 1e-10);
        EXPECT_NEAR(sol.pressure(c), -0.3 * (s.mesh.centroid(c).x() - 0.5), 1e-10);
    }
    EXPECT_LT(sol.max_divergence, 1e-10);
}

TEST(Darcy, EqualConcentrationsRemoveTheOsmoticTerm) {
    const UnitSquare s(0.125, 0.3);
    const DarcySolver solver(s.mesh, Mat2{{2.0, 0.5}, {0.5, 1.0}}, v_d(0.3));
    VectorX c(s.mesh.num_vertices());
    for (int v = 0; v < c.size(); ++v) c(v) = bump(s.mesh.vertices[v]);
    const DarcySolution a = solve_darcy(s.mesh, solver.permeability(), Vec2(0.7, -0.4), c, c, v_d(0.3));
    const DarcySolution b = solver.solve(Vec2::Zero(), VectorX::Zero(c.size()));
    EXPECT_LT((a.flux - b.flux).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((a.pressure - b.pressure).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Darcy, UniformForcingIsAbsorbedByPressure) {
    const UnitSquare s(0.125);
    const DarcySolver solver(s.mesh, Mat2{{2.0, 0.0}, {0.0, 1.0}}, v_d(0.0));
    const DarcySolution sol = solver.solve(Vec2(0.6, 0.3), VectorX::Constant(s.mesh.num_vertices(), 0.5));
    EXPECT_LT(sol.flux.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Darcy, SolutionMapIsAffine) {
    const UnitSquare s(0.125, 0.2);
    const Mat2 K{{2.0, 0.3}, {0.3, 1.0}};
    const Vec2 M(0.4, -0.1);
    VectorX c1(s.mesh.num_vertices()), c2(s.mesh.num_vertices());
    for (int v = 0; v < c1.size(); ++v) {
        c1(v) = bump(s.mesh.vertices[v]);
        c2(v) = wave(s.mesh.vertices[v]);
    }
    const DarcySolver with_flow(s.mesh, K, v_d(0.2)), without(s.mesh, K, v_d(0.0));
    const VectorX diff = with_flow.solve(M, c1).flux - with_flow.solve(M, c2).flux;
    EXPECT_LT((diff - without.solve(M, c1 - c2).flux).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Darcy, ManufacturedSolutionConvergesAtSecondOrder) {
    const Mat2 K{{2.0, 0.0}, {0.0, 1.0}};
    auto exact = [](const Vec2& x) { return std::cos(2 * M_PI * x.x()) * std::cos(2 * M_PI * x.y()); };
    auto source = [&](const Vec2& x) { return 12.0 * M_PI * M_PI * exact(x); };
    std::vector<double> errors;
    for (int n : {16, 32, 64}) {
        const UnitSquare s(1.0 / n);
        const DarcySolver solver(s.mesh, K, v_d(0.0));
        const DarcySolution sol = solver.solve(Vec2::Zero(), VectorX::Zero(s.mesh.num_vertices()), source);
        const VectorX ref = DarcySolver::cell_averages(s.mesh, exact);
        double e2 = 0.0;
        for (int c = 0; c < s.mesh.num_cells(); ++c) e2 += s.mesh.cell_area(c) * std::pow(sol.pressure(c) - ref(c), 2);
        errors.push_back(std::sqrt(e2));
        EXPECT_LT(sol.max_divergence, 1e-10);
    }
    EXPECT_GE(std::log2(errors[0] / errors[1]), 1.8);
    EXPECT_GE(std::log2(errors[1] / errors[2]), 1.8);
}

TEST(Darcy, IncompatibleBoundaryDataIsRejected) {
    const UnitSquare s(0.25);
    EXPECT_THROW(DarcySolver(s.mesh, Mat2::Identity(), {0.1, 0.0, 0.0, 0.0}), CompatibilityError);
    EXPECT_THROW(DarcySolver(s.mesh, Mat2{{1.0, 2.0}, {2.0, 1.0}}, v_d(0.0)), ParameterError);
}

TEST(Transport, ConstantIsSteadyAndMassIsConserved) {
    const UnitSquare s(0.125);
    const MedianDualTransport t(s.mesh);
    EXPECT_NEAR(t.lumped_mass().sum(), 1.0, 1e-14);
    const int n = s.mesh.num_vertices();
    const std::vector<Vec2> zero(s.mesh.num_cells(), Vec2::Zero());
    const VectorX c = VectorX::Constant(n, 1.7);
    EXPECT_LT((t.step(c, Mat2::Identity(), zero, 0.01, VectorX::Zero(n), VectorX::Zero(n)) - c).norm(), 1e-13);

    std::vector<Vec2> vel(s.mesh.num_cells());
    for (int k = 0; k < s.mesh.num_cells(); ++k) vel[k] = Vec2(0.5 - s.mesh.centroid(k).y(), 0.3);
    VectorX u(n);
    for (int v = 0; v < n; ++v) u(v) = bump(s.mesh.vertices[v]);
    for (int k = 0; k < 100; ++k) {
        const VectorX next = t.step(u, 0.01 * Mat2::Identity(), vel, 0.01, VectorX::Zero(n), VectorX::Zero(n));
        EXPECT_NEAR(t.integral(next), t.integral(u), 1e-12);
        EXPECT_GE(next.minCoeff(), -1e-12);
        u = next;
    }
}

TEST(Transport, AdvectionConvergesToFineGrid) {
    // A hat profile advected to the right; errors against a fine-grid run
    // restricted to coarse vertices must shrink with the mesh.
    const Vec2 speed(0.5, 0.0);
    auto hat = [](const Vec2& x) { return std::max(0.0, 1.0 - std::abs(x.x() - 0.3) / 0.15); };
    auto run = [&](int n, double dt) {
        const UnitSquare s(1.0 / n);
        const MedianDualTransport t(s.mesh);
        const std::vector<Vec2> vel(s.mesh.num_cells(), speed);
        VectorX u(s.mesh.num_vertices());
        for (int v = 0; v < u.size(); ++v) u(v) = hat(s.mesh.vertices[v]);
        const VectorX z = VectorX::Zero(u.size());
        const int steps = static_cast<int>(std::lround(0.4 / dt));
        for (int k = 0; k < steps; ++k) u = t.step(u, 1e-12 * Mat2::Identity(), vel, dt, z, z);
        return std::make_pair(s.mesh, u);
    };
    const auto [fine_mesh, fine] = run(64, 0.4 / 400);
    auto error = [&](int n) {
        const auto [m, u] = run(n, 0.4 / 400);
        double e = 0.0;
        for (int v = 0; v < m.num_vertices(); ++v) {
            int best = 0;
            for (int w = 0; w < fine_mesh.num_vertices(); ++w)
                if ((fine_mesh.vertices[w] - m.vertices[v]).norm() < (fine_mesh.vertices[best] - m.vertices[v]).norm())
                    best = w;
            e += std::pow(u(v) - fine(best), 2);
        }
        return std::sqrt(e / m.num_vertices());
    };
    const double e16 = error(16), e32 = error(32);
    EXPECT_LT(e32, e16);
    EXPECT_GT(std::log2(e16 / e32), 0.3);
}

TEST(Transport, CflViolationIsAStepError) {
    const UnitSquare s(0.125);
    const MedianDualTransport t(s.mesh);
    const std::vector<Vec2> vel(s.mesh.num_cells(), Vec2(100.0, 0.0));
    const VectorX c = VectorX::Ones(s.mesh.num_vertices());
    const VectorX z = VectorX::Zero(c.size());
    EXPECT_GT(t.max_stable_dt(vel), 0.0);
    EXPECT_THROW(t.step(c, Mat2::Identity(), vel, 10.0 * t.max_stable_dt(vel), z, z), StepError);
}

TEST(MacroSolver, UniformStateIsAFixedPoint) {
    const UnitSquare s(0.125);
    MacroSolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.2;
    MacroSolver solver(s.mesh, s.domain, quiet_physics(), cfg, darcy_velocity_model(Mat2::Identity(), Vec2::Zero(), 10.0));
    MacroState st = solver.initial_state([](const Vec2&) { return 1.5; }, [](const Vec2&) { return 0.7; }, theta(1.0, 0.2));
    const MacroState start = st;
    solver.run(st, [&](const MacroState& x) {
        EXPECT_LT((x.c_a - start.c_a).norm(), 1e-10);
        EXPECT_LT((x.c_s - start.c_s).norm(), 1e-10);
        EXPECT_LT((x.theta_free[0][0] - start.theta_free[0][0]).norm(), 1e-10);
        EXPECT_LT(x.darcy.flux.norm(), 1e-10);
    });
    EXPECT_EQ(st.step, 20);
}

TEST(MacroSolver, ConservesSoluteWithoutSources) {
    const UnitSquare s(0.125, 0.2);
    MacroPhysics p = quiet_physics();
    p.M = Vec2(0.3, 0.1);
    MacroSolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.05;
    MacroSolver solver(s.mesh, s.domain, p, cfg, darcy_velocity_model(p.K, p.M, 10.0));
    MacroState st = solver.initial_state(bump, wave, theta(1.0, 0.0));
    double ia = solver.budget(st).integral_a, is = solver.budget(st).integral_s;
    for (int k = 0; k < 50; ++k) {
        solver.step(st);
        const MassBudget b = solver.budget(st);
        EXPECT_NEAR(b.integral_a, ia, 1e-12);
        EXPECT_NEAR(b.integral_s, is, 1e-12);
        EXPECT_GE(b.min_c, -1e-12);
        ia = b.integral_a;
        is = b.integral_s;
    }
    EXPECT_GT(solver.budget(st).velocity_norm, 0.0);
}

TEST(MacroSolver, BudgetIdentity) {
    const UnitSquare s(0.125, 0.1);
    const MacroPhysics p = active_physics();
    MacroSolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_end = 0.04;
    MacroSolver solver(s.mesh, s.domain, p, cfg, darcy_velocity_model(p.K, p.M, 10.0));
    MacroState st = solver.initial_state(bump, wave, theta(1.0, 0.5));
    for (int k = 0; k < 20; ++k) {
        const double before = solver.budget(st).weighted_solute;
        solver.step(st);
        const double rate = (solver.budget(st).weighted_solute - before) / cfg.dt;
        EXPECT_NEAR(rate, solver.last_source_integral(), 1e-8 * std::max(1.0, std::abs(rate)));
    }
}

TEST(MacroSolver, PositivityWithActiveKinetics) {
    const UnitSquare s(0.1, 0.1);
    const MacroPhysics p = active_physics();
    MacroSolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_end = 0.1;
    cfg.refresh_every = 5;
    MacroSolver solver(s.mesh, s.domain, p, cfg, darcy_velocity_model(p.K, p.M, 10.0));
    MacroState st = solver.initial_state([](const Vec2& x) { return x.x() < 0.5 ? 1.0 : 0.0; },
                                         [](const Vec2& x) { return x.y() < 0.3 ? 0.0 : 2.0; }, theta(1.0, 0.0));
    solver.run(st, [&](const MacroState& x) {
        EXPECT_GE(solver.budget(x).min_c, -1e-12);
        for (int l = 0; l < 2; ++l)
            for (int k = 0; k < 2; ++k) {
                EXPECT_GE(x.theta_free[l][k].minCoeff(), 0.0);
                EXPECT_GE(x.theta_bound[l][k].minCoeff(), 0.0);
            }
    });
}

TEST(MacroSolver, UniformDataGivesIdenticalTransporterNodes) {
    const UnitSquare s(0.125);
    const MacroPhysics p = active_physics();
    MacroSolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.1;
    MacroSolver solver(s.mesh, s.domain, p, cfg, nullptr);
    MacroState st = solver.initial_state([](const Vec2&) { return 0.8; }, [](const Vec2&) { return 1.1; }, theta(1.0, 0.1));
    for (int k = 0; k < 10; ++k) solver.step(st);
    for (int l = 0; l < 2; ++l)
        for (int c = 0; c < 2; ++c) {
            const VectorX& f = st.theta_free[l][c];
            EXPECT_LT(f.maxCoeff() - f.minCoeff(), 1e-12);
        }
    EXPECT_LT(st.c_a.maxCoeff() - st.c_a.minCoeff(), 1e-12);
}

TEST(MacroSolver, NodeTransportersMatchTheOdeOracle) {
    const UnitSquare s(0.25);
    MacroPhysics p = active_physics();
    MacroSolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    MacroSolver solver(s.mesh, s.domain, p, cfg, nullptr);
    MacroState st = solver.initial_state(bump, wave, theta(1.0, 0.2));
    // Concentrations stay frozen: only the transporter update is applied.
    for (int k = 0; k < 1000; ++k) {
        solver.advance_transporters(st);
        st.t += cfg.dt;
    }
    const int node = s.mesh.num_vertices() / 2;
    TransporterContext ctx;
    ctx.c_I = st.c_a(node);
    ctx.rho_I = p.density;
    ctx.params = p.transporters[0][1];
    const TransporterState ref = rk4_transporters({1.0, 0.2}, ctx, 0.0, 1.0, 100000);
    EXPECT_NEAR(st.theta_free[0][1](node), ref.free, 1e-6);
    EXPECT_NEAR(st.theta_bound[0][1](node), ref.bound, 1e-6);
}

TEST(MacroSolver, SplittingErrorIsFirstOrderInTime) {
    const UnitSquare s(0.125, 0.1);
    const MacroPhysics p = active_physics();
    auto final_c = [&](double dt) {
        MacroSolverConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 0.1;
        MacroSolver solver(s.mesh, s.domain, p, cfg, darcy_velocity_model(p.K, p.M, 10.0));
        MacroState st = solver.initial_state(bump, wave, theta(1.0, 0.5));
        solver.run(st, nullptr);
        return st.c_a;
    };
    const VectorX ref = final_c(0.01 / 64);
    const double e1 = (final_c(0.01) - ref).norm(), e2 = (final_c(0.005) - ref).norm();
    const double order = std::log2(e1 / e2);
    EXPECT_GE(order, 0.8);
    EXPECT_LE(order, 1.2);
}

TEST(MacroSolver, CflFailureReportsTheStep) {
    const UnitSquare s(0.125);
    MacroSolverConfig cfg;
    cfg.dt = 0.5;
    cfg.t_end = 1.0;
    MacroSolver solver(s.mesh, s.domain, quiet_physics(), cfg, nullptr);
    solver.set_hhat(ConcentrationSide::A, std::vector<Vec2>(s.mesh.num_cells(), Vec2(50.0, 0.0)));
    MacroState st = solver.initial_state(bump, wave, theta(1.0, 0.0));
    try {
        solver.run(st, nullptr);
        FAIL() << "expected a StepError";
    } catch (const StepError& e) {
        EXPECT_NE(std::string(e.what()).find("step 0"), std::string::npos) << e.what();
    }
    ASSERT_NE(solver.failure_snapshot(), nullptr);
    EXPECT_EQ(solver.failure_snapshot()->step, 0);
}

TEST(MacroSolver, InvalidSettingsAreRejected) {
    MacroSolverConfig cfg;
    cfg.dt = 0.0;
    EXPECT_THROW(cfg.validate(), ParameterError);
    cfg = MacroSolverConfig{};
    cfg.lattice = 1;
    EXPECT_THROW(cfg.validate(), ParameterError);
    MacroPhysics p = quiet_physics();
    p.A_a = -Mat2::Identity();
    EXPECT_THROW(p.validate(), ParameterError);
}
