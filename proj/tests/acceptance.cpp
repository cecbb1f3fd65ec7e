// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.

#include "oracles.hpp"

#include "plantflow/cell_problems.hpp"
#include "plantflow/config.hpp"
#include "plantflow/effective_tensors.hpp"
#include "plantflow/errors.hpp"
#include "plantflow/macro_solver.hpp"
#include "plantflow/membrane_kinetics.hpp"
#include "plantflow/micro_reference.hpp"
#include "plantflow/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace plantflow;
using namespace plantflow::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome degenerate_identity() {
    const Stopwatch clock;
    const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(all_darcy_cell()), 1.0 / 32.0);
    CellFlowParams p;
    p.k_aw = 0.7 * Mat2::Identity();
    const CellFlowSolver solver(m, p);
    const Mat2 k = assemble_permeability({solver.solve_permeability(0), solver.solve_permeability(1)});
    const double err = (k - 0.7 * Mat2::Identity()).cwiseAbs().maxCoeff();
    const double t = clock.seconds();
    return {err < 1e-9 && t < 10.0, fmt("max |K - 0.7 I| = %.3g, %.2f s at h = 1/32", err, t)};
}

Outcome layered_diffusion_check() {
    std::vector<double> errors;
    Mat2 finest = Mat2::Zero();
    for (int n : {16, 32, 64}) {
        const SimplicialMesh m = structured_unit_square(n);
        const ScalarCellSolver solver(m, CellSide::Full, layered_diffusion(m, 1.0, 3.0));
        finest = assemble_diffusion_tensor(solver, {solver.solve_diffusion(0), solver.solve_diffusion(1)});
        errors.push_back(std::max(relative(finest(0, 0), 2.0), relative(finest(1, 1), 1.5)));
    }
    bool improving = true;
    for (std::size_t k = 1; k < errors.size(); ++k) improving = improving && errors[k] <= errors[k - 1] + 1e-12;
    return {errors.back() < 0.01 && improving,
            fmt("A_xx = %.12g, A_yy = %.12g at h = 1/64; relative errors %.2g, %.2g, %.2g", finest(0, 0),
                finest(1, 1), errors[0], errors[1], errors[2])};
}

Outcome spd_suite() {
    const RunConfig cfg = default_config();
    UnitCellSpec rounded;
    rounded.shape = SymplastShape::RoundedSquare;
    rounded.radius = 0.3;
    rounded.corner_radius = 0.1;
    rounded.wall_thickness = 0.1;
    rounded.plasmodesmata = {{Side::Left, 0.1}, {Side::Right, 0.1}, {Side::Bottom, 0.05}, {Side::Top, 0.05}};
    const std::vector<std::pair<std::string, UnitCellSpec>> cells = {
        {"default", default_cell()}, {"fourfold", fourfold_cell()}, {"rounded", rounded}};
    bool ok = true;
    std::string detail;
    for (const auto& [name, spec] : cells) {
        const SimplicialMesh m = mesh_unit_cell(UnitCellGeometry(spec), cfg.cell_h);
        const CellModel model(m, cfg.flow_params(), cfg.diffusion);
        const EffectiveCoefficients& c = model.coefficients();
        const std::vector<std::pair<const char*, MatrixX>> tensors = {
            {"K", c.K}, {"A_a", c.A_a}, {"A_s", c.A_s}};
        for (const auto& [label, t] : tensors) {
            const SpdReport r = check_spd(t);
            if (r.symmetry_defect < 1e-8 && r.eigenvalues.minCoeff() > 0.0) continue;
            ok = false;
            detail += fmt("%s %s not SPD (asymmetry %.3g, min eigenvalue %.3g); ", name.c_str(), label,
                          r.symmetry_defect, r.eigenvalues.minCoeff());
        }
        detail += fmt("%s K = [%.6g %.3g; %.3g %.6g]; ", name.c_str(), c.K(0, 0), c.K(0, 1), c.K(1, 0), c.K(1, 1));
        if (name == "fourfold") {
            const double tol = 1e-8 * c.K.trace() / 2.0;
            const bool iso = std::abs(c.K(0, 1)) < tol && std::abs(c.K(1, 0)) < tol &&
                             std::abs(c.K(0, 0) - c.K(1, 1)) < tol && c.M.cwiseAbs().maxCoeff() < 1e-8;
            ok = ok && iso;
            if (!iso) detail += "fourfold K is not isotropic; ";
            detail += fmt("fourfold |M| = %.3g; ", c.M.norm());
        }
    }
    return {ok, detail};
}

Outcome kinetics() {
    TransporterContext ctx;
    ctx.c_I = 1.3;
    ctx.c_II = 0.4;
    ctx.params.k1 = 0.8;
    ctx.params.k2 = 0.6;
    ctx.params.k3 = 0.9;
    ctx.params.k4 = 0.5;
    double drift = 0.0;
    for (TransporterScheme scheme : {TransporterScheme::Exponential, TransporterScheme::BackwardEuler}) {
        TransporterState s{2.5, 0.5};
        for (int k = 0; k < 10000; ++k) {
            const TransporterState next = step_transporters(s, ctx, 1e-2, scheme);
            drift = std::max(drift, std::abs(next.total() - s.total()));
            s = next;
        }
    }
    const BindingRates br = ctx.rates();
    const double horizon = 50.0 / (br.alpha + br.beta);
    TransporterState s{2.5, 0.5};
    for (int k = 0; k < 5000; ++k) s = step_transporters(s, ctx, horizon / 5000);
    const QuasiStationary q = quasi_stationary_flux(ctx.c_I, ctx.c_II, 1.0, 1.0, 3.0, 0.8, 0.6, 0.9, 0.5);
    const double qs_err = std::abs(s.free - q.free);

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    double mm_err = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double c = u(rng), rho = u(rng), theta0 = u(rng), k1 = u(rng), k2 = u(rng), k3 = u(rng);
        const double mm = michaelis_menten_efflux(c, rho, theta0, k1, k2, k3);
        const double qs = quasi_stationary_flux(c, u(rng), rho, u(rng), theta0, k1, k2, k3, 0.0).flux;
        mm_err = std::max(mm_err, relative(mm, qs));
    }
    return {drift < 1e-12 && qs_err < 1e-6 && mm_err < 1e-12,
            fmt("per-step drift %.2g over 10^4 steps, quasi-stationary gap %.2g, Michaelis-Menten gap %.2g", drift,
                qs_err, mm_err)};
}

Outcome conservation_and_positivity() {
    RunConfig cfg = default_config();
    for (auto& side : cfg.transporters)
        for (auto& t : side) t = TransporterParams{};
    cfg.growth_a = cfg.growth_s = 0.0;
    const SimplicialMesh cell = mesh_unit_cell(UnitCellGeometry(cfg.cell), cfg.cell_h);
    const CellModel model(cell, cfg.flow_params(), cfg.diffusion);
    cfg.domain = MacroDomainSpec::rectangle(0, 0, 1, 1, 1.0 / 16.0, -0.01, 0.01, 0.0, 0.0);
    const SimplicialMesh mesh = mesh_macro_domain(cfg.domain);
    MacroSolverConfig sc = cfg.macro;
    sc.dt = 1e-3;
    sc.t_end = 1.0;
    sc.refresh_every = 0;
    const MacroPhysics physics = cfg.macro_physics(model.coefficients());
    MacroSolver solver(mesh, cfg.domain, physics, sc, [&](CellSide side, const Vec2& g, double dc) {
        return model.effective_velocity(side, g, dc, physics.cutoff);
    });
    const Expression ca(cfg.initial_c_a), cs(cfg.initial_c_s);
    MacroState st = solver.initial_state([&](const Vec2& x) { return ca(x); }, [&](const Vec2& x) { return cs(x); },
                                         cfg.initial_theta);
    MassBudget prev = solver.budget(st);
    double drift = 0.0, min_c = prev.min_c;
    int steps = 0;
    for (; steps < 1000; ++steps) {
        solver.step(st);
        const MassBudget b = solver.budget(st);
        drift = std::max({drift, std::abs(b.integral_a - prev.integral_a), std::abs(b.integral_s - prev.integral_s)});
        min_c = std::min(min_c, b.min_c);
        prev = b;
    }
    return {drift < 1e-12 && min_c >= -1e-12,
            fmt("%d steps: max per-step change of the integrals %.2g, min c %.6g, max |v| %.3g", steps, drift, min_c,
                prev.velocity_norm)};
}

Outcome manufactured_order() {
    const Mat2 K{{2.0, 0.0}, {0.0, 1.0}};
    auto exact = [](const Vec2& x) { return std::cos(2 * M_PI * x.x()) * std::cos(2 * M_PI * x.y()); };
    auto source = [&](const Vec2& x) { return 12.0 * M_PI * M_PI * exact(x); };
    std::vector<double> errors;
    double slowest = 0.0;
    for (int n : {16, 32, 64}) {
        const Stopwatch clock;
        const MacroDomainSpec d = MacroDomainSpec::rectangle(0, 0, 1, 1, 1.0 / n);
        const SimplicialMesh m = mesh_macro_domain(d);
        const DarcySolver solver(m, K, {0.0, 0.0, 0.0, 0.0});
        const DarcySolution sol = solver.solve(Vec2::Zero(), VectorX::Zero(m.num_vertices()), source);
        const VectorX ref = DarcySolver::cell_averages(m, exact);
        double e2 = 0.0;
        for (int c = 0; c < m.num_cells(); ++c) e2 += m.cell_area(c) * std::pow(sol.pressure(c) - ref(c), 2);
        errors.push_back(std::sqrt(e2));
        slowest = std::max(slowest, clock.seconds());
    }
    const double o1 = std::log2(errors[0] / errors[1]), o2 = std::log2(errors[1] / errors[2]);
    return {o1 >= 1.8 && o2 >= 1.8 && slowest < 30.0,
            fmt("L2 errors %.3g, %.3g, %.3g; orders %.3f, %.3f; slowest solve %.2f s", errors[0], errors[1],
                errors[2], o1, o2, slowest)};
}

Outcome micro_to_macro() {
    const Stopwatch clock;
    const RunConfig cfg = default_config();
    const SimplicialMesh cell = mesh_unit_cell(UnitCellGeometry(cfg.cell), cfg.cell_h);
    const CellModel model(cell, cfg.flow_params(), cfg.diffusion);
    ConvergenceSetup setup;
    setup.cells_per_side = {2, 4, 8};
    const Expression dc(cfg.verify.dc);
    setup.dc = [&](const Vec2& x) { return dc(x); };
    setup.v_d = cfg.boundary_velocities();
    setup.macro_cells = cfg.verify.macro_cells;
    const ConvergenceReport r =
        convergence_study(cell, cfg.flow_params(), model.coefficients().K, model.coefficients().M, setup);
    bool strict = r.rows.size() == 3;
    for (std::size_t k = 1; k < r.rows.size(); ++k) {
        const ConvergenceRow &a = r.rows[k - 1], &b = r.rows[k];
        strict = strict && b.err_v < a.err_v && b.err_pa < a.err_pa && b.err_ps < a.err_ps && b.gap < a.gap;
    }
    const double t = clock.seconds();
    std::string detail;
    for (const auto& row : r.rows)
        detail += fmt("eps 1/%d: v %.3g, p_a %.3g, p_s %.3g, gap %.3g; ", static_cast<int>(std::lround(1 / row.epsilon)),
                      row.err_v, row.err_pa, row.err_ps, row.gap);
    detail += fmt("%.1f s", t);
    return {strict && r.verdict == "PASS" && t < 900.0, detail};
}

Outcome osmotic_direction() {
    RunConfig cfg = default_config();
    const SimplicialMesh cell = mesh_unit_cell(UnitCellGeometry(cfg.cell), cfg.cell_h);
    const CellModel model(cell, cfg.flow_params(), cfg.diffusion);
    const MacroPhysics physics = cfg.macro_physics(model.coefficients());
    const SimplicialMesh mesh = mesh_macro_domain(cfg.domain);
    MacroSolverConfig sc = cfg.macro;
    sc.t_end = 0.02;
    sc.output_every = 5;
    MacroSolver solver(mesh, cfg.domain, physics, sc, [&](CellSide side, const Vec2& g, double dc) {
        return model.effective_velocity(side, g, dc, physics.cutoff);
    });
    // Left compartment with the higher symplastic concentration.
    auto compartment = [](const Vec2& x) { return x.x() < 0.5 && std::abs(x.y() - 0.5) < 0.25; };
    MacroState st = solver.initial_state([](const Vec2&) { return 1.0; },
                                         [&](const Vec2& x) { return compartment(x) ? 2.0 : 1.0; }, cfg.initial_theta);
    const Vec2 mid(0.5, 0.5);
    const double mx = physics.M.x();
    bool ok = mx > 0.0;
    double first = 0.0;
    int checks = 0;
    solver.run(st, [&](const MacroState& s) {
        const int c = solver.locate(mid);
        const double dc = solver.interpolate(s.c_s - s.c_a, solver.locate(Vec2(0.25, 0.5)), Vec2(0.25, 0.5));
        const double vx = solver.darcy().velocity(s.darcy, c, mid).x();
        if (checks++ == 0) first = vx;
        ok = ok && dc > 0.0 && vx * mx * dc > 0.0;
    });
    return {ok && checks > 1, fmt("M_x = %.4g, v_x(0.5, 0.5) = %.4g at t = 0 and the sign holds at %d outputs", mx,
                                  first, checks)};
}

Outcome determinism() {
    const fs::path base = fs::temp_directory_path() / "plantflow_acceptance";
    fs::remove_all(base);
    std::string detail;
    std::vector<fs::path> dirs = {base / "run1", base / "run2"};
    for (const fs::path& d : dirs) {
        fs::create_directories(d);
        RunConfig cfg = default_config();
        cfg.outputs.dir = d.string();
        const PipelineSummary s = run_pipeline(cfg, {Stage::Cell, Stage::Tensors});
        if (s.exit_code != kExitOk) return {false, "pipeline failed: " + s.error_message};
    }
    bool same = true;
    for (const char* f : {"K.csv", "M.csv", "A_a.csv", "A_s.csv"}) {
        const std::string a = slurp(dirs[0] / f), b = slurp(dirs[1] / f);
        same = same && !a.empty() && a == b;
    }
    fs::remove_all(base);
    return {same, same ? "K, M, A_a, A_s byte-identical across two runs" : "tensor CSVs differ"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 degenerate homogenization identity", degenerate_identity},
        {"2 layered diffusion means", layered_diffusion_check},
        {"3 SPD suite and fourfold isotropy", spd_suite},
        {"4 transporter kinetics", kinetics},
        {"5 macro conservation and positivity", conservation_and_positivity},
        {"6 Darcy manufactured solution order", manufactured_order},
        {"7 micro-to-macro convergence", micro_to_macro},
        {"8 osmotic flow direction", osmotic_direction},
        {"9 pipeline determinism", determinism},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
