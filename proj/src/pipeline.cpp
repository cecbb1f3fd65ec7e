#include "plantflow/pipeline.hpp"

#include "plantflow/errors.hpp"
#include "plantflow/export.hpp"
#include "plantflow/micro_reference.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

namespace plantflow {

namespace fs = std::filesystem;

std::string to_string(Stage s) {
    switch (s) {
        case Stage::Cell: return "cell";
        case Stage::Tensors: return "tensors";
        case Stage::Macro: return "macro";
        case Stage::Verify: return "verify";
    }
    return "?";
}

std::vector<Stage> parse_stages(const std::string& list) {
    if (list == "all") return {Stage::Cell, Stage::Tensors, Stage::Macro, Stage::Verify};
    std::vector<Stage> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const std::size_t end = std::min(list.find(',', start), list.size());
        const std::string name = list.substr(start, end - start);
        Stage s;
        if (name == "cell") s = Stage::Cell;
        else if (name == "tensors") s = Stage::Tensors;
        else if (name == "macro") s = Stage::Macro;
        else if (name == "verify") s = Stage::Verify;
        else throw ParseError("unknown stage '" + name + "' (expected cell, tensors, macro, verify or all)");
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
        start = end + 1;
    }
    std::sort(out.begin(), out.end());
    return out;
}

int exit_code_for(const Error& e) {
    const std::string kind = e.kind();
    if (kind == "ParseError" || kind == "ValidationError") return kExitConfig;
    if (kind == "VerificationError") return kExitVerify;
    return kExitSolve;
}

namespace {

std::string number(double v) { return format_double(v); }

class Runner {
public:
    Runner(const RunConfig& c, std::ostream* log) : c_(c), dir_(c.outputs.dir), log_(log) {}

    std::vector<std::string> run(Stage s) {
        switch (s) {
            case Stage::Cell: return cell();
            case Stage::Tensors: return tensors();
            case Stage::Macro: return macro();
            case Stage::Verify: return verify();
        }
        return {};
    }

private:
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void say(const std::string& line) const {
        if (log_) *log_ << line << '\n';
    }

    const SimplicialMesh& cell_mesh() {
        if (!cell_mesh_) {
            const UnitCellGeometry g(c_.cell);
            cell_mesh_ = std::make_unique<SimplicialMesh>(mesh_unit_cell(g, c_.cell_h));
            say("cell mesh: " + std::to_string(cell_mesh_->num_cells()) + " triangles at h = " + number(c_.cell_h));
        }
        return *cell_mesh_;
    }

    const CellModel& model() {
        if (!model_) model_ = std::make_unique<CellModel>(cell_mesh(), c_.flow_params(), c_.diffusion);
        return *model_;
    }

    std::vector<std::pair<std::string, std::string>> provenance(const std::string& quantity) const {
        return {{"quantity", quantity},
                {"cell_shape", to_string(c_.cell.shape)},
                {"cell_h", number(c_.cell_h)},
                {"cell_triangles", std::to_string(cell_mesh_ ? cell_mesh_->num_cells() : 0)},
                {"seed", std::to_string(c_.seed)}};
    }

    std::vector<std::string> cell() {
        const CellModel& m = model();
        const SimplicialMesh& mesh = cell_mesh();
        const FlowSystem& sys = m.flow().system();
        std::vector<std::vector<double>> rows;
        std::vector<VtkField> cells;
        std::vector<const CellFlowSolution*> all;
        for (const auto& w : m.permeability_solutions()) all.push_back(&w);
        all.push_back(&m.osmotic_solution());
        for (const CellFlowSolution* s : all) {
            rows.push_back({static_cast<double>(s->index), s->residual, s->max_divergence, s->interface_defect,
                            s->energy, s->forcing_work});
            VtkField v{s->label, {}, {}}, sp{s->label + "_sp", {}, {}};
            for (int c = 0; c < mesh.num_cells(); ++c) {
                const Vec2 x = mesh.centroid(c);
                v.vectors.push_back(mesh.cell_tags[c] == Subdomain::Z ? sys.z_velocity(s->field, c, x)
                                                                       : sys.darcy_velocity(s->field.flux_a, c, x));
                sp.vectors.push_back(mesh.cell_tags[c] == Subdomain::AS ? sys.darcy_velocity(s->field.flux_sp, c, x)
                                                                        : Vec2::Zero());
            }
            cells.push_back(std::move(v));
            cells.push_back(std::move(sp));
        }
        std::vector<std::string> out = {path("cell_report.csv")};
        write_table_csv(out[0], {"problem", "residual", "max_divergence", "interface_defect", "energy", "forcing_work"},
                        rows, {"cell flow problems (problem -1 is the osmotic one)"});
        if (c_.outputs.vtk) {
            out.push_back(path("cell_mesh.vtk"));
            write_vtk(out.back(), mesh, {}, cells, "plantflow unit cell");
        }
        return out;
    }

    std::vector<std::string> tensors() {
        const EffectiveCoefficients& e = model().coefficients();
        const std::pair<std::string, MatrixX> items[] = {
            {"K", e.K},
            {"M", e.M},
            {"A_a", e.A_a},
            {"A_s", e.A_s},
            {"cell_measures", Eigen::Vector4d(e.area_a, e.area_s, e.length_z, e.length_as)},
        };
        std::vector<std::string> out;
        for (const auto& [name, t] : items) {
            out.push_back(path(name + ".csv"));
            auto header = provenance(name);
            if (name == "cell_measures") header.emplace_back("rows", "|Y_a|, |Y_s|, |Gamma_z|, |Gamma_as|");
            write_tensor_csv(out.back(), t, header);
        }
        say("K = [" + number(e.K(0, 0)) + ", " + number(e.K(0, 1)) + "; " + number(e.K(1, 0)) + ", " +
            number(e.K(1, 1)) + "], M = (" + number(e.M.x()) + ", " + number(e.M.y()) + ")");
        return out;
    }

    MatrixX load(const std::string& name, int rows, int cols) const {
        const std::string p = path(name + ".csv");
        if (!fs::exists(p))
            throw StateError(name + ".csv not found in " + dir_.string() + "; run the tensors stage first");
        MatrixX t = read_tensor_csv(p);
        if (t.rows() != rows || t.cols() != cols) throw StateError(p + " has unexpected shape");
        return t;
    }

    EffectiveCoefficients load_coefficients() const {
        EffectiveCoefficients e;
        e.K = load("K", 2, 2);
        e.M = load("M", 2, 1);
        e.A_a = load("A_a", 2, 2);
        e.A_s = load("A_s", 2, 2);
        const MatrixX m = load("cell_measures", 4, 1);
        e.area_a = m(0, 0);
        e.area_s = m(1, 0);
        e.length_z = m(2, 0);
        e.length_as = m(3, 0);
        return e;
    }

    std::vector<std::string> macro() {
        const EffectiveCoefficients e = load_coefficients();
        const SimplicialMesh mesh = mesh_macro_domain(c_.domain);
        const CellModel& cm = model();
        const double cutoff = c_.cutoff;
        EffectiveVelocityModel hhat = [&cm, cutoff](CellSide side, const Vec2& grad_p, double dc) {
            return cm.effective_velocity(side, grad_p, dc, cutoff);
        };
        MacroSolver solver(mesh, c_.domain, c_.macro_physics(e), c_.macro, hhat);
        const Expression ca(c_.initial_c_a), cs(c_.initial_c_s);
        MacroState state = solver.initial_state([&](const Vec2& x) { return ca(x); },
                                                [&](const Vec2& x) { return cs(x); }, c_.initial_theta);
        std::vector<std::string> out;
        std::vector<std::vector<double>> rows;
        auto emit = [&](const MacroState& s) {
            const MassBudget b = solver.budget(s);
            rows.push_back({static_cast<double>(s.step), b.t, b.integral_a, b.integral_s, b.weighted_solute,
                            b.transporters_a, b.transporters_s, b.boundary_flux, b.min_c, b.max_c, b.velocity_norm});
            if (!c_.outputs.vtk) return;
            char name[64];
            std::snprintf(name, sizeof name, "macro_%05d.vtk", s.step);
            std::vector<VtkField> points = {{"c_a", {s.c_a.data(), s.c_a.data() + s.c_a.size()}, {}},
                                            {"c_s", {s.c_s.data(), s.c_s.data() + s.c_s.size()}, {}}};
            const char* side[] = {"a", "s"};
            const char* cls[] = {"z", "as"};
            for (int l = 0; l < 2; ++l)
                for (int k = 0; k < 2; ++k) {
                    const VectorX& f = s.theta_free[l][k];
                    const VectorX& g = s.theta_bound[l][k];
                    points.push_back({std::string("theta_free_") + side[l] + "_" + cls[k], {f.data(), f.data() + f.size()}, {}});
                    points.push_back({std::string("theta_bound_") + side[l] + "_" + cls[k], {g.data(), g.data() + g.size()}, {}});
                }
            VtkField vel{"velocity", {}, {}}, p{"pressure", {}, {}};
            for (int c = 0; c < mesh.num_cells(); ++c) {
                vel.vectors.push_back(solver.darcy().cell_velocity(s.darcy, c));
                p.scalars.push_back(s.darcy.pressure.size() ? s.darcy.pressure[c] : 0.0);
            }
            std::vector<VtkField> cells = {vel, p, {"hhat_a", {}, solver.hhat(ConcentrationSide::A)},
                                           {"hhat_s", {}, solver.hhat(ConcentrationSide::S)}};
            out.push_back(path(name));
            write_vtk(out.back(), mesh, points, cells, "plantflow macro t=" + number(s.t));
        };
        const std::vector<std::string> columns = {"step", "t", "int_c_a", "int_c_s", "weighted_solute",
                                                  "transporters_a", "transporters_s", "boundary_flux",
                                                  "min_c", "max_c", "velocity_l2"};
        try {
            solver.run(state, emit);
        } catch (const Error&) {
            write_table_csv(path("macro_log.csv"), columns, rows, {"macro run (incomplete: a step failed)"});
            throw;
        }
        out.push_back(path("macro_log.csv"));
        write_table_csv(out.back(), columns, rows, {"macro run"});
        say("macro: " + std::to_string(state.step) + " steps to t = " + number(state.t));
        return out;
    }

    std::vector<std::string> verify() {
        const Mat2 K = load("K", 2, 2);
        const Vec2 M = load("M", 2, 1);
        ConvergenceSetup setup;
        setup.cells_per_side = c_.verify.cells_per_side;
        const Expression dc(c_.verify.dc);
        setup.dc = [dc](const Vec2& x) { return dc(x); };
        setup.v_d = c_.boundary_velocities();
        setup.macro_cells = c_.verify.macro_cells;
        const ConvergenceReport r = convergence_study(cell_mesh(), c_.flow_params(), K, M, setup);
        std::vector<std::vector<double>> rows;
        for (const auto& row : r.rows) {
            rows.push_back({row.epsilon, row.err_v, row.err_pa, row.err_ps, row.gap, row.observed_order});
            say("verify: eps = " + number(row.epsilon) + " err_v = " + number(row.err_v) + " (" +
                std::to_string(row.seconds) + " s)");
        }
        const std::string out = path("convergence.csv");
        write_table_csv(out, {"epsilon", "err_v", "err_pa", "err_ps", "gap_pa_ps", "observed_order"}, rows,
                        {"micro-to-macro study, frozen c_s - c_a = " + c_.verify.dc, "verdict: " + r.verdict});
        say("verify: " + r.verdict);
        if (!r.monotone) throw VerificationError("micro-to-macro convergence study: " + r.verdict);
        return {out};
    }

    const RunConfig& c_;
    fs::path dir_;
    std::ostream* log_;
    std::unique_ptr<SimplicialMesh> cell_mesh_;
    std::unique_ptr<CellModel> model_;
};

void write_error_record(const fs::path& dir, const PipelineSummary& s) {
    nlohmann::json j = {{"stage", s.failed_stage},
                        {"kind", s.error_kind},
                        {"message", s.error_message},
                        {"exit_code", s.exit_code}};
    std::ofstream out(dir / "error.json");
    if (out) out << j.dump(2) << '\n';
}

}  // namespace

PipelineSummary run_pipeline(const RunConfig& config, const std::vector<Stage>& stages, std::ostream* log) {
    PipelineSummary summary;
    const fs::path dir(config.outputs.dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        summary.exit_code = kExitSolve;
        summary.failed_stage = "setup";
        summary.error_kind = "IOError";
        summary.error_message = "cannot create output directory " + dir.string();
        return summary;
    }
    fs::remove(dir / "error.json", ec);
    std::vector<Stage> ordered = stages;
    std::sort(ordered.begin(), ordered.end());
    Runner runner(config, log);
    for (Stage s : ordered) {
        const auto start = std::chrono::steady_clock::now();
        StageResult r;
        r.stage = s;
        try {
            r.artifacts = runner.run(s);
        } catch (const Error& e) {
            summary.exit_code = exit_code_for(e);
            summary.failed_stage = to_string(s);
            summary.error_kind = e.kind();
            summary.error_message = e.what();
        } catch (const std::exception& e) {
            summary.exit_code = kExitSolve;
            summary.failed_stage = to_string(s);
            summary.error_kind = "InternalError";
            summary.error_message = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        summary.stages.push_back(r);
        if (summary.exit_code != kExitOk) {
            if (log) *log << "stage " << to_string(s) << " failed: " << summary.error_kind << ": "
                          << summary.error_message << '\n';
            write_error_record(dir, summary);
            return summary;
        }
        if (log) *log << "stage " << to_string(s) << " done in " << r.seconds << " s\n";
    }
    return summary;
}

}  // namespace plantflow
