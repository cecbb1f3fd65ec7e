#include "plantflow/micro_reference.hpp"

#include "plantflow/errors.hpp"
#include "plantflow/macro_solver.hpp"

#include <chrono>
#include <cmath>

namespace plantflow {

MicroFlow::MicroFlow(const SimplicialMesh& cell_mesh, const CellFlowParams& params, int n, std::vector<double> v_d)
    : n_(n), params_(params) {
    if (n < 1) throw ParameterError("micro problem needs at least one cell per side");
    if (n > kMaxCellsPerSide)
        throw ParameterError("micro problem refuses ε < 1/" + std::to_string(kMaxCellsPerSide) +
                             " at this mesh density (direct factorization memory)");
    params_.validate();
    if (!v_d.empty() && v_d.size() != 4) throw ParameterError("micro problem expects v_D on the four sides");
    if (!v_d.empty() && std::abs(v_d[0] + v_d[1] + v_d[2] + v_d[3]) > 1e-12)
        throw CompatibilityError("boundary normal velocity v_D has non-zero net flux");
    if (static_cast<long>(n) * n * cell_mesh.num_cells() > kMaxCells)
        throw ParameterError("micro problem with " + std::to_string(n * n * cell_mesh.num_cells()) +
                             " cells exceeds the direct factorization memory guard; coarsen the cell mesh");
    mesh_ = std::make_unique<SimplicialMesh>(tile_unit_cell(cell_mesh, n, &tile_));
    const double eps = 1.0 / n;
    FlowCoefficients c = params_.flow_coefficients();
    c.viscosity *= eps * eps;
    c.resistance_z *= eps;
    c.resistance_as *= eps;
    system_ = std::make_unique<FlowSystem>(*mesh_, c, std::move(v_d));
}

VectorX MicroFlow::rhs(const std::function<double(const Vec2&)>& dc) const {
    const double eps = epsilon();
    const double gz = eps * params_.forcing_z(), gas = eps * params_.forcing_as();
    const SimplicialMesh& m = *mesh_;
    return system_->interface_forcing(
        [&](int e, const Vec2& x) { return (m.edges[e].tag == FacetTag::GammaZ ? gz : gas) * dc(x); });
}

FlowField MicroFlow::solve(const std::function<double(const Vec2&)>& dc) const { return system_->solve(rhs(dc)); }

MicroAverages MicroFlow::average(const FlowField& f) const {
    const SimplicialMesh& m = *mesh_;
    const int tiles = n_ * n_;
    MicroAverages a;
    a.cells_per_side = n_;
    a.velocity.assign(tiles, Vec2::Zero());
    a.pressure_a = VectorX::Zero(tiles);
    a.pressure_s = VectorX::Zero(tiles);
    VectorX area = VectorX::Zero(tiles), area_a = VectorX::Zero(tiles), area_s = VectorX::Zero(tiles);
    for (int c = 0; c < m.num_cells(); ++c) {
        const int k = tile_[c];
        const double w = m.cell_area(c);
        area[k] += w;
        switch (m.cell_tags[c]) {
            case Subdomain::Z:
                a.velocity[k] += system_->z_integral(f, c);
                a.pressure_s[k] += w * f.pressure_z[c];
                area_s[k] += w;
                break;
            case Subdomain::AS:
                a.velocity[k] += system_->darcy_integral(f.flux_sp, c);
                a.pressure_s[k] += w * f.pressure_sp[c];
                area_s[k] += w;
                [[fallthrough]];
            case Subdomain::AW:
                a.velocity[k] += system_->darcy_integral(f.flux_a, c);
                a.pressure_a[k] += w * f.pressure_a[c];
                area_a[k] += w;
                break;
            default: break;
        }
    }
    for (int k = 0; k < tiles; ++k) {
        a.velocity[k] /= area[k];
        if (area_a[k] > 0.0) a.pressure_a[k] /= area_a[k];
        if (area_s[k] > 0.0) a.pressure_s[k] /= area_s[k];
    }
    return a;
}

Vec2 MicroFlow::total_velocity(const FlowField& f) const {
    const SimplicialMesh& m = *mesh_;
    Vec2 s = Vec2::Zero();
    for (int c = 0; c < m.num_cells(); ++c) {
        if (m.cell_tags[c] == Subdomain::Z) s += system_->z_integral(f, c);
        else s += system_->darcy_integral(f.flux_a, c);
        if (m.cell_tags[c] == Subdomain::AS) s += system_->darcy_integral(f.flux_sp, c);
    }
    return s;
}

namespace {

double mean_over(const SimplicialMesh& m, const VectorX& cell_values) {
    double s = 0.0, a = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        s += m.cell_area(c) * cell_values[c];
        a += m.cell_area(c);
    }
    return s / a;
}

}  // namespace

ConvergenceReport convergence_study(const SimplicialMesh& cell_mesh, const CellFlowParams& params, const Mat2& K,
                                    const Vec2& M, const ConvergenceSetup& setup) {
    if (!setup.dc) throw ParameterError("convergence study needs the frozen concentration difference");
    std::vector<double> v_d = setup.v_d.empty() ? std::vector<double>(4, 0.0) : setup.v_d;
    const MacroDomainSpec spec =
        MacroDomainSpec::rectangle(0, 0, 1, 1, 1.0 / setup.macro_cells, v_d[0], v_d[1], v_d[2], v_d[3]);
    const SimplicialMesh macro = mesh_macro_domain(spec);
    VectorX dc(macro.num_vertices());
    for (int i = 0; i < macro.num_vertices(); ++i) dc[i] = setup.dc(macro.vertices[i]);
    const DarcySolver darcy(macro, K, v_d);
    const DarcySolution ref = darcy.solve(M, dc);
    const double p_mean = mean_over(macro, ref.pressure);

    ConvergenceReport report;
    for (int n : setup.cells_per_side) {
        if (setup.macro_cells % n != 0)
            throw ParameterError("reference Darcy mesh must nest in the ε-tiling (macro_cells divisible by 1/ε)");
        const auto start = std::chrono::steady_clock::now();
        const MicroFlow micro(cell_mesh, params, n, v_d);
        const FlowField f = micro.solve(setup.dc);
        const MicroAverages avg = micro.average(f);

        // Tile index of each reference cell.
        VectorX pa(macro.num_cells()), ps(macro.num_cells());
        std::vector<int> tile(macro.num_cells());
        for (int c = 0; c < macro.num_cells(); ++c) {
            const Vec2 g = macro.centroid(c);
            const int i = std::min(n - 1, static_cast<int>(g.x() * n));
            const int j = std::min(n - 1, static_cast<int>(g.y() * n));
            tile[c] = j * n + i;
            pa[c] = avg.pressure_a[tile[c]];
            ps[c] = avg.pressure_s[tile[c]];
        }
        const double pa_mean = mean_over(macro, pa), ps_mean = mean_over(macro, ps);
        ConvergenceRow row;
        row.epsilon = 1.0 / n;
        double ev = 0.0, ea = 0.0, es = 0.0, gap = 0.0;
        for (int c = 0; c < macro.num_cells(); ++c) {
            const double w = macro.cell_area(c);
            ev += w * (avg.velocity[tile[c]] - darcy.cell_velocity(ref, c)).squaredNorm();
            const double p = ref.pressure[c] - p_mean;
            ea += w * std::pow(pa[c] - pa_mean - p, 2);
            es += w * std::pow(ps[c] - ps_mean - p, 2);
            gap += w * std::pow(pa[c] - ps[c], 2);
        }
        row.err_v = std::sqrt(ev);
        row.err_pa = std::sqrt(ea);
        row.err_ps = std::sqrt(es);
        row.gap = std::sqrt(gap);
        if (!report.rows.empty() && row.err_v > 0.0)
            row.observed_order = std::log2(report.rows.back().err_v / row.err_v) / std::log2(report.rows.back().epsilon / row.epsilon);
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.rows.push_back(row);
    }
    report.monotone = true;
    std::string failures;
    for (std::size_t k = 1; k < report.rows.size(); ++k) {
        const auto& a = report.rows[k - 1];
        const auto& b = report.rows[k];
        const std::pair<const char*, bool> checks[] = {{"err_v", b.err_v < a.err_v},
                                                       {"err_pa", b.err_pa < a.err_pa},
                                                       {"err_ps", b.err_ps < a.err_ps},
                                                       {"gap_pa_ps", b.gap < a.gap}};
        for (const auto& [name, ok] : checks)
            if (!ok) {
                report.monotone = false;
                failures += std::string(failures.empty() ? "" : ", ") + name + " at ε=" + std::to_string(b.epsilon);
            }
    }
    report.verdict = report.monotone ? "PASS" : "FAIL: non-decreasing " + failures;
    return report;
}

}  // namespace plantflow
