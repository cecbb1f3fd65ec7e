#include "plantflow/cell_problems.hpp"

#include "plantflow/errors.hpp"

namespace plantflow {

namespace {

void require_spd(const Mat2& k, const char* name) {
    if (!k.allFinite() || std::abs(k(0, 1) - k(1, 0)) > 1e-12 * k.norm())
        throw ParameterError(std::string(name) + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat2> es(k);
    if (!(es.eigenvalues().minCoeff() > 0.0)) throw ParameterError(std::string(name) + " must be positive definite");
}

}  // namespace

void CellFlowParams::validate() const {
    if (!(viscosity > 0.0)) throw ParameterError("viscosity η must be positive");
    require_spd(k_aw, "K_aw");
    require_spd(k_ap, "K_ap");
    require_spd(k_sp, "K_sp");
    if (!(kappa_z > 0.0) || !(kappa_as > 0.0)) throw ParameterError("membrane coefficient κ must be positive on Γzs");
    if (!std::isfinite(delta_z) || !std::isfinite(delta_as)) throw ParameterError("membrane coefficient δ must be finite");
}

FlowCoefficients CellFlowParams::flow_coefficients() const {
    FlowCoefficients c;
    c.viscosity = viscosity;
    c.k_aw = k_aw;
    c.k_ap = k_ap;
    c.k_sp = k_sp;
    c.resistance_z = 1.0 / kappa_z;
    c.resistance_as = 1.0 / kappa_as;
    return c;
}

CellFlowSolver::CellFlowSolver(const SimplicialMesh& mesh, const CellFlowParams& params)
    : params_((params.validate(), params)), system_(mesh, params.flow_coefficients()) {
    if (!mesh.periodic) throw GeometryError("flow cell problems require a periodic unit-cell mesh");
}

CellFlowSolution CellFlowSolver::finish(int index, const std::string& label, const VectorX& rhs) const {
    const SimplicialMesh& m = system_.mesh();
    CellFlowSolution s;
    s.index = index;
    s.label = label;
    const VectorX x = system_.solve_raw(rhs);
    s.field = system_.decode(x);
    s.residual = relative_residual(system_.matrix(), x, rhs);
    s.field.residual = s.residual;
    s.max_divergence = system_.max_cell_divergence(s.field);
    s.interface_defect = system_.max_interface_defect(s.field);
    s.energy = system_.energy(s.field);
    s.forcing_work = rhs.dot(x);
    for (int c = 0; c < m.num_cells(); ++c) {
        switch (m.cell_tags[c]) {
            case Subdomain::Z: s.integral_z += system_.z_integral(s.field, c); break;
            case Subdomain::AS: s.integral_sp += system_.darcy_integral(s.field.flux_sp, c); [[fallthrough]];
            case Subdomain::AW: s.integral_a += system_.darcy_integral(s.field.flux_a, c); break;
            default: break;
        }
    }
    if (!(s.residual < 1e-8))
        throw SolveError("flow cell problem " + label + ": relative residual " + std::to_string(s.residual));
    return s;
}

CellFlowSolution CellFlowSolver::solve_permeability(int i) const {
    if (i < 0 || i > 1) throw ParameterError("permeability cell problem index must be 0 or 1");
    return finish(i, i == 0 ? "w1" : "w2", system_.body_force(Vec2::Unit(i)));
}

CellFlowSolution CellFlowSolver::solve_osmotic() const { return solve_osmotic(1.0, 1.0); }

CellFlowSolution CellFlowSolver::solve_osmotic(double scale_z, double scale_as) const {
    const SimplicialMesh& m = system_.mesh();
    const double gz = scale_z * params_.forcing_z(), gas = scale_as * params_.forcing_as();
    const VectorX rhs =
        system_.interface_forcing([&](int e, const Vec2&) { return m.edges[e].tag == FacetTag::GammaZ ? gz : gas; });
    return finish(-1, "osmotic", rhs);
}

std::vector<Vec2> CellFlowSolver::cell_average_a(const FlowField& f) const {
    const SimplicialMesh& m = system_.mesh();
    std::vector<Vec2> out(m.num_cells(), Vec2::Zero());
    for (int c = 0; c < m.num_cells(); ++c)
        if (in_side(CellSide::A, m.cell_tags[c])) out[c] = system_.darcy_integral(f.flux_a, c) / m.cell_area(c);
    return out;
}

std::vector<Vec2> CellFlowSolver::cell_average_s(const FlowField& f) const {
    const SimplicialMesh& m = system_.mesh();
    std::vector<Vec2> out(m.num_cells(), Vec2::Zero());
    for (int c = 0; c < m.num_cells(); ++c) {
        if (m.cell_tags[c] == Subdomain::Z) out[c] = system_.z_integral(f, c) / m.cell_area(c);
        else if (m.cell_tags[c] == Subdomain::AS) out[c] = system_.darcy_integral(f.flux_sp, c) / m.cell_area(c);
    }
    return out;
}

CellFlowSolution solve_permeability_cell(const SimplicialMesh& mesh, int i, const CellFlowParams& params) {
    return CellFlowSolver(mesh, params).solve_permeability(i);
}

CellFlowSolution solve_osmotic_cell(const SimplicialMesh& mesh, const CellFlowParams& params) {
    return CellFlowSolver(mesh, params).solve_osmotic();
}

}  // namespace plantflow
