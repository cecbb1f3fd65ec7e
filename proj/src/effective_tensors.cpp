#include "plantflow/effective_tensors.hpp"

#include "plantflow/errors.hpp"
#include "plantflow/membrane_kinetics.hpp"

namespace plantflow {

SpdReport check_spd(const MatrixX& t, double symmetry_tol) {
    if (t.rows() != t.cols()) throw ParameterError("check_spd: tensor is not square");
    SpdReport r;
    const double norm = t.norm();
    r.symmetry_defect = norm > 0.0 ? (t - t.transpose()).norm() / norm : 0.0;
    r.symmetric = r.symmetry_defect <= symmetry_tol;
    const MatrixX sym = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixX> es(sym);
    r.eigenvalues = es.eigenvalues();
    r.positive_definite = r.eigenvalues.size() > 0 && r.eigenvalues.minCoeff() > 0.0;
    return r;
}

Mat2 assemble_permeability(const std::vector<CellFlowSolution>& solutions) {
    const CellFlowSolution* w[2] = {nullptr, nullptr};
    for (const auto& s : solutions)
        if (s.index == 0 || s.index == 1) w[s.index] = &s;
    if (!w[0] || !w[1]) throw StateError("permeability needs the cell solutions for both unit forcings");
    Mat2 k;
    // K_ij is the j-th component of ∫ wⁱ; |Y| = 1.
    for (int i = 0; i < 2; ++i) k.row(i) = w[i]->integral().transpose();
    return k;
}

Vec2 assemble_osmotic_vector(const CellFlowSolution& osmotic) {
    if (osmotic.index != -1) throw StateError("osmotic vector needs the osmotic cell solution");
    return osmotic.integral();
}

Mat2 assemble_diffusion_tensor(const ScalarCellSolver& solver, const std::vector<ScalarCellSolution>& omega) {
    const ScalarCellSolution* w[2] = {nullptr, nullptr};
    for (const auto& s : omega)
        if ((s.index == 0 || s.index == 1) && s.side == solver.side()) w[s.index] = &s;
    if (!w[0] || !w[1]) throw StateError("diffusion tensor needs both corrector solutions ω¹, ω² of side " +
                                         to_string(solver.side()));
    if (w[0]->values.size() != solver.mesh().num_vertices() || w[1]->values.size() != solver.mesh().num_vertices())
        throw StateError("diffusion correctors were computed on a different mesh");
    Mat2 a = solver.mean_diffusion();
    for (int j = 0; j < 2; ++j) a.col(j) += solver.mean_flux(*w[j]);
    return a;
}

Vec2 assemble_effective_velocity(const ScalarCellSolver& solver, const std::vector<Vec2>& cell_velocity,
                                 const ScalarCellSolution& z, double bound) {
    const SimplicialMesh& m = solver.mesh();
    if (static_cast<int>(cell_velocity.size()) != m.num_cells() || z.values.size() != m.num_vertices())
        throw StateError("effective velocity: fields do not match the cell mesh");
    Vec2 s = Vec2::Zero();
    for (int c = 0; c < m.num_cells(); ++c)
        if (solver.contains(c)) s += m.cell_area(c) * velocity_cutoff(cell_velocity[c], bound);
    return s / solver.measure() - solver.mean_flux(z);
}

bool DiffusionBounds::contains(const Mat2& a, double rel_tol) const {
    Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (a + a.transpose()));
    const double tol = rel_tol * std::max(1.0, upper);
    return es.eigenvalues().minCoeff() >= lower - tol && es.eigenvalues().maxCoeff() <= upper + tol;
}

DiffusionBounds diffusion_bounds(const ScalarCellSolver& solver) {
    DiffusionBounds b;
    Eigen::SelfAdjointEigenSolver<Mat2> upper(solver.mean_diffusion());
    b.upper = upper.eigenvalues().maxCoeff();
    if (std::abs(solver.measure() - (solver.mesh().upper - solver.mesh().lower).prod()) < 1e-12) {
        Eigen::SelfAdjointEigenSolver<Mat2> lower(solver.harmonic_diffusion());
        b.lower = lower.eigenvalues().minCoeff();
    }
    return b;
}

CellTensorField CellDiffusion::field(const SimplicialMesh& mesh, CellSide side) const {
    const CellDiffusion d = *this;
    const SimplicialMesh* m = &mesh;
    return [d, m, side](int c) -> Mat2 {
        const Subdomain t = m->cell_tags[c];
        if (side == CellSide::A) return t == Subdomain::AS ? d.ap : d.aw;
        if (side == CellSide::S) return t == Subdomain::AS ? d.sp : d.z;
        switch (t) {
            case Subdomain::Z: return d.z;
            case Subdomain::AS: return d.ap;
            default: return d.aw;
        }
    };
}

CellModel::CellModel(const SimplicialMesh& mesh, const CellFlowParams& flow, const CellDiffusion& diffusion)
    : mesh_(&mesh) {
    flow_ = std::make_unique<CellFlowSolver>(mesh, flow);
    w_ = {flow_->solve_permeability(0), flow_->solve_permeability(1)};
    r_ = flow_->solve_osmotic();
    for (const auto& w : w_) {
        w_avg_a_.push_back(flow_->cell_average_a(w.field));
        w_avg_s_.push_back(flow_->cell_average_s(w.field));
    }
    r_avg_a_ = flow_->cell_average_a(r_.field);
    r_avg_s_ = flow_->cell_average_s(r_.field);

    coeffs_.K = assemble_permeability(w_);
    coeffs_.M = assemble_osmotic_vector(r_);
    coeffs_.K_report = check_spd(coeffs_.K);
    coeffs_.max_residual = std::max({w_[0].residual, w_[1].residual, r_.residual});

    scalar_a_ = std::make_unique<ScalarCellSolver>(mesh, CellSide::A, diffusion.field(mesh, CellSide::A));
    const std::vector<ScalarCellSolution> omega_a = {scalar_a_->solve_diffusion(0), scalar_a_->solve_diffusion(1)};
    coeffs_.A_a = assemble_diffusion_tensor(*scalar_a_, omega_a);
    coeffs_.A_a_report = check_spd(coeffs_.A_a);
    coeffs_.area_a = scalar_a_->measure();
    for (const auto& o : omega_a) coeffs_.max_residual = std::max(coeffs_.max_residual, o.residual);

    bool has_s = false;
    for (auto t : mesh.cell_tags) has_s = has_s || in_side(CellSide::S, t);
    if (has_s) {
        scalar_s_ = std::make_unique<ScalarCellSolver>(mesh, CellSide::S, diffusion.field(mesh, CellSide::S));
        const std::vector<ScalarCellSolution> omega_s = {scalar_s_->solve_diffusion(0), scalar_s_->solve_diffusion(1)};
        coeffs_.A_s = assemble_diffusion_tensor(*scalar_s_, omega_s);
        coeffs_.A_s_report = check_spd(coeffs_.A_s);
        coeffs_.area_s = scalar_s_->measure();
        for (const auto& o : omega_s) coeffs_.max_residual = std::max(coeffs_.max_residual, o.residual);
    }

    for (const auto& e : mesh.edges) {
        if (e.tag == FacetTag::GammaZ) coeffs_.length_z += e.length;
        if (e.tag == FacetTag::GammaAS) coeffs_.length_as += e.length;
    }
    coeffs_.mesh_h = mesh.h;
    coeffs_.mesh_cells = mesh.num_cells();
    coeffs_.solver_backend = SparseDirectSolver::backend();
}

bool CellModel::has_side(CellSide s) const {
    if (s == CellSide::A) return static_cast<bool>(scalar_a_);
    if (s == CellSide::S) return static_cast<bool>(scalar_s_);
    return false;
}

const ScalarCellSolver& CellModel::scalar(CellSide s) const {
    if (!has_side(s)) throw StateError("cell model has no scalar problem on side " + to_string(s));
    return s == CellSide::A ? *scalar_a_ : *scalar_s_;
}

std::vector<Vec2> CellModel::cell_velocity(CellSide side, const Vec2& grad_p, double dc) const {
    const auto& w = side == CellSide::A ? w_avg_a_ : w_avg_s_;
    const auto& r = side == CellSide::A ? r_avg_a_ : r_avg_s_;
    std::vector<Vec2> v(mesh_->num_cells());
    for (int c = 0; c < mesh_->num_cells(); ++c) v[c] = -grad_p.x() * w[0][c] - grad_p.y() * w[1][c] + dc * r[c];
    return v;
}

Vec2 CellModel::effective_velocity(CellSide side, const Vec2& grad_p, double dc, double bound) const {
    const ScalarCellSolver& s = scalar(side);
    const auto v = cell_velocity(side, grad_p, dc);
    const ScalarCellSolution z = s.solve_convection(v, bound);
    return assemble_effective_velocity(s, v, z, bound);
}

}  // namespace plantflow
