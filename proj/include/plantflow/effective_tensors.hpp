#pragma once

#include "plantflow/cell_problems.hpp"
#include "plantflow/linalg.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace plantflow {

struct SpdReport {
    double symmetry_defect = 0.0;  // ‖T − Tᵀ‖ / ‖T‖
    VectorX eigenvalues;           // of the symmetric part, ascending
    bool symmetric = false;
    bool positive_definite = false;

    bool spd() const { return symmetric && positive_definite; }
};

SpdReport check_spd(const MatrixX& tensor, double symmetry_tol = 1e-8);

/// K_ij = (1/|Y|)(∫ wⁱ_z,j + ∫ wⁱ_a,j + ∫ wⁱ_sp,j). Requires the solutions
/// for both unit forcings; throws StateError otherwise.
Mat2 assemble_permeability(const std::vector<CellFlowSolution>& solutions);
/// M = (1/|Y|) ∫ r over all flow fields. Throws StateError when `osmotic`
/// is not an osmotic solution.
Vec2 assemble_osmotic_vector(const CellFlowSolution& osmotic);
/// A_l = (1/|Y_l|) ∫ (D + D ∇ω) with the j-th column from ω^j.
Mat2 assemble_diffusion_tensor(const ScalarCellSolver& solver, const std::vector<ScalarCellSolution>& omega);
/// Ĥ_l = (1/|Y_l|) ∫ H_M(v_l) − (1/|Y_l|) ∫ D ∇z_l.
Vec2 assemble_effective_velocity(const ScalarCellSolver& solver, const std::vector<Vec2>& cell_velocity,
                                 const ScalarCellSolution& z, double bound);

/// Eigenvalue bounds for A_l: the upper bound is the largest eigenvalue of
/// the arithmetic mean of D_l over Y_l; the lower bound is the smallest
/// eigenvalue of the harmonic mean when Y_l is the whole cell and 0 when Y_l
/// is perforated.
struct DiffusionBounds {
    double lower = 0.0, upper = 0.0;
    bool contains(const Mat2& a, double rel_tol = 1e-9) const;
};
DiffusionBounds diffusion_bounds(const ScalarCellSolver& solver);

/// Piecewise-constant diffusion per subdomain.
struct CellDiffusion {
    Mat2 aw = Mat2::Identity(), ap = Mat2::Identity();  // D_a on AW and AS
    Mat2 z = Mat2::Identity(), sp = Mat2::Identity();   // D_s on Z and AS

    CellTensorField field(const SimplicialMesh& mesh, CellSide side) const;
};

struct EffectiveCoefficients {
    Mat2 K = Mat2::Zero();
    Vec2 M = Vec2::Zero();
    Mat2 A_a = Mat2::Zero(), A_s = Mat2::Zero();
    double area_a = 0.0, area_s = 0.0;      // |Y_a|, |Y_s|
    double length_z = 0.0, length_as = 0.0; // |Γz|, |Γas|
    SpdReport K_report, A_a_report, A_s_report;
    // Provenance.
    double mesh_h = 0.0;
    int mesh_cells = 0;
    double max_residual = 0.0;
    std::string solver_backend;
};

/// All cell solutions of one unit-cell mesh; evaluates Ĥ_l on demand.
class CellModel {
public:
    CellModel(const SimplicialMesh& mesh, const CellFlowParams& flow, const CellDiffusion& diffusion);

    const EffectiveCoefficients& coefficients() const { return coeffs_; }
    const SimplicialMesh& mesh() const { return *mesh_; }
    const CellFlowSolver& flow() const { return *flow_; }
    const std::vector<CellFlowSolution>& permeability_solutions() const { return w_; }
    const CellFlowSolution& osmotic_solution() const { return r_; }
    bool has_side(CellSide s) const;
    const ScalarCellSolver& scalar(CellSide s) const;

    /// Cell velocity v_l(y) = −Σ ∂_i p wⁱ_l(y) + (c_s − c_a) r_l(y) averaged per
    /// mesh cell, for a macroscopic pressure gradient and concentration
    /// difference.
    std::vector<Vec2> cell_velocity(CellSide side, const Vec2& grad_p, double dc) const;
    /// Ĥ_M(v_l) at one macroscopic point (solves one convection corrector).
    Vec2 effective_velocity(CellSide side, const Vec2& grad_p, double dc, double bound) const;

private:
    const SimplicialMesh* mesh_;
    std::unique_ptr<CellFlowSolver> flow_;
    std::vector<CellFlowSolution> w_;
    CellFlowSolution r_;
    std::vector<std::vector<Vec2>> w_avg_a_, w_avg_s_;
    std::vector<Vec2> r_avg_a_, r_avg_s_;
    std::unique_ptr<ScalarCellSolver> scalar_a_, scalar_s_;
    EffectiveCoefficients coeffs_;
};

}  // namespace plantflow
