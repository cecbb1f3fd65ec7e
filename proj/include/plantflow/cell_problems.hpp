#pragma once

#include "plantflow/flow_system.hpp"
#include "plantflow/linalg.hpp"
#include "plantflow/mesh.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace plantflow {

/// Physical data of the flow cell problems. κ and δ are the membrane
/// coefficients of the two interface classes; the cell problems use
/// κ(y) = 1/κ_i and δ(y) = δ_i/κ_i.
struct CellFlowParams {
    double viscosity = 1.0;
    Mat2 k_aw = Mat2::Identity();
    Mat2 k_ap = Mat2::Identity();
    Mat2 k_sp = Mat2::Identity();
    double kappa_z = 1.0, kappa_as = 1.0;
    double delta_z = 1.0, delta_as = 1.0;

    /// Throws ParameterError on non-SPD tensors or non-positive κ, η.
    void validate() const;
    FlowCoefficients flow_coefficients() const;
    double forcing_z() const { return delta_z / kappa_z; }
    double forcing_as() const { return delta_as / kappa_as; }
};

struct CellFlowSolution {
    /// 0 and 1 for the unit forcings e₁, e₂; -1 for the osmotic problem.
    int index = -1;
    std::string label;
    FlowField field;
    double residual = 0.0;
    double max_divergence = 0.0;
    double interface_defect = 0.0;
    /// Bilinear energy and the work of the forcing; equal for the discrete
    /// permeability solutions.
    double energy = 0.0;
    double forcing_work = 0.0;
    Vec2 integral_z = Vec2::Zero(), integral_a = Vec2::Zero(), integral_sp = Vec2::Zero();

    Vec2 integral() const { return integral_z + integral_a + integral_sp; }
};

/// Owns the saddle-point system of one cell mesh; the three flow cell
/// problems share one factorization.
class CellFlowSolver {
public:
    CellFlowSolver(const SimplicialMesh& mesh, const CellFlowParams& params);

    const SimplicialMesh& mesh() const { return system_.mesh(); }
    const FlowSystem& system() const { return system_; }
    const CellFlowParams& params() const { return params_; }

    CellFlowSolution solve_permeability(int i) const;
    /// Osmotic problem; its symplastic channel field r_sp is kept so that the
    /// doubled channel flow of the ε-problem is represented.
    CellFlowSolution solve_osmotic() const;
    /// Solve with the osmotic forcing scaled by `scale` per interface class.
    CellFlowSolution solve_osmotic(double scale_z, double scale_as) const;

    /// Average velocity on each cell of Y_a (A cells, a-field) and of Y_s
    /// (Z cells, P2 field; AS cells, sp field). Zero elsewhere.
    std::vector<Vec2> cell_average_a(const FlowField& f) const;
    std::vector<Vec2> cell_average_s(const FlowField& f) const;

private:
    CellFlowSolution finish(int index, const std::string& label, const VectorX& rhs) const;

    CellFlowParams params_;
    FlowSystem system_;
};

CellFlowSolution solve_permeability_cell(const SimplicialMesh& mesh, int i, const CellFlowParams& params);
CellFlowSolution solve_osmotic_cell(const SimplicialMesh& mesh, const CellFlowParams& params);

/// Y_a = AW ∪ AS, Y_s = Z ∪ AS, or the whole cell.
enum class CellSide { A, S, Full };
std::string to_string(CellSide s);
bool in_side(CellSide side, Subdomain tag);

/// Diffusion tensor per mesh cell.
using CellTensorField = std::function<Mat2(int cell)>;

struct ScalarCellSolution {
    CellSide side = CellSide::A;
    /// 0 and 1 for ωⁱ, -1 for the convection corrector z.
    int index = -1;
    /// Nodal values per mesh vertex; zero at vertices outside Y_l.
    VectorX values;
    double residual = 0.0;
    double compatibility_defect = 0.0;
};

/// P1 periodic Neumann problems on Y_l with a mean-zero constraint.
class ScalarCellSolver {
public:
    /// Throws GeometryError when Y_l is empty or not connected.
    ScalarCellSolver(const SimplicialMesh& mesh, CellSide side, CellTensorField diffusion);

    const SimplicialMesh& mesh() const { return *mesh_; }
    CellSide side() const { return side_; }
    double measure() const { return measure_; }
    bool contains(int cell) const { return in_side(side_, mesh_->cell_tags[cell]); }
    const Mat2& diffusion(int cell) const { return cell_diffusion_[cell]; }

    ScalarCellSolution solve_diffusion(int i) const;
    /// Corrector for the cutoff velocity H_M(v) given as cell averages over
    /// Y_l. Throws CompatibilityError when the defect exceeds 1e-3.
    ScalarCellSolution solve_convection(const std::vector<Vec2>& cell_velocity, double bound) const;

    /// (1/|Y_l|) ∫ D ∇u over Y_l.
    Vec2 mean_flux(const ScalarCellSolution& u) const;
    /// (1/|Y_l|) ∫ D over Y_l.
    Mat2 mean_diffusion() const;
    /// Harmonic (Reuss) mean of D over Y_l, (1/|Y_l| ∫ D⁻¹)⁻¹.
    Mat2 harmonic_diffusion() const;
    /// Largest |u(x) − u(x')| over periodically identified vertex pairs.
    double periodicity_defect(const ScalarCellSolution& u) const;
    /// ∫_{Y_l} u / |Y_l|.
    double mean(const ScalarCellSolution& u) const;

private:
    ScalarCellSolution solve(const VectorX& rhs, int index, double defect) const;

    const SimplicialMesh* mesh_;
    CellSide side_;
    std::vector<Mat2> cell_diffusion_;
    std::vector<int> dof_of_vertex_;
    int n_dofs_ = 0;
    double measure_ = 0.0;
    SparseMatrix matrix_;
    VectorX mass_;
    std::unique_ptr<SparseDirectSolver> solver_;
};

ScalarCellSolution solve_diffusion_cell(const SimplicialMesh& mesh, CellSide side, int i, const CellTensorField& d);
ScalarCellSolution solve_convection_cell(const SimplicialMesh& mesh, CellSide side, const std::vector<Vec2>& velocity,
                                         const CellTensorField& d, double bound);

}  // namespace plantflow
