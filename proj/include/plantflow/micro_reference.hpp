#pragma once

#include "plantflow/cell_problems.hpp"
#include "plantflow/flow_system.hpp"
#include "plantflow/mesh.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace plantflow {

/// Per ε-cell averages of a microscopic solution on Ω = [0,1]².
struct MicroAverages {
    int cells_per_side = 0;
    /// Tile k = j·n + i covers [i ε, (i+1) ε] × [j ε, (j+1) ε].
    std::vector<Vec2> velocity;  // (1/|εY|) ∫ (v_z + v_a + v_sp)
    VectorX pressure_a;          // (1/|εY_a|) ∫ p_a
    VectorX pressure_s;          // (1/|εY_s|) ∫ p_s, p_s = p_z on Z and p_sp on AS
};

/// The ε-scaled Stokes–Darcy problem on n × n copies of a unit cell with
/// frozen c_s − c_a: viscosity ε²η, interface resistance ε/κ_i, osmotic
/// forcing ε δ_i/κ_i (c_s − c_a)(x), apoplastic normal velocity v_D on ∂Ω and
/// zero symplastic flux there.
class MicroFlow {
public:
    static constexpr int kMaxCellsPerSide = 16;
    static constexpr long kMaxCells = 60000;

    /// `v_d` holds v_D on the left, right, bottom and top sides (empty: 0).
    /// Throws ParameterError for n < 1, n > kMaxCellsPerSide or more than
    /// kMaxCells triangles in the tiled mesh.
    MicroFlow(const SimplicialMesh& cell_mesh, const CellFlowParams& params, int cells_per_side,
              std::vector<double> v_d = {});

    double epsilon() const { return 1.0 / n_; }
    int cells_per_side() const { return n_; }
    const SimplicialMesh& mesh() const { return *mesh_; }
    const FlowSystem& system() const { return *system_; }
    const std::vector<int>& tile_of_cell() const { return tile_; }

    VectorX rhs(const std::function<double(const Vec2&)>& dc) const;
    FlowField solve(const std::function<double(const Vec2&)>& dc) const;
    MicroAverages average(const FlowField& f) const;
    /// ∫_Ω of the zero-extended velocity.
    Vec2 total_velocity(const FlowField& f) const;

private:
    int n_;
    CellFlowParams params_;
    std::unique_ptr<SimplicialMesh> mesh_;
    std::vector<int> tile_;
    std::unique_ptr<FlowSystem> system_;
};

struct ConvergenceRow {
    double epsilon = 0.0;
    double err_v = 0.0, err_pa = 0.0, err_ps = 0.0, gap = 0.0;
    /// log₂ of the ratio of consecutive velocity errors (0 for the first row).
    double observed_order = 0.0;
    double seconds = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    bool monotone = false;
    std::string verdict;  // "PASS" or "FAIL: ..."
};

struct ConvergenceSetup {
    std::vector<int> cells_per_side = {2, 4, 8};
    std::function<double(const Vec2&)> dc;  // frozen c_s − c_a
    std::vector<double> v_d;                // left, right, bottom, top
    int macro_cells = 64;                   // reference Darcy mesh per side
};

/// Compares micro averages with the homogenized Darcy solution built from
/// K and M of the same cell. Non-monotone errors give a FAIL verdict.
ConvergenceReport convergence_study(const SimplicialMesh& cell_mesh, const CellFlowParams& params, const Mat2& K,
                                    const Vec2& M, const ConvergenceSetup& setup);

}  // namespace plantflow
