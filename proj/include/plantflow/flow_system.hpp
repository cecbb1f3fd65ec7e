#pragma once

#include "plantflow/linalg.hpp"
#include "plantflow/mesh.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace plantflow {

/// Physical constants of the coupled Stokes (Y_z) / Darcy (Y_a, Y_as) system.
/// `resistance_*` is κ(y) on each interface class, i.e. 1/κ₁ and 1/κ₂ of the
/// membrane law, already multiplied by any scale factor.
struct FlowCoefficients {
    double viscosity = 1.0;
    Mat2 k_aw = Mat2::Identity();
    Mat2 k_ap = Mat2::Identity();
    Mat2 k_sp = Mat2::Identity();
    double resistance_z = 1.0;
    double resistance_as = 1.0;
};

/// Decoded solution of one flow problem.
struct FlowField {
    /// Velocity at the P2 nodes of the symplast (vertex nodes then edge nodes,
    /// see FlowSystem::node_of_vertex / node_of_edge).
    std::vector<Vec2> node_velocity;
    /// Fluxes ∫_e w·n along MeshEdge::normal; zero where the field is absent.
    VectorX flux_a, flux_sp;
    /// Cell pressures; zero on cells outside the field's subdomain.
    VectorX pressure_z, pressure_a, pressure_sp;
    /// Normal stress −2η(S w n)·n + π_z on every Γz/Γas edge (zero elsewhere).
    VectorX interface_stress;
    double residual = 0.0;
};

/// Mixed discretization: continuous P2 velocity on Z cells with the
/// tangential component removed at interface nodes, lowest-order
/// Raviart-Thomas fluxes on A cells (w_a) and on AS cells (w_sp),
/// piecewise-constant pressures, one multiplier per interface edge for the
/// normal-flux balance, and one scalar multiplier fixing the pressure mean.
/// Periodic sides are identified; exterior sides carry prescribed a-fluxes.
class FlowSystem {
public:
    /// `exterior_velocity[b]` is v_D on boundary segment b (outward normal).
    FlowSystem(const SimplicialMesh& mesh, const FlowCoefficients& coeffs, std::vector<double> exterior_velocity = {});
    ~FlowSystem();
    FlowSystem(FlowSystem&&) noexcept;
    FlowSystem& operator=(FlowSystem&&) noexcept;

    const SimplicialMesh& mesh() const { return *mesh_; }
    const FlowCoefficients& coefficients() const { return coeffs_; }
    int size() const { return n_total_; }
    const SparseMatrix& matrix() const { return matrix_; }

    /// Right-hand side of a constant body force in every subdomain.
    VectorX body_force(const Vec2& f) const;
    /// −∫_Γzs g ψ_a·n for an interface forcing g(edge, x).
    VectorX interface_forcing(const std::function<double(int edge, const Vec2& x)>& g) const;
    /// Contribution of the prescribed exterior fluxes.
    const VectorX& boundary_lift() const { return lift_; }

    /// Solves with a cached factorization. Throws SolveError.
    FlowField solve(const VectorX& rhs) const;
    VectorX solve_raw(const VectorX& rhs) const;
    FlowField decode(const VectorX& x) const;
    VectorX encode(const FlowField& f) const;

    /// ∫_T of each field on cell T.
    Vec2 z_integral(const FlowField& f, int cell) const;
    Vec2 darcy_integral(const VectorX& flux, int cell) const;
    /// Darcy velocity (RT0) at point x of cell T.
    Vec2 darcy_velocity(const VectorX& flux, int cell, const Vec2& x) const;
    /// P2 velocity at point x of a Z cell.
    Vec2 z_velocity(const FlowField& f, int cell, const Vec2& x) const;
    /// Integral of the divergence of each field over each cell of its domain.
    double max_cell_divergence(const FlowField& f) const;
    /// Interface balance residual max_e |∫_e w_z·n − F_a − F_sp|.
    double max_interface_defect(const FlowField& f) const;
    /// Energy 2η‖S w_z‖² + ‖K^{-1/2} w_a‖² + ‖K_sp^{-1/2} w_sp‖² + ∮κ|w_a·n|².
    double energy(const FlowField& f) const;
    /// ∫_Γz∪Γas w_a·n and ∫ w_z·n over the same edges.
    double interface_flux_a(const FlowField& f) const;
    double interface_flux_z(const FlowField& f) const;
    /// Smallest non-trivial singular value of the diagonally scaled
    /// constraint block (pressures and interface multipliers). Dense; for
    /// coarse meshes only.
    double inf_sup_estimate() const;

    int node_of_vertex(int v) const { return node_vertex_[v]; }
    int node_of_edge(int e) const { return node_edge_[e]; }
    int num_nodes() const { return n_nodes_; }

private:
    void assemble();
    void add_z_cell(int c, std::vector<Triplet>& t);
    void add_darcy_cell(int c, bool sp, std::vector<Triplet>& t);

    const SimplicialMesh* mesh_;
    FlowCoefficients coeffs_;
    std::vector<double> exterior_velocity_;

    // P2 nodes of the symplast.
    std::vector<int> node_vertex_, node_edge_;
    std::vector<Vec2> node_normal_;  // zero for interior nodes
    std::vector<int> node_dof_;      // first velocity dof of each node
    int n_nodes_ = 0;

    // Flux dofs per mesh edge (-1: none, >= n_free: fixed), with sign.
    std::vector<int> a_dof_, sp_dof_;
    std::vector<double> a_sign_, sp_sign_;
    std::vector<double> fixed_value_;

    std::vector<int> pz_dof_, pa_dof_, psp_dof_, lambda_dof_;
    int gauge_dof_ = -1;
    int n_velocity_ = 0, n_free_ = 0, n_total_ = 0, n_pressure_begin_ = 0;

    SparseMatrix matrix_;
    VectorX lift_;
    mutable std::unique_ptr<SparseDirectSolver> solver_;
};

/// Local orientation sign of mesh edge `e` as seen from cell `c`: +1 when
/// MeshEdge::normal points out of c.
double edge_sign(const SimplicialMesh& mesh, int c, int e);

}  // namespace plantflow
