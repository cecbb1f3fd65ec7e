#pragma once

#include "plantflow/cell_problems.hpp"
#include "plantflow/geometry.hpp"
#include "plantflow/linalg.hpp"
#include "plantflow/membrane_kinetics.hpp"
#include "plantflow/mesh.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace plantflow {

// ---------------------------------------------------------------- Darcy

struct DarcySolution {
    /// ∫_e v·n along MeshEdge::normal.
    VectorX flux;
    /// Cell pressures, mean zero.
    VectorX pressure;
    double residual = 0.0;
    /// max_T |∫_T div v − ∫_T f|.
    double max_divergence = 0.0;
};

/// Lowest-order Raviart-Thomas / piecewise-constant discretization of
/// v + K∇p = g, div v = f, v·n = v_D, with a zero-mean pressure. The
/// saddle matrix is factorized once.
class DarcySolver {
public:
    /// `v_d[b]` is the outward normal velocity on boundary segment b.
    /// Throws CompatibilityError when ∮ v_D ≠ 0 and ParameterError when K is
    /// not SPD.
    DarcySolver(const SimplicialMesh& mesh, const Mat2& K, std::vector<double> v_d);

    const SimplicialMesh& mesh() const { return *mesh_; }
    const Mat2& permeability() const { return K_; }

    /// g = M (c_s − c_a) with the concentration difference given at the
    /// vertices (piecewise linear); optional volume source f.
    DarcySolution solve(const Vec2& M, const VectorX& dc_nodal,
                        const std::function<double(const Vec2&)>& source = nullptr) const;

    Vec2 velocity(const DarcySolution& s, int cell, const Vec2& x) const;
    Vec2 cell_velocity(const DarcySolution& s, int cell) const;
    /// (1/|T|) ∫_T of a function, seven-point rule.
    static VectorX cell_averages(const SimplicialMesh& mesh, const std::function<double(const Vec2&)>& f);

private:
    const SimplicialMesh* mesh_;
    Mat2 K_;
    std::vector<double> v_d_;
    std::vector<int> dof_;      // per edge, -1 for boundary edges
    std::vector<double> fixed_; // prescribed boundary fluxes per edge
    int n_flux_ = 0, n_total_ = 0;
    SparseMatrix matrix_;
    VectorX lift_;
    std::unique_ptr<SparseDirectSolver> solver_;
};

DarcySolution solve_darcy(const SimplicialMesh& mesh, const Mat2& K, const Vec2& M, const VectorX& c_s,
                          const VectorX& c_a, const std::vector<double>& v_d);

// ------------------------------------------------------------ transport

/// Vertex-centred finite volumes on the median dual of a triangle mesh:
/// lumped mass, P1 diffusion (implicit), first-order upwind advection
/// (explicit), explicit sources and implicit linear sinks. Exterior
/// boundaries are zero-flux.
class MedianDualTransport {
public:
    explicit MedianDualTransport(const SimplicialMesh& mesh);

    const SimplicialMesh& mesh() const { return *mesh_; }
    /// Dual cell areas.
    const VectorX& lumped_mass() const { return mass_; }
    /// Largest dt for which the explicit upwind part keeps c ≥ 0.
    double max_stable_dt(const std::vector<Vec2>& cell_velocity) const;
    /// Advective flux divergence Σ_j F_ij per node.
    VectorX advection(const VectorX& c, const std::vector<Vec2>& cell_velocity) const;

    /// One step of (c' − c)/dt = div(A∇c' − Ĥc) + source − sink·c'.
    /// Throws StepError on a CFL violation and SchemeError when a value
    /// below −1e-12 appears.
    VectorX step(const VectorX& c, const Mat2& A, const std::vector<Vec2>& cell_velocity, double dt,
                 const VectorX& source, const VectorX& sink) const;

    /// ∫ c with the lumped mass.
    double integral(const VectorX& c) const { return mass_.dot(c); }

private:
    const SimplicialMesh* mesh_;
    VectorX mass_;
    // Dual-face normals (length-weighted) per cell and local edge, oriented
    // from the edge's first vertex to its second.
    std::vector<std::array<Vec2, 3>> face_normal_;
};

// -------------------------------------------------------- coupled model

enum class MembraneClass { Z = 0, AS = 1 };
enum class ConcentrationSide { A = 0, S = 1 };

/// Macroscopic coefficients and rate laws.
struct MacroPhysics {
    Mat2 K = Mat2::Identity();
    Vec2 M = Vec2::Zero();
    Mat2 A_a = Mat2::Identity(), A_s = Mat2::Identity();
    double area_a = 1.0, area_s = 1.0;      // |Y_a|, |Y_s|
    double length_z = 0.0, length_as = 0.0; // |Γz|, |Γas|
    double cutoff = 10.0;                   // M of H_M
    /// Logistic source F_l(c) = rate · c (1 − c / capacity).
    double growth_a = 0.0, capacity_a = 1.0;
    double growth_s = 0.0, capacity_s = 1.0;
    /// Transporter parameters [side][class].
    std::array<std::array<TransporterParams, 2>, 2> transporters{};
    double density = 1.0;

    void validate() const;
};

struct MacroSolverConfig {
    double dt = 1e-3;
    double t_end = 1e-2;
    int output_every = 1;
    /// Ĥ lattice points per direction (≥ 2).
    int lattice = 5;
    /// Recompute the Ĥ lattice every n steps (0: only before the first step).
    int refresh_every = 1;
    TransporterScheme scheme = TransporterScheme::Exponential;

    void validate() const;
};

struct MacroState {
    double t = 0.0;
    int step = 0;
    DarcySolution darcy;
    VectorX c_a, c_s;  // per vertex
    /// Transporter fields per vertex, index [side][class].
    std::array<std::array<VectorX, 2>, 2> theta_free, theta_bound;
};

struct MassBudget {
    double t = 0.0;
    double integral_a = 0.0, integral_s = 0.0;
    /// |Y_a| ∫ c_a + |Y_s| ∫ c_s
    double weighted_solute = 0.0;
    /// ∫ Σ_class |Γ_class| (θ_f + θ_b) per side.
    double transporters_a = 0.0, transporters_s = 0.0;
    double boundary_flux = 0.0;
    double min_c = 0.0, max_c = 0.0;
    double velocity_norm = 0.0;
};

/// Ĥ_l at a macroscopic point from ∇p and c_s − c_a.
using EffectiveVelocityModel = std::function<Vec2(CellSide side, const Vec2& grad_p, double dc)>;

class MacroSolver {
public:
    MacroSolver(const SimplicialMesh& mesh, const MacroDomainSpec& domain, const MacroPhysics& physics,
                const MacroSolverConfig& config, EffectiveVelocityModel hhat);

    const SimplicialMesh& mesh() const { return *mesh_; }
    const MacroPhysics& physics() const { return physics_; }
    const MacroSolverConfig& config() const { return config_; }
    const DarcySolver& darcy() const { return darcy_; }
    const MedianDualTransport& transport() const { return transport_; }

    /// State from closed-form initial data; θ fields uniform per side/class.
    MacroState initial_state(const std::function<double(const Vec2&)>& c_a0,
                             const std::function<double(const Vec2&)>& c_s0,
                             const std::array<std::array<TransporterState, 2>, 2>& theta0) const;

    void solve_flow(MacroState& s) const;
    /// Ĥ lattice refresh and interpolation to the cells.
    void refresh_velocity(const MacroState& s);
    const std::vector<Vec2>& hhat(ConcentrationSide side) const { return hhat_[static_cast<int>(side)]; }
    void set_hhat(ConcentrationSide side, std::vector<Vec2> cell_values);

    /// Explicit source and implicit sink rates of c_l at every vertex.
    void reaction_rates(const MacroState& s, ConcentrationSide side, VectorX& source, VectorX& sink) const;
    void advance_concentrations(MacroState& s) const;
    void advance_transporters(MacroState& s) const;
    /// Darcy solve, optional Ĥ refresh, concentrations, transporters.
    void step(MacroState& s);

    /// |Y_a| ∫ (src − sink·c_a) + |Y_s| ∫ (src − sink·c_s) applied in the
    /// last concentration update.
    double last_source_integral() const { return last_source_; }

    /// Runs to t_end; `emit` is called with states at the output cadence
    /// (including the initial one). Errors carry the failing step index.
    void run(MacroState& s, const std::function<void(const MacroState&)>& emit);

    /// Last state reached before a failing step, if any.
    const MacroState* failure_snapshot() const { return failure_ ? failure_.get() : nullptr; }

    MassBudget budget(const MacroState& s) const;
    /// P1 value of a vertex field at x in cell c.
    double interpolate(const VectorX& f, int cell, const Vec2& x) const;
    int locate(const Vec2& x) const;

private:
    const SimplicialMesh* mesh_;
    MacroDomainSpec domain_;
    MacroPhysics physics_;
    MacroSolverConfig config_;
    EffectiveVelocityModel hhat_model_;
    DarcySolver darcy_;
    MedianDualTransport transport_;
    std::array<std::vector<Vec2>, 2> hhat_;
    mutable double last_source_ = 0.0;
    std::unique_ptr<MacroState> failure_;
};

/// Ĥ for a model without cell correctors: the cutoff of the Darcy velocity.
EffectiveVelocityModel darcy_velocity_model(const Mat2& K, const Vec2& M, double cutoff);

}  // namespace plantflow
