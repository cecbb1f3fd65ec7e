#pragma once

#include "plantflow/cell_problems.hpp"
#include "plantflow/effective_tensors.hpp"
#include "plantflow/expression.hpp"
#include "plantflow/geometry.hpp"
#include "plantflow/macro_solver.hpp"
#include "plantflow/membrane_kinetics.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace plantflow {

/// Frozen-concentration micro-to-macro study settings.
struct VerifyConfig {
    std::vector<int> cells_per_side = {2, 4, 8};
    std::string dc = "sin(2*pi*x)*sin(2*pi*y)";
    int macro_cells = 64;
};

struct OutputConfig {
    std::string dir = "out";
    bool vtk = true;
};

/// Nondimensional run description: cell size 1, reference pressure and
/// concentration 1.
struct RunConfig {
    std::uint64_t seed = 0;

    // geometry
    UnitCellSpec cell;
    MacroDomainSpec domain;

    // physics
    double viscosity = 1.0;
    Mat2 K_aw = Mat2::Identity(), K_ap = Mat2::Identity(), K_sp = Mat2::Identity();
    MembraneCoefficients membrane_z, membrane_as;
    CellDiffusion diffusion;
    double growth_a = 0.0, capacity_a = 1.0;
    double growth_s = 0.0, capacity_s = 1.0;
    double cutoff = 10.0;
    double density = 1.0;
    /// [side a|s][class z|as]
    std::array<std::array<TransporterParams, 2>, 2> transporters{};
    std::string initial_c_a = "1", initial_c_s = "1";
    std::array<std::array<TransporterState, 2>, 2> initial_theta{};

    // solver
    double cell_h = 0.1;
    MacroSolverConfig macro;
    VerifyConfig verify;

    OutputConfig outputs;

    /// κ_i = ς𝒢/h and δ_i = ς𝒟/h of both membrane classes.
    CellFlowParams flow_params() const;
    MacroPhysics macro_physics(const EffectiveCoefficients& c) const;
    /// v_D per boundary segment.
    std::vector<double> boundary_velocities() const;
};

/// One validation rule and the model assumption it enforces.
struct ValidationRule {
    std::string id;
    std::string assumption;
};

/// Every rule checked by validate_config, one or more per assumption.
const std::vector<ValidationRule>& validation_rules();

/// Throws ValidationError "[rule id] detail (assumption: ...)".
void validate_config(const RunConfig& config);

/// Parses JSON text. Missing keys keep their defaults, unknown keys are
/// rejected. Throws ParseError (with line and column where known) or
/// ValidationError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// The documented default configuration as JSON text; parses to
/// RunConfig{} with the default cell filled in.
std::string default_config_json();
RunConfig default_config();

}  // namespace plantflow
