#pragma once

#include "plantflow/linalg.hpp"

namespace plantflow {

/// Membrane transport coefficients. Jumps [·] are (Darcy side − Stokes side).
struct MembraneCoefficients {
    double reflection = 1.0;       // ς in [0, 1]
    double thickness = 1.0;        // h > 0
    double solute_diffusion = 1.0; // D > 0
    double barodiffusion = 0.0;    // G, any sign
    double solvent_diffusion = 1.0;// 𝒟 > 0
    double solvent_pressure = 1.0; // 𝒢 > 0
    double density = 1.0;          // ρ ≈ ρ₁, constant

    /// κ = ς𝒢/h
    double kappa() const;
    /// δ = ς𝒟/h
    double delta() const;
    /// Throws ParameterError when an invariant is violated.
    void validate() const;
};

/// Componentwise cutoff H_M.
double velocity_cutoff(double xi, double bound);
Vec2 velocity_cutoff(const Vec2& xi, double bound);

struct KedemFluxes {
    double solute = 0.0;   // j̄₂·n
    double mixture = 0.0;  // j̄·n
};

KedemFluxes kedem_fluxes(double jump_c, double jump_p, const MembraneCoefficients& coeffs);

/// v·n = δ[c] − κ(σnn + [p])
double membrane_water_flux(double stress_nn, double jump_p, double jump_c, double kappa, double delta);

struct TransporterState {
    double free = 0.0;   // θ_f
    double bound = 0.0;  // θ_b
    double total() const { return free + bound; }
};

/// Production toward a target level, R(θ_f) = rate · max(0, target − θ_f).
/// Lipschitz with constant `rate` and non-negative for all θ_f.
struct Regulation {
    double rate = 0.0;
    double target = 0.0;

    double operator()(double t, double theta_free) const;
    double lipschitz() const { return rate; }
    /// Affine form R ≈ intercept + slope·θ valid on the branch containing θ.
    void linearize(double theta_free, double& slope, double& intercept) const;
};

struct TransporterParams {
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;
    double gamma_free = 0.0, gamma_bound = 0.0;
    Regulation regulation;

    void validate() const;
};

/// Aggregated binding and release rates of the two-state reaction system.
struct BindingRates {
    double alpha = 0.0;  // k₁ρ_I c_I + k₄ρ_II c_II
    double beta = 0.0;   // k₂ + k₃
};

struct TransporterContext {
    double c_I = 0.0, c_II = 0.0;
    double rho_I = 1.0, rho_II = 1.0;
    TransporterParams params;
    double t = 0.0;

    BindingRates rates() const;
};

struct TransporterRates {
    double free = 0.0, bound = 0.0;
};

TransporterRates transporter_rhs(const TransporterState& state, double c_I, double c_II, double rho_I,
                                 double rho_II, const TransporterParams& params, double t);

enum class TransporterScheme {
    /// Exact exponential of the (Metzler) linear reaction matrix over the
    /// step, with the regulation linearized on its current branch.
    Exponential,
    /// Backward Euler on the linear part, regulation explicit.
    BackwardEuler,
};

TransporterState step_transporters(const TransporterState& state, const TransporterContext& ctx, double dt,
                                   TransporterScheme scheme = TransporterScheme::Exponential);

struct QuasiStationary {
    double flux = 0.0;  // a·n
    double free = 0.0;  // θ_f
};

QuasiStationary quasi_stationary_flux(double c_I, double c_II, double rho_I, double rho_II, double theta0, double k1,
                                      double k2, double k3, double k4);

double michaelis_menten_efflux(double c_I, double rho_I, double theta0, double k1, double k2, double k3);

/// β_{l−1}θ_{b,l−1} − α_l c_l θ_{f,l}
double membrane_solute_exchange(double c_l, double theta_free_l, double theta_bound_other, double alpha_l,
                                double beta_other);

/// exp(B) for a matrix with non-negative off-diagonal entries. Every term of
/// the shifted Taylor series is non-negative, so the result is entrywise
/// non-negative in floating point as well.
Eigen::Matrix3d metzler_expm(const Eigen::Matrix3d& b);

}  // namespace plantflow
