#include "plantflow/membrane_kinetics.hpp"

#include "plantflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace plantflow {

double MembraneCoefficients::kappa() const {
    if (!(thickness > 0.0)) throw ParameterError("membrane thickness must be positive");
    return reflection * solvent_pressure / thickness;
}

double MembraneCoefficients::delta() const {
    if (!(thickness > 0.0)) throw ParameterError("membrane thickness must be positive");
    return reflection * solvent_diffusion / thickness;
}

void MembraneCoefficients::validate() const {
    if (!(thickness > 0.0)) throw ParameterError("membrane thickness h must be positive");
    if (reflection < 0.0 || reflection > 1.0) throw ParameterError("reflection coefficient must lie in [0, 1]");
    if (!(solute_diffusion > 0.0)) throw ParameterError("membrane solute diffusion D must be positive");
    if (!(solvent_diffusion > 0.0)) throw ParameterError("solvent coefficient 𝒟 must be positive");
    if (!(solvent_pressure > 0.0)) throw ParameterError("solvent coefficient 𝒢 must be positive");
    if (!(density > 0.0)) throw ParameterError("density must be positive");
}

double velocity_cutoff(double xi, double bound) {
    if (!(bound > 0.0)) throw ParameterError("velocity cutoff bound must be positive");
    return std::clamp(xi, -bound, bound);
}

Vec2 velocity_cutoff(const Vec2& xi, double bound) {
    return {velocity_cutoff(xi.x(), bound), velocity_cutoff(xi.y(), bound)};
}

KedemFluxes kedem_fluxes(double jump_c, double jump_p, const MembraneCoefficients& c) {
    if (!(c.thickness > 0.0)) throw ParameterError("membrane thickness must be positive");
    const double scale = c.density / c.thickness;
    KedemFluxes f;
    f.solute = -scale * (c.solute_diffusion * jump_c + c.barodiffusion * jump_p);
    f.mixture = scale * c.reflection * (c.solvent_diffusion * jump_c - c.solvent_pressure * jump_p);
    return f;
}

double membrane_water_flux(double stress_nn, double jump_p, double jump_c, double kappa, double delta) {
    return delta * jump_c - kappa * (stress_nn + jump_p);
}

double Regulation::operator()(double, double theta_free) const { return rate * std::max(0.0, target - theta_free); }

void Regulation::linearize(double theta_free, double& slope, double& intercept) const {
    if (theta_free < target) {
        slope = -rate;
        intercept = rate * target;
    } else {
        slope = 0.0;
        intercept = 0.0;
    }
}

void TransporterParams::validate() const {
    const double rates[] = {k1, k2, k3, k4, gamma_free, gamma_bound, regulation.rate, regulation.target};
    const char* names[] = {"k1", "k2", "k3", "k4", "gamma_free", "gamma_bound", "regulation.rate", "regulation.target"};
    for (int i = 0; i < 8; ++i)
        if (!(rates[i] >= 0.0))
            throw ParameterError(std::string("transporter parameter ") + names[i] + " must be non-negative");
}

BindingRates TransporterContext::rates() const {
    if (c_I < 0.0 || c_II < 0.0) throw DomainError("transporter kinetics called with a negative concentration");
    return {params.k1 * rho_I * c_I + params.k4 * rho_II * c_II, params.k2 + params.k3};
}

TransporterRates transporter_rhs(const TransporterState& s, double c_I, double c_II, double rho_I, double rho_II,
                                 const TransporterParams& p, double t) {
    if (c_I < 0.0 || c_II < 0.0) throw DomainError("transporter kinetics called with a negative concentration");
    if (s.free < 0.0 || s.bound < 0.0) throw DomainError("transporter state must be non-negative");
    const double binding = p.k1 * rho_I * c_I + p.k4 * rho_II * c_II;
    const double release = p.k2 + p.k3;
    const double r = p.regulation(t, s.free);
    TransporterRates out;
    out.free = r - binding * s.free + release * s.bound - p.gamma_free * s.free;
    out.bound = binding * s.free - release * s.bound - p.gamma_bound * s.bound;
    return out;
}

Eigen::Matrix3d metzler_expm(const Eigen::Matrix3d& b) {
    const double shift = std::max(0.0, -b.diagonal().minCoeff());
    Eigen::Matrix3d n = b + shift * Eigen::Matrix3d::Identity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j && n(i, j) < 0.0) throw ParameterError("metzler_expm: negative off-diagonal entry");
    const double norm = n.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.25) {
        scale *= 0.5;
        ++squarings;
    }
    n *= scale;
    Eigen::Matrix3d term = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d sum = term;
    for (int k = 1; k <= 18; ++k) {
        term = term * n / static_cast<double>(k);
        sum += term;
    }
    Eigen::Matrix3d e = std::exp(-shift * scale) * sum;
    for (int k = 0; k < squarings; ++k) e = e * e;
    return e;
}

namespace {

struct Spectrum {
    double low = 0.0, high = 0.0;  // real eigenvalues, low <= high
};

// A Metzler 2x2 matrix has real eigenvalues.
Spectrum metzler_spectrum(const Eigen::Matrix2d& a) {
    const double s = 0.5 * (a(0, 0) + a(1, 1));
    const double q = std::hypot(0.5 * (a(0, 0) - a(1, 1)), std::sqrt(a(0, 1) * a(1, 0)));
    Spectrum sp;
    sp.low = s - q;
    sp.high = s + q;
    // Avoid cancellation in s + q when s < 0.
    if (s < 0.0 && sp.low != 0.0) sp.high = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / sp.low;
    return sp;
}

// exp(t a) = e^{λ₋ t} I + f (a − λ₋ I), with f the divided difference of e^{λ t}.
Eigen::Matrix2d expm_2x2(const Eigen::Matrix2d& a, double t) {
    const Spectrum sp = metzler_spectrum(a);
    const double gap = sp.high - sp.low;
    const double f = gap > 0.0 ? std::exp(sp.high * t) * (-std::expm1(-gap * t)) / gap : t * std::exp(sp.high * t);
    return std::exp(sp.low * t) * Eigen::Matrix2d::Identity() + f * (a - sp.low * Eigen::Matrix2d::Identity());
}

// ∫₀ᵗ exp(s a) e₁ ds.
Eigen::Vector2d forced_response(const Eigen::Matrix2d& a, double t, const Eigen::Matrix3d& augmented) {
    const Spectrum sp = metzler_spectrum(a);
    const double gap = sp.high - sp.low;
    if (gap * t < 1e-2) {
        const Eigen::Matrix3d e = metzler_expm(t * augmented);
        return e.block<2, 1>(0, 2) / augmented(0, 2);
    }
    const auto h = [t](double lambda) { return lambda == 0.0 ? t : std::expm1(lambda * t) / lambda; };
    const double g = (h(sp.high) - h(sp.low)) / gap;
    const Eigen::Matrix2d w = h(sp.low) * Eigen::Matrix2d::Identity() + g * (a - sp.low * Eigen::Matrix2d::Identity());
    return w.col(0);
}

}  // namespace

TransporterState step_transporters(const TransporterState& s, const TransporterContext& ctx, double dt,
                                   TransporterScheme scheme) {
    if (!(dt > 0.0)) throw StepError("transporter step requires dt > 0");
    if (s.free < 0.0 || s.bound < 0.0) throw DomainError("transporter state must be non-negative");
    const BindingRates k = ctx.rates();
    const auto& p = ctx.params;

    if (scheme == TransporterScheme::BackwardEuler) {
        const double r = p.regulation(ctx.t, s.free);
        // (I − dt A) x = x0 + dt (R, 0)
        const double a11 = 1.0 + dt * (k.alpha + p.gamma_free), a12 = -dt * k.beta;
        const double a21 = -dt * k.alpha, a22 = 1.0 + dt * (k.beta + p.gamma_bound);
        const double det = a11 * a22 - a12 * a21;
        const double f = s.free + dt * r, b = s.bound;
        return {(a22 * f - a12 * b) / det, (a11 * b - a21 * f) / det};
    }

    double slope = 0.0, intercept = 0.0;
    p.regulation.linearize(s.free, slope, intercept);
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    m(0, 0) = -(k.alpha + p.gamma_free) + slope;
    m(0, 1) = k.beta;
    m(1, 0) = k.alpha;
    m(1, 1) = -(k.beta + p.gamma_bound);
    m(0, 2) = intercept;
    const Eigen::Matrix2d a = m.topLeftCorner<2, 2>();
    const Eigen::Matrix2d e = expm_2x2(a, dt);
    Eigen::Vector2d x = e * Eigen::Vector2d(s.free, s.bound);
    if (intercept != 0.0) x += intercept * forced_response(a, dt, m);
    return {x(0), x(1)};
}

QuasiStationary quasi_stationary_flux(double c_I, double c_II, double rho_I, double rho_II, double theta0, double k1,
                                      double k2, double k3, double k4) {
    const double release = k2 + k3;
    if (!(release > 0.0)) throw ParameterError("quasi-stationary reduction requires k2 + k3 > 0");
    if (theta0 < 0.0) throw DomainError("total transporter concentration must be non-negative");
    const double bind_I = k1 * rho_I * c_I, bind_II = k4 * rho_II * c_II;
    QuasiStationary q;
    q.free = release / (release + bind_I + bind_II) * theta0;
    q.flux = (k1 * k3 * rho_I * c_I - k2 * k4 * rho_II * c_II) / release * q.free;
    return q;
}

double michaelis_menten_efflux(double c_I, double rho_I, double theta0, double k1, double k2, double k3) {
    const double denom = k2 + k3 + k1 * rho_I * c_I;
    if (!(denom > 0.0)) throw ParameterError("Michaelis-Menten efflux requires k2 + k3 + k1 ρ c > 0");
    return rho_I * c_I * k1 * k3 / denom * theta0;
}

double membrane_solute_exchange(double c_l, double theta_free_l, double theta_bound_other, double alpha_l,
                                double beta_other) {
    return beta_other * theta_bound_other - alpha_l * c_l * theta_free_l;
}

}  // namespace plantflow
