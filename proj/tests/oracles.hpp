#pragma once

// Independent reference computations shared by the test suites.

#include "plantflow/config.hpp"
#include "plantflow/geometry.hpp"
#include "plantflow/membrane_kinetics.hpp"
#include "plantflow/mesh.hpp"

#include <cmath>
#include <random>

namespace plantflow::testing {

/// Disk symplast with four equal channels: invariant under the square group.
inline UnitCellSpec fourfold_cell(double width = 0.08) {
    UnitCellSpec s;
    s.shape = SymplastShape::Disk;
    s.radius = 0.3;
    s.wall_thickness = 0.1;
    s.plasmodesmata = {{Side::Left, width}, {Side::Right, width}, {Side::Bottom, width}, {Side::Top, width}};
    return s;
}

inline UnitCellSpec default_cell() { return default_config().cell; }

inline UnitCellSpec all_darcy_cell() {
    UnitCellSpec s;
    s.shape = SymplastShape::None;
    return s;
}

/// Fraction of N uniform samples of [0,1]² classified as `tag`.
inline double monte_carlo_area(const UnitCellGeometry& g, Subdomain tag, int n, unsigned seed) {
    // Jittered sampling: one uniform point in each cell of a k×k grid.
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long hits = 0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (g.classify(Vec2((i + u(rng)) / k, (j + u(rng)) / k)) == tag) ++hits;
    return static_cast<double>(hits) / (static_cast<double>(k) * k);
}

/// Classical fourth-order Runge-Kutta on the transporter equations with
/// frozen concentrations.
inline TransporterState rk4_transporters(TransporterState s, const TransporterContext& ctx, double t0, double t1,
                                         int steps) {
    const double h = (t1 - t0) / steps;
    auto f = [&](const TransporterState& x, double t) {
        return transporter_rhs(x, ctx.c_I, ctx.c_II, ctx.rho_I, ctx.rho_II, ctx.params, t);
    };
    double t = t0;
    for (int k = 0; k < steps; ++k) {
        const TransporterRates k1 = f(s, t);
        const TransporterRates k2 = f({s.free + 0.5 * h * k1.free, s.bound + 0.5 * h * k1.bound}, t + 0.5 * h);
        const TransporterRates k3 = f({s.free + 0.5 * h * k2.free, s.bound + 0.5 * h * k2.bound}, t + 0.5 * h);
        const TransporterRates k4 = f({s.free + h * k3.free, s.bound + h * k3.bound}, t + h);
        s.free += h / 6.0 * (k1.free + 2.0 * k2.free + 2.0 * k3.free + k4.free);
        s.bound += h / 6.0 * (k1.bound + 2.0 * k2.bound + 2.0 * k3.bound + k4.bound);
        t += h;
    }
    return s;
}

/// D = d_low for y < 1/2 and d_high above: strips normal to y.
inline CellTensorField layered_diffusion(const SimplicialMesh& m, double d_low, double d_high) {
    return [&m, d_low, d_high](int c) { return (m.centroid(c).y() < 0.5 ? d_low : d_high) * Mat2::Identity(); };
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace plantflow::testing
