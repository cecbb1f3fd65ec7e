#include "fem.hpp"
#include "plantflow/errors.hpp"
#include "plantflow/macro_solver.hpp"

#include <cmath>

namespace plantflow {

namespace {

std::vector<double> boundary_velocities(const MacroDomainSpec& d) {
    std::vector<double> v;
    for (const auto& s : d.segments) v.push_back(s.v_d);
    return v;
}

[[noreturn]] void rethrow_at_step(const Error& e, int step) {
    const std::string msg = std::string(e.what()) + " (at time step " + std::to_string(step) + ")";
    const std::string kind = e.kind();
    if (kind == "StepError") throw StepError(msg);
    if (kind == "SchemeError") throw SchemeError(msg);
    if (kind == "SolveError") throw SolveError(msg);
    if (kind == "DomainError") throw DomainError(msg);
    if (kind == "CompatibilityError") throw CompatibilityError(msg);
    if (kind == "ParameterError") throw ParameterError(msg);
    if (kind == "StateError") throw StateError(msg);
    throw Error(msg);
}

}  // namespace

void MacroPhysics::validate() const {
    Eigen::SelfAdjointEigenSolver<Mat2> ek(K), ea(A_a), es(A_s);
    if (!(ek.eigenvalues().minCoeff() > 0.0)) throw ParameterError("macroscopic K must be positive definite");
    if (!(ea.eigenvalues().minCoeff() > 0.0)) throw ParameterError("A_a must be positive definite");
    if (!(es.eigenvalues().minCoeff() > 0.0)) throw ParameterError("A_s must be positive definite");
    if (!(area_a > 0.0) || !(area_s > 0.0)) throw ParameterError("|Y_a| and |Y_s| must be positive");
    if (length_z < 0.0 || length_as < 0.0) throw ParameterError("interface lengths must be non-negative");
    if (!(cutoff > 0.0)) throw ParameterError("velocity cutoff M must be positive");
    if (growth_a < 0.0 || growth_s < 0.0) throw ParameterError("growth rates must be non-negative");
    if (!(capacity_a > 0.0) || !(capacity_s > 0.0)) throw ParameterError("capacities must be positive");
    if (!(density > 0.0)) throw ParameterError("density must be positive");
    for (const auto& side : transporters)
        for (const auto& p : side) p.validate();
}

void MacroSolverConfig::validate() const {
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    if (!(t_end >= dt)) throw ParameterError("T_end must be at least dt");
    if (output_every < 1) throw ParameterError("output cadence must be at least 1");
    if (lattice < 2) throw ParameterError("Ĥ lattice needs at least 2 points per direction");
    if (refresh_every < 0) throw ParameterError("refresh_every must be non-negative");
}

MacroSolver::MacroSolver(const SimplicialMesh& mesh, const MacroDomainSpec& domain, const MacroPhysics& physics,
                         const MacroSolverConfig& config, EffectiveVelocityModel hhat)
    : mesh_(&mesh),
      domain_(domain),
      physics_((physics.validate(), physics)),
      config_((config.validate(), config)),
      hhat_model_(std::move(hhat)),
      darcy_(mesh, physics.K, boundary_velocities(domain)),
      transport_(mesh) {
    for (auto& h : hhat_) h.assign(mesh.num_cells(), Vec2::Zero());
}

MacroState MacroSolver::initial_state(const std::function<double(const Vec2&)>& c_a0,
                                      const std::function<double(const Vec2&)>& c_s0,
                                      const std::array<std::array<TransporterState, 2>, 2>& theta0) const {
    const SimplicialMesh& m = *mesh_;
    MacroState s;
    const int n = m.num_vertices();
    s.c_a.resize(n);
    s.c_s.resize(n);
    for (int i = 0; i < n; ++i) {
        s.c_a[i] = c_a0(m.vertices[i]);
        s.c_s[i] = c_s0(m.vertices[i]);
        if (!(s.c_a[i] >= 0.0) || !(s.c_s[i] >= 0.0))
            throw ParameterError("initial concentrations must be non-negative and finite");
    }
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k) {
            if (theta0[l][k].free < 0.0 || theta0[l][k].bound < 0.0)
                throw ParameterError("initial transporter densities must be non-negative");
            s.theta_free[l][k] = VectorX::Constant(n, theta0[l][k].free);
            s.theta_bound[l][k] = VectorX::Constant(n, theta0[l][k].bound);
        }
    s.darcy.flux = VectorX::Zero(m.num_edges());
    s.darcy.pressure = VectorX::Zero(m.num_cells());
    return s;
}

void MacroSolver::solve_flow(MacroState& s) const { s.darcy = darcy_.solve(physics_.M, s.c_s - s.c_a); }

int MacroSolver::locate(const Vec2& x) const {
    const SimplicialMesh& m = *mesh_;
    int best = 0;
    double best_min = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto l = detail::triangle(m, c).barycentric(x);
        const double lo = std::min({l[0], l[1], l[2]});
        if (lo >= -1e-12) return c;
        if (lo > best_min) {
            best_min = lo;
            best = c;
        }
    }
    return best;
}

double MacroSolver::interpolate(const VectorX& f, int cell, const Vec2& x) const {
    const auto l = detail::triangle(*mesh_, cell).barycentric(x);
    const auto& v = mesh_->cells[cell];
    return l[0] * f[v[0]] + l[1] * f[v[1]] + l[2] * f[v[2]];
}

void MacroSolver::refresh_velocity(const MacroState& s) {
    if (!hhat_model_) return;
    const SimplicialMesh& m = *mesh_;
    const int n = config_.lattice;
    const double x0 = m.lower.x(), y0 = m.lower.y();
    const double hx = (m.upper.x() - x0) / (n - 1), hy = (m.upper.y() - y0) / (n - 1);
    const Mat2 kinv = physics_.K.inverse();
    const VectorX dc = s.c_s - s.c_a;
    std::array<std::vector<Vec2>, 2> lattice;
    for (auto& l : lattice) l.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 x(x0 + i * hx, y0 + j * hy);
            const int c = locate(x);
            const Vec2 v = darcy_.velocity(s.darcy, c, x);
            const double d = interpolate(dc, c, x);
            const Vec2 grad_p = kinv * (physics_.M * d - v);
            lattice[0][j * n + i] = hhat_model_(CellSide::A, grad_p, d);
            lattice[1][j * n + i] = hhat_model_(CellSide::S, grad_p, d);
        }
    for (int c = 0; c < m.num_cells(); ++c) {
        const Vec2 g = m.centroid(c);
        const double fx = std::clamp((g.x() - x0) / hx, 0.0, n - 1.0), fy = std::clamp((g.y() - y0) / hy, 0.0, n - 1.0);
        const int i = std::min(static_cast<int>(fx), n - 2), j = std::min(static_cast<int>(fy), n - 2);
        const double u = fx - i, w = fy - j;
        for (int l = 0; l < 2; ++l) {
            const auto& L = lattice[l];
            hhat_[l][c] = (1 - u) * (1 - w) * L[j * n + i] + u * (1 - w) * L[j * n + i + 1] +
                          (1 - u) * w * L[(j + 1) * n + i] + u * w * L[(j + 1) * n + i + 1];
        }
    }
}

void MacroSolver::set_hhat(ConcentrationSide side, std::vector<Vec2> values) {
    if (static_cast<int>(values.size()) != mesh_->num_cells()) throw StateError("Ĥ field does not match the mesh");
    hhat_[static_cast<int>(side)] = std::move(values);
}

void MacroSolver::reaction_rates(const MacroState& s, ConcentrationSide side, VectorX& source, VectorX& sink) const {
    const int l = static_cast<int>(side), other = 1 - l;
    const VectorX& c = l == 0 ? s.c_a : s.c_s;
    const double growth = l == 0 ? physics_.growth_a : physics_.growth_s;
    const double capacity = l == 0 ? physics_.capacity_a : physics_.capacity_s;
    const double area = l == 0 ? physics_.area_a : physics_.area_s;
    const double lengths[2] = {physics_.length_z, physics_.length_as};
    source = growth * c;
    sink = (growth / capacity) * c;
    for (int k = 0; k < 2; ++k) {
        const double w = lengths[k] / area;
        const TransporterParams& own = physics_.transporters[l][k];
        const TransporterParams& opp = physics_.transporters[other][k];
        source += (w * (opp.k2 + opp.k3)) * s.theta_bound[other][k];
        sink += (w * own.k1 * physics_.density) * s.theta_free[l][k];
    }
}

void MacroSolver::advance_concentrations(MacroState& s) const {
    VectorX src_a, sink_a, src_s, sink_s;
    reaction_rates(s, ConcentrationSide::A, src_a, sink_a);
    reaction_rates(s, ConcentrationSide::S, src_s, sink_s);
    const VectorX a = transport_.step(s.c_a, physics_.A_a, hhat_[0], config_.dt, src_a, sink_a);
    const VectorX c = transport_.step(s.c_s, physics_.A_s, hhat_[1], config_.dt, src_s, sink_s);
    const VectorX& m = transport_.lumped_mass();
    last_source_ = physics_.area_a * m.dot(src_a - sink_a.cwiseProduct(a)) +
                   physics_.area_s * m.dot(src_s - sink_s.cwiseProduct(c));
    s.c_a = a;
    s.c_s = c;
}

void MacroSolver::advance_transporters(MacroState& s) const {
    const int n = mesh_->num_vertices();
    for (int l = 0; l < 2; ++l) {
        const VectorX& c = l == 0 ? s.c_a : s.c_s;
        for (int k = 0; k < 2; ++k) {
            TransporterContext ctx;
            ctx.rho_I = physics_.density;
            ctx.params = physics_.transporters[l][k];
            ctx.t = s.t;
            for (int i = 0; i < n; ++i) {
                ctx.c_I = std::max(c[i], 0.0);
                const TransporterState next = step_transporters({s.theta_free[l][k][i], s.theta_bound[l][k][i]}, ctx,
                                                                config_.dt, config_.scheme);
                s.theta_free[l][k][i] = next.free;
                s.theta_bound[l][k][i] = next.bound;
            }
        }
    }
}

void MacroSolver::step(MacroState& s) {
    solve_flow(s);
    if (s.step == 0 || (config_.refresh_every > 0 && s.step % config_.refresh_every == 0)) refresh_velocity(s);
    advance_concentrations(s);
    advance_transporters(s);
    s.t += config_.dt;
    ++s.step;
}

void MacroSolver::run(MacroState& s, const std::function<void(const MacroState&)>& emit) {
    failure_.reset();
    if (s.step == 0) solve_flow(s);
    if (emit) emit(s);
    const int steps = static_cast<int>(std::llround(config_.t_end / config_.dt));
    while (s.step < steps) {
        const MacroState before = s;
        try {
            step(s);
        } catch (const Error& e) {
            failure_ = std::make_unique<MacroState>(before);
            rethrow_at_step(e, before.step);
        }
        if (emit && (s.step % config_.output_every == 0 || s.step == steps)) {
            solve_flow(s);
            emit(s);
        }
    }
}

MassBudget MacroSolver::budget(const MacroState& s) const {
    const SimplicialMesh& m = *mesh_;
    MassBudget b;
    b.t = s.t;
    b.integral_a = transport_.integral(s.c_a);
    b.integral_s = transport_.integral(s.c_s);
    b.weighted_solute = physics_.area_a * b.integral_a + physics_.area_s * b.integral_s;
    const double lengths[2] = {physics_.length_z, physics_.length_as};
    const VectorX& mass = transport_.lumped_mass();
    for (int k = 0; k < 2; ++k) {
        b.transporters_a += lengths[k] * mass.dot(s.theta_free[0][k] + s.theta_bound[0][k]);
        b.transporters_s += lengths[k] * mass.dot(s.theta_free[1][k] + s.theta_bound[1][k]);
    }
    for (int e = 0; e < m.num_edges(); ++e)
        if (m.edges[e].cell[1] < 0 && s.darcy.flux.size() == m.num_edges()) b.boundary_flux += s.darcy.flux[e];
    b.min_c = std::min(s.c_a.minCoeff(), s.c_s.minCoeff());
    b.max_c = std::max(s.c_a.maxCoeff(), s.c_s.maxCoeff());
    double v2 = 0.0;
    if (s.darcy.flux.size() == m.num_edges())
        for (int c = 0; c < m.num_cells(); ++c) v2 += m.cell_area(c) * darcy_.cell_velocity(s.darcy, c).squaredNorm();
    b.velocity_norm = std::sqrt(v2);
    return b;
}

EffectiveVelocityModel darcy_velocity_model(const Mat2& K, const Vec2& M, double cutoff) {
    return [K, M, cutoff](CellSide, const Vec2& grad_p, double dc) {
        return velocity_cutoff(Vec2(-K * grad_p + M * dc), cutoff);
    };
}

}  // namespace plantflow
