#include "plantflow/flow_system.hpp"

#include "plantflow/errors.hpp"
#include "fem.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace plantflow {

namespace {

using detail::rt0_mass;
using detail::Triangle;
using detail::triangle;

bool is_darcy(Subdomain s) { return s == Subdomain::AW || s == Subdomain::AS; }
bool is_interface(FacetTag t) { return t == FacetTag::GammaZ || t == FacetTag::GammaAS; }

// Gradients of the six P2 basis functions at barycentric point l.
std::array<Vec2, 6> p2_gradients(const Triangle& t, const std::array<double, 3>& l) {
    std::array<Vec2, 6> g;
    for (int k = 0; k < 3; ++k) {
        g[k] = (4.0 * l[k] - 1.0) * t.grad[k];
        const int a = (k + 1) % 3, b = (k + 2) % 3;
        g[3 + k] = 4.0 * (l[a] * t.grad[b] + l[b] * t.grad[a]);
    }
    return g;
}

std::array<double, 6> p2_values(const std::array<double, 3>& l) {
    std::array<double, 6> v;
    for (int k = 0; k < 3; ++k) {
        v[k] = l[k] * (2.0 * l[k] - 1.0);
        v[3 + k] = 4.0 * l[(k + 1) % 3] * l[(k + 2) % 3];
    }
    return v;
}

const std::array<std::array<double, 3>, 3> kMidpoints = {{{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}}};

// 2η ∫ S(φ_i e_a) : S(φ_j e_b), index 2i + a.
Eigen::Matrix<double, 12, 12> p2_strain_stiffness(const Triangle& t, double eta) {
    Eigen::Matrix<double, 12, 12> k = Eigen::Matrix<double, 12, 12>::Zero();
    for (const auto& l : kMidpoints) {
        const auto g = p2_gradients(t, l);
        const double w = t.area / 3.0 * eta;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                const double gg = g[i].dot(g[j]);
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) k(2 * i + a, 2 * j + b) += w * ((a == b ? gg : 0.0) + g[i][b] * g[j][a]);
            }
    }
    return k;
}

// ∫_T ∂_a φ_i, index 2i + a.
Eigen::Matrix<double, 12, 1> p2_divergence(const Triangle& t) {
    Eigen::Matrix<double, 12, 1> d;
    for (int k = 0; k < 3; ++k) {
        const Vec2 gv = t.area / 3.0 * t.grad[k];
        const Vec2 ge = -4.0 * t.area / 3.0 * t.grad[k];
        d(2 * k) = gv.x();
        d(2 * k + 1) = gv.y();
        d(2 * (3 + k)) = ge.x();
        d(2 * (3 + k) + 1) = ge.y();
    }
    return d;
}

}  // namespace

double edge_sign(const SimplicialMesh& mesh, int c, int e) { return mesh.edges[e].cell[0] == c ? 1.0 : -1.0; }

FlowSystem::~FlowSystem() = default;
FlowSystem::FlowSystem(FlowSystem&&) noexcept = default;
FlowSystem& FlowSystem::operator=(FlowSystem&&) noexcept = default;

FlowSystem::FlowSystem(const SimplicialMesh& mesh, const FlowCoefficients& coeffs, std::vector<double> exterior_velocity)
    : mesh_(&mesh), coeffs_(coeffs), exterior_velocity_(std::move(exterior_velocity)) {
    if (!(coeffs_.viscosity > 0.0)) throw ParameterError("viscosity must be positive");
    for (const Mat2* k : {&coeffs_.k_aw, &coeffs_.k_ap, &coeffs_.k_sp})
        if (!(k->determinant() > 0.0) || !(k->trace() > 0.0) || std::abs((*k)(0, 1) - (*k)(1, 0)) > 1e-14)
            throw ParameterError("permeability tensors must be symmetric positive definite");
    if (coeffs_.resistance_z < 0.0 || coeffs_.resistance_as < 0.0)
        throw ParameterError("interface resistance must be non-negative");
    assemble();
}

void FlowSystem::assemble() {
    const SimplicialMesh& m = *mesh_;
    const int nv = m.num_vertices(), ne = m.num_edges(), nc = m.num_cells();

    // P2 nodes on symplast cells.
    node_vertex_.assign(nv, -1);
    node_edge_.assign(ne, -1);
    n_nodes_ = 0;
    for (int c = 0; c < nc; ++c) {
        if (m.cell_tags[c] != Subdomain::Z) continue;
        for (int k = 0; k < 3; ++k) {
            if (node_vertex_[m.cells[c][k]] < 0) node_vertex_[m.cells[c][k]] = n_nodes_++;
        }
    }
    for (int c = 0; c < nc; ++c) {
        if (m.cell_tags[c] != Subdomain::Z) continue;
        for (int k = 0; k < 3; ++k) {
            const int e = m.cell_edges[c][k];
            const auto& ed = m.edges[e];
            if (ed.cell[1] < 0) throw GeometryError("symplast cells may not touch the boundary of the domain");
            if (node_edge_[e] < 0) node_edge_[e] = n_nodes_++;
        }
    }
    node_normal_.assign(n_nodes_, Vec2::Zero());
    for (int e = 0; e < ne; ++e) {
        const auto& ed = m.edges[e];
        if (!is_interface(ed.tag)) continue;
        node_normal_[node_edge_[e]] = ed.normal;
        for (int v : ed.v) node_normal_[node_vertex_[v]] += ed.normal;
    }
    for (auto& n : node_normal_)
        if (n.squaredNorm() > 0.0) n.normalize();

    int next = 0;
    node_dof_.assign(n_nodes_, -1);
    for (int i = 0; i < n_nodes_; ++i) {
        node_dof_[i] = next;
        next += node_normal_[i].squaredNorm() > 0.0 ? 1 : 2;
    }

    // Flux dofs. Fixed (prescribed) dofs are numbered after n_total_ below,
    // so record them as -(k + 2) for now.
    a_dof_.assign(ne, -1);
    sp_dof_.assign(ne, -1);
    a_sign_.assign(ne, 1.0);
    sp_sign_.assign(ne, 1.0);
    fixed_value_.clear();
    auto tag_of = [&](int c) { return c < 0 ? Subdomain::Macro : m.cell_tags[c]; };
    for (int e = 0; e < ne; ++e) {
        const auto& ed = m.edges[e];
        const Subdomain t0 = tag_of(ed.cell[0]);
        const Subdomain t1 = tag_of(ed.cell[1]);
        if (ed.tag == FacetTag::Periodic) {
            if (!is_darcy(t0)) throw GeometryError("symplast cells may not touch the periodic boundary");
            const int master = std::min(e, ed.partner);
            if (e == master) {
                a_dof_[e] = next++;
                if (t0 == Subdomain::AS && tag_of(m.edges[ed.partner].cell[0]) == Subdomain::AS) sp_dof_[e] = next++;
            }
            continue;
        }
        if (ed.tag == FacetTag::Exterior) {
            if (!is_darcy(t0)) throw GeometryError("symplast cells may not touch the exterior boundary");
            double vd = 0.0;
            if (ed.boundary_id >= 0 && ed.boundary_id < static_cast<int>(exterior_velocity_.size()))
                vd = exterior_velocity_[ed.boundary_id];
            a_dof_[e] = -static_cast<int>(fixed_value_.size()) - 2;
            fixed_value_.push_back(vd * ed.length);
            continue;
        }
        const bool z0 = t0 == Subdomain::Z, z1 = t1 == Subdomain::Z;
        if (z0 && z1) continue;
        if (z0 != z1) {
            if (!is_interface(ed.tag)) throw MeshError("edge between symplast and apoplast is not tagged as interface");
            a_dof_[e] = next++;
            if (t1 == Subdomain::AS) sp_dof_[e] = next++;
            continue;
        }
        a_dof_[e] = next++;
        if (t0 == Subdomain::AS && t1 == Subdomain::AS) sp_dof_[e] = next++;
    }
    // Periodic slaves share the master's dof with the opposite sign.
    for (int e = 0; e < ne; ++e) {
        const auto& ed = m.edges[e];
        if (ed.tag != FacetTag::Periodic || e == std::min(e, ed.partner)) continue;
        a_dof_[e] = a_dof_[ed.partner];
        a_sign_[e] = -1.0;
        sp_dof_[e] = sp_dof_[ed.partner];
        sp_sign_[e] = -1.0;
    }
    n_velocity_ = next;
    n_pressure_begin_ = next;

    pz_dof_.assign(nc, -1);
    pa_dof_.assign(nc, -1);
    psp_dof_.assign(nc, -1);
    for (int c = 0; c < nc; ++c) {
        const Subdomain t = m.cell_tags[c];
        if (t == Subdomain::Z) pz_dof_[c] = next++;
        else if (is_darcy(t)) pa_dof_[c] = next++;
        else throw MeshError("flow system requires unit-cell subdomain tags");
    }
    for (int c = 0; c < nc; ++c)
        if (m.cell_tags[c] == Subdomain::AS) psp_dof_[c] = next++;
    lambda_dof_.assign(ne, -1);
    for (int e = 0; e < ne; ++e)
        if (is_interface(m.edges[e].tag)) lambda_dof_[e] = next++;
    gauge_dof_ = next++;
    n_total_ = next;
    n_free_ = next;
    const int n_fixed = static_cast<int>(fixed_value_.size());
    for (int e = 0; e < ne; ++e)
        if (a_dof_[e] <= -2) a_dof_[e] = n_total_ + (-a_dof_[e] - 2);

    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(60) * nc);
    for (int c = 0; c < nc; ++c) {
        if (m.cell_tags[c] == Subdomain::Z) {
            add_z_cell(c, trip);
        } else {
            add_darcy_cell(c, false, trip);
            if (m.cell_tags[c] == Subdomain::AS) add_darcy_cell(c, true, trip);
        }
    }
    for (int e = 0; e < ne; ++e) {
        const auto& ed = m.edges[e];
        if (!is_interface(ed.tag)) continue;
        const double kappa = ed.tag == FacetTag::GammaZ ? coeffs_.resistance_z : coeffs_.resistance_as;
        trip.emplace_back(a_dof_[e], a_dof_[e], kappa / ed.length);
        const int lam = lambda_dof_[e];
        auto add_sym = [&](int i, double v) {
            trip.emplace_back(lam, i, v);
            trip.emplace_back(i, lam, v);
        };
        for (int v : ed.v) {
            const int node = node_vertex_[v];
            add_sym(node_dof_[node], ed.length / 6.0 * node_normal_[node].dot(ed.normal));
        }
        add_sym(node_dof_[node_edge_[e]], 4.0 * ed.length / 6.0);
        add_sym(a_dof_[e], -1.0);
        if (sp_dof_[e] >= 0) add_sym(sp_dof_[e], -1.0);
    }

    const int n_ext = n_total_ + n_fixed;
    SparseMatrix full(n_ext, n_ext);
    full.setFromTriplets(trip.begin(), trip.end());
    matrix_ = full.topLeftCorner(n_total_, n_total_);
    matrix_.makeCompressed();
    lift_ = VectorX::Zero(n_total_);
    if (n_fixed > 0) {
        VectorX fixed = Eigen::Map<const VectorX>(fixed_value_.data(), n_fixed);
        lift_ = -(full.topRightCorner(n_total_, n_fixed) * fixed);
    }
    solver_.reset();
}

void FlowSystem::add_z_cell(int c, std::vector<Triplet>& trip) {
    const SimplicialMesh& m = *mesh_;
    const Triangle t = triangle(m, c);
    const auto k = p2_strain_stiffness(t, coeffs_.viscosity);
    const auto d = p2_divergence(t);

    // Local component (node i, comp a) -> (dof, coefficient).
    std::array<int, 12> dof{};
    std::array<double, 12> coef{};
    for (int i = 0; i < 6; ++i) {
        const int node = i < 3 ? node_vertex_[m.cells[c][i]] : node_edge_[m.cell_edges[c][i - 3]];
        const Vec2& n = node_normal_[node];
        for (int a = 0; a < 2; ++a) {
            if (n.squaredNorm() > 0.0) {
                dof[2 * i + a] = node_dof_[node];
                coef[2 * i + a] = n[a];
            } else {
                dof[2 * i + a] = node_dof_[node] + a;
                coef[2 * i + a] = 1.0;
            }
        }
    }
    const int p = pz_dof_[c];
    for (int r = 0; r < 12; ++r) {
        if (coef[r] == 0.0) continue;
        for (int s = 0; s < 12; ++s) {
            if (coef[s] == 0.0) continue;
            trip.emplace_back(dof[r], dof[s], coef[r] * coef[s] * k(r, s));
        }
        trip.emplace_back(p, dof[r], -coef[r] * d(r));
        trip.emplace_back(dof[r], p, -coef[r] * d(r));
    }
    trip.emplace_back(gauge_dof_, p, t.area);
    trip.emplace_back(p, gauge_dof_, t.area);
}

void FlowSystem::add_darcy_cell(int c, bool sp, std::vector<Triplet>& trip) {
    const SimplicialMesh& m = *mesh_;
    const Triangle t = triangle(m, c);
    const Mat2& kmat = sp ? coeffs_.k_sp : (m.cell_tags[c] == Subdomain::AS ? coeffs_.k_ap : coeffs_.k_aw);
    const Eigen::Matrix3d mass = rt0_mass(t, kmat.inverse());
    const auto& dofs = sp ? sp_dof_ : a_dof_;
    const auto& signs = sp ? sp_sign_ : a_sign_;
    std::array<int, 3> dof{};
    std::array<double, 3> coef{};
    for (int k = 0; k < 3; ++k) {
        const int e = m.cell_edges[c][k];
        dof[k] = dofs[e];
        coef[k] = edge_sign(m, c, e) * signs[e];
    }
    const int p = sp ? psp_dof_[c] : pa_dof_[c];
    for (int k = 0; k < 3; ++k) {
        if (dof[k] < 0) continue;
        for (int l = 0; l < 3; ++l)
            if (dof[l] >= 0) trip.emplace_back(dof[k], dof[l], coef[k] * coef[l] * mass(k, l));
        trip.emplace_back(p, dof[k], -coef[k]);
        trip.emplace_back(dof[k], p, -coef[k]);
    }
    trip.emplace_back(gauge_dof_, p, t.area);
    trip.emplace_back(p, gauge_dof_, t.area);
}

VectorX FlowSystem::body_force(const Vec2& f) const {
    const SimplicialMesh& m = *mesh_;
    VectorX b = VectorX::Zero(n_total_);
    for (int c = 0; c < m.num_cells(); ++c) {
        const Triangle t = triangle(m, c);
        if (m.cell_tags[c] == Subdomain::Z) {
            for (int k = 0; k < 3; ++k) {
                const int node = node_edge_[m.cell_edges[c][k]];
                const Vec2& n = node_normal_[node];
                const double w = t.area / 3.0;
                if (n.squaredNorm() > 0.0) {
                    b[node_dof_[node]] += w * f.dot(n);
                } else {
                    b[node_dof_[node]] += w * f.x();
                    b[node_dof_[node] + 1] += w * f.y();
                }
            }
            continue;
        }
        const Vec2 centroid = (t.p[0] + t.p[1] + t.p[2]) / 3.0;
        for (int pass = 0; pass < 2; ++pass) {
            const bool sp = pass == 1;
            if (sp && m.cell_tags[c] != Subdomain::AS) continue;
            const auto& dofs = sp ? sp_dof_ : a_dof_;
            const auto& signs = sp ? sp_sign_ : a_sign_;
            for (int k = 0; k < 3; ++k) {
                const int e = m.cell_edges[c][k];
                if (dofs[e] < 0 || dofs[e] >= n_total_) continue;
                b[dofs[e]] += edge_sign(m, c, e) * signs[e] * 0.5 * (centroid - t.p[k]).dot(f);
            }
        }
    }
    return b;
}

VectorX FlowSystem::interface_forcing(const std::function<double(int edge, const Vec2& x)>& g) const {
    const SimplicialMesh& m = *mesh_;
    VectorX b = VectorX::Zero(n_total_);
    for (int e = 0; e < m.num_edges(); ++e) {
        const auto& ed = m.edges[e];
        if (!is_interface(ed.tag)) continue;
        const Vec2& pa = m.vertices[ed.v[0]];
        const Vec2& pb = m.vertices[ed.v[1]];
        const double avg = (g(e, pa) + 4.0 * g(e, 0.5 * (pa + pb)) + g(e, pb)) / 6.0;
        b[a_dof_[e]] -= avg;
    }
    return b;
}

VectorX FlowSystem::solve_raw(const VectorX& rhs) const {
    if (rhs.size() != n_total_) throw SolveError("flow system: right-hand side has the wrong size");
    if (!solver_) {
        auto s = std::make_unique<SparseDirectSolver>();
        s->factorize(matrix_);
        solver_ = std::move(s);
    }
    const VectorX b = rhs + lift_;
    VectorX x = solver_->solve(b);
    // One step of iterative refinement.
    const VectorX r = b - matrix_ * x;
    x += solver_->solve(r);
    return x;
}

FlowField FlowSystem::solve(const VectorX& rhs) const {
    VectorX x = solve_raw(rhs);
    FlowField f = decode(x);
    f.residual = relative_residual(matrix_, x, rhs + lift_);
    return f;
}

FlowField FlowSystem::decode(const VectorX& x) const {
    const SimplicialMesh& m = *mesh_;
    FlowField f;
    f.node_velocity.resize(n_nodes_);
    for (int i = 0; i < n_nodes_; ++i) {
        const Vec2& n = node_normal_[i];
        f.node_velocity[i] = n.squaredNorm() > 0.0 ? Vec2(x[node_dof_[i]] * n) : Vec2(x[node_dof_[i]], x[node_dof_[i] + 1]);
    }
    const int ne = m.num_edges(), nc = m.num_cells();
    f.flux_a = VectorX::Zero(ne);
    f.flux_sp = VectorX::Zero(ne);
    f.interface_stress = VectorX::Zero(ne);
    for (int e = 0; e < ne; ++e) {
        if (a_dof_[e] >= n_total_) f.flux_a[e] = fixed_value_[a_dof_[e] - n_total_];
        else if (a_dof_[e] >= 0) f.flux_a[e] = a_sign_[e] * x[a_dof_[e]];
        if (sp_dof_[e] >= 0) f.flux_sp[e] = sp_sign_[e] * x[sp_dof_[e]];
        if (lambda_dof_[e] >= 0) f.interface_stress[e] = x[lambda_dof_[e]];
    }
    f.pressure_z = VectorX::Zero(nc);
    f.pressure_a = VectorX::Zero(nc);
    f.pressure_sp = VectorX::Zero(nc);
    for (int c = 0; c < nc; ++c) {
        if (pz_dof_[c] >= 0) f.pressure_z[c] = x[pz_dof_[c]];
        if (pa_dof_[c] >= 0) f.pressure_a[c] = x[pa_dof_[c]];
        if (psp_dof_[c] >= 0) f.pressure_sp[c] = x[psp_dof_[c]];
    }
    return f;
}

VectorX FlowSystem::encode(const FlowField& f) const {
    const SimplicialMesh& m = *mesh_;
    VectorX x = VectorX::Zero(n_total_);
    for (int i = 0; i < n_nodes_; ++i) {
        const Vec2& n = node_normal_[i];
        if (n.squaredNorm() > 0.0) {
            x[node_dof_[i]] = f.node_velocity[i].dot(n);
        } else {
            x[node_dof_[i]] = f.node_velocity[i].x();
            x[node_dof_[i] + 1] = f.node_velocity[i].y();
        }
    }
    for (int e = 0; e < m.num_edges(); ++e) {
        if (a_dof_[e] >= 0 && a_dof_[e] < n_total_) x[a_dof_[e]] = a_sign_[e] * f.flux_a[e];
        if (sp_dof_[e] >= 0) x[sp_dof_[e]] = sp_sign_[e] * f.flux_sp[e];
        if (lambda_dof_[e] >= 0) x[lambda_dof_[e]] = f.interface_stress[e];
    }
    for (int c = 0; c < m.num_cells(); ++c) {
        if (pz_dof_[c] >= 0) x[pz_dof_[c]] = f.pressure_z[c];
        if (pa_dof_[c] >= 0) x[pa_dof_[c]] = f.pressure_a[c];
        if (psp_dof_[c] >= 0) x[psp_dof_[c]] = f.pressure_sp[c];
    }
    return x;
}

Vec2 FlowSystem::z_integral(const FlowField& f, int c) const {
    const SimplicialMesh& m = *mesh_;
    if (m.cell_tags[c] != Subdomain::Z) return Vec2::Zero();
    Vec2 s = Vec2::Zero();
    for (int k = 0; k < 3; ++k) s += f.node_velocity[node_edge_[m.cell_edges[c][k]]];
    return s * m.cell_area(c) / 3.0;
}

Vec2 FlowSystem::darcy_integral(const VectorX& flux, int c) const {
    const SimplicialMesh& m = *mesh_;
    const Triangle t = triangle(m, c);
    const Vec2 centroid = (t.p[0] + t.p[1] + t.p[2]) / 3.0;
    Vec2 s = Vec2::Zero();
    for (int k = 0; k < 3; ++k) {
        const int e = m.cell_edges[c][k];
        s += edge_sign(m, c, e) * flux[e] * 0.5 * (centroid - t.p[k]);
    }
    return s;
}

Vec2 FlowSystem::darcy_velocity(const VectorX& flux, int c, const Vec2& x) const {
    const SimplicialMesh& m = *mesh_;
    const Triangle t = triangle(m, c);
    Vec2 s = Vec2::Zero();
    for (int k = 0; k < 3; ++k) {
        const int e = m.cell_edges[c][k];
        s += edge_sign(m, c, e) * flux[e] * (x - t.p[k]) / (2.0 * t.area);
    }
    return s;
}

Vec2 FlowSystem::z_velocity(const FlowField& f, int c, const Vec2& x) const {
    const SimplicialMesh& m = *mesh_;
    const Triangle t = triangle(m, c);
    std::array<double, 3> l;
    for (int k = 0; k < 3; ++k) l[k] = 1.0 / 3.0 + t.grad[k].dot(x - (t.p[0] + t.p[1] + t.p[2]) / 3.0);
    const auto phi = p2_values(l);
    Vec2 s = Vec2::Zero();
    for (int i = 0; i < 6; ++i) {
        const int node = i < 3 ? node_vertex_[m.cells[c][i]] : node_edge_[m.cell_edges[c][i - 3]];
        s += phi[i] * f.node_velocity[node];
    }
    return s;
}

double FlowSystem::max_cell_divergence(const FlowField& f) const {
    const SimplicialMesh& m = *mesh_;
    double worst = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        if (m.cell_tags[c] == Subdomain::Z) {
            const auto d = p2_divergence(triangle(m, c));
            double s = 0.0;
            for (int i = 0; i < 6; ++i) {
                const int node = i < 3 ? node_vertex_[m.cells[c][i]] : node_edge_[m.cell_edges[c][i - 3]];
                s += d(2 * i) * f.node_velocity[node].x() + d(2 * i + 1) * f.node_velocity[node].y();
            }
            worst = std::max(worst, std::abs(s));
            continue;
        }
        double sa = 0.0, ssp = 0.0;
        for (int k = 0; k < 3; ++k) {
            const int e = m.cell_edges[c][k];
            sa += edge_sign(m, c, e) * f.flux_a[e];
            ssp += edge_sign(m, c, e) * f.flux_sp[e];
        }
        worst = std::max(worst, std::abs(sa));
        if (m.cell_tags[c] == Subdomain::AS) worst = std::max(worst, std::abs(ssp));
    }
    return worst;
}

double FlowSystem::interface_flux_z(const FlowField& f) const {
    const SimplicialMesh& m = *mesh_;
    double s = 0.0;
    for (int e = 0; e < m.num_edges(); ++e) {
        const auto& ed = m.edges[e];
        if (!is_interface(ed.tag)) continue;
        const Vec2& u0 = f.node_velocity[node_vertex_[ed.v[0]]];
        const Vec2& u1 = f.node_velocity[node_vertex_[ed.v[1]]];
        const Vec2& um = f.node_velocity[node_edge_[e]];
        s += ed.length / 6.0 * (u0 + 4.0 * um + u1).dot(ed.normal);
    }
    return s;
}

double FlowSystem::interface_flux_a(const FlowField& f) const {
    const SimplicialMesh& m = *mesh_;
    double s = 0.0;
    for (int e = 0; e < m.num_edges(); ++e)
        if (is_interface(m.edges[e].tag)) s += f.flux_a[e];
    return s;
}

double FlowSystem::max_interface_defect(const FlowField& f) const {
    const SimplicialMesh& m = *mesh_;
    double worst = 0.0;
    for (int e = 0; e < m.num_edges(); ++e) {
        const auto& ed = m.edges[e];
        if (!is_interface(ed.tag)) continue;
        const Vec2& u0 = f.node_velocity[node_vertex_[ed.v[0]]];
        const Vec2& u1 = f.node_velocity[node_vertex_[ed.v[1]]];
        const Vec2& um = f.node_velocity[node_edge_[e]];
        const double z = ed.length / 6.0 * (u0 + 4.0 * um + u1).dot(ed.normal);
        worst = std::max(worst, std::abs(z - f.flux_a[e] - f.flux_sp[e]));
    }
    return worst;
}

double FlowSystem::energy(const FlowField& f) const {
    const SimplicialMesh& m = *mesh_;
    double s = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        const Triangle t = triangle(m, c);
        if (m.cell_tags[c] == Subdomain::Z) {
            const auto k = p2_strain_stiffness(t, coeffs_.viscosity);
            Eigen::Matrix<double, 12, 1> u;
            for (int i = 0; i < 6; ++i) {
                const int node = i < 3 ? node_vertex_[m.cells[c][i]] : node_edge_[m.cell_edges[c][i - 3]];
                u(2 * i) = f.node_velocity[node].x();
                u(2 * i + 1) = f.node_velocity[node].y();
            }
            s += u.dot(k * u);
            continue;
        }
        for (int pass = 0; pass < 2; ++pass) {
            const bool sp = pass == 1;
            if (sp && m.cell_tags[c] != Subdomain::AS) continue;
            const Mat2& kmat = sp ? coeffs_.k_sp : (m.cell_tags[c] == Subdomain::AS ? coeffs_.k_ap : coeffs_.k_aw);
            const Eigen::Matrix3d mass = rt0_mass(t, kmat.inverse());
            Eigen::Vector3d q;
            for (int k = 0; k < 3; ++k) {
                const int e = m.cell_edges[c][k];
                q(k) = edge_sign(m, c, e) * (sp ? f.flux_sp[e] : f.flux_a[e]);
            }
            s += q.dot(mass * q);
        }
    }
    for (int e = 0; e < m.num_edges(); ++e) {
        const auto& ed = m.edges[e];
        if (!is_interface(ed.tag)) continue;
        const double kappa = ed.tag == FacetTag::GammaZ ? coeffs_.resistance_z : coeffs_.resistance_as;
        s += kappa * f.flux_a[e] * f.flux_a[e] / ed.length;
    }
    return s;
}

double FlowSystem::inf_sup_estimate() const {
    const int nu = n_velocity_;
    const int nq = n_total_ - 1 - n_pressure_begin_;
    if (nu * nq > 40'000'000) throw SolveError("inf-sup estimate requested on a mesh that is too fine");
    const MatrixX dense = MatrixX(matrix_);
    VectorX du = dense.diagonal().head(nu).cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    VectorX dq(nq);
    const SimplicialMesh& m = *mesh_;
    for (int c = 0; c < m.num_cells(); ++c) {
        for (int d : {pz_dof_[c], pa_dof_[c], psp_dof_[c]})
            if (d >= 0) dq[d - n_pressure_begin_] = 1.0 / std::sqrt(m.cell_area(c));
    }
    for (int e = 0; e < m.num_edges(); ++e)
        if (lambda_dof_[e] >= 0) dq[lambda_dof_[e] - n_pressure_begin_] = 1.0 / std::sqrt(m.edges[e].length);
    const MatrixX b = dq.asDiagonal() * dense.block(n_pressure_begin_, 0, nq, nu) * du.asDiagonal();
    Eigen::BDCSVD<MatrixX> svd(b);
    const VectorX sv = svd.singularValues();  // descending
    if (sv.size() < 2) return sv.size() ? sv[0] : 0.0;
    return sv[sv.size() - 2];
}

}  // namespace plantflow
