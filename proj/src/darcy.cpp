#include "fem.hpp"
#include "plantflow/errors.hpp"
#include "plantflow/flow_system.hpp"
#include "plantflow/macro_solver.hpp"

#include <cmath>

namespace plantflow {

using detail::Triangle;
using detail::triangle;

DarcySolver::DarcySolver(const SimplicialMesh& mesh, const Mat2& K, std::vector<double> v_d)
    : mesh_(&mesh), K_(K), v_d_(std::move(v_d)) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(K);
    if (!K.allFinite() || std::abs(K(0, 1) - K(1, 0)) > 1e-12 * K.norm() || !(es.eigenvalues().minCoeff() > 0.0))
        throw ParameterError("Darcy permeability K must be symmetric positive definite");
    const SimplicialMesh& m = mesh;
    const int ne = m.num_edges(), nc = m.num_cells();
    dof_.assign(ne, -1);
    fixed_.assign(ne, 0.0);
    n_flux_ = 0;
    double net = 0.0, scale = 0.0;
    for (int e = 0; e < ne; ++e) {
        const auto& ed = m.edges[e];
        if (ed.tag == FacetTag::Periodic) throw GeometryError("macroscopic Darcy solver does not support periodic meshes");
        if (ed.cell[1] >= 0) {
            dof_[e] = n_flux_++;
            continue;
        }
        const double vd = ed.boundary_id >= 0 && ed.boundary_id < static_cast<int>(v_d_.size()) ? v_d_[ed.boundary_id] : 0.0;
        fixed_[e] = vd * ed.length;
        net += fixed_[e];
        scale += std::abs(fixed_[e]);
    }
    if (std::abs(net) > 1e-12 * std::max(1.0, scale))
        throw CompatibilityError("boundary normal velocity v_D has non-zero net flux " + std::to_string(net));

    const int gauge = n_flux_ + nc;
    n_total_ = gauge + 1;
    const Mat2 kinv = K.inverse();
    std::vector<Triplet> t;
    lift_ = VectorX::Zero(n_total_);
    for (int c = 0; c < nc; ++c) {
        const Triangle tri = triangle(m, c);
        const Eigen::Matrix3d mass = detail::rt0_mass(tri, kinv);
        const int p = n_flux_ + c;
        for (int k = 0; k < 3; ++k) {
            const int ek = m.cell_edges[c][k];
            const double sk = edge_sign(m, c, ek);
            if (dof_[ek] < 0) {
                lift_[p] += sk * fixed_[ek];
                continue;
            }
            for (int l = 0; l < 3; ++l) {
                const int el = m.cell_edges[c][l];
                const double sl = edge_sign(m, c, el);
                if (dof_[el] >= 0) t.emplace_back(dof_[ek], dof_[el], sk * sl * mass(k, l));
                else lift_[dof_[ek]] -= sk * sl * mass(k, l) * fixed_[el];
            }
            t.emplace_back(p, dof_[ek], -sk);
            t.emplace_back(dof_[ek], p, -sk);
        }
        t.emplace_back(gauge, p, tri.area);
        t.emplace_back(p, gauge, tri.area);
    }
    matrix_.resize(n_total_, n_total_);
    matrix_.setFromTriplets(t.begin(), t.end());
    solver_ = std::make_unique<SparseDirectSolver>();
    solver_->factorize(matrix_);
}

DarcySolution DarcySolver::solve(const Vec2& M, const VectorX& dc, const std::function<double(const Vec2&)>& source) const {
    const SimplicialMesh& m = *mesh_;
    if (dc.size() != m.num_vertices()) throw StateError("Darcy solve: concentration field does not match the mesh");
    const int nc = m.num_cells();
    const Mat2 kinv = K_.inverse();
    VectorX b = lift_;
    VectorX cell_source = VectorX::Zero(nc);
    for (int c = 0; c < nc; ++c) {
        const Triangle tri = triangle(m, c);
        for (int k = 0; k < 3; ++k) {
            const int e = m.cell_edges[c][k];
            if (dof_[e] < 0) continue;
            const double sk = edge_sign(m, c, e);
            double s = 0.0;
            for (int q = 0; q < 3; ++q) {
                const double dq = 0.5 * (dc[m.cells[c][(q + 1) % 3]] + dc[m.cells[c][(q + 2) % 3]]);
                const Vec2 x = tri.midpoint(q);
                s += tri.area / 3.0 * (kinv * (M * dq)).dot(x - tri.p[k]) / (2.0 * tri.area);
            }
            b[dof_[e]] += sk * s;
        }
        if (source) {
            double f = 0.0;
            for (const auto& qp : detail::dunavant5()) f += qp.w * source(detail::point(tri, qp.l));
            cell_source[c] = f * tri.area;
            b[n_flux_ + c] -= cell_source[c];
        }
    }
    VectorX x = solver_->solve(b);
    x += solver_->solve(b - matrix_ * x);
    DarcySolution s;
    s.residual = relative_residual(matrix_, x, b);
    if (!(s.residual < 1e-8)) throw SolveError("Darcy solve: relative residual " + std::to_string(s.residual));
    s.flux = VectorX::Zero(m.num_edges());
    for (int e = 0; e < m.num_edges(); ++e) s.flux[e] = dof_[e] >= 0 ? x[dof_[e]] : fixed_[e];
    s.pressure = x.segment(n_flux_, nc);
    for (int c = 0; c < nc; ++c) {
        double div = 0.0;
        for (int k = 0; k < 3; ++k) div += edge_sign(m, c, m.cell_edges[c][k]) * s.flux[m.cell_edges[c][k]];
        s.max_divergence = std::max(s.max_divergence, std::abs(div - cell_source[c]));
    }
    return s;
}

Vec2 DarcySolver::velocity(const DarcySolution& s, int c, const Vec2& x) const {
    const SimplicialMesh& m = *mesh_;
    const Triangle tri = triangle(m, c);
    Vec2 v = Vec2::Zero();
    for (int k = 0; k < 3; ++k) {
        const int e = m.cell_edges[c][k];
        v += edge_sign(m, c, e) * s.flux[e] * (x - tri.p[k]) / (2.0 * tri.area);
    }
    return v;
}

Vec2 DarcySolver::cell_velocity(const DarcySolution& s, int c) const { return velocity(s, c, mesh_->centroid(c)); }

VectorX DarcySolver::cell_averages(const SimplicialMesh& mesh, const std::function<double(const Vec2&)>& f) {
    VectorX out(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Triangle tri = triangle(mesh, c);
        double s = 0.0;
        for (const auto& qp : detail::dunavant5()) s += qp.w * f(detail::point(tri, qp.l));
        out[c] = s;
    }
    return out;
}

DarcySolution solve_darcy(const SimplicialMesh& mesh, const Mat2& K, const Vec2& M, const VectorX& c_s,
                          const VectorX& c_a, const std::vector<double>& v_d) {
    if (c_s.size() != c_a.size()) throw StateError("solve_darcy: concentration fields differ in size");
    return DarcySolver(mesh, K, v_d).solve(M, c_s - c_a);
}

}  // namespace plantflow
