#include "fem.hpp"
#include "plantflow/errors.hpp"
#include "plantflow/macro_solver.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>

namespace plantflow {

using detail::Triangle;
using detail::triangle;

MedianDualTransport::MedianDualTransport(const SimplicialMesh& mesh) : mesh_(&mesh) {
    const SimplicialMesh& m = mesh;
    mass_ = VectorX::Zero(m.num_vertices());
    face_normal_.resize(m.num_cells());
    for (int c = 0; c < m.num_cells(); ++c) {
        const Triangle t = triangle(m, c);
        for (int k = 0; k < 3; ++k) mass_[m.cells[c][k]] += t.area / 3.0;
        for (int k = 0; k < 3; ++k) {
            const auto& ed = m.edges[m.cell_edges[c][k]];
            const Vec2 along = m.vertices[ed.v[1]] - m.vertices[ed.v[0]];
            Vec2 n = perp(t.centroid() - t.midpoint(k));
            if (n.dot(along) < 0.0) n = -n;
            face_normal_[c][k] = n;
        }
    }
}

double MedianDualTransport::max_stable_dt(const std::vector<Vec2>& vel) const {
    const SimplicialMesh& m = *mesh_;
    VectorX out = VectorX::Zero(m.num_vertices());
    for (int c = 0; c < m.num_cells(); ++c)
        for (int k = 0; k < 3; ++k) {
            const auto& ed = m.edges[m.cell_edges[c][k]];
            const double beta = vel[c].dot(face_normal_[c][k]);
            out[ed.v[0]] += std::max(beta, 0.0);
            out[ed.v[1]] += std::max(-beta, 0.0);
        }
    double dt = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m.num_vertices(); ++i)
        if (out[i] > 0.0) dt = std::min(dt, mass_[i] / out[i]);
    return dt;
}

VectorX MedianDualTransport::advection(const VectorX& c, const std::vector<Vec2>& vel) const {
    const SimplicialMesh& m = *mesh_;
    VectorX adv = VectorX::Zero(m.num_vertices());
    for (int cell = 0; cell < m.num_cells(); ++cell)
        for (int k = 0; k < 3; ++k) {
            const auto& ed = m.edges[m.cell_edges[cell][k]];
            const double beta = vel[cell].dot(face_normal_[cell][k]);
            const double f = std::max(beta, 0.0) * c[ed.v[0]] - std::max(-beta, 0.0) * c[ed.v[1]];
            adv[ed.v[0]] += f;
            adv[ed.v[1]] -= f;
        }
    return adv;
}

VectorX MedianDualTransport::step(const VectorX& c, const Mat2& A, const std::vector<Vec2>& vel, double dt,
                                  const VectorX& source, const VectorX& sink) const {
    const SimplicialMesh& m = *mesh_;
    const int n = m.num_vertices();
    if (!(dt > 0.0)) throw StepError("transport step requires dt > 0");
    if (c.size() != n || source.size() != n || sink.size() != n || static_cast<int>(vel.size()) != m.num_cells())
        throw StateError("transport step: field sizes do not match the mesh");
    const double dt_max = max_stable_dt(vel);
    if (dt > dt_max * (1.0 + 1e-12))
        throw StepError("advection CFL condition violated: dt = " + std::to_string(dt) + " exceeds " +
                        std::to_string(dt_max) + "; reduce the time step");

    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(9) * m.num_cells() + n);
    for (int cell = 0; cell < m.num_cells(); ++cell) {
        const Triangle tri = triangle(m, cell);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t.emplace_back(m.cells[cell][i], m.cells[cell][j], tri.area * tri.grad[i].dot(A * tri.grad[j]));
    }
    for (int i = 0; i < n; ++i) {
        if (sink[i] < 0.0) throw SchemeError("transport step: negative sink coefficient");
        t.emplace_back(i, i, mass_[i] * (1.0 / dt + sink[i]));
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    const VectorX rhs = mass_.cwiseProduct(c / dt + source) - advection(c, vel);

    Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw SolveError("transport step: factorization failed");
    VectorX x = ldlt.solve(rhs);
    x += ldlt.solve(rhs - a * x);
    if (!x.allFinite()) throw SolveError("transport step: non-finite solution");
    const double lowest = x.minCoeff();
    if (lowest < -1e-12)
        throw SchemeError("transport step produced a negative concentration " + std::to_string(lowest));
    return x;
}

}  // namespace plantflow
