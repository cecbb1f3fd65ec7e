#include "plantflow/cell_problems.hpp"
#include "plantflow/errors.hpp"
#include "plantflow/membrane_kinetics.hpp"

#include <map>
#include <numeric>

namespace plantflow {

namespace {

std::array<Vec2, 3> p1_gradients(const SimplicialMesh& m, int c, double& area) {
    const auto& cell = m.cells[c];
    const Vec2& p0 = m.vertices[cell[0]];
    const Vec2& p1 = m.vertices[cell[1]];
    const Vec2& p2 = m.vertices[cell[2]];
    area = 0.5 * cross(p1 - p0, p2 - p0);
    return {perp(p2 - p1) / (2.0 * area), perp(p0 - p2) / (2.0 * area), perp(p1 - p0) / (2.0 * area)};
}

int find(std::vector<int>& parent, int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

}  // namespace

std::string to_string(CellSide s) {
    switch (s) {
        case CellSide::A: return "a";
        case CellSide::S: return "s";
        case CellSide::Full: return "full";
    }
    return "?";
}

bool in_side(CellSide side, Subdomain tag) {
    switch (side) {
        case CellSide::A: return tag == Subdomain::AW || tag == Subdomain::AS;
        case CellSide::S: return tag == Subdomain::Z || tag == Subdomain::AS;
        case CellSide::Full: return true;
    }
    return false;
}

ScalarCellSolver::ScalarCellSolver(const SimplicialMesh& mesh, CellSide side, CellTensorField diffusion)
    : mesh_(&mesh), side_(side) {
    const SimplicialMesh& m = mesh;
    const int nc = m.num_cells();
    cell_diffusion_.assign(nc, Mat2::Zero());
    std::vector<int> parent(nc);
    std::iota(parent.begin(), parent.end(), 0);
    int first = -1;
    for (int c = 0; c < nc; ++c) {
        if (!contains(c)) continue;
        if (first < 0) first = c;
        const Mat2 d = diffusion(c);
        Eigen::SelfAdjointEigenSolver<Mat2> es(d);
        if (std::abs(d(0, 1) - d(1, 0)) > 1e-12 * d.norm() || !(es.eigenvalues().minCoeff() > 0.0))
            throw ParameterError("diffusion tensor D_" + to_string(side) + " must be symmetric positive definite");
        cell_diffusion_[c] = d;
        measure_ += m.cell_area(c);
    }
    if (first < 0) throw GeometryError("cell problem domain Y_" + to_string(side) + " is empty");

    for (const auto& e : m.edges) {
        int a = e.cell[0], b = e.cell[1];
        if (e.tag == FacetTag::Periodic) b = m.edges[e.partner].cell[0];
        if (a < 0 || b < 0 || !contains(a) || !contains(b)) continue;
        parent[find(parent, a)] = find(parent, b);
    }
    const int root = find(parent, first);
    for (int c = 0; c < nc; ++c)
        if (contains(c) && find(parent, c) != root)
            throw GeometryError("cell problem domain Y_" + to_string(side) + " is not connected");

    const std::vector<int> rep = m.periodic_representatives();
    std::map<int, int> class_dof;
    dof_of_vertex_.assign(m.num_vertices(), -1);
    for (int c = 0; c < nc; ++c) {
        if (!contains(c)) continue;
        for (int v : m.cells[c]) {
            auto [it, inserted] = class_dof.emplace(rep[v], static_cast<int>(class_dof.size()));
            dof_of_vertex_[v] = it->second;
        }
    }
    n_dofs_ = static_cast<int>(class_dof.size());

    std::vector<Triplet> t;
    mass_ = VectorX::Zero(n_dofs_);
    for (int c = 0; c < nc; ++c) {
        if (!contains(c)) continue;
        double area = 0.0;
        const auto g = p1_gradients(m, c, area);
        for (int i = 0; i < 3; ++i) {
            const int di = dof_of_vertex_[m.cells[c][i]];
            mass_[di] += area / 3.0;
            for (int j = 0; j < 3; ++j)
                t.emplace_back(di, dof_of_vertex_[m.cells[c][j]], area * g[i].dot(cell_diffusion_[c] * g[j]));
        }
    }
    for (int i = 0; i < n_dofs_; ++i) {
        t.emplace_back(n_dofs_, i, mass_[i]);
        t.emplace_back(i, n_dofs_, mass_[i]);
    }
    matrix_.resize(n_dofs_ + 1, n_dofs_ + 1);
    matrix_.setFromTriplets(t.begin(), t.end());
    solver_ = std::make_unique<SparseDirectSolver>();
    solver_->factorize(matrix_);
}

ScalarCellSolution ScalarCellSolver::solve(const VectorX& rhs, int index, double defect) const {
    VectorX b = VectorX::Zero(n_dofs_ + 1);
    b.head(n_dofs_) = rhs;
    VectorX x = solver_->solve(b);
    x += solver_->solve(b - matrix_ * x);
    ScalarCellSolution s;
    s.side = side_;
    s.index = index;
    s.residual = relative_residual(matrix_, x, b);
    s.compatibility_defect = defect;
    if (!(s.residual < 1e-8)) throw SolveError("scalar cell problem: relative residual " + std::to_string(s.residual));
    s.values = VectorX::Zero(mesh_->num_vertices());
    for (int v = 0; v < mesh_->num_vertices(); ++v)
        if (dof_of_vertex_[v] >= 0) s.values[v] = x[dof_of_vertex_[v]];
    return s;
}

ScalarCellSolution ScalarCellSolver::solve_diffusion(int i) const {
    if (i < 0 || i > 1) throw ParameterError("diffusion cell problem index must be 0 or 1");
    const SimplicialMesh& m = *mesh_;
    VectorX rhs = VectorX::Zero(n_dofs_);
    for (int c = 0; c < m.num_cells(); ++c) {
        if (!contains(c)) continue;
        double area = 0.0;
        const auto g = p1_gradients(m, c, area);
        const Vec2 f = cell_diffusion_[c].col(i);
        for (int k = 0; k < 3; ++k) rhs[dof_of_vertex_[m.cells[c][k]]] -= area * f.dot(g[k]);
    }
    const double defect = std::abs(rhs.sum()) / std::max(rhs.norm(), 1e-300);
    return solve(rhs, i, defect);
}

ScalarCellSolution ScalarCellSolver::solve_convection(const std::vector<Vec2>& cell_velocity, double bound) const {
    const SimplicialMesh& m = *mesh_;
    if (static_cast<int>(cell_velocity.size()) != m.num_cells())
        throw StateError("convection cell problem: velocity field does not match the mesh");
    VectorX rhs = VectorX::Zero(n_dofs_);
    for (int c = 0; c < m.num_cells(); ++c) {
        if (!contains(c)) continue;
        double area = 0.0;
        const auto g = p1_gradients(m, c, area);
        const Vec2 h = velocity_cutoff(cell_velocity[c], bound);
        for (int k = 0; k < 3; ++k) rhs[dof_of_vertex_[m.cells[c][k]]] += area * h.dot(g[k]);
    }
    const double norm = rhs.norm();
    const double defect = norm > 0.0 ? std::abs(rhs.sum()) / (std::sqrt(static_cast<double>(n_dofs_)) * norm) : 0.0;
    if (defect > 1e-3)
        throw CompatibilityError("convection cell problem: compatibility defect " + std::to_string(defect) +
                                 " exceeds 1e-3");
    rhs.array() -= rhs.sum() / n_dofs_;
    return solve(rhs, -1, defect);
}

Vec2 ScalarCellSolver::mean_flux(const ScalarCellSolution& u) const {
    const SimplicialMesh& m = *mesh_;
    Vec2 s = Vec2::Zero();
    for (int c = 0; c < m.num_cells(); ++c) {
        if (!contains(c)) continue;
        double area = 0.0;
        const auto g = p1_gradients(m, c, area);
        Vec2 grad = Vec2::Zero();
        for (int k = 0; k < 3; ++k) grad += u.values[m.cells[c][k]] * g[k];
        s += area * cell_diffusion_[c] * grad;
    }
    return s / measure_;
}

Mat2 ScalarCellSolver::mean_diffusion() const {
    Mat2 s = Mat2::Zero();
    for (int c = 0; c < mesh_->num_cells(); ++c)
        if (contains(c)) s += mesh_->cell_area(c) * cell_diffusion_[c];
    return s / measure_;
}

Mat2 ScalarCellSolver::harmonic_diffusion() const {
    Mat2 s = Mat2::Zero();
    for (int c = 0; c < mesh_->num_cells(); ++c)
        if (contains(c)) s += mesh_->cell_area(c) * cell_diffusion_[c].inverse();
    return (s / measure_).inverse();
}

double ScalarCellSolver::periodicity_defect(const ScalarCellSolution& u) const {
    const SimplicialMesh& m = *mesh_;
    double worst = 0.0;
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (dof_of_vertex_[v] < 0) continue;
        for (int w : {m.periodic_x.empty() ? -1 : m.periodic_x[v], m.periodic_y.empty() ? -1 : m.periodic_y[v]})
            if (w >= 0 && dof_of_vertex_[w] >= 0) worst = std::max(worst, std::abs(u.values[v] - u.values[w]));
    }
    return worst;
}

double ScalarCellSolver::mean(const ScalarCellSolution& u) const {
    const SimplicialMesh& m = *mesh_;
    double s = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        if (!contains(c)) continue;
        const auto& cell = m.cells[c];
        s += m.cell_area(c) * (u.values[cell[0]] + u.values[cell[1]] + u.values[cell[2]]) / 3.0;
    }
    return s / measure_;
}

ScalarCellSolution solve_diffusion_cell(const SimplicialMesh& mesh, CellSide side, int i, const CellTensorField& d) {
    return ScalarCellSolver(mesh, side, d).solve_diffusion(i);
}

ScalarCellSolution solve_convection_cell(const SimplicialMesh& mesh, CellSide side, const std::vector<Vec2>& velocity,
                                         const CellTensorField& d, double bound) {
    return ScalarCellSolver(mesh, side, d).solve_convection(velocity, bound);
}

}  // namespace plantflow
