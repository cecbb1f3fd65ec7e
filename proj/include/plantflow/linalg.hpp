#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <string>

namespace plantflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Sparse LU for general (indefinite, saddle-point) systems. Backed by
/// UMFPACK when available. One instance owns one factorization.
class SparseDirectSolver {
public:
    SparseDirectSolver();
    ~SparseDirectSolver();
    SparseDirectSolver(SparseDirectSolver&&) noexcept;
    SparseDirectSolver& operator=(SparseDirectSolver&&) noexcept;
    SparseDirectSolver(const SparseDirectSolver&) = delete;
    SparseDirectSolver& operator=(const SparseDirectSolver&) = delete;

    /// Throws SolveError when the matrix is numerically singular.
    void factorize(const SparseMatrix& matrix);
    VectorX solve(const VectorX& rhs) const;
    bool factorized() const { return factorized_; }
    Eigen::Index rows() const { return rows_; }
    static std::string backend();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    bool factorized_ = false;
    Eigen::Index rows_ = 0;
};

/// ‖A x − b‖ / max(‖b‖, tiny)
double relative_residual(const SparseMatrix& a, const VectorX& x, const VectorX& b);

}  // namespace plantflow
