#include "plantflow/linalg.hpp"

#include "plantflow/errors.hpp"

#ifdef PLANTFLOW_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

namespace plantflow {

struct SparseDirectSolver::Impl {
    SparseMatrix matrix;  // the UMFPACK wrapper references the factorized matrix
#ifdef PLANTFLOW_HAVE_UMFPACK
    Eigen::UmfPackLU<SparseMatrix> lu;
#else
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
};

SparseDirectSolver::SparseDirectSolver() : impl_(std::make_unique<Impl>()) {}
SparseDirectSolver::~SparseDirectSolver() = default;
SparseDirectSolver::SparseDirectSolver(SparseDirectSolver&&) noexcept = default;
SparseDirectSolver& SparseDirectSolver::operator=(SparseDirectSolver&&) noexcept = default;

void SparseDirectSolver::factorize(const SparseMatrix& matrix) {
    if (matrix.rows() != matrix.cols()) throw SolveError("factorize: matrix is not square");
    impl_->matrix = matrix;
    impl_->matrix.makeCompressed();
#ifdef PLANTFLOW_HAVE_UMFPACK
    // Saddle-point blocks have a structurally symmetric pattern; the default
    // unsymmetric strategy produces heavy fill on large meshes.
    impl_->lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
#endif
    impl_->lu.compute(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success) {
        factorized_ = false;
        throw SolveError("sparse LU factorization failed (singular or ill-posed system of size " +
                         std::to_string(matrix.rows()) + ")");
    }
    factorized_ = true;
    rows_ = matrix.rows();
}

VectorX SparseDirectSolver::solve(const VectorX& rhs) const {
    if (!factorized_) throw SolveError("solve called before factorize");
    VectorX x = impl_->lu.solve(rhs);
    if (impl_->lu.info() != Eigen::Success || !x.allFinite())
        throw SolveError("sparse LU back-substitution failed");
    return x;
}

std::string SparseDirectSolver::backend() {
#ifdef PLANTFLOW_HAVE_UMFPACK
    return "umfpack";
#else
    return "eigen-sparselu";
#endif
}

double relative_residual(const SparseMatrix& a, const VectorX& x, const VectorX& b) {
    const double nb = b.norm();
    const double r = (a * x - b).norm();
    return nb > 1e-300 ? r / nb : r;
}

}  // namespace plantflow
