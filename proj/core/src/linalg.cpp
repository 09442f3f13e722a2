#include "helmtg/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace helmtg {

ComplexVector spmv(const SparseComplexMatrix& A, const ComplexVector& x) {
    if (A.cols() != x.size()) throw std::invalid_argument("spmv: size mismatch");
    return A * x;
}

SparseFactorization::SparseFactorization(const SparseComplexMatrix& A)
    : lu_(std::make_shared<Eigen::SparseLU<SparseComplexMatrix>>()) {
    SparseComplexMatrix Ac = A;
    Ac.makeCompressed();
    lu_->analyzePattern(Ac);
    lu_->factorize(Ac);
    if (lu_->info() != Eigen::Success) {
        throw std::runtime_error("sparse_lu: factorization failed (singular matrix), info=" +
                                 std::to_string(static_cast<int>(lu_->info())) +
                                 " msg=" + lu_->lastErrorMessage());
    }
}

ComplexVector SparseFactorization::solve(const ComplexVector& b) const {
    return lu_->solve(b);
}

std::vector<Complex> dense_eigenvalues(const DenseComplexMatrix& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("dense_eigenvalues: square matrix required");
    Eigen::ComplexEigenSolver<DenseComplexMatrix> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense_eigenvalues: QR iteration failed");
    std::vector<Complex> out(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

double spectral_radius(const DenseComplexMatrix& M) {
    double r = 0.0;
    for (const Complex& ev : dense_eigenvalues(M)) r = std::max(r, std::abs(ev));
    return r;
}

void write_triplets(std::ostream& os, const SparseComplexMatrix& A) {
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseComplexMatrix::InnerIterator it(A, k); it; ++it) {
            os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' '
               << it.value().imag() << '\n';
        }
    }
}

} // namespace helmtg
