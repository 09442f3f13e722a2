#ifndef HELMTG_LINALG_HPP
#define HELMTG_LINALG_HPP

#include <complex>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace helmtg {

using Complex = std::complex<double>;
using SparseComplexMatrix = Eigen::SparseMatrix<Complex>;
using DenseComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// y = A x
ComplexVector spmv(const SparseComplexMatrix& A, const ComplexVector& x);

/// Direct LU factorization of a sparse complex matrix (fill-reducing ordering).
/// Immutable after construction; concurrent solves are permitted.
class SparseFactorization {
  public:
    explicit SparseFactorization(const SparseComplexMatrix& A);
    ComplexVector solve(const ComplexVector& b) const;
    Eigen::Index rows() const { return lu_->rows(); }

  private:
    std::shared_ptr<Eigen::SparseLU<SparseComplexMatrix>> lu_;
};

inline SparseFactorization sparse_lu(const SparseComplexMatrix& A) { return SparseFactorization(A); }
inline ComplexVector lu_solve(const SparseFactorization& F, const ComplexVector& b) { return F.solve(b); }

/// All eigenvalues of a dense complex matrix (Schur-based); n <= 256.
std::vector<Complex> dense_eigenvalues(const DenseComplexMatrix& M);

/// max |lambda| over the spectrum
double spectral_radius(const DenseComplexMatrix& M);

/// Debug export, one "row col re im" line per stored entry.
void write_triplets(std::ostream& os, const SparseComplexMatrix& A);

} // namespace helmtg

#endif
