#include "tsgc/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cassert>
#include <cmath>

#include "tsgc/common.hpp"

namespace tsgc {

SpectralBasis smallest_eigenpairs(const NormalizedLaplacian& laplacian, int m_e) {
  const long n = laplacian.matrix.rows();
  if (m_e < 1 || m_e > n) {
    throw std::invalid_argument("eigenpair count must lie in [1, n], got " + std::to_string(m_e));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian.matrix);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigensolver failed to converge");
  }

  SpectralBasis basis;
  basis.eigenvalues = solver.eigenvalues().head(m_e);  // already ascending
  basis.eigenvectors = solver.eigenvectors().leftCols(m_e);

  // Deterministic sign: make the largest-magnitude entry of each column positive.
  for (long j = 0; j < m_e; ++j) {
    long arg_max = 0;
    double best = -1.0;
    for (long i = 0; i < n; ++i) {
      const double mag = std::abs(basis.eigenvectors(i, j));
      if (mag > best) {
        best = mag;
        arg_max = i;
      }
    }
    if (basis.eigenvectors(arg_max, j) < 0.0) basis.eigenvectors.col(j) *= -1.0;
  }

#ifndef NDEBUG
  assert((basis.eigenvectors.transpose() * basis.eigenvectors -
          Eigen::MatrixXd::Identity(m_e, m_e))
             .norm() <= 1e-8);
  for (long j = 0; j < m_e; ++j) {
    assert(basis.eigenvalues(j) >= -1e-8 && basis.eigenvalues(j) <= 2.0 + 1e-8);
    assert((laplacian.matrix * basis.eigenvectors.col(j) -
            basis.eigenvalues(j) * basis.eigenvectors.col(j))
               .norm() <= 1e-6);
  }
#endif
  return basis;
}

}  // namespace tsgc
