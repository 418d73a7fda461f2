#pragma once

// Smallest eigenpairs of the normalized Laplacian for the reduced
// Allen-Cahn solver.

#include <Eigen/Dense>

#include "tsgc/graph.hpp"

namespace tsgc {

struct SpectralBasis {
  Eigen::VectorXd eigenvalues;   // ascending, within [0, 2] up to round-off
  Eigen::MatrixXd eigenvectors;  // n x m_e, orthonormal columns

  std::size_t count() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// The m_e algebraically smallest eigenpairs. Eigenvector signs are fixed so
/// the largest-magnitude entry of each column is positive (first such entry
/// on magnitude ties). Dense full-spectrum solve; fine for the n <= 2000
/// datasets this toolkit targets.
SpectralBasis smallest_eigenpairs(const NormalizedLaplacian& laplacian, int m_e);

}  // namespace tsgc
