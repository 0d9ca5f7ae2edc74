#pragma once

// Small dense complex linear algebra: Hermitian and generalized Hermitian
// eigenproblems, orthonormal null-space bases and PSD square roots.

#include <span>
#include <stdexcept>

#include "relaysec/channel.hpp"

namespace relaysec::linalg {

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HermitianEig {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors; // unitary, column i pairs with eigenvalues[i]
};

/// Eigendecomposition of the Hermitian part (A + A^H)/2 of a square matrix.
HermitianEig hermitian_eig(const CMatrix& a);

struct GeneralizedEigPair {
  double lambda = 0.0;
  CVector u; // unit norm
};

/// Largest lambda with A u = lambda B u, for Hermitian A and Hermitian
/// positive definite B. Uses the Cholesky reduction B = L L^H.
/// Throws LinalgError when B is not positive definite.
GeneralizedEigPair generalized_eig_max(const CMatrix& a, const CMatrix& b);

/// Orthonormal basis (M x (M - k)) of the vectors w with c^H w = 0 for every
/// input channel c. Each column's largest-magnitude entry is real positive.
/// Throws LinalgError when k >= M or the channels are linearly dependent.
CMatrix null_space_basis(std::span<const CVector> channels);

/// S with S S^H = X for Hermitian PSD X; eigenvalues down to
/// -1e-9 * ||X|| are clamped to zero, anything more negative throws.
CMatrix psd_sqrt(const CMatrix& x);

/// Frobenius-norm Hermitian residual ||A - A^H|| / max(1, ||A||).
double hermitian_defect(const CMatrix& a);

} // namespace relaysec::linalg
