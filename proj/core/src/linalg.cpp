#include "relaysec/linalg.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace relaysec::linalg {

namespace {

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw LinalgError(std::string(what) + ": expected a non-empty square matrix, got " +
                      std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

// Rotate a column so its largest-magnitude entry is real and positive.
void fix_phase(Eigen::Ref<CVector> v) {
  Index best = 0;
  double mag = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    // Ties resolve to the first index; the 1e-12 margin keeps that stable
    // against rounding.
    if (std::abs(v[i]) > mag * (1.0 + 1e-12)) {
      mag = std::abs(v[i]);
      best = i;
    }
  }
  if (mag > 0.0) v *= std::conj(v[best]) / mag;
}

} // namespace

double hermitian_defect(const CMatrix& a) {
  return (a - a.adjoint()).norm() / std::max(1.0, a.norm());
}

HermitianEig hermitian_eig(const CMatrix& a) {
  require_square(a, "hermitian_eig");
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw LinalgError("hermitian_eig: eigen iteration did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

GeneralizedEigPair generalized_eig_max(const CMatrix& a, const CMatrix& b) {
  require_square(a, "generalized_eig_max");
  require_square(b, "generalized_eig_max");
  if (a.rows() != b.rows()) throw LinalgError("generalized_eig_max: dimension mismatch");

  const CMatrix bs = 0.5 * (b + b.adjoint());
  const RVector bev = hermitian_eig(bs).eigenvalues;
  const double bnorm = std::max(std::abs(bev[0]), std::abs(bev[bev.size() - 1]));
  if (!(bev[0] > 1e-12 * bnorm) || bnorm == 0.0) {
    throw LinalgError("generalized_eig_max: B is not positive definite");
  }
  Eigen::LLT<CMatrix> llt(bs);
  if (llt.info() != Eigen::Success) {
    throw LinalgError("generalized_eig_max: Cholesky factorization of B failed");
  }
  const auto l = llt.matrixL();
  // C = L^{-1} A L^{-H}
  CMatrix c = l.solve(0.5 * (a + a.adjoint()));
  c = l.solve(c.adjoint()).adjoint();
  const HermitianEig eig = hermitian_eig(c);
  const Index top = eig.eigenvalues.size() - 1;
  CVector u = llt.matrixU().solve(eig.eigenvectors.col(top));
  u.normalize();
  fix_phase(u);
  return {eig.eigenvalues[top], u};
}

CMatrix null_space_basis(std::span<const CVector> channels) {
  const Index k = static_cast<Index>(channels.size());
  if (k == 0) throw LinalgError("null_space_basis: no channels given");
  const Index m = channels.front().size();
  if (k >= m) {
    throw LinalgError("null_space_basis: " + std::to_string(k) + " channels leave no null space with " +
                      std::to_string(m) + " relays (need more relays than nulled channels)");
  }
  CMatrix rows(k, m);
  for (Index i = 0; i < k; ++i) {
    if (channels[i].size() != m) throw LinalgError("null_space_basis: channel length mismatch");
    rows.row(i) = channels[i].adjoint();
  }
  Eigen::JacobiSVD<CMatrix> svd(rows, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  if (sv[0] == 0.0 || sv[k - 1] <= 1e-10 * sv[0]) {
    throw LinalgError("null_space_basis: channels are linearly dependent");
  }
  CMatrix basis = svd.matrixV().rightCols(m - k);
  for (Index j = 0; j < basis.cols(); ++j) fix_phase(basis.col(j));
  return basis;
}

CMatrix psd_sqrt(const CMatrix& x) {
  require_square(x, "psd_sqrt");
  const HermitianEig eig = hermitian_eig(x);
  const Index n = x.rows();
  const double scale = std::max(std::abs(eig.eigenvalues[0]), std::abs(eig.eigenvalues[n - 1]));
  if (eig.eigenvalues[0] < -1e-9 * scale) {
    throw LinalgError("psd_sqrt: matrix is indefinite (smallest eigenvalue " +
                      std::to_string(eig.eigenvalues[0]) + ")");
  }
  const RVector root = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors * root.cast<Complex>().asDiagonal();
}

} // namespace relaysec::linalg
