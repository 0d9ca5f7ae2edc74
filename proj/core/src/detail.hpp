#pragma once

// Helpers shared by the optimal and null-space solvers.

#include <cstdint>
#include <vector>

#include "relaysec/channel.hpp"
#include "relaysec/sdp.hpp"

namespace relaysec::detail {

inline double trace_product(const CMatrix& a, const CMatrix& x) {
  return (a.transpose().cwiseProduct(x)).sum().real();
}

/// Power rows for X = w w^H, or for X = v v^H with w = basis v when `basis`
/// is non-empty (orthonormal columns, so tr(X) = ||w||^2).
void add_power_rows(sdp::SdpProblem& p, const PowerConstraint& pc, const CMatrix& basis = CMatrix());

struct Extraction {
  CVector w;
  double rank_ratio = 0.0;
  bool randomized = false;
};

/// Rank-one extraction with Gaussian randomization fallback, followed by a
/// downscale onto the feasible set.
Extraction extract_weights(const CMatrix& x, const CMatrix& basis, const DerivedChannel& dc,
                           const PowerConstraint& pc, const std::vector<PrimaryUser>& users,
                           double ratio_tol, int samples, std::uint64_t seed);

/// True when gamma = 0 and Dk + Ps hk hk^H is positive definite, which pins
/// every feasible weight vector to zero.
bool forces_zero(const PrimaryUser& pu, double source_power);

SolveResult zero_result(const DerivedChannel& dc);

} // namespace relaysec::detail
