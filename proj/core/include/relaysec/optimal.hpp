#pragma once

// Optimal relay beamforming through semidefinite relaxation.
//
// With t1 = (N0 + w^H Qg w) / (N0 + w^H Qz w) and
//      t2 = (N0 + w^H Dz w) / (N0 + w^H Dh w)
// the secrecy rate is log2(t1 t2). Relaxing X = w w^H gives, for fixed
// (t1, t2), a convex feasibility problem; the product is maximized by an
// outer search over t1 and an inner maximization over t2.

#include <cstdint>
#include <vector>

#include "relaysec/channel.hpp"
#include "relaysec/sdp.hpp"

namespace relaysec {

enum class InnerSearch {
  /// For fixed t1, max t2 solved exactly as one linear-fractional SDP.
  Fractional,
  /// For fixed t1, bisection on t2 using the feasibility oracle.
  Bisection,
};

struct SearchParams {
  int t1_grid_points = 64;
  double t2_bisect_tol = 1e-4;
  double t_bounds_safety = 1.05;
  int max_feasibility_calls = 20000;
  InnerSearch inner = InnerSearch::Fractional;
  /// Golden-section steps spent refining t1 around the best grid point.
  int refine_iterations = 30;
  double rank_ratio_tol = sdp::kDefaultRankRatioTol;
  int randomization_samples = sdp::kDefaultRandomizationSamples;
  sdp::SolverOptions sdp;

  void validate() const;
};

/// Constraint set of the relaxed problem at fixed (t1, t2):
///   tr(X (Qg - t1 Qz)) >= N0 (t1 - 1)
///   tr(X (Dz - t2 Dh)) >= N0 (t2 - 1)
///   tr(X Qk_i) <= gamma_i        for each primary user with a finite limit
///   X_mm <= p_m and/or tr(X) <= PT
sdp::SdpProblem build_feasibility_problem(const DerivedChannel& dc, double t1, double t2,
                                          const PowerConstraint& pc,
                                          const std::vector<PrimaryUser>& users);

struct TBounds {
  double t1_max = 1.0;
  double t2_max = 1.0;
};

/// Finite upper bounds (times `safety`) on t1 and t2 over all weight vectors
/// within the power budget.
TBounds t_bounds(const DerivedChannel& dc, const PowerConstraint& pc, double safety = 1.05);

/// Secrecy-rate-maximizing weights with the embedded primary user limited by
/// `lim`. Throws sdp::SolverError when the relaxation cannot be solved.
SolveResult solve_optimal(const DerivedChannel& dc, const PowerConstraint& pc,
                          InterferenceLimit lim, const SearchParams& sp = {},
                          std::uint64_t seed = 0);

/// As solve_optimal with one interference constraint per entry of `users`
/// (the DerivedChannel's own hk/dk are ignored).
SolveResult solve_optimal_multi_pu(const DerivedChannel& dc, const PowerConstraint& pc,
                                   const std::vector<PrimaryUser>& users,
                                   const SearchParams& sp = {}, std::uint64_t seed = 0);

} // namespace relaysec
