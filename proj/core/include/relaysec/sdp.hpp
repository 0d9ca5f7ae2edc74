#pragma once

// Small dense complex semidefinite programming.
//
// Problems have the form
//
//   maximize   tr(C X) + c_s . s
//   subject to tr(A_i X) + a_i . s  {<=, >=, =}  b_i
//              X Hermitian PSD (n x n),  s >= 0
//
// where the nonnegative scalar block s is optional (scalar_dim = 0 by
// default). They are solved by an infeasible-start primal-dual
// interior-point method with the HKM search direction and Mehrotra
// predictor-corrector steps, working directly in complex arithmetic.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaysec/channel.hpp"

namespace relaysec::sdp {

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Constraint {
  CMatrix a;              // Hermitian, n x n
  RVector scalar_coeffs;  // length scalar_dim, or empty for all-zero
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

struct SdpProblem {
  Index dim = 0;
  CMatrix objective;       // C; empty means zero
  Index scalar_dim = 0;
  RVector scalar_objective; // c_s; empty means zero
  std::vector<Constraint> constraints;

  explicit SdpProblem(Index n = 0, Index scalars = 0) : dim(n), scalar_dim(scalars) {}

  void add(CMatrix a, Sense sense, double rhs, RVector scalar_coeffs = {});
  /// tr(E_mm X) <= bound, i.e. X_mm <= bound.
  void add_diagonal_bound(Index m, double bound);
  /// tr(X) <= bound.
  void add_trace_bound(double bound);

  /// Throws std::invalid_argument on dimension or Hermitian violations.
  void validate() const;
};

enum class Status { Optimal, Infeasible, NumericalFailure };

std::string to_string(Status s);

struct SdpSolution {
  Status status = Status::NumericalFailure;
  CMatrix x;        // valid when Optimal
  RVector scalars;  // valid when Optimal
  RVector dual;     // y, one entry per constraint (Optimal only)
  double objective = 0.0;
  /// max_i violation_i / (1 + |b_i| + |a_i . s|)
  double max_violation = 0.0;
  /// Optimal value of the phase-one problem (min over X of the largest
  /// relative violation); set when feasibility was examined. Positive values
  /// certify infeasibility.
  std::optional<double> infeasibility_margin;
  int iterations = 0;
  std::string message;
};

struct SolverOptions {
  /// Relative tolerance on primal/dual residuals and the duality gap.
  double tol = 1e-9;
  /// Relative constraint tolerance required of an Optimal solution.
  double feas_tol = 1e-7;
  int max_iterations = 120;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SdpSolution solve(const SdpProblem& p, const SolverOptions& opt = {});

struct FeasibilityResult {
  Status status = Status::NumericalFailure; // Optimal means feasible
  CMatrix x;
  RVector scalars;
  double margin = 0.0; // largest relative violation at the phase-one optimum
  int iterations = 0;
};

/// Phase-one feasibility check: minimizes the largest relative constraint
/// violation. Feasible iff that minimum is <= tol.
FeasibilityResult check_feasibility(const SdpProblem& p, double tol = 1e-7,
                                    const SolverOptions& opt = {});

/// True iff the constraint set is nonempty at tolerance `tol`.
/// Throws SolverError when the phase-one solve fails numerically.
bool feasible(const SdpProblem& p, double tol = 1e-7);

/// maximize (a0 + tr(A X)) / (b0 + tr(B X)) over the constraint set of an
/// SdpProblem (its objective is ignored), with b0 > 0 and B PSD. Solved as a
/// single SDP through the Charnes-Cooper change of variables.
struct FractionalProgram {
  double num_const = 0.0;
  CMatrix num;
  double den_const = 1.0;
  CMatrix den;
  SdpProblem constraints;
};

struct FractionalSolution {
  Status status = Status::NumericalFailure;
  CMatrix x;
  double value = 0.0; // ratio evaluated at x
  int iterations = 0;
  std::string message;
};

FractionalSolution solve_fractional(const FractionalProgram& fp, const SolverOptions& opt = {});

/// lambda_2 / lambda_1 of a PSD matrix (0 for rank <= 1 or a zero matrix).
double rank_ratio(const CMatrix& x);

inline constexpr double kDefaultRankRatioTol = 1e-6;

/// sqrt(lambda_1) u_1 when lambda_2 / lambda_1 <= ratio_tol, phase-fixed so
/// its largest-magnitude entry is real positive; otherwise empty.
std::optional<CVector> rank_one_extract(const CMatrix& x, double ratio_tol = kDefaultRankRatioTol);

struct RandomizationResult {
  bool found = false;
  CVector w;
  double rate = 0.0;
  int candidates = 0;
};

inline constexpr int kDefaultRandomizationSamples = 500;

/// Draws w_j = X^{1/2} xi_j with xi_j standard circular complex Gaussian,
/// scales each candidate so its tightest constraint is active and keeps the
/// one with the highest secrecy rate. Deterministic for a given seed.
///
/// When `basis` is non-empty, X lives in a reduced coordinate space and the
/// candidates are mapped to relay weights as w = basis * X^{1/2} xi.
RandomizationResult gaussian_randomization(const CMatrix& x, const DerivedChannel& dc,
                                           const PowerConstraint& pc,
                                           const std::vector<PrimaryUser>& users,
                                           int n_samples = kDefaultRandomizationSamples,
                                           std::uint64_t seed = 0,
                                           const CMatrix& basis = CMatrix());
RandomizationResult gaussian_randomization(const CMatrix& x, const DerivedChannel& dc,
                                           const PowerConstraint& pc, InterferenceLimit lim,
                                           int n_samples = kDefaultRandomizationSamples,
                                           std::uint64_t seed = 0);

} // namespace relaysec::sdp
