#include "relaysec/optimal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "detail.hpp"
#include "relaysec/linalg.hpp"

namespace relaysec {

namespace detail {

void add_power_rows(sdp::SdpProblem& p, const PowerConstraint& pc, const CMatrix& basis) {
  if (pc.has_total()) p.add_trace_bound(pc.total);
  if (!pc.has_individual()) return;
  for (Index m = 0; m < pc.per_relay.size(); ++m) {
    if (basis.size() == 0) {
      p.add_diagonal_bound(m, pc.per_relay[m]);
    } else {
      // |e_m^H H v|^2 = tr(r r^H X) with r = H^H e_m
      const CVector r = basis.row(m).adjoint();
      p.add(r * r.adjoint(), sdp::Sense::LessEqual, pc.per_relay[m]);
    }
  }
}

Extraction extract_weights(const CMatrix& x, const CMatrix& basis, const DerivedChannel& dc,
                           const PowerConstraint& pc, const std::vector<PrimaryUser>& users,
                           double ratio_tol, int samples, std::uint64_t seed) {
  Extraction out;
  out.rank_ratio = sdp::rank_ratio(x);
  if (auto v = sdp::rank_one_extract(x, ratio_tol)) {
    out.w = basis.size() > 0 ? CVector(basis * *v) : *v;
  } else {
    const auto rnd = sdp::gaussian_randomization(x, dc, pc, users, samples, seed, basis);
    out.randomized = true;
    out.w = rnd.found ? rnd.w : CVector::Zero(dc.relays());
  }
  out.w *= max_feasible_scale(out.w, dc.source_power, pc, users);
  return out;
}

bool forces_zero(const PrimaryUser& pu, double source_power) {
  if (!pu.limit.active() || pu.limit.gamma > 0.0) return false;
  CMatrix qk = source_power * pu.hk * pu.hk.adjoint();
  qk.diagonal() += pu.dk.cast<Complex>();
  const RVector ev = linalg::hermitian_eig(qk).eigenvalues;
  return ev[0] > 1e-12 * std::max(ev[ev.size() - 1], 1e-300);
}

SolveResult zero_result(const DerivedChannel& dc) {
  SolveResult r;
  r.w = CVector::Zero(dc.relays());
  r.rank_ratio = 0.0;
  r.relaxation_bound = 0.0;
  evaluate_into(r, dc);
  return r;
}

} // namespace detail

namespace {

using detail::trace_product;

void add_interference_rows(sdp::SdpProblem& p, const std::vector<PrimaryUser>& users, double ps) {
  for (const auto& pu : users) {
    if (!pu.limit.active()) continue;
    CMatrix qk = ps * pu.hk * pu.hk.adjoint();
    qk.diagonal() += pu.dk.cast<Complex>();
    p.add(std::move(qk), sdp::Sense::LessEqual, pu.limit.gamma);
  }
}

} // namespace

void SearchParams::validate() const {
  if (t1_grid_points < 8) throw std::invalid_argument("SearchParams: need at least 8 t1 grid points");
  if (!(t2_bisect_tol > 0.0)) throw std::invalid_argument("SearchParams: bisection tolerance must be positive");
  if (!(t_bounds_safety >= 1.0)) throw std::invalid_argument("SearchParams: bound safety factor must be >= 1");
  if (max_feasibility_calls < 1) throw std::invalid_argument("SearchParams: feasibility call budget must be positive");
  if (refine_iterations < 0) throw std::invalid_argument("SearchParams: refine iterations must be >= 0");
  if (randomization_samples < 1) throw std::invalid_argument("SearchParams: need at least one randomization sample");
}

sdp::SdpProblem build_feasibility_problem(const DerivedChannel& dc, double t1, double t2,
                                          const PowerConstraint& pc,
                                          const std::vector<PrimaryUser>& users) {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("build_feasibility_problem: t1, t2 must be positive");
  const Index n = dc.relays();
  const double n0 = dc.dest_noise;
  sdp::SdpProblem p(n);
  p.add(dc.signal_form_dest() - t1 * dc.signal_form_eve(), sdp::Sense::GreaterEqual, n0 * (t1 - 1.0));
  p.add(dc.Dz() - t2 * dc.Dh(), sdp::Sense::GreaterEqual, n0 * (t2 - 1.0));
  add_interference_rows(p, users, dc.source_power);
  detail::add_power_rows(p, pc);
  return p;
}

TBounds t_bounds(const DerivedChannel& dc, const PowerConstraint& pc, double safety) {
  const double p = pc.max_total_power();
  const double n0 = dc.dest_noise;
  // w^H Qg w <= (Ps ||hg||^2 + max Dh) ||w||^2 and w^H Dz w <= tr(Dz) ||w||^2
  const double dh_max = dc.dh.size() > 0 ? dc.dh.maxCoeff() : 0.0;
  TBounds b;
  b.t1_max = safety * (1.0 + (dc.source_power * dc.hg.squaredNorm() + dh_max) * p / n0);
  b.t2_max = safety * (1.0 + dc.dz.sum() * p / n0);
  return b;
}

SolveResult solve_optimal(const DerivedChannel& dc, const PowerConstraint& pc,
                          InterferenceLimit lim, const SearchParams& sp, std::uint64_t seed) {
  return solve_optimal_multi_pu(dc, pc, {primary_user(dc, lim)}, sp, seed);
}

SolveResult solve_optimal_multi_pu(const DerivedChannel& dc, const PowerConstraint& pc,
                                   const std::vector<PrimaryUser>& users,
                                   const SearchParams& sp, std::uint64_t seed) {
  sp.validate();
  const Index n = dc.relays();
  pc.validate(n);
  for (const auto& pu : users) {
    if (pu.hk.size() != n || pu.dk.size() != n) throw std::invalid_argument("solve_optimal: primary user dimension mismatch");
    if (pu.limit.gamma < 0.0) throw std::invalid_argument("solve_optimal: interference limit must be nonnegative");
  }
  for (const auto& pu : users) {
    if (detail::forces_zero(pu, dc.source_power)) return detail::zero_result(dc);
  }

  const double n0 = dc.dest_noise;
  const CMatrix qg = dc.signal_form_dest();
  const CMatrix qz = dc.signal_form_eve();
  const CMatrix dh = dc.Dh();
  const CMatrix dz = dc.Dz();

  sdp::SdpProblem base(n);
  add_interference_rows(base, users, dc.source_power);
  detail::add_power_rows(base, pc);

  SolverStats stats;
  const auto ratio1 = [&](const CMatrix& x) { return (n0 + trace_product(qg, x)) / (n0 + trace_product(qz, x)); };
  const auto ratio2 = [&](const CMatrix& x) { return (n0 + trace_product(dz, x)) / (n0 + trace_product(dh, x)); };

  // X = 0 (w = 0) is always feasible and scores t1 t2 = 1.
  CMatrix best_x = CMatrix::Zero(n, n);
  double best_product = 1.0;
  double best_t1 = 1.0;
  const auto consider = [&](const CMatrix& x) {
    const double r1 = ratio1(x);
    const double p = r1 * ratio2(x);
    const bool better = p > best_product * (1.0 + 1e-12);
    const bool tie = !better && p >= best_product * (1.0 - 1e-12) && r1 < best_t1;
    if (better || tie) {
      best_product = std::max(p, best_product);
      best_x = x;
      best_t1 = r1;
    }
  };

  // Largest achievable t1 over the feasible set.
  sdp::FractionalProgram top{n0, qg, n0, qz, base};
  const sdp::FractionalSolution top_sol = sdp::solve_fractional(top, sp.sdp);
  ++stats.sdp_solves;
  stats.ipm_iterations += top_sol.iterations;
  if (top_sol.status != sdp::Status::Optimal) {
    throw sdp::SolverError("solve_optimal: maximizing t1 failed (" + sdp::to_string(top_sol.status) + ": " +
                           top_sol.message + ")");
  }
  consider(top_sol.x);
  const double t1_feasible = top_sol.value;

  const TBounds bounds = t_bounds(dc, pc, sp.t_bounds_safety);
  const double t1_lo = std::max(1e-3, 1.0 / bounds.t2_max);

  int failures = 0;
  int evaluations = 0;
  std::string last_failure;

  // max t2 at fixed t1; nullopt when the subproblem fails.
  const auto inner_fractional = [&](double t1) -> std::optional<double> {
    sdp::FractionalProgram fp{n0, dz, n0, dh, base};
    fp.constraints.add(qg - t1 * qz, sdp::Sense::GreaterEqual, n0 * (t1 - 1.0));
    const sdp::FractionalSolution s = sdp::solve_fractional(fp, sp.sdp);
    ++stats.sdp_solves;
    stats.ipm_iterations += s.iterations;
    if (s.status != sdp::Status::Optimal) {
      last_failure = "t1=" + std::to_string(t1) + ": " + sdp::to_string(s.status) + " " + s.message;
      return std::nullopt;
    }
    consider(s.x);
    return s.value;
  };

  const auto inner_bisection = [&](double t1) -> std::optional<double> {
    double lo = 0.0;
    double hi = bounds.t2_max;
    bool have_point = false;
    while (!have_point || hi - lo > sp.t2_bisect_tol * hi) {
      if (stats.feasibility_calls >= sp.max_feasibility_calls) {
        throw sdp::SolverError("solve_optimal: feasibility call budget exhausted");
      }
      const double mid = have_point ? 0.5 * (lo + hi) : std::max(lo, 1e-12);
      const auto prob = build_feasibility_problem(dc, t1, mid, pc, users);
      const sdp::FeasibilityResult fr = sdp::check_feasibility(prob, sp.sdp.feas_tol, sp.sdp);
      ++stats.feasibility_calls;
      stats.ipm_iterations += fr.iterations;
      if (fr.status == sdp::Status::Optimal) {
        lo = std::max(mid, std::min(ratio2(fr.x), hi));
        have_point = true;
        consider(fr.x);
      } else if (fr.status == sdp::Status::Infeasible) {
        if (!have_point) return std::nullopt;
        hi = mid;
      } else {
        last_failure = "t1=" + std::to_string(t1) + ", t2=" + std::to_string(mid) + ": feasibility check failed";
        return std::nullopt;
      }
    }
    return lo;
  };

  const auto objective = [&](double log_t1) -> double {
    const double t1 = std::exp(log_t1);
    ++evaluations;
    const auto t2 = sp.inner == InnerSearch::Fractional ? inner_fractional(t1) : inner_bisection(t1);
    if (!t2) {
      ++failures;
      return -std::numeric_limits<double>::infinity();
    }
    return t1 * *t2;
  };

  if (t1_feasible > t1_lo * (1.0 + 1e-9)) {
    const double a = std::log(t1_lo);
    const double b = std::log(t1_feasible * (1.0 - 1e-7));
    const int g = sp.t1_grid_points;
    std::vector<double> grid(static_cast<std::size_t>(g));
    std::vector<double> value(static_cast<std::size_t>(g));
    int k_best = 0;
    for (int i = 0; i < g; ++i) {
      grid[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(g - 1);
      value[i] = objective(grid[i]);
      if (value[i] > value[k_best] * (1.0 + 1e-12)) k_best = i;
    }
    // Golden-section refinement on the bracket around the best grid point.
    double lo = grid[std::max(k_best - 1, 0)];
    double hi = grid[std::min(k_best + 1, g - 1)];
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < sp.refine_iterations; ++it) {
      if (f1 >= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = objective(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = objective(x2);
      }
    }
    if (failures * 2 > evaluations) {
      throw sdp::SolverError("solve_optimal: relaxation subproblems failed (" + last_failure + ")");
    }
  }

  SolveResult result;
  const detail::Extraction ex = detail::extract_weights(best_x, CMatrix(), dc, pc, users, sp.rank_ratio_tol,
                                                        sp.randomization_samples, seed);
  result.w = ex.w;
  result.rank_ratio = ex.rank_ratio;
  result.randomized = ex.randomized;
  result.relaxation_bound = std::log2(best_product);
  stats.t1 = ratio1(best_x);
  stats.t2 = ratio2(best_x);
  result.stats = stats;
  evaluate_into(result, dc);
  return result;
}

} // namespace relaysec
