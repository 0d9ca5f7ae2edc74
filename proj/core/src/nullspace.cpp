#include "relaysec/nullspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail.hpp"
#include "relaysec/linalg.hpp"

namespace relaysec {

namespace {

using detail::trace_product;

NullTargets bnep_targets(NullTargets t) {
  t.null_primary_users = true;
  return t;
}

// Largest destination SNR reachable in the null space, ignoring interference.
double snr_upper_bound(const NullSpaceContext& ctx, const DerivedChannel& dc, const PowerConstraint& pc) {
  return dc.source_power * std::real(ctx.signal.trace()) * pc.max_total_power() / dc.dest_noise;
}

sdp::SdpProblem base_problem(const NullSpaceContext& ctx, const PowerConstraint& pc) {
  const Index r = ctx.basis.cols();
  sdp::SdpProblem p(r);
  for (std::size_t i = 0; i < ctx.users.size(); ++i) {
    if (!ctx.users[i].limit.active()) continue;
    p.add(ctx.interference[i], sdp::Sense::LessEqual, ctx.users[i].limit.gamma);
  }
  detail::add_power_rows(p, pc, ctx.basis);
  return p;
}

SolveResult solve_nullspace_sdp(const DerivedChannel& dc, const PowerConstraint& pc,
                                const std::vector<PrimaryUser>& users, const NullTargets& targets,
                                const NullspaceParams& params, std::uint64_t seed) {
  params.validate();
  pc.validate(dc.relays());
  for (const auto& pu : users) {
    if (detail::forces_zero(pu, dc.source_power) && !targets.null_primary_users) return detail::zero_result(dc);
  }
  const NullSpaceContext ctx = build_context(dc, users, targets);
  const Index r = ctx.basis.cols();
  const double n0 = dc.dest_noise;
  const double ps = dc.source_power;
  const sdp::SdpProblem base = base_problem(ctx, pc);
  const CMatrix signal = ps * ctx.signal;
  const auto snr = [&](const CMatrix& x) { return trace_product(signal, x) / (n0 + trace_product(ctx.noise_dest, x)); };

  SolverStats stats;
  double lo = 0.0;
  double hi = snr_upper_bound(ctx, dc, pc) * (1.0 + 1e-9);
  CMatrix x_lo = CMatrix::Zero(r, r);

  // Bisection on t: tr(X (Ps A - t B)) >= N0 t plus the base constraints.
  while (hi > 0.0 && hi - lo > params.bisect_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    sdp::SdpProblem p = base;
    p.add(signal - mid * ctx.noise_dest, sdp::Sense::GreaterEqual, n0 * mid);
    const sdp::FeasibilityResult fr = sdp::check_feasibility(p, params.sdp.feas_tol, params.sdp);
    ++stats.feasibility_calls;
    stats.ipm_iterations += fr.iterations;
    if (fr.status == sdp::Status::Optimal) {
      lo = std::max(mid, std::min(snr(fr.x), hi));
      x_lo = fr.x;
    } else if (fr.status == sdp::Status::Infeasible) {
      hi = mid;
    } else {
      throw sdp::SolverError("null-space bisection failed at t=" + std::to_string(mid));
    }
  }

  // The bracket is certified; one fractional solve gives the maximizer itself.
  CMatrix x_best = x_lo;
  double t_best = snr(x_lo);
  if (hi > 0.0) {
    const sdp::FractionalSolution fs = sdp::solve_fractional({0.0, signal, n0, ctx.noise_dest, base}, params.sdp);
    ++stats.sdp_solves;
    stats.ipm_iterations += fs.iterations;
    if (fs.status == sdp::Status::Optimal && fs.value >= t_best) {
      x_best = fs.x;
      t_best = fs.value;
    }
  }

  const detail::Extraction ex = detail::extract_weights(x_best, ctx.basis, dc, pc, users, params.rank_ratio_tol,
                                                        params.randomization_samples, seed);
  SolveResult result;
  result.w = ex.w;
  result.rank_ratio = ex.rank_ratio;
  result.randomized = ex.randomized;
  result.relaxation_bound = std::log2(1.0 + t_best);
  stats.t1 = t_best;
  result.stats = stats;
  evaluate_into(result, dc);
  return result;
}

} // namespace

NullSpaceContext build_context(const DerivedChannel& dc, const std::vector<PrimaryUser>& users,
                               const NullTargets& targets) {
  NullSpaceContext ctx;
  ctx.users = users;
  ctx.nulled.push_back(dc.hz);
  for (const auto& e : targets.extra_eavesdroppers) ctx.nulled.push_back(e);
  if (targets.null_primary_users) {
    for (const auto& pu : users) ctx.nulled.push_back(pu.hk);
  }
  const Index m = dc.relays();
  for (const auto& c : ctx.nulled) {
    if (c.size() != m) throw std::invalid_argument("build_context: channel length mismatch");
  }
  if (static_cast<Index>(ctx.nulled.size()) >= m) {
    throw StructuralError("null-space beamforming needs more relays than nulled channels: " +
                          std::to_string(ctx.nulled.size()) + " channels, " + std::to_string(m) +
                          " relays (a null space of i channels has dimension M x (M - i))");
  }
  try {
    ctx.basis = linalg::null_space_basis(ctx.nulled);
  } catch (const linalg::LinalgError& e) {
    throw StructuralError(e.what());
  }
  const CMatrix& h = ctx.basis;
  const CVector hgp = h.adjoint() * dc.hg;
  ctx.signal = hgp * hgp.adjoint();
  ctx.noise_dest = h.adjoint() * dc.Dh() * h;
  for (const auto& pu : users) {
    CMatrix q = h.adjoint() * pu.dk.cast<Complex>().asDiagonal() * h;
    if (!targets.null_primary_users) {
      const CVector c = h.adjoint() * pu.hk;
      q += dc.source_power * c * c.adjoint();
    }
    ctx.interference.push_back(0.5 * (q + q.adjoint()));
  }
  ctx.signal = 0.5 * (ctx.signal + ctx.signal.adjoint());
  ctx.noise_dest = 0.5 * (ctx.noise_dest + ctx.noise_dest.adjoint());
  return ctx;
}

void NullspaceParams::validate() const {
  if (!(bisect_tol > 0.0)) throw std::invalid_argument("NullspaceParams: bisection tolerance must be positive");
  if (randomization_samples < 1) throw std::invalid_argument("NullspaceParams: need at least one randomization sample");
}

SolveResult solve_bne(const DerivedChannel& dc, const PowerConstraint& pc, InterferenceLimit lim,
                      const NullspaceParams& params, std::uint64_t seed) {
  return solve_bne(dc, pc, {primary_user(dc, lim)}, NullTargets{}, params, seed);
}

SolveResult solve_bne(const DerivedChannel& dc, const PowerConstraint& pc,
                      const std::vector<PrimaryUser>& users, const NullTargets& targets,
                      const NullspaceParams& params, std::uint64_t seed) {
  NullTargets t = targets;
  t.null_primary_users = false;
  return solve_nullspace_sdp(dc, pc, users, t, params, seed);
}

SolveResult solve_bnep_sdp(const DerivedChannel& dc, const PowerConstraint& pc, InterferenceLimit lim,
                           const NullspaceParams& params, std::uint64_t seed) {
  return solve_bnep_sdp(dc, pc, {primary_user(dc, lim)}, NullTargets{}, params, seed);
}

SolveResult solve_bnep_sdp(const DerivedChannel& dc, const PowerConstraint& pc,
                           const std::vector<PrimaryUser>& users, const NullTargets& targets,
                           const NullspaceParams& params, std::uint64_t seed) {
  return solve_nullspace_sdp(dc, pc, users, bnep_targets(targets), params, seed);
}

SolveResult solve_bnep_closed_form(const DerivedChannel& dc, double total_power, InterferenceLimit lim) {
  return solve_bnep_closed_form(dc, total_power, {primary_user(dc, lim)}, NullTargets{});
}

SolveResult solve_bnep_closed_form(const DerivedChannel& dc, double total_power,
                                   const std::vector<PrimaryUser>& users, const NullTargets& targets) {
  if (!(total_power > 0.0) || !std::isfinite(total_power)) {
    throw std::invalid_argument("solve_bnep_closed_form: total power must be positive and finite");
  }
  const NullSpaceContext ctx = build_context(dc, users, bnep_targets(targets));
  const Index r = ctx.basis.cols();
  CMatrix b = ctx.noise_dest;
  b.diagonal().array() += dc.dest_noise / total_power;
  const linalg::GeneralizedEigPair ge = linalg::generalized_eig_max(ctx.signal, b);
  (void)r;
  const CVector v = std::sqrt(total_power) * ge.u;

  SolveResult result;
  result.w = ctx.basis * v;
  result.relaxation_bound = std::log2(1.0 + dc.source_power * ge.lambda);
  result.stats.t1 = dc.source_power * ge.lambda;
  evaluate_into(result, dc);
  for (const auto& pu : users) {
    if (pu.limit.active() && interference(pu, dc.source_power, result.w) > pu.limit.gamma * (1.0 + kDefaultFeasibilityTol)) {
      result.interference_ok = false;
    }
  }
  return result;
}

} // namespace relaysec
