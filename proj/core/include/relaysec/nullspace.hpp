#pragma once

// Sub-optimal beamforming restricted to the null space of the eavesdropper's
// channel (BNE), or of the eavesdropper's and primary user's channels (BNEP).
// Inside the null space the eavesdropper's SNR is zero, so maximizing the
// secrecy rate reduces to maximizing the destination SNR.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "relaysec/channel.hpp"
#include "relaysec/sdp.hpp"

namespace relaysec {

/// Raised when the nulled channels leave no usable null space (too few
/// relays or linearly dependent channels).
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Reduced problem data for w = H v.
struct NullSpaceContext {
  CMatrix basis;        // H, M x (M - k), orthonormal columns
  CMatrix signal;       // H^H hg hg^H H
  CMatrix noise_dest;   // H^H Dh H
  std::vector<CMatrix> interference; // per primary user: H^H Qk H, or H^H Dk H when nulled
  std::vector<PrimaryUser> users;
  std::vector<CVector> nulled;       // the channels the basis annihilates
};

/// Which composite channels a context nulls. The embedded eavesdropper is
/// always nulled; BNEP additionally nulls every primary user in `users`.
struct NullTargets {
  std::vector<CVector> extra_eavesdroppers; // composite channels (conj(z) conj(g) l)
  bool null_primary_users = false;
};

NullSpaceContext build_context(const DerivedChannel& dc, const std::vector<PrimaryUser>& users,
                               const NullTargets& targets);

struct NullspaceParams {
  double bisect_tol = 1e-5;
  double rank_ratio_tol = sdp::kDefaultRankRatioTol;
  int randomization_samples = sdp::kDefaultRandomizationSamples;
  sdp::SolverOptions sdp;

  void validate() const;
};

/// Beamforming in the null space of the eavesdropper(s). Bisection on the
/// destination SNR with the SDP feasibility oracle, followed by one
/// linear-fractional solve to land exactly on the maximizer.
SolveResult solve_bne(const DerivedChannel& dc, const PowerConstraint& pc, InterferenceLimit lim,
                      const NullspaceParams& params = {}, std::uint64_t seed = 0);
SolveResult solve_bne(const DerivedChannel& dc, const PowerConstraint& pc,
                      const std::vector<PrimaryUser>& users, const NullTargets& targets,
                      const NullspaceParams& params = {}, std::uint64_t seed = 0);

/// Beamforming in the joint null space of the eavesdropper(s) and primary
/// user(s); only forwarded relay noise reaches the primary receivers.
SolveResult solve_bnep_sdp(const DerivedChannel& dc, const PowerConstraint& pc, InterferenceLimit lim,
                           const NullspaceParams& params = {}, std::uint64_t seed = 0);
SolveResult solve_bnep_sdp(const DerivedChannel& dc, const PowerConstraint& pc,
                           const std::vector<PrimaryUser>& users, const NullTargets& targets,
                           const NullspaceParams& params = {}, std::uint64_t seed = 0);

/// Closed-form BNEP under a total power budget with the interference limit
/// dropped: v is the principal generalized eigenvector of
/// (H^H hg hg^H H, H^H Dh H + (N0/PT) I) scaled to ||v||^2 = PT. The result's
/// interference_ok flags whether `lim` still holds.
SolveResult solve_bnep_closed_form(const DerivedChannel& dc, double total_power,
                                   InterferenceLimit lim = InterferenceLimit::unlimited());
SolveResult solve_bnep_closed_form(const DerivedChannel& dc, double total_power,
                                   const std::vector<PrimaryUser>& users, const NullTargets& targets);

} // namespace relaysec
