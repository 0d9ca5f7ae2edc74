#pragma once

// Channel model for the amplify-and-forward cognitive relay network, and
// exact evaluation of SNRs, primary-user interference and secrecy rate for a
// candidate relay weight vector.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relaysec {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raw fading coefficients of one channel draw.
///
/// g: source -> relay, h: relay -> destination, z: relay -> eavesdropper,
/// k: relay -> primary receiver. All noise variances are linear scale.
struct ChannelRealization {
  CVector g, h, z, k;
  RVector relay_noise;       // N_m
  double dest_noise = 1.0;   // N0, shared by destination and eavesdropper
  double source_power = 1.0; // Ps

  Index relays() const { return g.size(); }

  /// Throws std::invalid_argument when lengths disagree or a noise/power
  /// value is not strictly positive.
  void validate() const;
};

/// Builds a realization with unit noise variances (N_m = N0 = 1).
ChannelRealization make_realization(CVector g, CVector h, CVector z, CVector k,
                                    double source_power);

/// Composite quantities derived from a realization.
///
/// hg_m = conj(h_m) conj(g_m) l_m and dh_m = |h_m|^2 l_m^2 N_m, and likewise
/// for the eavesdropper (z) and the primary user (k). The D matrices are
/// diagonal and stored by their diagonals.
struct DerivedChannel {
  RVector scale; // l_m = 1 / sqrt(|g_m|^2 Ps + N_m)
  CVector hg, hz, hk;
  RVector dh, dz, dk;
  double dest_noise = 1.0;
  double source_power = 1.0;

  Index relays() const { return scale.size(); }

  CMatrix Dh() const { return dh.cast<Complex>().asDiagonal(); }
  CMatrix Dz() const { return dz.cast<Complex>().asDiagonal(); }
  CMatrix Dk() const { return dk.cast<Complex>().asDiagonal(); }

  /// Dh + Ps hg hg^H, the destination's signal-plus-noise form.
  CMatrix signal_form_dest() const;
  /// Dz + Ps hz hz^H.
  CMatrix signal_form_eve() const;
  /// Dk + Ps hk hk^H.
  CMatrix interference_form() const;
};

DerivedChannel derive_channel(const ChannelRealization& real);

/// Composite vector conj(c_m) conj(g_m) l_m for an arbitrary relay -> node
/// channel c (used for additional eavesdroppers or primary users).
CVector composite_channel(const ChannelRealization& real, const CVector& c);
/// Diagonal |c_m|^2 l_m^2 N_m for an arbitrary relay -> node channel c.
RVector forwarded_noise(const ChannelRealization& real, const CVector& c);

enum class PowerMode { Total, Individual, Both };

std::string to_string(PowerMode mode);
PowerMode power_mode_from_string(const std::string& name);

/// Relay power budget: ||w||^2 <= PT and/or |w_m|^2 <= p_m.
struct PowerConstraint {
  PowerMode mode = PowerMode::Total;
  double total = 0.0;  // PT, used by Total and Both
  RVector per_relay;   // p, used by Individual and Both

  static PowerConstraint make_total(double pt);
  static PowerConstraint make_individual(RVector p);
  static PowerConstraint make_both(double pt, RVector p);
  /// Individual budgets p_m = pt / M.
  static PowerConstraint equal_split(double pt, Index relays);

  bool has_total() const { return mode != PowerMode::Individual; }
  bool has_individual() const { return mode != PowerMode::Total; }

  /// Upper bound on ||w||^2 implied by the active constraints.
  double max_total_power() const;

  void validate(Index relays) const;
};

/// Interference temperature limit, linear scale. Infinity disables it.
struct InterferenceLimit {
  double gamma = std::numeric_limits<double>::infinity();

  static InterferenceLimit unlimited() { return {}; }
  bool active() const { return std::isfinite(gamma); }
};

/// One primary receiver: composite channel, forwarded-noise diagonal and its
/// interference limit.
struct PrimaryUser {
  CVector hk;
  RVector dk;
  InterferenceLimit limit;
};

/// The primary user embedded in a DerivedChannel, with limit `lim`.
PrimaryUser primary_user(const DerivedChannel& dc, InterferenceLimit lim);
/// An additional primary user with raw relay -> receiver channel k.
PrimaryUser primary_user(const ChannelRealization& real, const CVector& k,
                         InterferenceLimit lim);

double snr_destination(const DerivedChannel& dc, const CVector& w);
double snr_eavesdropper(const DerivedChannel& dc, const CVector& w);
/// SNR at a receiver with composite channel `hc` and noise diagonal `noise_diag`.
double received_snr(const CVector& hc, const RVector& noise_diag, double ps,
                    double n0, const CVector& w);

/// Interference power Ps |hk^H w|^2 + w^H Dk w at the embedded primary user.
double interference(const DerivedChannel& dc, const CVector& w);
double interference(const PrimaryUser& pu, double source_power,
                    const CVector& w);

/// log2(1 + snr_dest) - log2(1 + snr_eve). Can be negative.
double secrecy_rate(const DerivedChannel& dc, const CVector& w);

enum class ConstraintKind { TotalPower, RelayPower, Interference };

struct Violation {
  ConstraintKind kind;
  Index index = 0;    // relay index for RelayPower, primary user for Interference
  double value = 0.0; // left-hand side
  double bound = 0.0;
  double slack() const { return bound - value; }
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
};

inline constexpr double kDefaultFeasibilityTol = 1e-7;

/// Checks each power and interference constraint with relative tolerance:
/// value <= bound * (1 + tol) + tol * 1e-12.
FeasibilityReport check_feasible(const DerivedChannel& dc, const CVector& w,
                                 const PowerConstraint& pc,
                                 const std::vector<PrimaryUser>& users,
                                 double tol = kDefaultFeasibilityTol);
FeasibilityReport check_feasible(const DerivedChannel& dc, const CVector& w,
                                 const PowerConstraint& pc,
                                 InterferenceLimit lim,
                                 double tol = kDefaultFeasibilityTol);

/// Largest alpha in [0, 1] with alpha * w satisfying every power and
/// interference constraint exactly.
double max_feasible_scale(const CVector& w, double source_power,
                          const PowerConstraint& pc,
                          const std::vector<PrimaryUser>& users);

struct SolverStats {
  int sdp_solves = 0;
  int feasibility_calls = 0;
  int ipm_iterations = 0;
  // Search coordinates at the returned point (0 when not applicable).
  double t1 = 0.0;
  double t2 = 0.0;
};

/// Output of every beamforming scheme.
struct SolveResult {
  CVector w;
  double snr_dest = 0.0;
  double snr_eve = 0.0;
  double interference = 0.0; // at the embedded primary user
  double secrecy_rate = 0.0;
  /// lambda_2 / lambda_1 of the relaxation solution; empty for closed forms.
  std::optional<double> rank_ratio;
  /// log2 of the relaxation objective (upper bound on the secrecy rate).
  std::optional<double> relaxation_bound;
  bool randomized = false;
  /// False when a closed-form solution violates the caller's interference
  /// limit (the closed form ignores it).
  bool interference_ok = true;
  SolverStats stats;
};

/// Fills snr/interference/rate fields of `r` from r.w.
void evaluate_into(SolveResult& r, const DerivedChannel& dc);

} // namespace relaysec
