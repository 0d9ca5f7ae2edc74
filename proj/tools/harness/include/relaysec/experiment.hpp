#pragma once

// Seeded Monte Carlo harness: random channel draws, power and interference
// sweeps over the beamforming schemes, and CSV / weight-dump emission.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaysec/channel.hpp"

namespace relaysec::experiment {

enum class Scheme { Optimal, Bne, BnepSdp, BnepClosed };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);
/// Parses a comma-separated list such as "optimal,bne".
std::vector<Scheme> parse_schemes(const std::string& list);

struct ExperimentConfig {
  std::string name = "custom";
  int relays = 10;
  double sigma_g = 10.0;
  double sigma_h = 1.0;
  double sigma_z = 1.0;
  double sigma_k = 1.0;
  double relay_noise = 1.0;
  double dest_noise = 1.0;
  double ps_db = 0.0;
  /// Power sweep axis, with gamma_db held fixed.
  std::vector<double> pt_over_ps_db_range{-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  double gamma_db = 0.0;
  /// Interference sweep axis, with pt_over_ps_db held fixed.
  std::vector<double> gamma_db_range{-10.0, -8.0, -6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0};
  double pt_over_ps_db = 0.0;
  int n_realizations = 1;
  std::uint64_t seed = 1;
  std::vector<Scheme> schemes{Scheme::Optimal, Scheme::Bne, Scheme::BnepSdp, Scheme::BnepClosed};
  PowerMode power_mode = PowerMode::Total;
  int primary_users = 1;
  int eavesdroppers = 1;
  /// Worker threads for realizations; 0 picks the hardware concurrency.
  int threads = 0;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;

  /// Preset fig2: sigma_g=10, sigma_h=sigma_z=sigma_k=1, M=10, gamma=0 dB.
  static ExperimentConfig fig2();
  /// Preset fig3: sigma_g=10, sigma_h=1, sigma_z=2, sigma_k=4, M=10, gamma=10 dB.
  static ExperimentConfig fig3();
  /// Preset fig4: sigma_g=10, sigma_h=2, sigma_z=2, sigma_k=4, M=10, Ps=PT=0 dB.
  static ExperimentConfig fig4();
  static ExperimentConfig preset(const std::string& name);
};

/// JSON round trip. Unknown keys are rejected; missing keys keep defaults.
std::string to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

double db_to_linear(double db);

/// One draw of every channel. Extra eavesdroppers and primary users use
/// sigma_z and sigma_k respectively.
struct Scenario {
  ChannelRealization real;
  std::vector<CVector> extra_eavesdroppers; // raw relay -> eavesdropper channels
  std::vector<CVector> extra_primary_users; // raw relay -> primary receiver channels
};

/// Each coefficient is circular complex Gaussian with variance sigma^2 (real
/// and imaginary parts sigma^2/2 each). Depends only on (cfg.seed, index) and
/// the channel dimensions of cfg.
Scenario generate_scenario(const ExperimentConfig& cfg, std::uint64_t index);
ChannelRealization generate_realization(const ExperimentConfig& cfg, std::uint64_t index);

enum class Failure {
  None,
  Unsupported, // scheme not defined for this configuration
  Structural,  // too few relays for the requested null space
  Numerical,   // SDP solver failure
};

std::string to_string(Failure f);

/// Result of one scheme on one realization at one sweep point.
struct SchemeOutcome {
  Scheme scheme = Scheme::Optimal;
  Failure failure = Failure::None;
  std::string error;          // set on failure
  double raw_rate = 0.0;      // signed secrecy rate
  double rate_bits = 0.0;     // max(0, raw_rate)
  double snr_dest = 0.0;
  double snr_eve = 0.0;       // worst eavesdropper
  double interference = 0.0;  // worst primary user
  std::optional<double> rank_ratio;
  std::optional<double> relaxation_bound; // bits
  bool randomized = false;
  double solve_ms = 0.0;
  bool interference_ok = true;
  CVector w;

  bool ok() const { return failure == Failure::None; }
};

struct SweepRow {
  std::string sweep_var; // "pt_over_ps_db" or "gamma_db"
  double value = 0.0;    // in dB
  std::uint64_t realization = 0;
  std::vector<SchemeOutcome> outcomes;
};

/// Solves every requested scheme on every (sweep point, realization) pair.
/// Solver failures are recorded per outcome; the sweep always completes.
/// Rows are sorted by (value, realization).
std::vector<SweepRow> run_power_sweep(const ExperimentConfig& cfg);
std::vector<SweepRow> run_gamma_sweep(const ExperimentConfig& cfg);

/// Solves one realization at the given linear PT and gamma.
SweepRow run_single(const ExperimentConfig& cfg, std::uint64_t index, double pt_over_ps_db, double gamma_db);

/// Mean rate per (value, scheme), failures excluded.
struct SummaryRow {
  double value = 0.0;
  Scheme scheme = Scheme::Optimal;
  double mean_rate = 0.0;
  int count = 0;
  int failures = 0;
};
std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows);

std::size_t count_failures(const std::vector<SweepRow>& rows, Failure kind);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header plus one line per (row, scheme). Failed outcomes carry "nan"
/// numeric fields. With include_timing false, solve_ms is written as 0 so
/// that identical inputs give byte-identical files.
std::string format_csv(const std::vector<SweepRow>& rows, bool include_timing = true);
void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path, bool include_timing = true);

/// JSON array of {sweep_var, value, realization_index, scheme, w: [[re, im], ...]}.
void dump_weights(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

inline const char* kCsvHeader =
    "sweep_var,value,realization_index,scheme,rate_bits,snr_dest,snr_eve,interference,rank_ratio,solve_ms";

} // namespace relaysec::experiment
