#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "relaysec/experiment.hpp"

namespace ex = relaysec::experiment;

namespace {

constexpr int kExitNumericalFailure = 3;

struct CommonArgs {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::optional<int> threads;
  std::string schemes;
  std::string mode;
  std::string out;
  std::string weights;
  bool strict = false;
  bool no_timing = false;
};

void add_common(CLI::App* app, CommonArgs& a) {
  app->add_option("--config", a.config, "JSON experiment config")->check(CLI::ExistingFile);
  app->add_option("--preset", a.preset, "Start from a figure preset: fig2, fig3 or fig4");
  app->add_option("--seed", a.seed, "Base seed for channel draws");
  app->add_option("--realizations,-n", a.realizations, "Number of channel realizations");
  app->add_option("--threads", a.threads, "Worker threads (0: all cores)");
  app->add_option("--schemes", a.schemes, "Comma-separated subset of optimal,bne,bnep_sdp,bnep_closed");
  app->add_option("--mode", a.mode, "Relay power constraint: total, individual or both");
  app->add_option("--out,-o", a.out, "CSV output path (default: stdout)");
  app->add_option("--dump-weights", a.weights, "Write every beamforming vector as JSON");
  app->add_flag("--strict", a.strict, "Exit nonzero if any SDP solve fails numerically");
  app->add_flag("--no-timing", a.no_timing, "Write solve_ms as 0 for byte-reproducible CSV");
}

ex::ExperimentConfig resolve_config(const CommonArgs& a, const std::string& default_preset) {
  ex::ExperimentConfig cfg = ex::ExperimentConfig::preset(a.preset.empty() ? default_preset : a.preset);
  if (!a.config.empty()) {
    if (!a.preset.empty()) throw std::invalid_argument("--config and --preset are exclusive (use \"preset\" inside the config)");
    cfg = ex::load_config(a.config);
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.realizations) cfg.n_realizations = *a.realizations;
  if (a.threads) cfg.threads = *a.threads;
  if (!a.schemes.empty()) cfg.schemes = ex::parse_schemes(a.schemes);
  if (!a.mode.empty()) cfg.power_mode = relaysec::power_mode_from_string(a.mode);
  cfg.validate();
  return cfg;
}

double parse_db(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

void print_summary(const std::vector<ex::SweepRow>& rows, std::ostream& os) {
  if (rows.empty()) return;
  os << "# " << rows.front().sweep_var << "  scheme  mean_rate_bits  realizations  failures\n";
  for (const auto& s : ex::summarize(rows)) {
    char line[160];
    std::snprintf(line, sizeof line, "%8.3f  %-12s %10.6f  %4d  %4d\n", s.value, ex::to_string(s.scheme).c_str(),
                  s.mean_rate, s.count, s.failures);
    os << line;
  }
}

int finish(const std::vector<ex::SweepRow>& rows, const CommonArgs& a) {
  if (a.out.empty()) {
    std::cout << ex::format_csv(rows, !a.no_timing);
  } else {
    ex::emit_csv(rows, a.out, !a.no_timing);
    print_summary(rows, std::cout);
  }
  if (!a.weights.empty()) ex::dump_weights(rows, a.weights);
  for (const auto& row : rows) {
    for (const auto& o : row.outcomes) {
      if (!o.ok()) {
        std::cerr << "warning: " << ex::to_string(o.scheme) << " at " << row.sweep_var << "=" << row.value
                  << ", realization " << row.realization << ": " << o.error << "\n";
      }
    }
  }
  if (a.strict && ex::count_failures(rows, ex::Failure::Numerical) > 0) return kExitNumericalFailure;
  return 0;
}

void print_outcome(const ex::SchemeOutcome& o) {
  std::cout << "[" << ex::to_string(o.scheme) << "]\n";
  if (!o.ok()) {
    std::cout << "  status: " << ex::to_string(o.failure) << " (" << o.error << ")\n";
    return;
  }
  std::printf("  secrecy_rate_bits: %.10g (raw %.10g)\n", o.rate_bits, o.raw_rate);
  std::printf("  snr_dest: %.10g\n  snr_eve: %.10g\n  interference: %.10g%s\n", o.snr_dest, o.snr_eve,
              o.interference, o.interference_ok ? "" : "  (exceeds limit)");
  if (o.rank_ratio) std::printf("  rank_ratio: %.3g\n", *o.rank_ratio);
  std::printf("  power: %.10g\n  solve_ms: %.3f\n  w:\n", o.w.squaredNorm(), o.solve_ms);
  for (relaysec::Index i = 0; i < o.w.size(); ++i) std::printf("    %+.10e %+.10ei\n", o.w[i].real(), o.w[i].imag());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy-rate relay beamforming for cognitive AF relay networks"};
  app.require_subcommand(1);

  CommonArgs power_args;
  CLI::App* power = app.add_subcommand("power-sweep", "Sweep PT/Ps at fixed interference limit (default preset fig2)");
  add_common(power, power_args);

  CommonArgs gamma_args;
  CLI::App* gamma = app.add_subcommand("gamma-sweep", "Sweep the interference limit at fixed PT (default preset fig4)");
  add_common(gamma, gamma_args);

  CommonArgs single_args;
  std::uint64_t index = 0;
  std::string pt_db = "0";
  std::string gamma_db;
  CLI::App* single = app.add_subcommand("single", "Solve one realization and print every scheme's result");
  add_common(single, single_args);
  single->add_option("--index", index, "Realization index");
  single->add_option("--pt-over-ps-db", pt_db, "PT/Ps in dB");
  single->add_option("--gamma-db", gamma_db, "Interference limit in dB, or inf (default: config gamma_db)");

  std::string show_preset = "fig2";
  CLI::App* show = app.add_subcommand("config", "Print a preset as a JSON config");
  show->add_option("--preset", show_preset, "fig2, fig3 or fig4");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*power) return finish(ex::run_power_sweep(resolve_config(power_args, "fig2")), power_args);
    if (*gamma) return finish(ex::run_gamma_sweep(resolve_config(gamma_args, "fig4")), gamma_args);
    if (*single) {
      const ex::ExperimentConfig cfg = resolve_config(single_args, "fig2");
      const double g = gamma_db.empty() ? cfg.gamma_db : parse_db(gamma_db);
      const ex::SweepRow row = ex::run_single(cfg, index, parse_db(pt_db), g);
      std::printf("realization %llu, seed %llu, PT/Ps %s dB, gamma %g dB, mode %s\n",
                  static_cast<unsigned long long>(index), static_cast<unsigned long long>(cfg.seed), pt_db.c_str(), g,
                  relaysec::to_string(cfg.power_mode).c_str());
      for (const auto& o : row.outcomes) print_outcome(o);
      if (!single_args.out.empty()) ex::emit_csv({row}, single_args.out, !single_args.no_timing);
      if (!single_args.weights.empty()) ex::dump_weights({row}, single_args.weights);
      if (single_args.strict && ex::count_failures({row}, ex::Failure::Numerical) > 0) return kExitNumericalFailure;
      return 0;
    }
    if (*show) {
      std::cout << ex::to_json(ex::ExperimentConfig::preset(show_preset));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
