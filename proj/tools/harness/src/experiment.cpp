#include "relaysec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "relaysec/nullspace.hpp"
#include "relaysec/optimal.hpp"
#include "relaysec/sdp.hpp"

namespace relaysec::experiment {

namespace {

constexpr const char* kPowerVar = "pt_over_ps_db";
constexpr const char* kGammaVar = "gamma_db";

std::mt19937_64 realization_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

CVector draw_channel(std::mt19937_64& rng, int m, double sigma) {
  std::normal_distribution<double> unit(0.0, 1.0);
  const double s = sigma / std::sqrt(2.0);
  CVector v(m);
  for (int i = 0; i < m; ++i) {
    const double re = unit(rng);
    const double im = unit(rng);
    v[i] = Complex(s * re, s * im);
  }
  return v;
}

double db_or_inf(double db) { return std::isinf(db) && db > 0 ? db : db_to_linear(db); }

// A sweep point resolved to linear units.
struct Point {
  double value_db;
  double pt;
  double gamma;
};

struct Instance {
  Scenario scenario;
  DerivedChannel dc;
  std::vector<CVector> extra_eve_composites;
  std::vector<RVector> extra_eve_noise;
};

Instance make_instance(const ExperimentConfig& cfg, std::uint64_t index) {
  Instance in;
  in.scenario = generate_scenario(cfg, index);
  in.dc = derive_channel(in.scenario.real);
  for (const auto& z : in.scenario.extra_eavesdroppers) {
    in.extra_eve_composites.push_back(composite_channel(in.scenario.real, z));
    in.extra_eve_noise.push_back(forwarded_noise(in.scenario.real, z));
  }
  return in;
}

PowerConstraint power_constraint(const ExperimentConfig& cfg, double pt) {
  switch (cfg.power_mode) {
    case PowerMode::Total: return PowerConstraint::make_total(pt);
    case PowerMode::Individual: return PowerConstraint::equal_split(pt, cfg.relays);
    case PowerMode::Both: return PowerConstraint::make_both(pt, RVector::Constant(cfg.relays, pt / cfg.relays));
  }
  return PowerConstraint::make_total(pt);
}

std::vector<PrimaryUser> primary_users(const Instance& in, double gamma) {
  const InterferenceLimit lim{gamma};
  std::vector<PrimaryUser> users{primary_user(in.dc, lim)};
  for (const auto& k : in.scenario.extra_primary_users) users.push_back(primary_user(in.scenario.real, k, lim));
  return users;
}

SolveResult run_scheme(Scheme s, const ExperimentConfig& cfg, const Instance& in, const Point& pt,
                       std::uint64_t seed) {
  const PowerConstraint pc = power_constraint(cfg, pt.pt);
  const std::vector<PrimaryUser> users = primary_users(in, pt.gamma);
  NullTargets targets;
  targets.extra_eavesdroppers = in.extra_eve_composites;
  switch (s) {
    case Scheme::Optimal:
      if (cfg.eavesdroppers > 1) throw std::domain_error("optimal beamforming is defined for a single eavesdropper");
      return solve_optimal_multi_pu(in.dc, pc, users, {}, seed);
    case Scheme::Bne:
      return solve_bne(in.dc, pc, users, targets, {}, seed);
    case Scheme::BnepSdp:
      return solve_bnep_sdp(in.dc, pc, users, targets, {}, seed);
    case Scheme::BnepClosed:
      if (cfg.power_mode != PowerMode::Total) throw std::domain_error("closed-form BNEP requires a total power budget");
      return solve_bnep_closed_form(in.dc, pt.pt, users, targets);
  }
  throw std::logic_error("unknown scheme");
}

SchemeOutcome solve_one(Scheme s, const ExperimentConfig& cfg, const Instance& in, const Point& pt,
                        std::uint64_t seed) {
  SchemeOutcome out;
  out.scheme = s;
  const auto start = std::chrono::steady_clock::now();
  try {
    const SolveResult r = run_scheme(s, cfg, in, pt, seed);
    out.w = r.w;
    out.snr_dest = r.snr_dest;
    out.snr_eve = r.snr_eve;
    const double ps = in.dc.source_power;
    const double n0 = in.dc.dest_noise;
    for (std::size_t i = 0; i < in.extra_eve_composites.size(); ++i) {
      out.snr_eve = std::max(out.snr_eve, received_snr(in.extra_eve_composites[i], in.extra_eve_noise[i], ps, n0, r.w));
    }
    out.interference = 0.0;
    for (const auto& pu : primary_users(in, pt.gamma)) out.interference = std::max(out.interference, interference(pu, ps, r.w));
    out.raw_rate = std::log2(1.0 + out.snr_dest) - std::log2(1.0 + out.snr_eve);
    out.rate_bits = std::max(0.0, out.raw_rate);
    out.rank_ratio = r.rank_ratio;
    out.relaxation_bound = r.relaxation_bound;
    out.randomized = r.randomized;
    out.interference_ok = r.interference_ok;
  } catch (const std::domain_error& e) {
    out.failure = Failure::Unsupported;
    out.error = e.what();
  } catch (const StructuralError& e) {
    out.failure = Failure::Structural;
    out.error = e.what();
  } catch (const sdp::SolverError& e) {
    out.failure = Failure::Numerical;
    out.error = e.what();
  }
  out.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const char* var, const std::vector<Point>& points) {
  cfg.validate();
  const auto n_real = static_cast<std::size_t>(cfg.n_realizations);
  std::vector<Instance> instances(n_real);
  parallel_for(n_real, cfg.threads, [&](std::size_t r) { instances[r] = make_instance(cfg, r); });

  std::vector<SweepRow> rows(points.size() * n_real);
  parallel_for(rows.size(), cfg.threads, [&](std::size_t task) {
    const std::size_t p = task / n_real;
    const std::size_t r = task % n_real;
    SweepRow& row = rows[task];
    row.sweep_var = var;
    row.value = points[p].value_db;
    row.realization = r;
    for (Scheme s : cfg.schemes) row.outcomes.push_back(solve_one(s, cfg, instances[r], points[p], cfg.seed ^ (r * 0x9e3779b97f4a7c15ULL)));
  });
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.value != b.value ? a.value < b.value : a.realization < b.realization;
  });
  return rows;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

} // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Optimal: return "optimal";
    case Scheme::Bne: return "bne";
    case Scheme::BnepSdp: return "bnep_sdp";
    case Scheme::BnepClosed: return "bnep_closed";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  for (Scheme s : {Scheme::Optimal, Scheme::Bne, Scheme::BnepSdp, Scheme::BnepClosed}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown scheme '" + name + "' (expected optimal, bne, bnep_sdp or bnep_closed)");
}

std::vector<Scheme> parse_schemes(const std::string& list) {
  std::vector<Scheme> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const Scheme s = scheme_from_string(item);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("empty scheme list");
  return out;
}

std::string to_string(Failure f) {
  switch (f) {
    case Failure::None: return "none";
    case Failure::Unsupported: return "unsupported";
    case Failure::Structural: return "structural";
    case Failure::Numerical: return "numerical";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("ExperimentConfig: " + msg); };
  if (relays < 1) fail("relays must be at least 1");
  for (double s : {sigma_g, sigma_h, sigma_z, sigma_k}) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail("channel standard deviations must be finite and nonnegative");
  }
  if (!(relay_noise > 0.0) || !(dest_noise > 0.0)) fail("noise variances must be positive");
  if (!std::isfinite(ps_db) || !std::isfinite(pt_over_ps_db)) fail("power levels must be finite");
  for (double v : pt_over_ps_db_range) {
    if (!std::isfinite(v)) fail("pt_over_ps_db_range entries must be finite");
  }
  for (double v : gamma_db_range) {
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) fail("gamma_db_range entries must be numbers or +inf");
  }
  if (std::isnan(gamma_db) || gamma_db == -std::numeric_limits<double>::infinity()) fail("gamma_db must be a number or +inf");
  if (n_realizations < 1) fail("n_realizations must be at least 1");
  if (schemes.empty()) fail("scheme set must be nonempty");
  if (primary_users < 1) fail("primary_users must be at least 1");
  if (eavesdroppers < 1) fail("eavesdroppers must be at least 1");
  if (threads < 0) fail("threads must be nonnegative");
}

ExperimentConfig ExperimentConfig::fig2() {
  ExperimentConfig c;
  c.name = "fig2";
  c.sigma_g = 10.0;
  c.sigma_h = 1.0;
  c.sigma_z = 1.0;
  c.sigma_k = 1.0;
  c.gamma_db = 0.0;
  return c;
}

ExperimentConfig ExperimentConfig::fig3() {
  ExperimentConfig c;
  c.name = "fig3";
  c.sigma_g = 10.0;
  c.sigma_h = 1.0;
  c.sigma_z = 2.0;
  c.sigma_k = 4.0;
  c.gamma_db = 10.0;
  return c;
}

ExperimentConfig ExperimentConfig::fig4() {
  ExperimentConfig c;
  c.name = "fig4";
  c.sigma_g = 10.0;
  c.sigma_h = 2.0;
  c.sigma_z = 2.0;
  c.sigma_k = 4.0;
  c.ps_db = 0.0;
  c.pt_over_ps_db = 0.0;
  return c;
}

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
  if (name == "fig2") return fig2();
  if (name == "fig3") return fig3();
  if (name == "fig4") return fig4();
  throw std::invalid_argument("unknown preset '" + name + "' (expected fig2, fig3 or fig4)");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

Scenario generate_scenario(const ExperimentConfig& cfg, std::uint64_t index) {
  std::mt19937_64 rng = realization_rng(cfg.seed, index);
  const int m = cfg.relays;
  Scenario s;
  CVector g = draw_channel(rng, m, cfg.sigma_g);
  CVector h = draw_channel(rng, m, cfg.sigma_h);
  CVector z = draw_channel(rng, m, cfg.sigma_z);
  CVector k = draw_channel(rng, m, cfg.sigma_k);
  s.real = make_realization(std::move(g), std::move(h), std::move(z), std::move(k), db_to_linear(cfg.ps_db));
  s.real.relay_noise = RVector::Constant(m, cfg.relay_noise);
  s.real.dest_noise = cfg.dest_noise;
  for (int i = 1; i < cfg.eavesdroppers; ++i) s.extra_eavesdroppers.push_back(draw_channel(rng, m, cfg.sigma_z));
  for (int i = 1; i < cfg.primary_users; ++i) s.extra_primary_users.push_back(draw_channel(rng, m, cfg.sigma_k));
  return s;
}

ChannelRealization generate_realization(const ExperimentConfig& cfg, std::uint64_t index) {
  return generate_scenario(cfg, index).real;
}

std::vector<SweepRow> run_power_sweep(const ExperimentConfig& cfg) {
  std::vector<Point> points;
  const double ps = db_to_linear(cfg.ps_db);
  for (double v : cfg.pt_over_ps_db_range) points.push_back({v, ps * db_to_linear(v), db_or_inf(cfg.gamma_db)});
  return run_sweep(cfg, kPowerVar, points);
}

std::vector<SweepRow> run_gamma_sweep(const ExperimentConfig& cfg) {
  std::vector<Point> points;
  const double pt = db_to_linear(cfg.ps_db) * db_to_linear(cfg.pt_over_ps_db);
  for (double v : cfg.gamma_db_range) points.push_back({v, pt, db_or_inf(v)});
  return run_sweep(cfg, kGammaVar, points);
}

SweepRow run_single(const ExperimentConfig& cfg, std::uint64_t index, double pt_over_ps_db, double gamma_db) {
  cfg.validate();
  const Instance in = make_instance(cfg, index);
  const Point p{pt_over_ps_db, db_to_linear(cfg.ps_db) * db_to_linear(pt_over_ps_db), db_or_inf(gamma_db)};
  SweepRow row;
  row.sweep_var = kPowerVar;
  row.value = pt_over_ps_db;
  row.realization = index;
  for (Scheme s : cfg.schemes) row.outcomes.push_back(solve_one(s, cfg, in, p, cfg.seed ^ (index * 0x9e3779b97f4a7c15ULL)));
  return row;
}

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows) {
  std::map<std::pair<double, int>, SummaryRow> acc;
  for (const auto& row : rows) {
    for (const auto& o : row.outcomes) {
      SummaryRow& s = acc[{row.value, static_cast<int>(o.scheme)}];
      s.value = row.value;
      s.scheme = o.scheme;
      if (o.ok()) {
        s.mean_rate += o.rate_bits;
        ++s.count;
      } else {
        ++s.failures;
      }
    }
  }
  std::vector<SummaryRow> out;
  for (auto& [key, s] : acc) {
    if (s.count > 0) s.mean_rate /= s.count;
    out.push_back(s);
  }
  return out;
}

std::size_t count_failures(const std::vector<SweepRow>& rows, Failure kind) {
  std::size_t n = 0;
  for (const auto& row : rows) {
    for (const auto& o : row.outcomes) n += o.failure == kind;
  }
  return n;
}

std::string format_csv(const std::vector<SweepRow>& rows, bool include_timing) {
  std::string out = kCsvHeader;
  out += '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    for (const auto& o : row.outcomes) {
      out += row.sweep_var + ',' + number(row.value) + ',' + std::to_string(row.realization) + ',' + to_string(o.scheme);
      for (double v : {o.ok() ? o.rate_bits : nan, o.ok() ? o.snr_dest : nan, o.ok() ? o.snr_eve : nan,
                       o.ok() ? o.interference : nan, o.rank_ratio.value_or(nan), include_timing ? o.solve_ms : 0.0}) {
        out += ',' + number(v);
      }
      out += '\n';
    }
  }
  return out;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path, bool include_timing) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows to write");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << format_csv(rows, include_timing);
  f.flush();
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

} // namespace relaysec::experiment
