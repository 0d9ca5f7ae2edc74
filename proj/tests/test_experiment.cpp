#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "relaysec/experiment.hpp"

using namespace relaysec;
namespace ex = relaysec::experiment;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

ex::ExperimentConfig small_fig2() {
  ex::ExperimentConfig c = ex::ExperimentConfig::fig2();
  c.n_realizations = 2;
  c.pt_over_ps_db_range = {0.0, 15.0, 30.0};
  c.threads = 1;
  return c;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("relaysec_test_" + name);
}

TEST(GenerateRealization, ZeroDeviationGivesExactZeros) {
  ex::ExperimentConfig c;
  c.sigma_g = 0.0;
  const ChannelRealization r = ex::generate_realization(c, 0);
  for (Index m = 0; m < r.relays(); ++m) EXPECT_EQ(r.g[m], Complex(0.0, 0.0));
}

TEST(GenerateRealization, EmpiricalVariance) {
  ex::ExperimentConfig c;
  c.relays = 1000;
  c.sigma_g = 3.0;
  double sum = 0.0, re = 0.0;
  int n = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const ChannelRealization r = ex::generate_realization(c, i);
    for (Index m = 0; m < r.relays(); ++m) {
      sum += std::norm(r.g[m]);
      re += r.g[m].real() * r.g[m].real();
      ++n;
    }
  }
  EXPECT_NEAR(sum / n, 9.0, 0.02 * 9.0);
  EXPECT_NEAR(re / n, 4.5, 0.02 * 4.5);
}

TEST(GenerateRealization, DeterministicPerSeedAndIndex) {
  ex::ExperimentConfig c = ex::ExperimentConfig::fig3();
  const ChannelRealization a = ex::generate_realization(c, 7);
  const ChannelRealization b = ex::generate_realization(c, 7);
  EXPECT_EQ(a.g, b.g);
  EXPECT_EQ(a.h, b.h);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.k, b.k);
  EXPECT_NE(ex::generate_realization(c, 8).g, a.g);
  c.seed += 1;
  EXPECT_NE(ex::generate_realization(c, 7).g, a.g);
}

TEST(GenerateRealization, UsesConfiguredNoiseAndPower) {
  ex::ExperimentConfig c;
  c.ps_db = 10.0;
  c.relay_noise = 0.5;
  c.dest_noise = 2.0;
  const ChannelRealization r = ex::generate_realization(c, 0);
  EXPECT_NEAR(r.source_power, 10.0, 1e-12);
  EXPECT_EQ(r.dest_noise, 2.0);
  EXPECT_EQ(r.relay_noise[3], 0.5);
}

TEST(Config, PresetsCarryFigureParameters) {
  const ex::ExperimentConfig f2 = ex::ExperimentConfig::fig2();
  EXPECT_EQ(f2.relays, 10);
  EXPECT_EQ(f2.sigma_g, 10.0);
  EXPECT_EQ(f2.sigma_h, 1.0);
  EXPECT_EQ(f2.sigma_z, 1.0);
  EXPECT_EQ(f2.sigma_k, 1.0);
  EXPECT_EQ(f2.gamma_db, 0.0);
  const ex::ExperimentConfig f4 = ex::ExperimentConfig::fig4();
  EXPECT_EQ(f4.sigma_h, 2.0);
  EXPECT_EQ(f4.sigma_z, 2.0);
  EXPECT_EQ(f4.sigma_k, 4.0);
  EXPECT_EQ(f4.relays, 10);
  EXPECT_EQ(f4.ps_db, 0.0);
  EXPECT_EQ(f4.pt_over_ps_db, 0.0);
}

TEST(Config, JsonRoundTrip) {
  for (const char* name : {"fig2", "fig3", "fig4"}) {
    ex::ExperimentConfig c = ex::ExperimentConfig::preset(name);
    c.gamma_db_range.push_back(std::numeric_limits<double>::infinity());
    c.schemes = {ex::Scheme::Bne, ex::Scheme::Optimal};
    c.power_mode = PowerMode::Both;
    const std::string text = ex::to_json(c);
    const ex::ExperimentConfig back = ex::config_from_json(text);
    EXPECT_EQ(ex::to_json(back), text);
    EXPECT_EQ(back.sigma_k, c.sigma_k);
    EXPECT_EQ(back.relays, c.relays);
    EXPECT_TRUE(std::isinf(back.gamma_db_range.back()));
    EXPECT_EQ(back.schemes, c.schemes);
    EXPECT_EQ(back.power_mode, PowerMode::Both);
  }
}

TEST(Config, PresetKeyWithOverrides) {
  const ex::ExperimentConfig c = ex::config_from_json(R"({"preset": "fig4", "n_realizations": 3, "gamma_db": null})");
  EXPECT_EQ(c.name, "fig4");
  EXPECT_EQ(c.sigma_k, 4.0);
  EXPECT_EQ(c.n_realizations, 3);
  EXPECT_TRUE(std::isinf(c.gamma_db));
}

TEST(Config, RejectsInvalidInput) {
  EXPECT_THROW(ex::config_from_json(R"({"sigmag": 1})"), std::invalid_argument);
  EXPECT_THROW(ex::config_from_json(R"({"sigma_g": -1})"), std::invalid_argument);
  EXPECT_THROW(ex::config_from_json(R"({"schemes": []})"), std::invalid_argument);
  EXPECT_THROW(ex::config_from_json(R"({"schemes": ["best"]})"), std::invalid_argument);
  EXPECT_THROW(ex::config_from_json(R"({"relays": "ten"})"), std::invalid_argument);
  EXPECT_THROW(ex::config_from_json("{"), std::invalid_argument);
  EXPECT_THROW(ex::load_config("/nonexistent/relaysec.json"), ex::IoError);
}

TEST(Schemes, ParseList) {
  const auto s = ex::parse_schemes("bne,optimal,bne");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], ex::Scheme::Bne);
  EXPECT_THROW(ex::parse_schemes(""), std::invalid_argument);
  EXPECT_THROW(ex::parse_schemes("bne,foo"), std::invalid_argument);
}

TEST(PowerSweep, PropertiesPerRealization) {
  ex::ExperimentConfig c = small_fig2();
  c.schemes = {ex::Scheme::Optimal, ex::Scheme::Bne, ex::Scheme::BnepClosed};
  const auto rows = ex::run_power_sweep(c);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& row : rows) {
    ASSERT_EQ(row.outcomes.size(), 3u);
    for (const auto& o : row.outcomes) ASSERT_TRUE(o.ok()) << o.error;
    EXPECT_GE(row.outcomes[0].raw_rate, row.outcomes[1].raw_rate - 1e-6);
  }
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t s = 0; s < 2; ++s) {
      EXPECT_GE(rows[4 + r].outcomes[s].rate_bits, rows[r].outcomes[s].rate_bits);
    }
  }
  EXPECT_EQ(rows[0].value, 0.0);
  EXPECT_EQ(rows[5].value, 30.0);
  EXPECT_EQ(rows[5].realization, 1u);
}

// These high-power realizations once lost the optimum to spurious inner-solve
// failures near the best t1, leaving optimal below BNE.
TEST(PowerSweep, OptimalNotBelowBneAtHighPower) {
  ex::ExperimentConfig c = ex::ExperimentConfig::fig2();
  c.seed = 2024;
  c.schemes = {ex::Scheme::Optimal, ex::Scheme::Bne};
  for (std::uint64_t r : {68u, 82u}) {
    const ex::SweepRow row = ex::run_single(c, r, 30.0, 0.0);
    ASSERT_TRUE(row.outcomes[0].ok()) << row.outcomes[0].error;
    ASSERT_TRUE(row.outcomes[1].ok()) << row.outcomes[1].error;
    EXPECT_GE(row.outcomes[0].raw_rate, row.outcomes[1].raw_rate - 1e-6) << "realization " << r;
  }
}

TEST(PowerSweep, RatesReproducibleFromWeights) {
  ex::ExperimentConfig c = small_fig2();
  c.n_realizations = 1;
  const auto rows = ex::run_power_sweep(c);
  for (const auto& row : rows) {
    const DerivedChannel dc = derive_channel(ex::generate_realization(c, row.realization));
    for (const auto& o : row.outcomes) {
      ASSERT_TRUE(o.ok());
      EXPECT_NEAR(o.rate_bits, std::max(0.0, secrecy_rate(dc, o.w)), 1e-6);
    }
  }
}

TEST(GammaSweep, ClosedFormIgnoresGammaAndRatesGrow) {
  ex::ExperimentConfig c = ex::ExperimentConfig::fig4();
  c.n_realizations = 2;
  c.gamma_db_range = {-10.0, 0.0, 10.0};
  c.schemes = {ex::Scheme::Optimal, ex::Scheme::Bne, ex::Scheme::BnepClosed};
  c.threads = 1;
  const auto rows = ex::run_gamma_sweep(c);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t p = 1; p < 3; ++p) {
      const auto& prev = rows[(p - 1) * 2 + r];
      const auto& cur = rows[p * 2 + r];
      EXPECT_EQ(cur.outcomes[2].rate_bits, prev.outcomes[2].rate_bits);
      EXPECT_EQ(cur.outcomes[2].w, prev.outcomes[2].w);
      EXPECT_GE(cur.outcomes[0].raw_rate, prev.outcomes[0].raw_rate - 1e-6);
      EXPECT_GE(cur.outcomes[1].raw_rate, prev.outcomes[1].raw_rate - 1e-6);
    }
  }
}

TEST(Sweep, UnsupportedCombinationsAreRecorded) {
  ex::ExperimentConfig c = small_fig2();
  c.n_realizations = 1;
  c.pt_over_ps_db_range = {0.0};
  c.power_mode = PowerMode::Individual;
  c.schemes = {ex::Scheme::BnepClosed, ex::Scheme::Bne};
  auto rows = ex::run_power_sweep(c);
  EXPECT_EQ(rows[0].outcomes[0].failure, ex::Failure::Unsupported);
  EXPECT_TRUE(rows[0].outcomes[1].ok());

  c.power_mode = PowerMode::Total;
  c.eavesdroppers = 2;
  c.primary_users = 2;
  c.schemes = {ex::Scheme::Optimal, ex::Scheme::Bne, ex::Scheme::BnepSdp};
  rows = ex::run_power_sweep(c);
  EXPECT_EQ(rows[0].outcomes[0].failure, ex::Failure::Unsupported);
  ASSERT_TRUE(rows[0].outcomes[1].ok());
  EXPECT_LE(rows[0].outcomes[1].snr_eve, 1e-8);
  ASSERT_TRUE(rows[0].outcomes[2].ok());
  EXPECT_EQ(ex::count_failures(rows, ex::Failure::Numerical), 0u);

  c.relays = 3;
  rows = ex::run_power_sweep(c);
  EXPECT_EQ(rows[0].outcomes[2].failure, ex::Failure::Structural);
}

TEST(Csv, SingleRowFileHasTwoLines) {
  ex::ExperimentConfig c = small_fig2();
  c.n_realizations = 1;
  c.pt_over_ps_db_range = {10.0};
  c.schemes = {ex::Scheme::BnepClosed};
  const auto rows = ex::run_power_sweep(c);
  const auto path = temp_file("one.csv");
  ex::emit_csv(rows, path);
  std::ifstream f(path);
  std::string line;
  int lines = 0;
  while (std::getline(f, line)) ++lines;
  EXPECT_EQ(lines, 2);
  std::filesystem::remove(path);
}

TEST(Csv, RoundTripAndShape) {
  ex::ExperimentConfig c = small_fig2();
  c.schemes = {ex::Scheme::Bne, ex::Scheme::BnepClosed};
  const auto rows = ex::run_power_sweep(c);
  const std::string text = ex::format_csv(rows);
  ASSERT_EQ(text.back(), '\n');
  const auto table = parse_csv(text);
  ASSERT_EQ(table.size(), 1 + rows.size() * 2);
  EXPECT_EQ(text.substr(0, text.find('\n')), ex::kCsvHeader);
  for (const auto& r : table) EXPECT_EQ(r.size(), 10u);
  std::size_t line = 1;
  for (const auto& row : rows) {
    for (const auto& o : row.outcomes) {
      const auto& cells = table[line++];
      EXPECT_EQ(cells[0], "pt_over_ps_db");
      EXPECT_EQ(std::stod(cells[1]), row.value);
      EXPECT_EQ(std::stoul(cells[2]), row.realization);
      EXPECT_EQ(cells[3], ex::to_string(o.scheme));
      EXPECT_NEAR(std::stod(cells[4]), o.rate_bits, 1e-12 * std::max(1.0, o.rate_bits));
      EXPECT_EQ(std::stod(cells[5]), o.snr_dest);
      EXPECT_EQ(std::stod(cells[6]), o.snr_eve);
      EXPECT_EQ(std::stod(cells[7]), o.interference);
    }
  }
}

TEST(Csv, ByteIdenticalAcrossRunsAndThreadCounts) {
  ex::ExperimentConfig c = small_fig2();
  c.schemes = {ex::Scheme::Optimal, ex::Scheme::BnepSdp};
  const std::string a = ex::format_csv(ex::run_power_sweep(c), false);
  c.threads = 3;
  const std::string b = ex::format_csv(ex::run_power_sweep(c), false);
  EXPECT_EQ(a, b);
}

TEST(Csv, ErrorsCarryPath) {
  ex::ExperimentConfig c = small_fig2();
  c.n_realizations = 1;
  c.pt_over_ps_db_range = {0.0};
  c.schemes = {ex::Scheme::BnepClosed};
  const auto rows = ex::run_power_sweep(c);
  try {
    ex::emit_csv(rows, "/nonexistent-dir/out.csv");
    FAIL() << "expected IoError";
  } catch (const ex::IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.csv"), std::string::npos);
  }
  EXPECT_THROW(ex::emit_csv({}, temp_file("empty.csv")), std::invalid_argument);
}

TEST(Weights, DumpIsWritten) {
  ex::ExperimentConfig c = small_fig2();
  c.n_realizations = 1;
  c.pt_over_ps_db_range = {0.0};
  c.schemes = {ex::Scheme::BnepClosed};
  const auto rows = ex::run_power_sweep(c);
  const auto path = temp_file("w.json");
  ex::dump_weights(rows, path);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_NE(ss.str().find("\"bnep_closed\""), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Summary, MeansPerPointAndScheme) {
  ex::SweepRow a{"gamma_db", 1.0, 0, {}};
  ex::SchemeOutcome o;
  o.rate_bits = 2.0;
  a.outcomes.push_back(o);
  ex::SweepRow b = a;
  b.realization = 1;
  b.outcomes[0].rate_bits = 4.0;
  ex::SweepRow f = a;
  f.realization = 2;
  f.outcomes[0].failure = ex::Failure::Numerical;
  const auto s = ex::summarize({a, b, f});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s[0].mean_rate, 3.0);
  EXPECT_EQ(s[0].count, 2);
  EXPECT_EQ(s[0].failures, 1);
}

} // namespace
