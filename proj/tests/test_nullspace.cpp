#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "relaysec/linalg.hpp"
#include "relaysec/nullspace.hpp"
#include "relaysec/optimal.hpp"
#include "support.hpp"

using namespace relaysec;
using namespace relaysec::testing;

namespace {

const InterferenceLimit kFree = InterferenceLimit::unlimited();

TEST(BuildContext, DimensionsAndInvariants) {
  const DerivedChannel dc = derive_channel(random_realization(1, 10));
  const std::vector<PrimaryUser> users{primary_user(dc, InterferenceLimit{1.0})};
  const NullSpaceContext bne = build_context(dc, users, {});
  EXPECT_EQ(bne.basis.rows(), 10);
  EXPECT_EQ(bne.basis.cols(), 9);
  NullTargets t;
  t.null_primary_users = true;
  const NullSpaceContext bnep = build_context(dc, users, t);
  EXPECT_EQ(bnep.basis.cols(), 8);
  for (const NullSpaceContext* c : {&bne, &bnep}) {
    const Index r = c->basis.cols();
    EXPECT_LT((c->basis.adjoint() * c->basis - CMatrix::Identity(r, r)).norm(), 1e-10);
    EXPECT_LT((dc.hz.adjoint() * c->basis).norm(), 1e-10);
  }
  EXPECT_LT((dc.hk.adjoint() * bnep.basis).norm(), 1e-10);
  // Projected forms: signal H^H hg hg^H H and destination noise H^H Dh H.
  const CVector p = bne.basis.adjoint() * dc.hg;
  EXPECT_LT((bne.signal - p * p.adjoint()).norm(), 1e-12);
  EXPECT_LT((bne.noise_dest - bne.basis.adjoint() * dc.Dh() * bne.basis).norm(), 1e-12);
}

TEST(BuildContext, RelayCountCondition) {
  const ChannelRealization r = random_realization(2, 5);
  const DerivedChannel dc = derive_channel(r);
  std::mt19937_64 rng(2);
  NullTargets t;
  t.null_primary_users = true;
  for (int i = 0; i < 2; ++i) t.extra_eavesdroppers.push_back(composite_channel(r, random_cvector(rng, 5)));
  const std::vector<PrimaryUser> users{primary_user(dc, kFree), primary_user(r, random_cvector(rng, 5), kFree)};
  try {
    build_context(dc, users, t);
    FAIL() << "expected StructuralError";
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("relays"), std::string::npos);
  }
}

TEST(SolveBne, SingleRelayHasNoNullSpace) {
  const DerivedChannel dc = derive_channel(random_realization(3, 1));
  EXPECT_THROW(solve_bne(dc, PowerConstraint::make_total(1.0), kFree), StructuralError);
  EXPECT_THROW(solve_bnep_closed_form(derive_channel(random_realization(3, 2)), 1.0), StructuralError);
}

TEST(SolveBne, EavesdropperIsBlind) {
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    const DerivedChannel dc = derive_channel(random_realization(seed, 6));
    const SolveResult s = solve_bne(dc, PowerConstraint::make_total(10.0), InterferenceLimit{0.5});
    EXPECT_LE(s.snr_eve, 1e-8);
    EXPECT_NEAR(s.secrecy_rate, std::log2(1.0 + s.snr_dest), 1e-8);
    EXPECT_TRUE(check_feasible(dc, s.w, PowerConstraint::make_total(10.0), InterferenceLimit{0.5}).feasible());
  }
}

TEST(SolveBne, TwoRelaysMatchOneDimensionalSweep) {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const ChannelRealization r = random_realization(seed, 2);
    const DerivedChannel dc = derive_channel(r);
    const double pt = 5.0, gamma = 0.3;
    const SolveResult s = solve_bne(dc, PowerConstraint::make_total(pt), InterferenceLimit{gamma});
    // One-dimensional null space: w = sqrt(p) h0 for p in [0, PT].
    const CVector h0 = kernel_basis({dc.hz}).col(0);
    const ScalarModel sm(r);
    double best = 0.0;
    const int n = 100000;
    for (int i = 1; i <= n; ++i) {
      const CVector w = std::sqrt(pt * i / n) * h0;
      if (sm.interference(w) <= gamma) best = std::max(best, sm.snr(sm.h, w));
    }
    EXPECT_NEAR(s.snr_dest, best, 1e-3 * best) << "seed " << seed;
  }
}

TEST(SolveBne, UnlimitedTotalPowerMatchesGeneralizedEigenvalue) {
  for (std::uint64_t seed : {10u, 11u}) {
    const DerivedChannel dc = derive_channel(random_realization(seed, 5, {}, 2.0));
    const double pt = 3.0;
    const SolveResult s = solve_bne(dc, PowerConstraint::make_total(pt), kFree);
    const CMatrix h = kernel_basis({dc.hz});
    const CVector p = h.adjoint() * dc.hg;
    CMatrix b = h.adjoint() * dc.Dh() * h;
    b.diagonal().array() += dc.dest_noise / pt;
    const double lam = linalg::generalized_eig_max(p * p.adjoint(), b).lambda;
    EXPECT_NEAR(s.secrecy_rate, std::log2(1.0 + dc.source_power * lam), 1e-4);
  }
}

TEST(SolveBne, BisectionBracketsTheOptimum) {
  const DerivedChannel dc = derive_channel(random_realization(12, 4));
  const PowerConstraint pc = PowerConstraint::make_total(2.0);
  const double gamma = 0.2;
  NullspaceParams np;
  const SolveResult s = solve_bne(dc, pc, InterferenceLimit{gamma}, np);
  const double t = s.stats.t1;
  ASSERT_GT(t, 0.0);
  // Problem (22) assembled from an independent basis.
  const CMatrix h = kernel_basis({dc.hz});
  const CVector p = h.adjoint() * dc.hg;
  const CMatrix a = dc.source_power * p * p.adjoint();
  const CMatrix b = h.adjoint() * dc.Dh() * h;
  const CVector c = h.adjoint() * dc.hk;
  const CMatrix q = h.adjoint() * dc.Dk() * h + dc.source_power * c * c.adjoint();
  auto problem = [&](double tt) {
    sdp::SdpProblem pr(h.cols());
    pr.add(a - tt * b, sdp::Sense::GreaterEqual, dc.dest_noise * tt);
    pr.add(q, sdp::Sense::LessEqual, gamma);
    pr.add_trace_bound(2.0);
    return pr;
  };
  EXPECT_TRUE(sdp::feasible(problem(t * (1 - 1e-6))));
  EXPECT_FALSE(sdp::feasible(problem(t * (1 + 10 * np.bisect_tol))));
}

TEST(SolveBne, MultipleEavesdroppersAreAllBlind) {
  const ChannelRealization r = random_realization(13, 6);
  const DerivedChannel dc = derive_channel(r);
  std::mt19937_64 rng(13);
  std::vector<CVector> extra_raw{random_cvector(rng, 6), random_cvector(rng, 6)};
  NullTargets t;
  for (const auto& z : extra_raw) t.extra_eavesdroppers.push_back(composite_channel(r, z));
  const PowerConstraint pc = PowerConstraint::make_total(4.0);
  for (bool bnep : {false, true}) {
    const std::vector<PrimaryUser> users{primary_user(dc, InterferenceLimit{1.0})};
    const SolveResult s = bnep ? solve_bnep_sdp(dc, pc, users, t) : solve_bne(dc, pc, users, t);
    EXPECT_LE(snr_eavesdropper(dc, s.w), 1e-8);
    for (const auto& z : extra_raw) {
      EXPECT_LE(received_snr(composite_channel(r, z), forwarded_noise(r, z), dc.source_power, dc.dest_noise, s.w), 1e-8);
    }
    EXPECT_GT(s.snr_dest, 0.0);
  }
}

TEST(SolveBnepSdp, PrimaryUserSeesOnlyForwardedNoise) {
  const DerivedChannel dc = derive_channel(random_realization(14, 6));
  const SolveResult s = solve_bnep_sdp(dc, PowerConstraint::make_total(5.0), InterferenceLimit{0.3});
  EXPECT_LE(std::abs(dc.hk.dot(s.w)), 1e-8);
  EXPECT_LE(std::abs(dc.hz.dot(s.w)), 1e-8);
  const double noise_only = std::real(s.w.dot(dc.Dk() * s.w));
  EXPECT_LT(std::abs(s.interference - noise_only), 1e-16 + 1e-14 * noise_only);
}

TEST(SolveBnepSdp, UnlimitedMatchesClosedForm) {
  for (std::uint64_t seed : {15u, 16u, 17u}) {
    const DerivedChannel dc = derive_channel(random_realization(seed, 5));
    const SolveResult sdp_r = solve_bnep_sdp(dc, PowerConstraint::make_total(6.0), kFree);
    const SolveResult cf = solve_bnep_closed_form(dc, 6.0);
    EXPECT_NEAR(sdp_r.secrecy_rate, cf.secrecy_rate, 1e-3 * cf.secrecy_rate);
  }
}

TEST(SolveBnepSdp, LimitBelowClosedFormNoiseReducesSnr) {
  const DerivedChannel dc = derive_channel(random_realization(18, 5));
  const double pt = 10.0;
  const SolveResult cf = solve_bnep_closed_form(dc, pt);
  const SolveResult tight = solve_bnep_sdp(dc, PowerConstraint::make_total(pt), InterferenceLimit{0.5 * cf.interference});
  EXPECT_LT(tight.snr_dest, cf.snr_dest * (1 - 1e-4));
  EXPECT_LE(tight.interference, 0.5 * cf.interference * (1 + 1e-7));
}

TEST(ClosedForm, UsesFullBudget) {
  const DerivedChannel dc = derive_channel(random_realization(19, 7));
  const SolveResult s = solve_bnep_closed_form(dc, 3.5);
  EXPECT_NEAR(s.w.squaredNorm(), 3.5, 1e-10);
  EXPECT_FALSE(s.rank_ratio.has_value());
  EXPECT_NEAR(s.secrecy_rate, *s.relaxation_bound, 1e-10);
}

TEST(ClosedForm, PhaseRotationInvariance) {
  ChannelRealization r = random_realization(20, 5);
  const double base = solve_bnep_closed_form(derive_channel(r), 2.0).secrecy_rate;
  for (int which = 0; which < 4; ++which) {
    ChannelRealization rr = r;
    CVector& c = which == 0 ? rr.g : which == 1 ? rr.h : which == 2 ? rr.z : rr.k;
    c *= std::polar(1.0, 1.234);
    EXPECT_NEAR(solve_bnep_closed_form(derive_channel(rr), 2.0).secrecy_rate, base, 1e-10) << which;
  }
}

TEST(ClosedForm, BeatsRandomDirections) {
  const DerivedChannel dc = derive_channel(random_realization(21, 4));
  const double pt = 2.0;
  const SolveResult s = solve_bnep_closed_form(dc, pt);
  const CMatrix h = kernel_basis({dc.hz, dc.hk});
  std::mt19937_64 rng(21);
  const SampledMax m = sample_then_climb(h.cols(), 100000, rng, [&](const CVector& u) {
    return secrecy_rate(dc, std::sqrt(pt) * h * u);
  }, 0);
  EXPECT_GE(s.secrecy_rate, m.sampled - 1e-12);
}

TEST(ClosedForm, FlagsViolatedLimit) {
  const DerivedChannel dc = derive_channel(random_realization(22, 5));
  const SolveResult s = solve_bnep_closed_form(dc, 5.0);
  EXPECT_TRUE(s.interference_ok);
  EXPECT_FALSE(solve_bnep_closed_form(dc, 5.0, InterferenceLimit{0.5 * s.interference}).interference_ok);
  EXPECT_TRUE(solve_bnep_closed_form(dc, 5.0, InterferenceLimit{2.0 * s.interference}).interference_ok);
}

TEST(Ordering, NestedFeasibleSets) {
  for (std::uint64_t seed : {23u, 24u, 25u}) {
    const DerivedChannel dc = derive_channel(random_realization(seed, 6));
    const PowerConstraint pc = PowerConstraint::make_total(10.0);
    const InterferenceLimit lim{1.0};
    const double opt = solve_optimal(dc, pc, lim).secrecy_rate;
    const double bne = solve_bne(dc, pc, lim).secrecy_rate;
    const SolveResult bnep = solve_bnep_sdp(dc, pc, lim);
    EXPECT_LE(bne, opt + 1e-6);
    EXPECT_LE(bnep.secrecy_rate, bne + 1e-6);
  }
}

TEST(SolveBne, IndividualPowerRespected) {
  const DerivedChannel dc = derive_channel(random_realization(26, 5));
  const PowerConstraint pc = PowerConstraint::equal_split(5.0, 5);
  for (bool bnep : {false, true}) {
    const SolveResult s = bnep ? solve_bnep_sdp(dc, pc, InterferenceLimit{1.0}) : solve_bne(dc, pc, InterferenceLimit{1.0});
    EXPECT_TRUE(check_feasible(dc, s.w, pc, InterferenceLimit{1.0}).feasible());
    EXPECT_LE(s.snr_eve, 1e-8);
  }
}

} // namespace
