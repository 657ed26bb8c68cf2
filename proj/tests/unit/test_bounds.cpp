#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "opo/bounds.hpp"
#include "opo/estimators.hpp"

namespace opo {
namespace {

// Frozen values from tests/oracles/derive_constants.py (40-digit arithmetic).
constexpr double kBennett = 0.1323731157792207973;
constexpr double kBandLo = 1.989348507471808032;
constexpr double kBandHi = 6.0319544775845759039;
constexpr double kWidthSqrt = 0.62799872382087636302;
constexpr double kWidthCross = 0.14311639058981815747;
constexpr double kWidthRange = 0.05842702179565175483;
constexpr double kWidth = 0.82954213620634627532;
constexpr double kWidthEnvelope = 0.91423150500051267797;
constexpr double kPsiBeta = 0.038063803614253701913;
constexpr double kPsiCross = 0.16575448271009369804;
constexpr double kPsiRange = 0.067668984203117692289;
constexpr double kPsi = 0.27148727052746509224;
constexpr double kOracleIneq = 7.7001832281033320188;
constexpr double kBetaStarBound = 4.091557339359798552;
constexpr double kBetaCandidate = 0.11264073214465789908;

constexpr double kTol = 1e-14;

ClassStats example_stats(double class_size = 2.0) { return make_class_stats(1.0, 0.25, 4.0, class_size); }

void expect_sums(const BoundReport& r) {
  double total = 0.0;
  for (const auto& [k, v] : r.terms) total += v;
  EXPECT_NEAR(r.value, total, 1e-12) << r.name;
}

TEST(Bennett, Examples) {
  EXPECT_DOUBLE_EQ(bennett_bound(0.0, 100, 0.05), std::log(20.0) / 300.0);
  EXPECT_NEAR(bennett_bound(0.25, 100, 0.05), kBennett, kTol);
  double prev = bennett_bound(0.25, 100, 0.05);
  for (std::size_t n = 1000; n <= 1000000; n *= 10) {
    const double b = bennett_bound(0.25, n, 0.05);
    EXPECT_LT(b, prev);
    prev = b;
  }
  EXPECT_THROW(bennett_bound(-1.0, 10, 0.05), std::invalid_argument);
  EXPECT_THROW(bennett_bound(0.1, 0, 0.05), std::invalid_argument);
  EXPECT_THROW(bennett_bound(0.1, 10, 1.0), std::invalid_argument);
}

TEST(PlBand, Examples) {
  const auto band = pl_concentration_band(3.0, 1000, 0.1, 0.25);
  EXPECT_NEAR(band.lo, kBandLo, kTol);
  EXPECT_NEAR(band.hi, kBandHi, kTol);
  const auto wide_n = pl_concentration_band(3.0, std::size_t{1} << 60, 0.1, 0.25);
  EXPECT_NEAR(wide_n.lo, 2.0, 1e-12);
  EXPECT_NEAR(wide_n.hi, 6.0, 1e-12);
  EXPECT_TRUE(band.contains(3.0));
  EXPECT_THROW(pl_concentration_band(3.0, 10, 0.1, 0.0), std::invalid_argument);
}

TEST(ConfidenceWidth, Example) {
  const auto r = confidence_width(3.0, make_class_stats(1.0, 0.25, 4.0, 1.0), 100, 0.05);
  EXPECT_NEAR(r.term(term_names::kSqrt), kWidthSqrt, kTol);
  EXPECT_NEAR(r.term(term_names::kCross), kWidthCross, kTol);
  EXPECT_NEAR(r.term(term_names::kRange), kWidthRange, kTol);
  EXPECT_NEAR(r.value, kWidth, kTol);
  EXPECT_NEAR(r.derived_value("maxEnvelope"), kWidthEnvelope, kTol);
  EXPECT_LE(r.value, r.derived_value("maxEnvelope"));
  EXPECT_EQ(r.confidence, 0.05);
  expect_sums(r);
}

TEST(ConfidenceWidth, VanishesWithN) {
  const auto s = example_stats(1.0);
  double prev = confidence_width(3.0, s, 100, 0.05).value;
  for (std::size_t n = 1000; n <= 100000000; n *= 10) {
    const double w = confidence_width(3.0, s, n, 0.05).value;
    EXPECT_LT(w, prev);
    prev = w;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(PsiBeta, Example) {
  const auto r = psi_beta(example_stats(), 100, 0.05, 1.0);
  EXPECT_NEAR(r.term(term_names::kBeta), kPsiBeta, kTol);
  EXPECT_NEAR(r.term(term_names::kCross), kPsiCross, kTol);
  EXPECT_NEAR(r.term(term_names::kRange), kPsiRange, kTol);
  EXPECT_NEAR(r.value, kPsi, kTol);
  EXPECT_NEAR(r.value, 0.2715, 5e-5);
  expect_sums(r);
}

TEST(PsiBeta, LargeBetaLeavesBetaFreeTerms) {
  const auto r = psi_beta(example_stats(), 100, 0.05, 1e12);
  EXPECT_NEAR(r.value, kPsiCross + kPsiRange, 1e-12);
}

TEST(PsiBeta, ConvexInBetaAndDecreasingInN) {
  const auto s = example_stats(8.0);
  std::vector<double> vals;
  for (int i = 1; i <= 60; ++i) vals.push_back(psi_beta(s, 200, 0.05, 0.02 * i).value);
  for (std::size_t i = 1; i + 1 < vals.size(); ++i) EXPECT_GE(vals[i - 1] + vals[i + 1] - 2.0 * vals[i], -1e-15);
  for (std::size_t n = 10; n < 100000; n *= 2) {
    EXPECT_LT(psi_beta(s, 2 * n, 0.05, 0.3).value, psi_beta(s, n, 0.05, 0.3).value);
  }
  EXPECT_THROW(psi_beta(s, 10, 0.05, 0.0), std::invalid_argument);
}

TEST(UcbRisk, CompositionAndOrdering) {
  CounterRng rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto ds = test::random_dataset(rng, 3, 3, 30);
    const auto pi = test::random_table(rng, 3, 3);
    const auto s = make_class_stats(1.0, 0.05, 20.0, 27.0);
    const double beta = rng.uniform(0.01, 1.0);
    const double ucb = ucb_risk(*pi, ds, s, 0.05, beta);
    // independent recomputation from the constituent formulas
    const double l = std::log(4.0 * 27.0 / 0.05), n = 30.0;
    const double psi = 3.0 * l / (4.0 * beta * n) + std::sqrt(8.0 / (3.0 * 0.05)) * l / n + l * 20.0 / (3.0 * n);
    EXPECT_NEAR(ucb, ipw_risk(*pi, ds) + beta * pseudo_loss(*pi, ds) + psi, 1e-12);
    EXPECT_GE(ucb, ipw_risk(*pi, ds));
    const auto rep = ucb_report(*pi, ds, s, 0.05, beta);
    EXPECT_NEAR(rep.value, ucb, 1e-12);
    EXPECT_EQ(rep.derived_value("beta"), beta);
    expect_sums(rep);
  }
}

TEST(UcbRisk, LargerPseudoLossIsMorePessimistic) {
  // both policies have zero IPW risk (all losses zero); the deterministic one
  // sits on the rarely logged action and so has the larger PL_hat
  const auto ds = test::dataset(2, {test::record(0, 0, 0.0, {0.9, 0.1}), test::record(0, 1, 0.0, {0.9, 0.1})});
  const auto s = make_class_stats(1.0, 0.1, 10.0, 2.0);
  const DeterministicPolicy safe({0}, 2), risky({1}, 2);
  ASSERT_EQ(ipw_risk(safe, ds), ipw_risk(risky, ds));
  EXPECT_GT(ucb_risk(risky, ds, s, 0.05, 0.1), ucb_risk(safe, ds, s, 0.05, 0.1));
}

TEST(OracleInequality, Example) {
  EXPECT_NEAR(oracle_inequality_bound(example_stats(), 100, 0.05, 1.0, 3.0), kOracleIneq, 1e-13);
}

TEST(OracleInequality, DivergesAsBetaVanishesAndIsMinimizedAtStationaryPoint) {
  const auto s = example_stats();
  EXPECT_GT(oracle_inequality_bound(s, 100, 0.05, 1e-9, 3.0), 1e6);
  // a beta + b / beta is minimized at sqrt(b / a)
  const double l = std::log(160.0);
  const double beta_opt = std::sqrt(1.5 * l / 100.0 / (2.0 * 3.0));
  const double at_opt = oracle_inequality_bound(s, 100, 0.05, beta_opt, 3.0);
  for (double f : {0.5, 0.9, 0.99, 1.01, 1.1, 2.0}) {
    EXPECT_GT(oracle_inequality_bound(s, 100, 0.05, beta_opt * f, 3.0), at_opt);
  }
  EXPECT_NEAR(beta_opt, std::sqrt(s.delta_sup_pi * l / (100.0 * 3.0)) * std::sqrt(0.75), 1e-15);
}

TEST(BetaStarBound, Example) {
  const auto s = example_stats();
  EXPECT_NEAR(beta_star_bound(s, 100, 0.05, 3.0), kBetaStarBound, 1e-13);
  const double big = 1e10;
  EXPECT_NEAR(beta_star_bound(s, static_cast<std::size_t>(big), 0.05, 3.0) /
                  beta_star_bound(s, static_cast<std::size_t>(4 * big), 0.05, 3.0),
              2.0, 1e-3);
  CounterRng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_GE(beta_star_bound(s, 1 + rng.uniform_int(0, 1000), 0.05, 1.0), 0.0);
  EXPECT_THROW(beta_star_bound(s, 100, 0.05, 0.0), std::invalid_argument);
}

TEST(BetaCandidates, Examples) {
  const auto s = example_stats();
  EXPECT_NEAR(beta_for_pl(s, 100, 0.05, 3.0), kBetaCandidate, kTol);
  EXPECT_GT(beta_for_pl(s, 100, 0.05, 2.0), beta_for_pl(s, 100, 0.05, 3.0));

  CounterRng rng(9);
  const auto ds = test::random_dataset(rng, 2, 2, 10);
  const auto pi = test::random_table(rng, 2, 2);
  const auto cls = PolicyClass::enumerated({pi, pi, std::make_shared<UniformPolicy>(2)});
  const auto cand = beta_candidates(cls, ds, class_stats(cls, ds), 0.05);
  ASSERT_EQ(cand.size(), 3u);
  EXPECT_EQ(cand[0].beta, cand[1].beta);
  EXPECT_EQ(cand[2].member, 2u);
  EXPECT_EQ(cand[2].pl_hat, pseudo_loss(UniformPolicy(2), ds));
  EXPECT_THROW(beta_candidates(PolicyClass::parameterized(4.0), ds, s, 0.05), std::invalid_argument);
}

TEST(BoundReport, MissingTermThrows) {
  const auto r = psi_beta(example_stats(), 100, 0.05, 1.0);
  EXPECT_THROW(r.term("nope"), std::out_of_range);
}

}  // namespace
}  // namespace opo
