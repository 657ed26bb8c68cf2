#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "opo/estimators.hpp"
#include "opo/simulator.hpp"

namespace opo {
namespace {

TEST(GenerateLogs, RejectsEmptyRequest) {
  const auto env = random_environment(2, 2, 1);
  try {
    generate_logs(env, 0, 1);
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "n must be >= 1");
  }
}

TEST(GenerateLogs, ActionFrequencyMatchesLoggingPmf) {
  const double eps = 0.05;
  const SyntheticEnvironment env({1.0}, {{0.2, 0.7}}, TablePolicy({{1.0 - eps, eps}}), LossNoise::kNone);
  const std::size_t n = 10000;
  const auto ds = generate_logs(env, n, 5);
  double zeros = 0.0;
  for (const auto& r : ds.records) {
    zeros += r.action == 0 ? 1.0 : 0.0;
    EXPECT_EQ(r.loss, env.loss_means()[0][r.action]);
  }
  const double se = std::sqrt(eps * (1.0 - eps) / static_cast<double>(n));
  EXPECT_NEAR(zeros / static_cast<double>(n), 1.0 - eps, 3.0 * se);
}

TEST(GenerateLogs, SameSeedSameData) {
  const auto env = random_environment(3, 3, 2);
  const auto a = generate_logs(env, 50, 9), b = generate_logs(env, 50, 9), c = generate_logs(env, 50, 10);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.records[i].context, b.records[i].context);
    EXPECT_EQ(a.records[i].action, b.records[i].action);
    EXPECT_EQ(a.records[i].loss, b.records[i].loss);
    differs = differs || a.records[i].action != c.records[i].action || a.records[i].loss != c.records[i].loss;
  }
  EXPECT_TRUE(differs);
}

TEST(GenerateLogs, LoggingMomentsConverge) {
  const auto env = random_environment(3, 3, 44);
  const auto& mu = env.logging();
  const std::size_t n = 200000;
  const auto ds = generate_logs(env, n, 45);
  const auto q = risk_quantities(mu, ds);
  const double nn = static_cast<double>(n);
  const double v = exact_variance(mu, env);
  EXPECT_NEAR(q.ipw_risk, exact_risk(mu, env), 3.0 * std::sqrt(v / nn));
  // PL of the logging policy is the constant action count
  EXPECT_NEAR(q.pseudo_loss, exact_pl(mu, env), 1e-9);
  // losses are Bernoulli: variance of the sample variance is at most 1/n
  EXPECT_NEAR(q.sample_variance, v, 3.0 / std::sqrt(nn));
}

TEST(ExactRisk, Examples) {
  const SyntheticEnvironment env({1.0}, {{0.0, 1.0}}, TablePolicy({{0.5, 0.5}}), LossNoise::kNone);
  EXPECT_DOUBLE_EQ(exact_risk(UniformPolicy(2), env), 0.5);

  const auto rnd = random_environment(4, 3, 3);
  std::vector<std::size_t> argmin(4);
  for (std::size_t x = 0; x < 4; ++x) {
    const auto& row = rnd.loss_means()[x];
    argmin[x] = static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin());
  }
  EXPECT_DOUBLE_EQ(exact_risk(DeterministicPolicy(argmin, 3), rnd), min_deterministic_risk(rnd));
  const auto cls = PolicyClass::all_deterministic(4, 3);
  for (const auto& m : cls.members()) {
    EXPECT_GE(exact_risk(*m, rnd), min_deterministic_risk(rnd));
  }
}

TEST(ExactRisk, MatchesMonteCarlo) {
  const auto env = random_environment(3, 4, 12);
  CounterRng prng(13);
  const auto pi = test::random_table(prng, 3, 4);
  CounterRng rng(14);
  const std::size_t draws = 1000000;
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const std::size_t x = rng.categorical(env.context_probs());
    const std::size_t a = rng.categorical(pi->row(x));
    const double l = rng.bernoulli(env.loss_means()[x][a]) ? 1.0 : 0.0;
    s += l;
    s2 += l * l;
  }
  const double n = static_cast<double>(draws), m = s / n;
  EXPECT_NEAR(exact_risk(*pi, env), m, 3.0 * std::sqrt((s2 / n - m * m) / n));
}

TEST(SupervisedToBandit, Examples) {
  std::vector<LabeledExample> ex;
  for (std::size_t i = 0; i < 6000; ++i) ex.push_back({Context::from_id(i % 3), i % 3});
  // logging concentrated on the true label
  std::vector<std::vector<double>> near(3, std::vector<double>(3, 0.001));
  for (std::size_t c = 0; c < 3; ++c) near[c][c] = 0.998;
  const auto good = supervised_to_bandit(ex, TablePolicy(near), 1);
  double mean_good = 0.0;
  for (const auto& r : good.records) mean_good += r.loss;
  EXPECT_LT(mean_good / 6000.0, 0.01);

  const auto uni = supervised_to_bandit(ex, UniformPolicy(3), 2);
  double mean = 0.0;
  for (const auto& r : uni.records) {
    mean += r.loss;
    EXPECT_EQ(r.propensities.size(), 3u);
  }
  const double p = 2.0 / 3.0;
  EXPECT_NEAR(mean / 6000.0, p, 3.0 * std::sqrt(p * (1 - p) / 6000.0));

  const auto again = supervised_to_bandit(ex, UniformPolicy(3), 2);
  for (std::size_t i = 0; i < ex.size(); ++i) EXPECT_EQ(again.records[i].action, uni.records[i].action);

  EXPECT_THROW(supervised_to_bandit({{Context::from_id(0), 5}}, UniformPolicy(3), 1), std::invalid_argument);
}

TEST(HardInstance, SpuriousActionHasTinyPropensityAndWorstLoss) {
  const auto env = hard_instance(1, 2, 0.01, 3);
  const auto ds = generate_logs(env, 100, 4);
  const DeterministicPolicy spurious({1}, 2), safe({0}, 2);
  EXPECT_NEAR(pseudo_loss(spurious, ds), 100.0, 1e-9);
  EXPECT_NEAR(pseudo_loss(safe, ds), 1.0 / 0.99, 1e-12);
  EXPECT_GT(exact_risk(spurious, env), exact_risk(safe, env));
}

TEST(HardInstance, RiskOrderingHoldsInEveryContext) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t nx = 1 + seed % 4, na = 2 + seed % 3;
    const auto env = hard_instance(nx, na, 0.01, seed);
    for (std::size_t x = 0; x < nx; ++x) {
      const auto& l = env.loss_means()[x];
      for (std::size_t a = 0; a + 1 < na; ++a) EXPECT_GT(l[na - 1], l[a]);
      EXPECT_DOUBLE_EQ(env.logging().row(x)[na - 1], 0.01);
    }
  }
}

TEST(RandomEnvironments, RespectPropensityFloorAndDensityFloor) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto env = random_environment(3, 4, seed, LossNoise::kBernoulli, 0.1);
    for (const auto& row : env.logging().table()) {
      for (double p : row) EXPECT_GE(p, 0.1 - 1e-12);
    }
    const auto d = random_density(4, seed, 0.2);
    EXPECT_TRUE(d.is_density(0.2, 1e-9));
    const auto f = random_step_function(4, seed);
    EXPECT_GE(f.min_value(), 0.0);
    EXPECT_LE(f.max_value(), 1.0);
  }
}

}  // namespace
}  // namespace opo
