#include <gtest/gtest.h>

#include "helpers.hpp"
#include "opo/simulator.hpp"
#include "opo/verify.hpp"

namespace opo {
namespace {

TEST(Verify, ReductionChecksPass) {
  const auto d = check_discrete_reduction({});
  EXPECT_TRUE(d.passed) << d.detail;
  EXPECT_EQ(d.failures, 0u);
  const auto c = check_continuous_reduction({});
  EXPECT_TRUE(c.passed) << c.detail;
}

TEST(Verify, SmallCoverageRunsPass) {
  const auto env = random_environment(3, 2, 5, LossNoise::kBernoulli, 0.1);
  const auto cls = PolicyClass::all_deterministic(3, 2);
  CoverageParams p;
  p.reps = 200;
  p.n = 300;
  p.alpha = 0.05;
  p.min_coverage = 0.95;
  const auto ucb = check_ucb_coverage(env, cls, p);
  EXPECT_TRUE(ucb.passed) << ucb.detail;
  const auto width = check_confidence_width_coverage(env, cls.members(), p);
  EXPECT_TRUE(width.passed) << width.detail;
  p.alpha = 0.1;
  p.min_coverage = 0.9;
  const auto band = check_pl_band_coverage(env, cls.members(), p);
  EXPECT_TRUE(band.passed) << band.detail;
}

TEST(Verify, InjectedZeroPropensityFailsDatasetCheck) {
  auto ds = generate_logs(random_environment(2, 2, 1), 10, 1);
  EXPECT_TRUE(check_dataset(ds).passed);
  ds.records[3].propensities = {1.0, 0.0};
  const auto r = check_dataset(ds);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.failures, 1u);
  EXPECT_NE(r.detail.find("zero propensity at record 3"), std::string::npos);
}

TEST(Verify, SuiteReportsDatasetFailure) {
  const auto env = random_environment(2, 2, 3, LossNoise::kBernoulli, 0.1);
  SuiteConfig cfg;
  cfg.reps = 20;
  auto ds = generate_logs(env, 10, 1);
  ds.records[0].loss = 2.0;
  cfg.dataset = ds;
  const auto results = run_verification_suite(env, cfg);
  ASSERT_FALSE(results.empty());
  bool saw_dataset = false;
  for (const auto& r : results) {
    if (r.name == "input_dataset_validation") {
      saw_dataset = true;
      EXPECT_FALSE(r.passed);
    }
  }
  EXPECT_TRUE(saw_dataset);
}

TEST(Verify, ChecksAreDeterministic) {
  const auto a = check_smoothed_policy_invariants(50, 4);
  const auto b = check_smoothed_policy_invariants(50, 4);
  EXPECT_TRUE(a.passed) << a.detail;
  EXPECT_EQ(a.metrics, b.metrics);
}

}  // namespace
}  // namespace opo
