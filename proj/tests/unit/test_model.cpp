#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "opo/model.hpp"
#include "opo/simulator.hpp"

namespace opo {
namespace {

using test::dataset;
using test::record;

TEST(ValidateDataset, AcceptsWellFormedRecords) {
  const auto ds = dataset(2, {record(0, 0, 0.3, {0.5, 0.5})});
  EXPECT_TRUE(validate_dataset(ds).empty());
  EXPECT_NO_THROW(require_valid(ds));
}

TEST(ValidateDataset, ReportsZeroPropensity) {
  const auto ds = dataset(2, {record(0, 0, 0.3, {1.0, 0.0})});
  const auto v = validate_dataset(ds);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].message, "zero propensity at record 0");
  EXPECT_EQ(v[0].record, 0u);
  EXPECT_THROW(require_valid(ds), std::invalid_argument);
}

TEST(ValidateDataset, ReportsLossOutOfRange) {
  const auto ds = dataset(2, {record(0, 0, 1.5, {0.5, 0.5})});
  const auto v = validate_dataset(ds);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].message, "loss out of [0,1] at record 0");
}

TEST(ValidateDataset, ReportsStructuralProblems) {
  auto ds = dataset(2, {record(0, 2, 0.5, {0.5, 0.5}), record(0, 0, 0.5, {0.5, 0.4}), record(0, 0, 0.5, {1.0})});
  const auto v = validate_dataset(ds);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].message, "action out of range at record 0");
  EXPECT_EQ(v[1].message, "propensities do not sum to 1 at record 1");
  EXPECT_EQ(v[2].message, "propensity vector length mismatch at record 2");
  EXPECT_FALSE(validate_dataset(dataset(2, {})).empty());
}

TEST(ValidateDataset, AcceptsSimulatorOutput) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto env = random_environment(1 + seed % 4, 2 + seed % 3, seed);
    EXPECT_TRUE(validate_dataset(generate_logs(env, 200, seed)).empty()) << "seed " << seed;
  }
}

TEST(Policies, PmfsAreProperOnRandomPolicies) {
  CounterRng rng(11);
  for (int t = 0; t < 100; ++t) {
    const std::size_t nx = rng.uniform_int(1, 5), na = rng.uniform_int(2, 6);
    const auto table = test::random_table(rng, nx, na);
    std::vector<std::size_t> assignment(nx);
    for (auto& a : assignment) a = rng.uniform_int(0, na - 1);
    const DeterministicPolicy det(assignment, na);
    const UniformPolicy uni(na);
    for (std::size_t x = 0; x < nx; ++x) {
      for (const MassPolicy* pi : {static_cast<const MassPolicy*>(table.get()), static_cast<const MassPolicy*>(&det),
                                   static_cast<const MassPolicy*>(&uni)}) {
        const auto p = pi->pmf(Context::from_id(x));
        double sum = 0.0;
        for (std::size_t a = 0; a < p.size(); ++a) {
          EXPECT_GE(p[a], 0.0);
          EXPECT_EQ(p[a], pi->prob(Context::from_id(x), a));
          sum += p[a];
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
    }
  }
}

TEST(Policies, RejectMalformedTables) {
  EXPECT_THROW(TablePolicy({{0.5, 0.4}}), std::invalid_argument);
  EXPECT_THROW(TablePolicy({{1.2, -0.2}}), std::invalid_argument);
  EXPECT_THROW(TablePolicy({{0.5, 0.5}, {1.0}}), std::invalid_argument);
  EXPECT_THROW(DeterministicPolicy({3}, 3), std::invalid_argument);
  EXPECT_THROW(UniformPolicy(0), std::invalid_argument);
}

TEST(Policies, DeterministicClassDigitOrder) {
  const auto cls = PolicyClass::all_deterministic(3, 2);
  ASSERT_EQ(cls.members().size(), 8u);
  EXPECT_EQ(cls.size(), 8.0);
  // member 6 = 110 in base 2, context 0 least significant
  const auto& d = dynamic_cast<const DeterministicPolicy&>(cls.member(6));
  EXPECT_EQ(d.assignment(), (std::vector<std::size_t>{0, 1, 1}));
}

TEST(PmfExtrema, Examples) {
  const std::vector<Context> xs{Context::from_id(0), Context::from_id(1)};
  const auto u = pmf_extrema(UniformPolicy(4), xs);
  EXPECT_EQ(u.sup, 0.25);
  EXPECT_EQ(u.inf, 0.25);
  const auto d = pmf_extrema(DeterministicPolicy({0, 1}, 2), xs);
  EXPECT_EQ(d.sup, 1.0);
  EXPECT_EQ(d.inf, 0.0);
  const auto t = pmf_extrema(TablePolicy({{0.8, 0.2}, {0.6, 0.4}}), xs);
  EXPECT_EQ(t.sup, 0.8);
  EXPECT_EQ(t.inf, 0.2);
}

TEST(ClassStats, MatchedUniformPolicies) {
  const std::vector<Context> xs{Context::from_id(0)};
  const auto cls = PolicyClass::enumerated({std::make_shared<UniformPolicy>(2)});
  const auto s = class_stats(cls, UniformPolicy(2), xs);
  EXPECT_EQ(s.delta_sup_pi, 0.5);
  EXPECT_EQ(s.delta_inf_mu, 0.5);
  EXPECT_EQ(s.delta_sup_pi_mu, 1.0);
  EXPECT_EQ(s.delta_pi_mu, 1.0);
}

TEST(ClassStats, DeterministicAgainstSkewedLogging) {
  const std::vector<Context> xs{Context::from_id(0)};
  const auto cls = PolicyClass::enumerated({std::make_shared<DeterministicPolicy>(std::vector<std::size_t>{1}, 2)});
  const auto s = class_stats(cls, TablePolicy({{0.8, 0.2}}), xs);
  EXPECT_EQ(s.delta_sup_pi, 1.0);
  EXPECT_NEAR(s.delta_sup_pi_mu, 5.0, 1e-12);
  EXPECT_NEAR(s.delta_pi_mu, 5.0, 1e-12);
}

TEST(ClassStats, SupIsMaxOverMembers) {
  const std::vector<Context> xs{Context::from_id(0)};
  const auto cls = PolicyClass::enumerated(
      {std::make_shared<TablePolicy>(std::vector<std::vector<double>>{{0.6, 0.4}}),
       std::make_shared<TablePolicy>(std::vector<std::vector<double>>{{0.1, 0.9}})});
  EXPECT_EQ(class_stats(cls, UniformPolicy(2), xs).delta_sup_pi, 0.9);
}

TEST(ClassStats, DeltaPiMuIsRecomputedMax) {
  CounterRng rng(5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t nx = rng.uniform_int(1, 4), na = rng.uniform_int(2, 4);
    const auto ds = test::random_dataset(rng, nx, na, 20);
    std::vector<PolicyPtr> members;
    for (int m = 0; m < 3; ++m) members.push_back(test::random_table(rng, nx, na));
    const auto s = class_stats(PolicyClass::enumerated(members), ds);
    EXPECT_EQ(s.delta_pi_mu, std::max(std::sqrt(s.delta_sup_pi / s.delta_inf_mu), s.delta_sup_pi_mu));
  }
}

TEST(ClassStats, DatasetStatsUseObservedContexts) {
  // context 1 has the smaller propensity but never appears in the data
  const auto ds = dataset(2, {record(0, 0, 0.5, {0.4, 0.6})});
  const auto cls = PolicyClass::all_deterministic(2, 2);
  const auto s = class_stats(cls, ds);
  EXPECT_EQ(s.delta_inf_mu, 0.4);
  EXPECT_NEAR(s.delta_sup_pi_mu, 2.5, 1e-12);
  EXPECT_EQ(s.class_size, 4.0);
}

TEST(ClassStats, RejectsBadInputs) {
  EXPECT_THROW(make_class_stats(1.0, 0.0, 1.0, 2.0), std::invalid_argument);
  EXPECT_THROW(make_class_stats(1.0, 0.5, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(class_stats(PolicyClass::parameterized(10.0), UniformPolicy(2), std::vector<Context>{}),
               std::invalid_argument);
}

TEST(Contexts, IdAndFeatureModes) {
  const auto a = Context::from_id(3);
  const auto b = Context::from_features({1.0, 2.0});
  EXPECT_TRUE(a.has_id());
  EXPECT_FALSE(b.has_id());
  EXPECT_EQ(a.id(), 3u);
  EXPECT_EQ(b.features().size(), 2u);
  EXPECT_THROW(b.id(), std::invalid_argument);
  EXPECT_THROW(a.features(), std::invalid_argument);
}

}  // namespace
}  // namespace opo
