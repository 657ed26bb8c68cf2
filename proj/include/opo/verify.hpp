#pragma once

// Randomized and exact checks of the estimator, reduction, and bound
// machinery. Each check is deterministic given its seed and reports counts,
// so the same code backs `opo verify` and the acceptance tests.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opo/environment.hpp"
#include "opo/model.hpp"

namespace opo {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::vector<std::pair<std::string, double>> metrics;
  std::string detail;  // first failure, or a short summary

  double metric(const std::string& key) const;
};

// trainIpwPl with the enumeration oracle against the brute-force argmin over
// all deterministic policies on small random instances. Also checks the
// per-member reduction identity and that the oracle is called exactly once.
struct DiscreteReductionParams {
  std::size_t instances = 50;
  std::size_t max_contexts = 4;
  std::size_t max_actions = 3;
  std::size_t max_n = 8;
  std::vector<double> betas{0.01, 0.1, 1.0};
  double tolerance = 1e-12;
  std::uint64_t seed = 1;
};
CheckResult check_discrete_reduction(const DiscreteReductionParams& p);

// Grid-side CSC objective against the density-side IPW + PL objective of the
// smoothed policy, plus the continuous trainer against brute force.
struct ContinuousReductionParams {
  std::size_t instances = 20;
  std::size_t max_k = 6;
  std::vector<double> bandwidths{0.2, 0.5};
  std::size_t max_n = 6;
  std::size_t max_pieces = 3;
  std::size_t max_contexts = 2;
  std::vector<double> betas{0.01, 0.1, 1.0};
  double tolerance = 1e-9;
  std::uint64_t seed = 2;
};
CheckResult check_continuous_reduction(const ContinuousReductionParams& p);

// exactVariance(pi) <= delta_sup(pi) * exactPL(pi) on random pairs.
struct VarianceDominationParams {
  std::size_t pairs = 200;
  double tolerance = 1e-10;
  std::uint64_t seed = 3;
};
CheckResult check_variance_domination(const VarianceDominationParams& p);

// Coverage of plConcentrationBand for each policy; passes if every policy's
// coverage is at least min_coverage.
struct CoverageParams {
  std::size_t n = 1000;
  double alpha = 0.1;
  std::size_t reps = 1000;
  double min_coverage = 0.9;
  std::uint64_t seed = 4;
};
CheckResult check_pl_band_coverage(const SyntheticEnvironment& env, const std::vector<PolicyPtr>& policies,
                                   const CoverageParams& p);

// |ipw_risk - R| <= confidence_width for each single policy.
CheckResult check_confidence_width_coverage(const SyntheticEnvironment& env, const std::vector<PolicyPtr>& policies,
                                            const CoverageParams& p);

// R(pi) <= ucbRisk(pi) simultaneously over an enumerated class. beta <= 0
// selects beta_for_pl(stats, n, alpha, 1).
CheckResult check_ucb_coverage(const SyntheticEnvironment& env, const PolicyClass& cls, const CoverageParams& p,
                               double beta = 0.0);

// Excess risk of trainIpwPl at the best beta among betaCandidates against
// min over pi of (R(pi) - R* + betaStarBound(PL(pi))), plus the fixed-beta
// oracle inequality. Class: all deterministic policies of the environment.
struct OracleInequalityParams {
  std::size_t n = 500;
  double alpha = 0.05;
  std::size_t reps = 200;
  double max_violation_rate = 0.05;
  std::uint64_t seed = 6;
};
CheckResult check_oracle_inequality(const SyntheticEnvironment& env, const OracleInequalityParams& p);

// Discretization and bandwidth-perturbation risk bounds on random continuous
// environments, both risks in closed form.
struct SmoothingParams {
  std::size_t environments = 50;
  std::size_t max_contexts = 3;
  std::size_t max_pieces = 4;
  std::size_t max_k = 24;
  double slack = 1e-12;
  std::uint64_t seed = 7;
};
CheckResult check_smoothing_bounds(const SmoothingParams& p);

// Smoothed policies: H/2 <= H_e <= H, unit mass, density <= 2/H, and the
// mass-side and density-side risk formulas agree.
CheckResult check_smoothed_policy_invariants(std::size_t trials, std::uint64_t seed);

// Mean excess risk with beta chosen from a grid by exact risk, against beta = 0.
struct PessimismParams {
  std::size_t num_contexts = 3;
  std::size_t num_actions = 3;
  double epsilon = 0.01;
  std::size_t n = 50;
  std::size_t reps = 500;
  std::vector<double> beta_grid{0.001, 0.003, 0.01, 0.03, 0.1};
  std::uint64_t seed = 8;
};
CheckResult check_pessimism_payoff(const PessimismParams& p);

// Mean excess risk at the best betaCandidate, over increasing N.
struct RateParams {
  std::vector<std::size_t> ns{100, 400, 1600, 6400};
  std::size_t reps = 200;
  double alpha = 0.05;
  double max_ratio = 0.55;  // mean(ns.back()) / mean(ns[1])
  std::uint64_t seed = 9;
};
CheckResult check_rate(const SyntheticEnvironment& env, const RateParams& p);

// Fixed environment with small loss gaps, used by the rate check.
SyntheticEnvironment rate_environment();

// Monte Carlo means of ipw_risk and pseudo_loss within z standard errors of
// exactRisk / exactPL.
struct UnbiasednessParams {
  std::size_t n = 20;
  std::size_t reps = 10000;
  double z = 3.0;
  std::uint64_t seed = 10;
};
CheckResult check_unbiasedness(const SyntheticEnvironment& env, const std::vector<PolicyPtr>& policies,
                               const UnbiasednessParams& p);

// Structural estimator and bound properties: PL_hat >= 1, ucb >= ipw,
// report sums, psi_beta convex in beta and decreasing in N, and the
// non-increasing PL_hat path of trainIpwPl over a beta grid.
CheckResult check_estimator_properties(const SyntheticEnvironment& env, std::size_t trials, std::uint64_t seed);

// validateDataset; fails if any violation is reported.
CheckResult check_dataset(const LoggedDataset& ds, const std::string& name = "dataset_validation");

struct SuiteConfig {
  std::size_t reps = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::optional<LoggedDataset> dataset;  // extra dataset to validate
};

// Every check above, scaled by cfg.reps, on the given environment.
std::vector<CheckResult> run_verification_suite(const SyntheticEnvironment& env, const SuiteConfig& cfg);

}  // namespace opo
