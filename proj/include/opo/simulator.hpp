#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "opo/continuous.hpp"
#include "opo/environment.hpp"
#include "opo/model.hpp"

namespace opo {

// n i.i.d. records: x ~ context_probs, a ~ mu(.|x), loss per the noise model.
// Bit-reproducible given the seed.
LoggedDataset generate_logs(const SyntheticEnvironment& env, std::size_t n, std::uint64_t seed);
ContinuousDataset generate_logs(const ContinuousEnvironment& env, std::size_t n, std::uint64_t seed);

// sum_x P(x) sum_a pi(a|x) loss_means[x][a]
double exact_risk(const MassPolicy& pi, const SyntheticEnvironment& env);

// Smallest risk over the deterministic policies (per-context argmin).
double min_deterministic_risk(const SyntheticEnvironment& env);

struct LabeledExample {
  Context context;
  std::size_t label = 0;
};

// a ~ mu(.|x), loss = 1{a != label}; the full pmf is recorded.
LoggedDataset supervised_to_bandit(const std::vector<LabeledExample>& examples, const MassPolicy& logging,
                                   std::uint64_t seed);

// Stress instance for pessimism. In every context the last action is logged
// with propensity epsilon and has mean loss 0.9 (the worst); the other actions
// share 1 - epsilon and have mean losses in [0.3, 0.5]. Losses are Bernoulli, so
// a rare zero-loss draw makes the spurious action look perfect to plain IPW.
SyntheticEnvironment hard_instance(std::size_t num_contexts, std::size_t num_actions, double epsilon,
                                   std::uint64_t seed);

// Random environment: Dirichlet-like context weights, loss means in [0,1], and a
// logging pmf with every entry >= min_propensity.
SyntheticEnvironment random_environment(std::size_t num_contexts, std::size_t num_actions, std::uint64_t seed,
                                        LossNoise noise = LossNoise::kBernoulli, double min_propensity = 0.05);

// Random pmf table with num_contexts rows.
TablePolicy random_table_policy(std::size_t num_contexts, std::size_t num_actions, std::uint64_t seed);

// Random piecewise-constant density with up to max_pieces pieces, each value >= floor.
PiecewiseConstant random_density(std::size_t max_pieces, std::uint64_t seed, double floor = 0.2);
// Random piecewise-constant function with values in [0, 1].
PiecewiseConstant random_step_function(std::size_t max_pieces, std::uint64_t seed);

ContinuousEnvironment random_continuous_environment(std::size_t num_contexts, std::size_t max_pieces,
                                                    std::uint64_t seed, LossNoise noise = LossNoise::kBernoulli);

}  // namespace opo
