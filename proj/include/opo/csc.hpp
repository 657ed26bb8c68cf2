#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "opo/model.hpp"

namespace opo {

// N x |A| cost table with the context of each row.
class CostMatrix {
 public:
  CostMatrix(std::size_t num_actions, std::vector<Context> contexts);

  std::size_t rows() const { return contexts_.size(); }
  std::size_t num_actions() const { return num_actions_; }
  const std::vector<Context>& contexts() const { return contexts_; }

  std::span<double> row(std::size_t i) { return {costs_.data() + i * num_actions_, num_actions_}; }
  std::span<const double> row(std::size_t i) const { return {costs_.data() + i * num_actions_, num_actions_}; }
  double& at(std::size_t i, std::size_t a) { return costs_.at(i * num_actions_ + a); }
  double at(std::size_t i, std::size_t a) const { return costs_.at(i * num_actions_ + a); }

 private:
  std::size_t num_actions_;
  std::vector<Context> contexts_;
  std::vector<double> costs_;
};

// (1/N) sum_i sum_a pi(a|x_i) costs[i][a]
double average_cost(const MassPolicy& pi, const CostMatrix& costs);

// Row i, action a: l_i / mu(a_i|x_i) * 1{a == a_i} + beta / mu(a|x_i).
// Averaged under any pi this equals penalized_objective(pi, ds, beta).
CostMatrix build_modified_costs(const LoggedDataset& ds, double beta);

// CSV: row,context,c0,...,c{A-1}. Feature-mode contexts are written as -1.
void write_cost_csv(std::ostream& out, const CostMatrix& costs);

struct OracleResult {
  PolicyPtr policy;
  std::optional<std::size_t> member;  // class index, for enumerated classes
  double cost = 0.0;                  // average_cost of the returned policy
};

// Cost-sensitive classification: return the in-class policy minimizing
// average_cost. Implementations are pure, so concurrent solve() calls are fine.
class CscOracle {
 public:
  virtual ~CscOracle() = default;
  virtual OracleResult solve(const CostMatrix& costs) const = 0;
};

// Exact argmin over an explicit class; ties go to the lowest member index.
class EnumerationOracle final : public CscOracle {
 public:
  explicit EnumerationOracle(PolicyClass cls);
  OracleResult solve(const CostMatrix& costs) const override;
  const PolicyClass& policy_class() const { return cls_; }

 private:
  PolicyClass cls_;
};

// Argmin over all deterministic maps from context ids to actions: per context,
// the action with the smallest summed cost (ties to the lowest action).
class PointwiseArgminOracle final : public CscOracle {
 public:
  // Contexts without rows get action 0; num_contexts is a lower bound on the
  // size of the returned assignment table.
  explicit PointwiseArgminOracle(std::size_t num_contexts = 0) : num_contexts_(num_contexts) {}
  OracleResult solve(const CostMatrix& costs) const override;

 private:
  std::size_t num_contexts_;
};

// Deterministic policy picking argmin_a (w_a . x + b_a) on feature contexts.
class LinearArgminPolicy final : public MassPolicy {
 public:
  LinearArgminPolicy(std::vector<std::vector<double>> weights, std::vector<double> intercepts);

  std::size_t num_actions() const override { return intercepts_.size(); }
  using MassPolicy::pmf;
  void pmf(const Context& x, std::span<double> out) const override;
  double prob(const Context& x, std::size_t action) const override;
  double expected_cost(const Context& x, std::span<const double> costs) const override;

  std::size_t action(const Context& x) const;
  std::vector<double> predict(std::span<const double> features) const;
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<double>& intercepts() const { return intercepts_; }

 private:
  std::vector<std::vector<double>> weights_;
  std::vector<double> intercepts_;
};

struct RegressionConfig {
  // Penalty on feature weights; intercepts are not penalized.
  double ridge = 1e-6;
};

// Per-action least-squares cost regression on features; the policy takes the
// argmin of predicted costs. Approximate: not an exact CSC solver.
class RegressionOracle final : public CscOracle {
 public:
  explicit RegressionOracle(RegressionConfig config = {}) : config_(config) {}
  OracleResult solve(const CostMatrix& costs) const override;

 private:
  RegressionConfig config_;
};

struct TrainResult {
  PolicyPtr policy;
  std::optional<std::size_t> member;
  double objective = 0.0;  // penalized_objective(policy, ds, beta)
};

// Minimizes ipw_risk + beta * pseudo_loss with exactly one oracle call on the
// modified costs. beta == 0 gives the plain IPW minimizer.
TrainResult train_ipw_pl(const LoggedDataset& ds, double beta, const CscOracle& oracle);

// Reference minimizer: evaluates penalized_objective on every member.
TrainResult brute_force_objective_argmin(const LoggedDataset& ds, double beta, const PolicyClass& cls);

}  // namespace opo
