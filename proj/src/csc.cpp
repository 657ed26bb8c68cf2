#include "opo/csc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "opo/estimators.hpp"

namespace opo {

CostMatrix::CostMatrix(std::size_t num_actions, std::vector<Context> contexts)
    : num_actions_(num_actions), contexts_(std::move(contexts)), costs_(num_actions_ * contexts_.size(), 0.0) {
  if (num_actions_ == 0) throw std::invalid_argument("cost matrix needs at least one action");
}

double average_cost(const MassPolicy& pi, const CostMatrix& costs) {
  if (costs.rows() == 0) throw std::invalid_argument("empty cost matrix");
  double acc = 0.0;
  for (std::size_t i = 0; i < costs.rows(); ++i) acc += pi.expected_cost(costs.contexts()[i], costs.row(i));
  return acc / static_cast<double>(costs.rows());
}

CostMatrix build_modified_costs(const LoggedDataset& ds, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  require_valid(ds);
  CostMatrix costs(ds.num_actions, ds.contexts());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds.records[i];
    auto row = costs.row(i);
    for (std::size_t a = 0; a < ds.num_actions; ++a) row[a] = beta / r.propensities[a];
    row[r.action] += r.loss / r.propensities[r.action];
  }
  return costs;
}

void write_cost_csv(std::ostream& out, const CostMatrix& costs) {
  out << "row,context";
  for (std::size_t a = 0; a < costs.num_actions(); ++a) out << ",c" << a;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < costs.rows(); ++i) {
    const auto& x = costs.contexts()[i];
    out << i << ',';
    if (x.has_id()) out << x.id();
    else out << -1;
    for (double c : costs.row(i)) out << ',' << c;
    out << '\n';
  }
}

// --- Enumeration ------------------------------------------------------------

EnumerationOracle::EnumerationOracle(PolicyClass cls) : cls_(std::move(cls)) {
  if (!cls_.is_enumerated()) throw std::invalid_argument("enumeration oracle needs explicit members");
}

OracleResult EnumerationOracle::solve(const CostMatrix& costs) const {
  std::size_t best = 0;
  double best_cost = average_cost(cls_.member(0), costs);
  for (std::size_t m = 1; m < cls_.members().size(); ++m) {
    const double c = average_cost(cls_.member(m), costs);
    if (c < best_cost) {
      best = m;
      best_cost = c;
    }
  }
  return {cls_.members()[best], best, best_cost};
}

// --- Pointwise argmin -------------------------------------------------------

OracleResult PointwiseArgminOracle::solve(const CostMatrix& costs) const {
  std::size_t n_ctx = num_contexts_;
  for (const auto& x : costs.contexts()) {
    if (!x.has_id()) throw std::invalid_argument("pointwise argmin oracle needs context ids");
    n_ctx = std::max(n_ctx, x.id() + 1);
  }
  std::vector<std::vector<double>> sums(n_ctx, std::vector<double>(costs.num_actions(), 0.0));
  for (std::size_t i = 0; i < costs.rows(); ++i) {
    auto& s = sums[costs.contexts()[i].id()];
    const auto row = costs.row(i);
    for (std::size_t a = 0; a < costs.num_actions(); ++a) s[a] += row[a];
  }
  std::vector<std::size_t> assign(n_ctx, 0);
  for (std::size_t x = 0; x < n_ctx; ++x) {
    assign[x] = static_cast<std::size_t>(std::min_element(sums[x].begin(), sums[x].end()) - sums[x].begin());
  }
  auto policy = std::make_shared<DeterministicPolicy>(std::move(assign), costs.num_actions());
  const double c = average_cost(*policy, costs);
  return {std::move(policy), std::nullopt, c};
}

// --- Regression -------------------------------------------------------------

LinearArgminPolicy::LinearArgminPolicy(std::vector<std::vector<double>> weights, std::vector<double> intercepts)
    : weights_(std::move(weights)), intercepts_(std::move(intercepts)) {
  if (intercepts_.empty() || weights_.size() != intercepts_.size()) {
    throw std::invalid_argument("linear policy needs one weight vector and intercept per action");
  }
  for (const auto& w : weights_) {
    if (w.size() != weights_.front().size()) throw std::invalid_argument("linear policy weight dimension mismatch");
  }
}

std::vector<double> LinearArgminPolicy::predict(std::span<const double> features) const {
  if (features.size() != weights_.front().size()) throw std::invalid_argument("feature dimension mismatch");
  std::vector<double> out(intercepts_);
  for (std::size_t a = 0; a < out.size(); ++a) {
    for (std::size_t j = 0; j < features.size(); ++j) out[a] += weights_[a][j] * features[j];
  }
  return out;
}

std::size_t LinearArgminPolicy::action(const Context& x) const {
  const auto pred = predict(x.features());
  return static_cast<std::size_t>(std::min_element(pred.begin(), pred.end()) - pred.begin());
}

void LinearArgminPolicy::pmf(const Context& x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  out[action(x)] = 1.0;
}

double LinearArgminPolicy::prob(const Context& x, std::size_t a) const { return action(x) == a ? 1.0 : 0.0; }

double LinearArgminPolicy::expected_cost(const Context& x, std::span<const double> costs) const {
  return costs[action(x)];
}

OracleResult RegressionOracle::solve(const CostMatrix& costs) const {
  if (!(config_.ridge >= 0.0)) throw std::invalid_argument("ridge must be non-negative");
  const std::size_t n = costs.rows();
  if (n == 0) throw std::invalid_argument("empty cost matrix");
  const std::size_t dim = costs.contexts().front().features().size();

  Eigen::MatrixXd x(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = costs.contexts()[i].features();
    if (f.size() != dim) throw std::invalid_argument("feature dimension mismatch");
    for (std::size_t j = 0; j < dim; ++j) x(i, j) = f[j];
  }
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += config_.ridge;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (dim > 0 && !lu.isInvertible()) throw std::invalid_argument("singular design; increase ridge");

  std::vector<std::vector<double>> weights(costs.num_actions(), std::vector<double>(dim, 0.0));
  std::vector<double> intercepts(costs.num_actions(), 0.0);
  for (std::size_t a = 0; a < costs.num_actions(); ++a) {
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) y(i) = costs.at(i, a);
    const double y_mean = y.mean();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    if (dim > 0) w = lu.solve(xc.transpose() * (y.array() - y_mean).matrix());
    for (std::size_t j = 0; j < dim; ++j) weights[a][j] = w(static_cast<Eigen::Index>(j));
    intercepts[a] = y_mean - x_mean.dot(w);
  }
  auto policy = std::make_shared<LinearArgminPolicy>(std::move(weights), std::move(intercepts));
  const double c = average_cost(*policy, costs);
  return {std::move(policy), std::nullopt, c};
}

// --- Training ---------------------------------------------------------------

TrainResult train_ipw_pl(const LoggedDataset& ds, double beta, const CscOracle& oracle) {
  const auto costs = build_modified_costs(ds, beta);
  auto solved = oracle.solve(costs);
  const double objective = penalized_objective(*solved.policy, ds, beta);
  return {std::move(solved.policy), solved.member, objective};
}

TrainResult brute_force_objective_argmin(const LoggedDataset& ds, double beta, const PolicyClass& cls) {
  if (!cls.is_enumerated()) throw std::invalid_argument("brute force needs an enumerated class");
  std::size_t best = 0;
  double best_obj = penalized_objective(cls.member(0), ds, beta);
  for (std::size_t m = 1; m < cls.members().size(); ++m) {
    const double obj = penalized_objective(cls.member(m), ds, beta);
    if (obj < best_obj) {
      best = m;
      best_obj = obj;
    }
  }
  return {cls.members()[best], best, best_obj};
}

}  // namespace opo
