#include "opo/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opo {

namespace {

double checked_propensity(const LoggedRecord& r, std::size_t a) {
  const double p = r.propensities.at(a);
  if (!(p >= kPropensityFloor)) throw std::invalid_argument("propensity below floor");
  return p;
}

void require_records(const LoggedDataset& ds) {
  if (ds.records.empty()) throw std::invalid_argument("dataset has no records");
}

}  // namespace

std::vector<double> ipw_terms(const MassPolicy& pi, const LoggedDataset& ds) {
  require_records(ds);
  std::vector<double> out;
  out.reserve(ds.size());
  for (const auto& r : ds.records) {
    const double mu = checked_propensity(r, r.action);
    out.push_back(pi.prob(r.context, r.action) / mu * r.loss);
  }
  return out;
}

double ipw_risk(const MassPolicy& pi, const LoggedDataset& ds) {
  require_records(ds);
  double acc = 0.0;
  for (const auto& r : ds.records) {
    const double mu = checked_propensity(r, r.action);
    acc += pi.prob(r.context, r.action) / mu * r.loss;
  }
  return acc / static_cast<double>(ds.size());
}

double pseudo_loss(const MassPolicy& pi, const LoggedDataset& ds) {
  require_records(ds);
  std::vector<double> p(ds.num_actions);
  double acc = 0.0;
  for (const auto& r : ds.records) {
    pi.pmf(r.context, p);
    for (std::size_t a = 0; a < ds.num_actions; ++a) acc += p[a] / checked_propensity(r, a);
  }
  return acc / static_cast<double>(ds.size());
}

double penalized_objective(const MassPolicy& pi, const LoggedDataset& ds, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  return ipw_risk(pi, ds) + beta * pseudo_loss(pi, ds);
}

double population_variance(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("variance of an empty sample");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size());
}

RiskQuantities risk_quantities(const MassPolicy& pi, const LoggedDataset& ds) {
  const auto terms = ipw_terms(pi, ds);
  return {ipw_risk(pi, ds), pseudo_loss(pi, ds), population_variance(terms)};
}

double eb_objective(const MassPolicy& pi, const LoggedDataset& ds, double lambda) {
  if (ds.size() < 2) throw std::invalid_argument("eb_objective needs at least two records");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  const auto terms = ipw_terms(pi, ds);
  const double var = population_variance(terms);
  return ipw_risk(pi, ds) + lambda * std::sqrt(var / static_cast<double>(ds.size()));
}

double exact_pl(const MassPolicy& pi, const SyntheticEnvironment& env) {
  std::vector<double> p(env.num_actions());
  double acc = 0.0;
  for (std::size_t x = 0; x < env.num_contexts(); ++x) {
    pi.pmf(Context::from_id(x), p);
    const auto mu = env.logging().row(x);
    double inner = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) inner += p[a] / mu[a];
    acc += env.context_probs()[x] * inner;
  }
  return acc;
}

double exact_variance(const MassPolicy& pi, const SyntheticEnvironment& env) {
  // Z = pi/mu * l with a ~ mu: E[Z] = sum_x P(x) sum_a pi * E[l],
  // E[Z^2] = sum_x P(x) sum_a pi^2 / mu * E[l^2].
  std::vector<double> p(env.num_actions());
  double first = 0.0;
  double second = 0.0;
  for (std::size_t x = 0; x < env.num_contexts(); ++x) {
    pi.pmf(Context::from_id(x), p);
    const auto mu = env.logging().row(x);
    const double px = env.context_probs()[x];
    for (std::size_t a = 0; a < p.size(); ++a) {
      first += px * p[a] * env.loss_means()[x][a];
      second += px * p[a] * p[a] / mu[a] * env.second_moment(x, a);
    }
  }
  return std::max(0.0, second - first * first);
}

}  // namespace opo
