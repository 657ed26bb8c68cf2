#include "opo/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opo/rng.hpp"

namespace opo {

namespace {

double realize_loss(double mean, LossNoise noise, CounterRng& rng) {
  return noise == LossNoise::kBernoulli ? (rng.bernoulli(mean) ? 1.0 : 0.0) : mean;
}

std::vector<double> normalized(std::vector<double> w) {
  double total = 0.0;
  for (double v : w) total += v;
  for (auto& v : w) v /= total;
  return w;
}

// Exponential weights give a flat Dirichlet draw.
std::vector<double> random_simplex(std::size_t n, CounterRng& rng) {
  std::vector<double> w(n);
  for (auto& v : w) v = -std::log(1.0 - rng.uniform());
  return normalized(std::move(w));
}

// Simplex point with every coordinate >= floor (floor * n < 1).
std::vector<double> random_floored_simplex(std::size_t n, double floor, CounterRng& rng) {
  auto p = random_simplex(n, rng);
  const double scale = 1.0 - floor * static_cast<double>(n);
  for (auto& v : p) v = floor + scale * v;
  return normalized(std::move(p));
}

}  // namespace

LoggedDataset generate_logs(const SyntheticEnvironment& env, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  CounterRng rng(seed);
  LoggedDataset ds;
  ds.num_actions = env.num_actions();
  ds.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t x = rng.categorical(env.context_probs());
    const auto mu = env.logging().row(x);
    const std::size_t a = rng.categorical(mu);
    const double loss = realize_loss(env.loss_means()[x][a], env.noise(), rng);
    ds.records.push_back({Context::from_id(x), a, loss, std::vector<double>(mu.begin(), mu.end())});
  }
  return ds;
}

ContinuousDataset generate_logs(const ContinuousEnvironment& env, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  CounterRng rng(seed);
  ContinuousDataset ds;
  ds.records.reserve(n);
  std::vector<double> piece_mass;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t x = rng.categorical(env.context_probs());
    const auto& mu = env.logging()[x];
    piece_mass.resize(mu.pieces());
    for (std::size_t j = 0; j < mu.pieces(); ++j) {
      piece_mass[j] = mu.values()[j] * (mu.breaks()[j + 1] - mu.breaks()[j]);
    }
    const std::size_t piece = rng.categorical(piece_mass);
    const double a = rng.uniform(mu.breaks()[piece], mu.breaks()[piece + 1]);
    const double loss = realize_loss(env.losses()[x](a), env.noise(), rng);
    ds.records.push_back({Context::from_id(x), a, loss, mu});
  }
  return ds;
}

double exact_risk(const MassPolicy& pi, const SyntheticEnvironment& env) {
  std::vector<double> p(env.num_actions());
  double acc = 0.0;
  for (std::size_t x = 0; x < env.num_contexts(); ++x) {
    pi.pmf(Context::from_id(x), p);
    double inner = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) inner += p[a] * env.loss_means()[x][a];
    acc += env.context_probs()[x] * inner;
  }
  return acc;
}

double min_deterministic_risk(const SyntheticEnvironment& env) {
  double acc = 0.0;
  for (std::size_t x = 0; x < env.num_contexts(); ++x) {
    const auto& row = env.loss_means()[x];
    acc += env.context_probs()[x] * *std::min_element(row.begin(), row.end());
  }
  return acc;
}

LoggedDataset supervised_to_bandit(const std::vector<LabeledExample>& examples, const MassPolicy& logging,
                                   std::uint64_t seed) {
  if (examples.empty()) throw std::invalid_argument("no labeled examples");
  CounterRng rng(seed);
  LoggedDataset ds;
  ds.num_actions = logging.num_actions();
  ds.records.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.label >= ds.num_actions) throw std::invalid_argument("label out of action range");
    auto mu = logging.pmf(ex.context);
    const std::size_t a = rng.categorical(mu);
    ds.records.push_back({ex.context, a, a == ex.label ? 0.0 : 1.0, std::move(mu)});
  }
  return ds;
}

SyntheticEnvironment hard_instance(std::size_t num_contexts, std::size_t num_actions, double epsilon,
                                   std::uint64_t seed) {
  if (num_contexts == 0 || num_actions < 2) throw std::invalid_argument("hard instance needs contexts and >= 2 actions");
  if (!(epsilon > 0.0 && epsilon < 1.0 / static_cast<double>(num_actions))) {
    throw std::invalid_argument("epsilon must lie in (0, 1/num_actions)");
  }
  CounterRng rng(seed);
  const std::size_t spurious = num_actions - 1;
  const double safe_share = (1.0 - epsilon) / static_cast<double>(num_actions - 1);
  std::vector<std::vector<double>> losses(num_contexts, std::vector<double>(num_actions));
  std::vector<std::vector<double>> logging(num_contexts, std::vector<double>(num_actions, safe_share));
  for (std::size_t x = 0; x < num_contexts; ++x) {
    for (std::size_t a = 0; a < spurious; ++a) losses[x][a] = rng.uniform(0.3, 0.5);
    losses[x][spurious] = 0.9;
    logging[x][spurious] = epsilon;
  }
  std::vector<double> probs(num_contexts, 1.0 / static_cast<double>(num_contexts));
  return {std::move(probs), std::move(losses), TablePolicy(std::move(logging)), LossNoise::kBernoulli};
}

SyntheticEnvironment random_environment(std::size_t num_contexts, std::size_t num_actions, std::uint64_t seed,
                                        LossNoise noise, double min_propensity) {
  if (num_contexts == 0 || num_actions < 2) throw std::invalid_argument("random environment needs contexts and >= 2 actions");
  if (!(min_propensity > 0.0 && min_propensity * static_cast<double>(num_actions) < 1.0)) {
    throw std::invalid_argument("min_propensity must lie in (0, 1/num_actions)");
  }
  CounterRng rng(seed);
  auto probs = random_simplex(num_contexts, rng);
  std::vector<std::vector<double>> losses(num_contexts, std::vector<double>(num_actions));
  std::vector<std::vector<double>> logging;
  for (std::size_t x = 0; x < num_contexts; ++x) {
    for (auto& l : losses[x]) l = rng.uniform();
    logging.push_back(random_floored_simplex(num_actions, min_propensity, rng));
  }
  return {std::move(probs), std::move(losses), TablePolicy(std::move(logging)), noise};
}

TablePolicy random_table_policy(std::size_t num_contexts, std::size_t num_actions, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<std::vector<double>> table;
  for (std::size_t x = 0; x < num_contexts; ++x) table.push_back(random_simplex(num_actions, rng));
  return TablePolicy(std::move(table));
}

namespace {

std::vector<double> random_breaks(std::size_t pieces, CounterRng& rng) {
  std::vector<double> inner;
  for (std::size_t j = 1; j < pieces; ++j) inner.push_back(rng.uniform(0.02, 0.98));
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  std::vector<double> breaks{0.0};
  breaks.insert(breaks.end(), inner.begin(), inner.end());
  breaks.push_back(1.0);
  return breaks;
}

}  // namespace

PiecewiseConstant random_density(std::size_t max_pieces, std::uint64_t seed, double floor) {
  if (max_pieces == 0 || !(floor > 0.0 && floor < 1.0)) throw std::invalid_argument("bad random density parameters");
  CounterRng rng(seed);
  auto breaks = random_breaks(rng.uniform_int(1, max_pieces), rng);
  std::vector<double> raw(breaks.size() - 1);
  for (auto& v : raw) v = rng.uniform(0.1, 1.0);
  double mass = 0.0;
  for (std::size_t j = 0; j < raw.size(); ++j) mass += raw[j] * (breaks[j + 1] - breaks[j]);
  // density = floor + (1 - floor) * raw / mass integrates to 1
  for (auto& v : raw) v = floor + (1.0 - floor) * v / mass;
  return {std::move(breaks), std::move(raw)};
}

PiecewiseConstant random_step_function(std::size_t max_pieces, std::uint64_t seed) {
  if (max_pieces == 0) throw std::invalid_argument("need at least one piece");
  CounterRng rng(seed);
  auto breaks = random_breaks(rng.uniform_int(1, max_pieces), rng);
  std::vector<double> values(breaks.size() - 1);
  for (auto& v : values) v = rng.uniform();
  return {std::move(breaks), std::move(values)};
}

ContinuousEnvironment random_continuous_environment(std::size_t num_contexts, std::size_t max_pieces,
                                                    std::uint64_t seed, LossNoise noise) {
  if (num_contexts == 0) throw std::invalid_argument("need at least one context");
  CounterRng rng(seed);
  auto probs = random_simplex(num_contexts, rng);
  std::vector<PiecewiseConstant> losses;
  std::vector<PiecewiseConstant> logging;
  for (std::size_t x = 0; x < num_contexts; ++x) {
    losses.push_back(random_step_function(max_pieces, CounterRng::derive(seed, 2 * x)));
    logging.push_back(random_density(max_pieces, CounterRng::derive(seed, 2 * x + 1)));
  }
  return {std::move(probs), std::move(losses), std::move(logging), noise};
}

}  // namespace opo
