#include "opo/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace opo {

std::string to_string(LossNoise noise) { return noise == LossNoise::kNone ? "none" : "bernoulli"; }

LossNoise parse_loss_noise(const std::string& text) {
  if (text == "none") return LossNoise::kNone;
  if (text == "bernoulli") return LossNoise::kBernoulli;
  throw std::invalid_argument("unknown loss noise '" + text + "'");
}

namespace {

void check_distribution(const std::vector<double>& probs) {
  if (probs.empty()) throw std::invalid_argument("context distribution is empty");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("context distribution has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kMassTolerance) throw std::invalid_argument("context distribution does not sum to 1");
}

}  // namespace

SyntheticEnvironment::SyntheticEnvironment(std::vector<double> context_probs,
                                           std::vector<std::vector<double>> loss_means, TablePolicy logging,
                                           LossNoise noise)
    : context_probs_(std::move(context_probs)),
      loss_means_(std::move(loss_means)),
      logging_(std::move(logging)),
      noise_(noise) {
  check_distribution(context_probs_);
  if (loss_means_.size() != context_probs_.size() || logging_.num_contexts() != context_probs_.size()) {
    throw std::invalid_argument("environment tables disagree on the number of contexts");
  }
  if (logging_.num_actions() < 2) throw std::invalid_argument("environment needs at least two actions");
  for (const auto& row : loss_means_) {
    if (row.size() != logging_.num_actions()) throw std::invalid_argument("loss table width mismatch");
    for (double l : row) {
      if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("loss mean out of [0,1]");
    }
  }
  for (const auto& row : logging_.table()) {
    for (double p : row) {
      if (!(p >= kPropensityFloor)) throw std::invalid_argument("logging policy must be strictly positive");
    }
  }
}

std::vector<Context> SyntheticEnvironment::contexts() const {
  std::vector<Context> out;
  for (std::size_t x = 0; x < num_contexts(); ++x) out.push_back(Context::from_id(x));
  return out;
}

double SyntheticEnvironment::second_moment(std::size_t x, std::size_t a) const {
  const double m = loss_means_.at(x).at(a);
  return noise_ == LossNoise::kBernoulli ? m : m * m;
}

ContinuousEnvironment::ContinuousEnvironment(std::vector<double> context_probs,
                                             std::vector<PiecewiseConstant> losses,
                                             std::vector<PiecewiseConstant> logging, LossNoise noise)
    : context_probs_(std::move(context_probs)),
      losses_(std::move(losses)),
      logging_(std::move(logging)),
      noise_(noise) {
  check_distribution(context_probs_);
  if (losses_.size() != context_probs_.size() || logging_.size() != context_probs_.size()) {
    throw std::invalid_argument("environment tables disagree on the number of contexts");
  }
  for (const auto& l : losses_) {
    if (l.min_value() < 0.0 || l.max_value() > 1.0) throw std::invalid_argument("loss function out of [0,1]");
  }
  for (const auto& mu : logging_) {
    if (!mu.is_density(kPropensityFloor, kMassTolerance)) {
      throw std::invalid_argument("logging density must be positive and integrate to 1");
    }
  }
}

double ContinuousEnvironment::delta_inf_mu() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& mu : logging_) m = std::min(m, mu.min_value());
  return m;
}

}  // namespace opo
