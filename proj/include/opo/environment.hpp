#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "opo/model.hpp"
#include "opo/piecewise.hpp"

namespace opo {

enum class LossNoise {
  kNone,       // realized loss equals its mean
  kBernoulli,  // realized loss ~ Bernoulli(mean)
};

std::string to_string(LossNoise noise);
LossNoise parse_loss_noise(const std::string& text);

// Finite-context, discrete-action environment with exact ground truth.
class SyntheticEnvironment {
 public:
  SyntheticEnvironment(std::vector<double> context_probs, std::vector<std::vector<double>> loss_means,
                       TablePolicy logging, LossNoise noise);

  std::size_t num_contexts() const { return context_probs_.size(); }
  std::size_t num_actions() const { return logging_.num_actions(); }
  const std::vector<double>& context_probs() const { return context_probs_; }
  const std::vector<std::vector<double>>& loss_means() const { return loss_means_; }
  const TablePolicy& logging() const { return logging_; }
  LossNoise noise() const { return noise_; }
  std::vector<Context> contexts() const;

  // E[l^2] for action a at context x under the noise model.
  double second_moment(std::size_t x, std::size_t a) const;

 private:
  std::vector<double> context_probs_;
  std::vector<std::vector<double>> loss_means_;
  TablePolicy logging_;
  LossNoise noise_;
};

// Finite-context environment with actions in [0, 1]: piecewise-constant mean
// loss and piecewise-constant logging density per context.
class ContinuousEnvironment {
 public:
  ContinuousEnvironment(std::vector<double> context_probs, std::vector<PiecewiseConstant> losses,
                        std::vector<PiecewiseConstant> logging, LossNoise noise);

  std::size_t num_contexts() const { return context_probs_.size(); }
  const std::vector<double>& context_probs() const { return context_probs_; }
  const std::vector<PiecewiseConstant>& losses() const { return losses_; }
  const std::vector<PiecewiseConstant>& logging() const { return logging_; }
  LossNoise noise() const { return noise_; }
  // min over contexts of the logging density
  double delta_inf_mu() const;

 private:
  std::vector<double> context_probs_;
  std::vector<PiecewiseConstant> losses_;
  std::vector<PiecewiseConstant> logging_;
  LossNoise noise_;
};

}  // namespace opo
