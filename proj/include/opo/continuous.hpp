#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "opo/csc.hpp"
#include "opo/environment.hpp"
#include "opo/model.hpp"
#include "opo/piecewise.hpp"

namespace opo {

// Tolerance applied to the closed window |a - a~| <= H/2, so that points
// meeting the boundary exactly are kept despite rounding in a +/- H/2.
inline constexpr double kWindowTolerance = 1e-12;

// K bin centers (2j - 1) / (2K), j = 1..K, of width 1/K tiling [0, 1].
class SurrogateGrid {
 public:
  explicit SurrogateGrid(std::size_t k);

  std::size_t k() const { return k_; }
  double point(std::size_t j) const { return (2.0 * static_cast<double>(j) + 1.0) / (2.0 * static_cast<double>(k_)); }
  std::vector<double> points() const;
  double bin_lo(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(k_); }
  double bin_hi(std::size_t j) const { return static_cast<double>(j + 1) / static_cast<double>(k_); }

 private:
  std::size_t k_;
};

// min(1, a~ + H/2) - max(0, a~ - H/2)
double effective_bandwidth(double a_tilde, double h);

// Indices j with grid point inside the closed window [a - H/2, a + H/2].
std::vector<std::size_t> surrogate_set(double a, const SurrogateGrid& grid, double h);

// int_lo^hi 1/mu(a) da, exact over the pieces.
double inverse_density_integral(const PiecewiseConstant& mu, double lo, double hi);

// A policy over actions in [0, 1] given by a piecewise-constant density per context.
class DensityPolicy {
 public:
  virtual ~DensityPolicy() = default;
  virtual PiecewiseConstant density(const Context& x) const = 0;
  virtual double density_at(const Context& x, double a) const { return density(x)(a); }
};

class TableDensityPolicy final : public DensityPolicy {
 public:
  explicit TableDensityPolicy(std::vector<PiecewiseConstant> densities);
  PiecewiseConstant density(const Context& x) const override { return densities_.at(x.id()); }
  std::size_t num_contexts() const { return densities_.size(); }

 private:
  std::vector<PiecewiseConstant> densities_;
};

// Boxcar smoothing of a grid mass policy: density(a|x) = sum over a~ in the
// surrogate set of a of base(a~|x) / H_e(a~). Integrates to 1, bounded by 2/H.
class SmoothedDensityPolicy final : public DensityPolicy {
 public:
  SmoothedDensityPolicy(PolicyPtr base, double h);

  PiecewiseConstant density(const Context& x) const override;
  double density_at(const Context& x, double a) const override;

  const MassPolicy& base() const { return *base_; }
  const PolicyPtr& base_ptr() const { return base_; }
  const SurrogateGrid& grid() const { return grid_; }
  double h() const { return h_; }

 private:
  PolicyPtr base_;
  SurrogateGrid grid_;
  double h_;
};

std::shared_ptr<SmoothedDensityPolicy> smooth_h(PolicyPtr base, double h);

// Bin masses over the K-point grid, one pmf row per context id.
std::shared_ptr<TablePolicy> discretize_k(const DensityPolicy& pi, std::size_t num_contexts, std::size_t k);

// --- Continuous logged data -------------------------------------------------

struct ContinuousRecord {
  Context context;
  double action = 0.0;
  double loss = 0.0;
  PiecewiseConstant density;  // logging density mu(.|x_i)
};

struct ContinuousDataset {
  std::vector<ContinuousRecord> records;

  std::size_t size() const { return records.size(); }
  std::vector<Context> contexts() const;
  std::size_t num_context_ids() const;
  double delta_inf_mu() const;
};

std::vector<Violation> validate_continuous_dataset(const ContinuousDataset& ds);

// N x K costs over grid actions: l_i / (H_e(a~) mu(a_i|x_i)) 1{a~ in A(a_i)}
// + beta / H_e(a~) * int over [max(0, a~ - H/2), min(1, a~ + H/2)] of 1/mu(a|x_i).
CostMatrix build_modified_costs_continuous(const ContinuousDataset& ds, const SurrogateGrid& grid, double h,
                                           double beta);

// (1/N) sum_i pi(a_i|x_i) / mu(a_i|x_i) l_i with densities.
double continuous_ipw_risk(const DensityPolicy& pi, const ContinuousDataset& ds);
// (1/N) sum_i int_0^1 pi(a|x_i) / mu(a|x_i) da.
double continuous_pseudo_loss(const DensityPolicy& pi, const ContinuousDataset& ds);
double continuous_penalized_objective(const DensityPolicy& pi, const ContinuousDataset& ds, double beta);

struct ContinuousTrainResult {
  std::shared_ptr<SmoothedDensityPolicy> policy;
  std::optional<std::size_t> member;
  double objective = 0.0;
};

// One CSC call over K grid actions; the oracle's class lives on the grid.
ContinuousTrainResult train_ipw_pl_continuous(const ContinuousDataset& ds, std::size_t k, double h, double beta,
                                              const CscOracle& oracle);

// --- Exact risks in continuous environments ---------------------------------

// sum_x P(x) int pi(a|x) l(x, a) da
double exact_risk(const DensityPolicy& pi, const ContinuousEnvironment& env);
// sum_x P(x) int pi(a|x) / mu(a|x) da
double exact_pl(const DensityPolicy& pi, const ContinuousEnvironment& env);

// Risk of Smooth_H(base) for a grid mass policy, via window-averaged losses.
double smoothed_risk(const MassPolicy& base, const SurrogateGrid& grid, double h, const ContinuousEnvironment& env);

// Risk of Smooth_H applied to a density policy (boxcar convolution normalized
// by H_e), integrated in closed form.
double smoothed_density_risk(const DensityPolicy& pi, double h, const ContinuousEnvironment& env);

// --- Smoothed-class bounds and hyper-parameters -----------------------------

// Stats of a smoothed class: delta_sup = 2/H, Delta = delta_sup(Pi, mu) = 2/(H delta_inf).
ClassStats smoothed_class_stats(double h, double delta_inf_mu, double class_size);

// 2 beta pl_hat + (3/beta + 16/delta_inf) ln(4|Pi|/alpha) / (N H)
double corollary_bound_fixed_beta(std::size_t n, double alpha, double h, double delta_inf_mu, double class_size,
                                  double beta, double pl_hat);
// 6 sqrt(PL ln(4|Pi|/alpha) / (N H)) + 24 ln(4|Pi|/alpha) / (N H delta_inf)
double corollary_bound_beta_star(std::size_t n, double alpha, double h, double delta_inf_mu, double class_size,
                                 double exact_pl);

// ceil((N delta_inf / (H ln(1/alpha)))^(1/3)), at least 1.
std::size_t suggest_k(std::size_t n, double delta_inf_mu, double h, double alpha);

// {1/1, 1/2, ..., 1/m}
std::vector<double> h_grid(std::size_t m);

}  // namespace opo
