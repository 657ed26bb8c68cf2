#include "opo/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace opo {

namespace {

void check_h(double h) {
  if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("bandwidth H must lie in (0,1]");
}

double window_lo(double center, double h) { return std::max(0.0, center - h / 2.0); }
double window_hi(double center, double h) { return std::min(1.0, center + h / 2.0); }

}  // namespace

SurrogateGrid::SurrogateGrid(std::size_t k) : k_(k) {
  if (k == 0) throw std::invalid_argument("surrogate grid needs K >= 1");
}

std::vector<double> SurrogateGrid::points() const {
  std::vector<double> out(k_);
  for (std::size_t j = 0; j < k_; ++j) out[j] = point(j);
  return out;
}

double effective_bandwidth(double a_tilde, double h) { return window_hi(a_tilde, h) - window_lo(a_tilde, h); }

std::vector<std::size_t> surrogate_set(double a, const SurrogateGrid& grid, double h) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < grid.k(); ++j) {
    if (std::abs(a - grid.point(j)) <= h / 2.0 + kWindowTolerance) out.push_back(j);
  }
  return out;
}

double inverse_density_integral(const PiecewiseConstant& mu, double lo, double hi) {
  if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) throw std::invalid_argument("need 0 <= lo <= hi <= 1");
  return mu.reciprocal_integral(lo, hi);
}

TableDensityPolicy::TableDensityPolicy(std::vector<PiecewiseConstant> densities) : densities_(std::move(densities)) {
  if (densities_.empty()) throw std::invalid_argument("density policy needs at least one context");
  for (const auto& d : densities_) {
    if (d.min_value() < 0.0 || std::abs(d.integral() - 1.0) > kMassTolerance) {
      throw std::invalid_argument("policy density must be non-negative and integrate to 1");
    }
  }
}

// --- Smoothing --------------------------------------------------------------

SmoothedDensityPolicy::SmoothedDensityPolicy(PolicyPtr base, double h)
    : base_(std::move(base)), grid_(base_ ? base_->num_actions() : 1), h_(h) {
  if (!base_) throw std::invalid_argument("smoothing needs a base policy");
  check_h(h);
}

PiecewiseConstant SmoothedDensityPolicy::density(const Context& x) const {
  const auto mass = base_->pmf(x);
  std::vector<double> lo(grid_.k());
  std::vector<double> hi(grid_.k());
  std::vector<double> breaks{0.0, 1.0};
  for (std::size_t j = 0; j < grid_.k(); ++j) {
    lo[j] = window_lo(grid_.point(j), h_);
    hi[j] = window_hi(grid_.point(j), h_);
    if (mass[j] > 0.0) {
      breaks.push_back(lo[j]);
      breaks.push_back(hi[j]);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> values(breaks.size() - 1, 0.0);
  for (std::size_t p = 0; p < values.size(); ++p) {
    const double mid = 0.5 * (breaks[p] + breaks[p + 1]);
    for (std::size_t j = 0; j < grid_.k(); ++j) {
      if (mass[j] > 0.0 && lo[j] <= mid && mid < hi[j]) values[p] += mass[j] / (hi[j] - lo[j]);
    }
  }
  return {std::move(breaks), std::move(values)};
}

double SmoothedDensityPolicy::density_at(const Context& x, double a) const {
  double acc = 0.0;
  for (std::size_t j : surrogate_set(a, grid_, h_)) {
    acc += base_->prob(x, j) / effective_bandwidth(grid_.point(j), h_);
  }
  return acc;
}

std::shared_ptr<SmoothedDensityPolicy> smooth_h(PolicyPtr base, double h) {
  return std::make_shared<SmoothedDensityPolicy>(std::move(base), h);
}

std::shared_ptr<TablePolicy> discretize_k(const DensityPolicy& pi, std::size_t num_contexts, std::size_t k) {
  const SurrogateGrid grid(k);
  std::vector<std::vector<double>> table(num_contexts, std::vector<double>(k));
  for (std::size_t x = 0; x < num_contexts; ++x) {
    const auto d = pi.density(Context::from_id(x));
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      table[x][j] = d.integral(grid.bin_lo(j), grid.bin_hi(j));
      total += table[x][j];
    }
    // absorb rounding so the row passes the pmf check
    for (auto& v : table[x]) v /= total;
  }
  return std::make_shared<TablePolicy>(std::move(table));
}

// --- Continuous datasets ----------------------------------------------------

std::vector<Context> ContinuousDataset::contexts() const {
  std::vector<Context> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.context);
  return out;
}

std::size_t ContinuousDataset::num_context_ids() const {
  std::size_t n = 0;
  for (const auto& r : records) n = std::max(n, r.context.id() + 1);
  return n;
}

double ContinuousDataset::delta_inf_mu() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : records) m = std::min(m, r.density.min_value());
  return m;
}

std::vector<Violation> validate_continuous_dataset(const ContinuousDataset& ds) {
  std::vector<Violation> out;
  auto add = [&](std::optional<std::size_t> i, const std::string& what) {
    out.push_back({i, i ? what + " at record " + std::to_string(*i) : what});
  };
  if (ds.records.empty()) add(std::nullopt, "dataset has no records");
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& r = ds.records[i];
    if (!(r.loss >= 0.0 && r.loss <= 1.0)) add(i, "loss out of [0,1]");
    if (!(r.action >= 0.0 && r.action <= 1.0)) add(i, "action out of [0,1]");
    if (r.density.pieces() == 0) {
      add(i, "missing logging density");
      continue;
    }
    if (!(r.density.min_value() >= kPropensityFloor)) add(i, "zero density");
    if (std::abs(r.density.integral() - 1.0) > kMassTolerance) add(i, "density does not integrate to 1");
  }
  return out;
}

namespace {

void require_valid(const ContinuousDataset& ds) {
  const auto v = validate_continuous_dataset(ds);
  if (!v.empty()) throw std::invalid_argument(v.front().message);
}

}  // namespace

CostMatrix build_modified_costs_continuous(const ContinuousDataset& ds, const SurrogateGrid& grid, double h,
                                           double beta) {
  check_h(h);
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  require_valid(ds);
  CostMatrix costs(grid.k(), ds.contexts());
  std::vector<double> he(grid.k());
  for (std::size_t j = 0; j < grid.k(); ++j) he[j] = effective_bandwidth(grid.point(j), h);

  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds.records[i];
    auto row = costs.row(i);
    for (std::size_t j = 0; j < grid.k(); ++j) {
      const double lo = window_lo(grid.point(j), h);
      const double hi = window_hi(grid.point(j), h);
      row[j] = beta / he[j] * r.density.reciprocal_integral(lo, hi);
    }
    const double mu_i = r.density(r.action);
    for (std::size_t j : surrogate_set(r.action, grid, h)) row[j] += r.loss / (he[j] * mu_i);
  }
  return costs;
}

double continuous_ipw_risk(const DensityPolicy& pi, const ContinuousDataset& ds) {
  if (ds.records.empty()) throw std::invalid_argument("dataset has no records");
  double acc = 0.0;
  for (const auto& r : ds.records) {
    const double mu = r.density(r.action);
    if (!(mu >= kPropensityFloor)) throw std::invalid_argument("logging density below floor");
    acc += pi.density_at(r.context, r.action) / mu * r.loss;
  }
  return acc / static_cast<double>(ds.size());
}

double continuous_pseudo_loss(const DensityPolicy& pi, const ContinuousDataset& ds) {
  if (ds.records.empty()) throw std::invalid_argument("dataset has no records");
  double acc = 0.0;
  for (const auto& r : ds.records) acc += integrate_ratio(pi.density(r.context), r.density);
  return acc / static_cast<double>(ds.size());
}

double continuous_penalized_objective(const DensityPolicy& pi, const ContinuousDataset& ds, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  return continuous_ipw_risk(pi, ds) + beta * continuous_pseudo_loss(pi, ds);
}

ContinuousTrainResult train_ipw_pl_continuous(const ContinuousDataset& ds, std::size_t k, double h, double beta,
                                              const CscOracle& oracle) {
  const SurrogateGrid grid(k);
  const auto costs = build_modified_costs_continuous(ds, grid, h, beta);
  auto solved = oracle.solve(costs);
  if (solved.policy->num_actions() != k) throw std::invalid_argument("oracle class does not live on the K-point grid");
  auto policy = smooth_h(std::move(solved.policy), h);
  const double objective = continuous_penalized_objective(*policy, ds, beta);
  return {std::move(policy), solved.member, objective};
}

// --- Exact risks ------------------------------------------------------------

double exact_risk(const DensityPolicy& pi, const ContinuousEnvironment& env) {
  double acc = 0.0;
  for (std::size_t x = 0; x < env.num_contexts(); ++x) {
    acc += env.context_probs()[x] * integrate_product(pi.density(Context::from_id(x)), env.losses()[x]);
  }
  return acc;
}

double exact_pl(const DensityPolicy& pi, const ContinuousEnvironment& env) {
  double acc = 0.0;
  for (std::size_t x = 0; x < env.num_contexts(); ++x) {
    acc += env.context_probs()[x] * integrate_ratio(pi.density(Context::from_id(x)), env.logging()[x]);
  }
  return acc;
}

namespace {

// Mean loss over the clipped window centered at c.
double window_mean_loss(const PiecewiseConstant& loss, double c, double h) {
  const double lo = window_lo(c, h);
  const double hi = window_hi(c, h);
  return loss.integral(lo, hi) / (hi - lo);
}

// int_0^1 (p + q t) / (r + s t) dt for r > 0, r + s > 0.
double rational_mean(double p, double q, double r, double s) {
  const double z = s / r;
  double a = 0.0;  // int 1/(1+zt)
  double b = 0.0;  // int t/(1+zt)
  if (std::abs(z) < 1e-3) {
    double zk = 1.0;
    for (int k = 0; k < 12; ++k) {
      a += zk / (k + 1);
      b += zk / (k + 2);
      zk *= -z;
    }
  } else {
    a = std::log1p(z) / z;
    b = (1.0 - a) / z;
  }
  return (p * a + q * b) / r;
}

}  // namespace

double smoothed_risk(const MassPolicy& base, const SurrogateGrid& grid, double h, const ContinuousEnvironment& env) {
  check_h(h);
  if (base.num_actions() != grid.k()) throw std::invalid_argument("base policy does not live on the grid");
  std::vector<double> mass(grid.k());
  double acc = 0.0;
  for (std::size_t x = 0; x < env.num_contexts(); ++x) {
    base.pmf(Context::from_id(x), mass);
    double inner = 0.0;
    for (std::size_t j = 0; j < grid.k(); ++j) {
      if (mass[j] > 0.0) inner += mass[j] * window_mean_loss(env.losses()[x], grid.point(j), h);
    }
    acc += env.context_probs()[x] * inner;
  }
  return acc;
}

double smoothed_density_risk(const DensityPolicy& pi, double h, const ContinuousEnvironment& env) {
  check_h(h);
  double acc = 0.0;
  for (std::size_t x = 0; x < env.num_contexts(); ++x) {
    const auto density = pi.density(Context::from_id(x));
    const auto& loss = env.losses()[x];

    // On each cell of this refinement the window loss integral and H_e are
    // both affine in the window center.
    std::vector<double> breaks = density.breaks();
    breaks.push_back(std::min(1.0, h / 2.0));
    breaks.push_back(std::max(0.0, 1.0 - h / 2.0));
    for (double b : loss.breaks()) {
      for (double c : {b - h / 2.0, b + h / 2.0}) {
        if (c > 0.0 && c < 1.0) breaks.push_back(c);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    double inner = 0.0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      const double u = breaks[p];
      const double v = breaks[p + 1];
      const double pv = density(0.5 * (u + v));
      if (pv == 0.0) continue;
      const double wu = loss.integral(window_lo(u, h), window_hi(u, h));
      const double wv = loss.integral(window_lo(v, h), window_hi(v, h));
      const double eu = effective_bandwidth(u, h);
      const double ev = effective_bandwidth(v, h);
      inner += pv * (v - u) * rational_mean(wu, wv - wu, eu, ev - eu);
    }
    acc += env.context_probs()[x] * inner;
  }
  return acc;
}

// --- Bounds and hyper-parameters ---------------------------------------------

ClassStats smoothed_class_stats(double h, double delta_inf_mu, double class_size) {
  check_h(h);
  if (!(delta_inf_mu > 0.0)) throw std::invalid_argument("delta_inf(mu) must be positive");
  return make_class_stats(2.0 / h, delta_inf_mu, 2.0 / (h * delta_inf_mu), class_size);
}

namespace {

void check_corollary_inputs(std::size_t n, double alpha, double h, double delta_inf_mu, double class_size) {
  if (n == 0) throw std::invalid_argument("sample size must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  check_h(h);
  if (!(delta_inf_mu > 0.0)) throw std::invalid_argument("delta_inf(mu) must be positive");
  if (!(class_size >= 1.0)) throw std::invalid_argument("class size must be >= 1");
}

}  // namespace

double corollary_bound_fixed_beta(std::size_t n, double alpha, double h, double delta_inf_mu, double class_size,
                                  double beta, double pl_hat) {
  check_corollary_inputs(n, alpha, h, delta_inf_mu, class_size);
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const double l = std::log(4.0 * class_size / alpha);
  return 2.0 * beta * pl_hat + (3.0 / beta + 16.0 / delta_inf_mu) * l / (static_cast<double>(n) * h);
}

double corollary_bound_beta_star(std::size_t n, double alpha, double h, double delta_inf_mu, double class_size,
                                 double exact_pl) {
  check_corollary_inputs(n, alpha, h, delta_inf_mu, class_size);
  if (!(exact_pl > 0.0)) throw std::invalid_argument("exact PL must be positive");
  const double l = std::log(4.0 * class_size / alpha);
  const double nh = static_cast<double>(n) * h;
  return 6.0 * std::sqrt(exact_pl * l / nh) + 24.0 * l / (nh * delta_inf_mu);
}

std::size_t suggest_k(std::size_t n, double delta_inf_mu, double h, double alpha) {
  if (n == 0 || !(delta_inf_mu > 0.0) || !(h > 0.0) || !(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("suggest_k needs positive inputs and alpha in (0,1)");
  }
  const double k = std::cbrt(static_cast<double>(n) * delta_inf_mu / (h * std::log(1.0 / alpha)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k)));
}

std::vector<double> h_grid(std::size_t m) {
  if (m == 0) throw std::invalid_argument("h_grid needs m >= 1");
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = 1.0 / static_cast<double>(i + 1);
  return out;
}

}  // namespace opo
