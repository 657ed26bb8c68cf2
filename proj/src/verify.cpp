#include "opo/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "opo/bounds.hpp"
#include "opo/continuous.hpp"
#include "opo/csc.hpp"
#include "opo/estimators.hpp"
#include "opo/parallel.hpp"
#include "opo/piecewise.hpp"
#include "opo/rng.hpp"
#include "opo/simulator.hpp"

namespace opo {

double CheckResult::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return v;
  }
  throw std::out_of_range("no metric '" + key + "' in check " + name);
}

namespace {

CheckResult named(std::string name) {
  CheckResult res;
  res.name = std::move(name);
  return res;
}

// Records one trial; keeps the first failure message.
void tally(CheckResult& res, bool ok, const std::string& what) {
  ++res.trials;
  if (!ok) {
    if (res.failures == 0) res.detail = what;
    ++res.failures;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

class CountingOracle final : public CscOracle {
 public:
  explicit CountingOracle(const CscOracle& inner) : inner_(inner) {}
  OracleResult solve(const CostMatrix& costs) const override {
    ++calls_;
    return inner_.solve(costs);
  }
  std::size_t calls() const { return calls_; }

 private:
  const CscOracle& inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

std::vector<double> exact_risks(const PolicyClass& cls, const SyntheticEnvironment& env) {
  std::vector<double> out;
  for (const auto& m : cls.members()) out.push_back(exact_risk(*m, env));
  return out;
}

double logging_delta_inf(const SyntheticEnvironment& env) {
  const auto ctx = env.contexts();
  return pmf_extrema(env.logging(), ctx).inf;
}

// Exact risk of trainIpwPl at the best (by exact risk) beta among the
// candidates beta_pi, pi in the class.
double best_candidate_risk(const SyntheticEnvironment& env, const PolicyClass& cls, const ClassStats& stats,
                           const LoggedDataset& ds, double alpha) {
  std::vector<double> betas;
  for (const auto& c : beta_candidates(cls, ds, stats, alpha)) betas.push_back(c.beta);
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
  const PointwiseArgminOracle oracle(env.num_contexts());
  double best = std::numeric_limits<double>::infinity();
  for (double b : betas) best = std::min(best, exact_risk(*train_ipw_pl(ds, b, oracle).policy, env));
  return best;
}

}  // namespace

// --- Reductions ---------------------------------------------------------------

CheckResult check_discrete_reduction(const DiscreteReductionParams& p) {
  auto res = named("discrete_reduction");
  double max_gap = 0.0;
  double max_identity_gap = 0.0;
  for (std::size_t i = 0; i < p.instances; ++i) {
    CounterRng rng(CounterRng::derive(p.seed, i));
    const std::size_t nx = rng.uniform_int(1, p.max_contexts);
    const std::size_t na = rng.uniform_int(2, p.max_actions);
    const std::size_t n = rng.uniform_int(1, p.max_n);
    const double beta = p.betas[i % p.betas.size()];
    const auto noise = i % 2 == 0 ? LossNoise::kBernoulli : LossNoise::kNone;
    const auto env = random_environment(nx, na, rng(), noise, 0.5 / static_cast<double>(na) * rng.uniform(0.05, 1.0));
    const auto ds = generate_logs(env, n, rng());
    const auto cls = PolicyClass::all_deterministic(nx, na);

    const EnumerationOracle enumeration(cls);
    CountingOracle counting(enumeration);
    const auto trained = train_ipw_pl(ds, beta, counting);
    const auto reference = brute_force_objective_argmin(ds, beta, cls);
    const double gap = std::abs(trained.objective - reference.objective);
    max_gap = std::max(max_gap, gap);
    const std::string where = "instance " + std::to_string(i) + ": ";
    tally(res, counting.calls() == 1, where + "oracle called " + std::to_string(counting.calls()) + " times");
    tally(res, gap <= p.tolerance, where + "objective gap " + fmt(gap));
    tally(res, trained.member == reference.member, where + "enumeration and brute force chose different members");

    const auto pointwise = train_ipw_pl(ds, beta, PointwiseArgminOracle(nx));
    const double pgap = std::abs(pointwise.objective - reference.objective);
    max_gap = std::max(max_gap, pgap);
    tally(res, pgap <= p.tolerance, where + "pointwise oracle objective gap " + fmt(pgap));

    const auto costs = build_modified_costs(ds, beta);
    for (std::size_t m = 0; m < cls.members().size(); ++m) {
      const double id_gap = std::abs(average_cost(cls.member(m), costs) - penalized_objective(cls.member(m), ds, beta));
      max_identity_gap = std::max(max_identity_gap, id_gap);
      tally(res, id_gap <= p.tolerance, where + "reduction identity gap " + fmt(id_gap) + " at member " + std::to_string(m));
    }
  }
  res.passed = res.failures == 0;
  res.metrics = {{"instances", static_cast<double>(p.instances)},
                 {"maxObjectiveGap", max_gap},
                 {"maxIdentityGap", max_identity_gap}};
  if (res.passed) res.detail = "trainer, pointwise oracle and brute force agree";
  return res;
}

namespace {

// Density-side objective from the piecewise form of the smoothed policy,
// independent of the surrogate-set formula used by continuous_ipw_risk.
double density_side_objective(const SmoothedDensityPolicy& pi, const ContinuousDataset& ds, double beta) {
  double ipw = 0.0;
  double pl = 0.0;
  for (const auto& r : ds.records) {
    const auto d = pi.density(r.context);
    ipw += d(r.action) / r.density(r.action) * r.loss;
    pl += integrate_ratio(d, r.density);
  }
  const auto n = static_cast<double>(ds.size());
  return ipw / n + beta * pl / n;
}

}  // namespace

CheckResult check_continuous_reduction(const ContinuousReductionParams& p) {
  auto res = named("continuous_reduction");
  double max_gap = 0.0;
  for (std::size_t i = 0; i < p.instances; ++i) {
    CounterRng rng(CounterRng::derive(p.seed, i));
    const std::size_t nx = rng.uniform_int(1, p.max_contexts);
    const std::size_t k = rng.uniform_int(2, p.max_k);
    const std::size_t n = rng.uniform_int(1, p.max_n);
    const double h = p.bandwidths[i % p.bandwidths.size()];
    const double beta = p.betas[(i / p.bandwidths.size()) % p.betas.size()];
    const auto noise = i % 2 == 0 ? LossNoise::kNone : LossNoise::kBernoulli;
    const auto env = random_continuous_environment(nx, p.max_pieces, rng(), noise);
    const auto ds = generate_logs(env, n, rng());
    const SurrogateGrid grid(k);
    const auto costs = build_modified_costs_continuous(ds, grid, h, beta);
    const std::string where = "instance " + std::to_string(i) + ": ";

    const auto cls = PolicyClass::all_deterministic(nx, k);
    std::vector<PolicyPtr> policies = cls.members();
    for (std::size_t t = 0; t < 3; ++t) {
      policies.push_back(std::make_shared<TablePolicy>(random_table_policy(nx, k, rng())));
    }
    double brute = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < policies.size(); ++m) {
      const SmoothedDensityPolicy smoothed(policies[m], h);
      const double grid_side = average_cost(*policies[m], costs);
      const double library = continuous_penalized_objective(smoothed, ds, beta);
      const double independent = density_side_objective(smoothed, ds, beta);
      const double gap = std::max(std::abs(grid_side - library), std::abs(grid_side - independent));
      max_gap = std::max(max_gap, gap);
      tally(res, gap <= p.tolerance, where + "grid/density gap " + fmt(gap) + " at policy " + std::to_string(m));
      if (m < cls.members().size()) brute = std::min(brute, library);
    }
    const auto trained = train_ipw_pl_continuous(ds, k, h, beta, EnumerationOracle(cls));
    const double tgap = std::abs(trained.objective - brute);
    max_gap = std::max(max_gap, tgap);
    tally(res, tgap <= p.tolerance, where + "trainer misses the brute-force minimum by " + fmt(tgap));
  }
  res.passed = res.failures == 0;
  res.metrics = {{"instances", static_cast<double>(p.instances)}, {"maxGap", max_gap}};
  if (res.passed) res.detail = "grid-side costs reproduce the density-side objective";
  return res;
}

// --- Variance domination --------------------------------------------------------

CheckResult check_variance_domination(const VarianceDominationParams& p) {
  auto res = named("variance_domination");
  double max_excess = -std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < p.pairs; ++i) {
    CounterRng rng(CounterRng::derive(p.seed, i));
    const std::size_t nx = rng.uniform_int(1, 5);
    const std::size_t na = rng.uniform_int(2, 4);
    const double floor = rng.uniform(0.01, 0.9) / static_cast<double>(na);
    const auto noise = i % 2 == 0 ? LossNoise::kBernoulli : LossNoise::kNone;
    const auto env = random_environment(nx, na, rng(), noise, floor);
    PolicyPtr pi;
    switch (i % 3) {
      case 0:
        pi = std::make_shared<TablePolicy>(random_table_policy(nx, na, rng()));
        break;
      case 1: {
        std::vector<std::size_t> assign(nx);
        for (auto& a : assign) a = rng.uniform_int(0, na - 1);
        pi = std::make_shared<DeterministicPolicy>(std::move(assign), na);
        break;
      }
      default:
        pi = std::make_shared<UniformPolicy>(na);
    }
    const auto ctx = env.contexts();
    const double var = exact_variance(*pi, env);
    const double rhs = pmf_extrema(*pi, ctx).sup * exact_pl(*pi, env);
    max_excess = std::max(max_excess, var - rhs);
    max_ratio = std::max(max_ratio, var / rhs);
    tally(res, var <= rhs + p.tolerance,
          "pair " + std::to_string(i) + ": variance " + fmt(var) + " exceeds " + fmt(rhs));
  }
  res.passed = res.failures == 0;
  res.metrics = {{"pairs", static_cast<double>(p.pairs)}, {"maxExcess", max_excess}, {"maxRatio", max_ratio}};
  if (res.passed) res.detail = "V(pi) <= delta_sup(pi) PL(pi) on every pair";
  return res;
}

// --- Coverage ---------------------------------------------------------------

namespace {

// hits[r * policies + j] = 1 iff covered(j, ds_r).
template <class Covered>
std::vector<char> coverage_table(const SyntheticEnvironment& env, std::size_t policies, const CoverageParams& p,
                                 Covered&& covered) {
  std::vector<char> hits(p.reps * policies, 0);
  parallel_for(p.reps, [&](std::size_t r) {
    const auto ds = generate_logs(env, p.n, CounterRng::derive(p.seed, r));
    for (std::size_t j = 0; j < policies; ++j) hits[r * policies + j] = covered(j, ds) ? 1 : 0;
  });
  return hits;
}

CheckResult per_policy_coverage(std::string name, const std::vector<char>& hits, std::size_t policies,
                                const CoverageParams& p) {
  auto res = named(std::move(name));
  double min_cov = 1.0;
  for (std::size_t j = 0; j < policies; ++j) {
    std::size_t covered = 0;
    for (std::size_t r = 0; r < p.reps; ++r) covered += static_cast<std::size_t>(hits[r * policies + j]);
    const double cov = static_cast<double>(covered) / static_cast<double>(p.reps);
    min_cov = std::min(min_cov, cov);
    res.metrics.emplace_back("coverage[" + std::to_string(j) + "]", cov);
    tally(res, cov >= p.min_coverage, "policy " + std::to_string(j) + " coverage " + fmt(cov));
  }
  res.passed = res.failures == 0;
  res.metrics.insert(res.metrics.begin(), {{"reps", static_cast<double>(p.reps)}, {"minCoverage", min_cov}});
  if (res.passed) res.detail = "coverage >= " + fmt(p.min_coverage) + " for every policy";
  return res;
}

}  // namespace

CheckResult check_pl_band_coverage(const SyntheticEnvironment& env, const std::vector<PolicyPtr>& policies,
                                   const CoverageParams& p) {
  const double delta_inf = logging_delta_inf(env);
  std::vector<double> truth;
  for (const auto& pi : policies) truth.push_back(exact_pl(*pi, env));
  const auto hits = coverage_table(env, policies.size(), p, [&](std::size_t j, const LoggedDataset& ds) {
    return pl_concentration_band(pseudo_loss(*policies[j], ds), ds.size(), p.alpha, delta_inf).contains(truth[j]);
  });
  return per_policy_coverage("pl_band_coverage", hits, policies.size(), p);
}

CheckResult check_confidence_width_coverage(const SyntheticEnvironment& env, const std::vector<PolicyPtr>& policies,
                                            const CoverageParams& p) {
  const auto ctx = env.contexts();
  std::vector<double> truth;
  std::vector<ClassStats> stats;
  for (const auto& pi : policies) {
    truth.push_back(exact_risk(*pi, env));
    stats.push_back(policy_stats(*pi, env.logging(), ctx));
  }
  const auto hits = coverage_table(env, policies.size(), p, [&](std::size_t j, const LoggedDataset& ds) {
    const auto q = risk_quantities(*policies[j], ds);
    const double width = confidence_width(q.pseudo_loss, stats[j], ds.size(), p.alpha).value;
    return std::abs(q.ipw_risk - truth[j]) <= width;
  });
  return per_policy_coverage("confidence_width_coverage", hits, policies.size(), p);
}

CheckResult check_ucb_coverage(const SyntheticEnvironment& env, const PolicyClass& cls, const CoverageParams& p,
                               double beta) {
  const auto ctx = env.contexts();
  const auto stats = class_stats(cls, env.logging(), ctx);
  if (!(beta > 0.0)) beta = beta_for_pl(stats, p.n, p.alpha, 1.0);
  const auto truth = exact_risks(cls, env);
  const auto hits = coverage_table(env, 1, p, [&](std::size_t, const LoggedDataset& ds) {
    for (std::size_t m = 0; m < cls.members().size(); ++m) {
      if (truth[m] > ucb_risk(cls.member(m), ds, stats, p.alpha, beta)) return false;
    }
    return true;
  });
  auto res = per_policy_coverage("ucb_coverage", hits, 1, p);
  res.metrics.emplace_back("beta", beta);
  res.metrics.emplace_back("classSize", cls.size());
  if (res.passed) res.detail = "simultaneous coverage " + fmt(res.metric("minCoverage"));
  return res;
}

// --- Oracle inequality ------------------------------------------------------------

CheckResult check_oracle_inequality(const SyntheticEnvironment& env, const OracleInequalityParams& p) {
  auto res = named("oracle_inequality");
  const auto cls = PolicyClass::all_deterministic(env.num_contexts(), env.num_actions());
  const auto ctx = env.contexts();
  const auto stats = class_stats(cls, env.logging(), ctx);
  const auto risks = exact_risks(cls, env);
  const double r_star = *std::min_element(risks.begin(), risks.end());
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < risks.size(); ++m) {
    bound = std::min(bound, risks[m] - r_star + beta_star_bound(stats, p.n, p.alpha, exact_pl(cls.member(m), env)));
  }
  const double fixed_beta = beta_for_pl(stats, p.n, p.alpha, 1.0);
  const PointwiseArgminOracle oracle(env.num_contexts());

  std::vector<double> excess(p.reps);
  std::vector<char> fixed_ok(p.reps);
  parallel_for(p.reps, [&](std::size_t r) {
    const auto ds = generate_logs(env, p.n, CounterRng::derive(p.seed, r));
    excess[r] = best_candidate_risk(env, cls, stats, ds, p.alpha) - r_star;
    const double r_fixed = exact_risk(*train_ipw_pl(ds, fixed_beta, oracle).policy, env);
    double rhs = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < risks.size(); ++m) {
      const double pl_hat = pseudo_loss(cls.member(m), ds);
      rhs = std::min(rhs, risks[m] + oracle_inequality_bound(stats, p.n, p.alpha, fixed_beta, pl_hat));
    }
    fixed_ok[r] = r_fixed <= rhs ? 1 : 0;
  });

  std::size_t violations = 0;
  std::size_t fixed_violations = 0;
  double max_excess = 0.0;
  double mean_excess = 0.0;
  for (std::size_t r = 0; r < p.reps; ++r) {
    violations += excess[r] > bound ? 1 : 0;
    fixed_violations += fixed_ok[r] ? 0 : 1;
    max_excess = std::max(max_excess, excess[r]);
    mean_excess += excess[r] / static_cast<double>(p.reps);
  }
  const double rate = static_cast<double>(violations) / static_cast<double>(p.reps);
  const double fixed_rate = static_cast<double>(fixed_violations) / static_cast<double>(p.reps);
  res.trials = 2 * p.reps;
  res.failures = violations + fixed_violations;
  res.passed = rate <= p.max_violation_rate && fixed_rate <= p.max_violation_rate;
  res.metrics = {{"reps", static_cast<double>(p.reps)},     {"bound", bound},
                 {"maxExcess", max_excess},                 {"meanExcess", mean_excess},
                 {"violationRate", rate},                   {"fixedBeta", fixed_beta},
                 {"fixedBetaViolationRate", fixed_rate},   {"classSize", cls.size()}};
  res.detail = "excess risk at beta* vs bound " + fmt(bound) + ": " + std::to_string(violations) + " violations; fixed beta: " +
               std::to_string(fixed_violations) + " violations";
  return res;
}

// --- Smoothing ------------------------------------------------------------------

CheckResult check_smoothing_bounds(const SmoothingParams& p) {
  auto res = named("smoothing_bounds");
  double max_disc_ratio = 0.0;
  double max_band_ratio = 0.0;
  for (std::size_t e = 0; e < p.environments; ++e) {
    CounterRng rng(CounterRng::derive(p.seed, e));
    const std::size_t nx = rng.uniform_int(1, p.max_contexts);
    const auto env = random_continuous_environment(nx, p.max_pieces, rng());
    std::vector<PiecewiseConstant> dens;
    for (std::size_t x = 0; x < nx; ++x) dens.push_back(random_density(p.max_pieces, rng(), 0.05));
    const TableDensityPolicy pi(std::move(dens));
    const double h = rng.uniform(0.05, 1.0);
    const std::size_t k = rng.uniform_int(1, p.max_k);
    const SurrogateGrid grid(k);
    const std::string where = "environment " + std::to_string(e) + ": ";

    // Discretize then smooth, against smoothing the density directly.
    const auto disc = discretize_k(pi, nx, k);
    const double gap = std::abs(smoothed_risk(*disc, grid, h, env) - smoothed_density_risk(pi, h, env));
    const double disc_bound = std::min(1.0, 1.0 / (h * static_cast<double>(k)));
    max_disc_ratio = std::max(max_disc_ratio, gap / disc_bound);
    tally(res, gap <= disc_bound + p.slack, where + "discretization gap " + fmt(gap) + " > " + fmt(disc_bound));

    // Bandwidth perturbation on a random grid policy.
    if (h < 1.0) {
      const TablePolicy grid_pi = random_table_policy(nx, k, rng());
      const double gamma = rng.uniform(0.0, 1.0 - h);
      const double bgap = std::abs(smoothed_risk(grid_pi, grid, h, env) - smoothed_risk(grid_pi, grid, h + gamma, env));
      const double band_bound = std::min(1.0, 2.0 * gamma / h);
      if (band_bound > 0.0) max_band_ratio = std::max(max_band_ratio, bgap / band_bound);
      tally(res, bgap <= band_bound + p.slack, where + "bandwidth gap " + fmt(bgap) + " > " + fmt(band_bound));
    }
  }
  res.passed = res.failures == 0;
  res.metrics = {{"environments", static_cast<double>(p.environments)},
                 {"maxDiscretizationRatio", max_disc_ratio},
                 {"maxBandwidthRatio", max_band_ratio}};
  if (res.passed) res.detail = "both smoothing bounds hold with zero violations";
  return res;
}

CheckResult check_smoothed_policy_invariants(std::size_t trials, std::uint64_t seed) {
  auto res = named("smoothed_policy_invariants");
  double max_mass_err = 0.0;
  double max_risk_gap = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(CounterRng::derive(seed, t));
    const std::size_t k = rng.uniform_int(1, 20);
    const double h = rng.uniform(0.02, 1.0);
    const SurrogateGrid grid(k);
    const std::string where = "trial " + std::to_string(t) + ": ";
    for (std::size_t j = 0; j < k; ++j) {
      const double he = effective_bandwidth(grid.point(j), h);
      tally(res, he >= h / 2.0 - 1e-15 && he <= h + 1e-15, where + "H_e out of [H/2, H]: " + fmt(he));
    }
    const auto env = random_continuous_environment(2, 4, rng());
    const auto base = std::make_shared<TablePolicy>(random_table_policy(2, k, rng()));
    const SmoothedDensityPolicy sm(base, h);
    for (std::size_t x = 0; x < 2; ++x) {
      const auto d = sm.density(Context::from_id(x));
      const double mass_err = std::abs(d.integral() - 1.0);
      max_mass_err = std::max(max_mass_err, mass_err);
      tally(res, mass_err <= 1e-9, where + "smoothed mass off by " + fmt(mass_err));
      tally(res, d.max_value() <= 2.0 / h + 1e-9, where + "density above 2/H: " + fmt(d.max_value()));
      for (int s = 0; s < 5; ++s) {
        const double a = rng.uniform();
        const double diff = std::abs(d(a) - sm.density_at(Context::from_id(x), a));
        tally(res, diff <= 1e-9, where + "piecewise and pointwise density differ by " + fmt(diff));
      }
    }
    const double gap = std::abs(smoothed_risk(*base, grid, h, env) - exact_risk(sm, env));
    max_risk_gap = std::max(max_risk_gap, gap);
    tally(res, gap <= 1e-9, where + "window-mean and piecewise risks differ by " + fmt(gap));
  }
  res.passed = res.failures == 0;
  res.metrics = {{"trials", static_cast<double>(trials)}, {"maxMassError", max_mass_err}, {"maxRiskGap", max_risk_gap}};
  if (res.passed) res.detail = "smoothed policies are densities bounded by 2/H";
  return res;
}

// --- Pessimism and rates --------------------------------------------------------

CheckResult check_pessimism_payoff(const PessimismParams& p) {
  auto res = named("pessimism_payoff");
  const auto env = hard_instance(p.num_contexts, p.num_actions, p.epsilon, CounterRng::derive(p.seed, ~0ULL));
  const double r_star = min_deterministic_risk(env);
  const PointwiseArgminOracle oracle(env.num_contexts());
  std::vector<double> ipw_excess(p.reps);
  std::vector<double> pl_excess(p.reps);
  parallel_for(p.reps, [&](std::size_t r) {
    const auto ds = generate_logs(env, p.n, CounterRng::derive(p.seed, r));
    ipw_excess[r] = exact_risk(*train_ipw_pl(ds, 0.0, oracle).policy, env) - r_star;
    double best = std::numeric_limits<double>::infinity();
    for (double b : p.beta_grid) best = std::min(best, exact_risk(*train_ipw_pl(ds, b, oracle).policy, env));
    pl_excess[r] = best - r_star;
  });
  double mean_ipw = 0.0;
  double mean_pl = 0.0;
  for (std::size_t r = 0; r < p.reps; ++r) {
    mean_ipw += ipw_excess[r] / static_cast<double>(p.reps);
    mean_pl += pl_excess[r] / static_cast<double>(p.reps);
  }
  res.trials = 1;
  res.passed = mean_pl < mean_ipw;
  res.failures = res.passed ? 0 : 1;
  res.metrics = {{"reps", static_cast<double>(p.reps)},
                 {"meanExcessIpw", mean_ipw},
                 {"meanExcessIpwPl", mean_pl}};
  res.detail = "mean excess risk: IPW+PL " + fmt(mean_pl) + " vs plain IPW " + fmt(mean_ipw);
  return res;
}

SyntheticEnvironment rate_environment() {
  std::vector<double> probs{0.25, 0.25, 0.25, 0.25};
  std::vector<std::vector<double>> losses{
      {0.50, 0.44, 0.56}, {0.30, 0.36, 0.33}, {0.62, 0.58, 0.70}, {0.42, 0.44, 0.37}};
  std::vector<std::vector<double>> logging{
      {0.5, 0.3, 0.2}, {0.2, 0.5, 0.3}, {0.3, 0.2, 0.5}, {0.4, 0.4, 0.2}};
  return {std::move(probs), std::move(losses), TablePolicy(std::move(logging)), LossNoise::kBernoulli};
}

CheckResult check_rate(const SyntheticEnvironment& env, const RateParams& p) {
  auto res = named("rate_check");
  if (p.ns.size() < 2) throw std::invalid_argument("rate check needs at least two sample sizes");
  const auto cls = PolicyClass::all_deterministic(env.num_contexts(), env.num_actions());
  const auto stats = class_stats(cls, env.logging(), env.contexts());
  const double r_star = min_deterministic_risk(env);
  std::vector<double> means;
  for (std::size_t s = 0; s < p.ns.size(); ++s) {
    std::vector<double> excess(p.reps);
    parallel_for(p.reps, [&](std::size_t r) {
      const auto ds = generate_logs(env, p.ns[s], CounterRng::derive(CounterRng::derive(p.seed, s), r));
      excess[r] = best_candidate_risk(env, cls, stats, ds, p.alpha) - r_star;
    });
    double mean = 0.0;
    for (double v : excess) mean += v / static_cast<double>(p.reps);
    means.push_back(mean);
    res.metrics.emplace_back("meanExcess[N=" + std::to_string(p.ns[s]) + "]", mean);
  }
  for (std::size_t s = 1; s < means.size(); ++s) {
    tally(res, means[s] <= means[s - 1],
          "mean excess rises from " + fmt(means[s - 1]) + " to " + fmt(means[s]) + " at N=" + std::to_string(p.ns[s]));
  }
  const double ratio = means[1] > 0.0 ? means.back() / means[1] : 0.0;
  res.metrics.emplace_back("ratio", ratio);
  tally(res, ratio <= p.max_ratio, "ratio " + fmt(ratio) + " > " + fmt(p.max_ratio));
  res.passed = res.failures == 0;
  if (res.passed) res.detail = "non-increasing means; ratio " + fmt(ratio);
  return res;
}

// --- Unbiasedness -----------------------------------------------------------------

CheckResult check_unbiasedness(const SyntheticEnvironment& env, const std::vector<PolicyPtr>& policies,
                               const UnbiasednessParams& p) {
  auto res = named("unbiasedness");
  const std::size_t np = policies.size();
  std::vector<double> ipw(p.reps * np);
  std::vector<double> pl(p.reps * np);
  parallel_for(p.reps, [&](std::size_t r) {
    const auto ds = generate_logs(env, p.n, CounterRng::derive(p.seed, r));
    for (std::size_t j = 0; j < np; ++j) {
      ipw[r * np + j] = ipw_risk(*policies[j], ds);
      pl[r * np + j] = pseudo_loss(*policies[j], ds);
    }
  });
  double max_z = 0.0;
  auto test = [&](const std::vector<double>& xs, std::size_t j, double truth, const std::string& what) {
    double mean = 0.0;
    for (std::size_t r = 0; r < p.reps; ++r) mean += xs[r * np + j];
    mean /= static_cast<double>(p.reps);
    double ss = 0.0;
    for (std::size_t r = 0; r < p.reps; ++r) ss += (xs[r * np + j] - mean) * (xs[r * np + j] - mean);
    const double se = std::sqrt(ss / static_cast<double>(p.reps - 1) / static_cast<double>(p.reps));
    const double dev = std::abs(mean - truth);
    if (se > 0.0) max_z = std::max(max_z, dev / se);
    tally(res, dev <= p.z * se + 1e-12,
          what + " of policy " + std::to_string(j) + ": mean " + fmt(mean) + " vs exact " + fmt(truth) + " (se " + fmt(se) + ")");
  };
  for (std::size_t j = 0; j < np; ++j) {
    test(ipw, j, exact_risk(*policies[j], env), "ipw risk");
    test(pl, j, exact_pl(*policies[j], env), "pseudo-loss");
  }
  res.passed = res.failures == 0;
  res.metrics = {{"reps", static_cast<double>(p.reps)}, {"policies", static_cast<double>(np)}, {"maxZ", max_z}};
  if (res.passed) res.detail = "all means within " + fmt(p.z) + " standard errors";
  return res;
}

// --- Structural properties ----------------------------------------------------------

CheckResult check_estimator_properties(const SyntheticEnvironment& env, std::size_t trials, std::uint64_t seed) {
  auto res = named("estimator_properties");
  const auto ctx = env.contexts();
  const std::vector<double> betas{0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0};
  const auto cls = PolicyClass::all_deterministic(env.num_contexts(), env.num_actions());
  const auto cstats = class_stats(cls, env.logging(), ctx);
  const EnumerationOracle oracle(cls);
  auto sums_to_value = [](const BoundReport& r) {
    double s = 0.0;
    for (const auto& [k, v] : r.terms) s += v;
    return std::abs(s - r.value) <= 1e-12;
  };

  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(CounterRng::derive(seed, t));
    const auto ds = generate_logs(env, 50 + rng.uniform_int(0, 200), rng());
    const TablePolicy pi = random_table_policy(env.num_contexts(), env.num_actions(), rng());
    const auto pstats = policy_stats(pi, env.logging(), ctx);
    const std::string where = "trial " + std::to_string(t) + ": ";
    const auto q = risk_quantities(pi, ds);
    tally(res, q.pseudo_loss >= 1.0 - 1e-12, where + "PL_hat below 1: " + fmt(q.pseudo_loss));

    for (double beta : {1e-3, 0.1, 1.0}) {
      const auto ucb = ucb_report(pi, ds, cstats, 0.05, beta);
      tally(res, ucb.value >= q.ipw_risk, where + "ucb below ipw risk");
      tally(res, sums_to_value(ucb), where + "ucb report terms do not sum to its value");
      tally(res, sums_to_value(psi_beta(cstats, ds.size(), 0.05, beta)), where + "psi terms do not sum");
    }
    tally(res, sums_to_value(confidence_width(q.pseudo_loss, pstats, ds.size(), 0.05)),
          where + "confidence width terms do not sum");

    double prev_pl = std::numeric_limits<double>::infinity();
    for (double beta : betas) {
      const double pl_hat = pseudo_loss(*train_ipw_pl(ds, beta, oracle).policy, ds);
      tally(res, pl_hat <= prev_pl + 1e-12, where + "PL_hat path rises at beta " + fmt(beta));
      prev_pl = pl_hat;
    }
  }

  // psi_beta: convex in beta (three-point chords) and decreasing in N.
  std::vector<double> grid;
  for (double b = 1e-4; b <= 100.0; b *= 1.5) grid.push_back(b);
  for (std::size_t n : {10u, 100u, 1000u}) {
    for (std::size_t j = 1; j + 1 < grid.size(); ++j) {
      const double b0 = grid[j - 1], b1 = grid[j], b2 = grid[j + 1];
      const double f0 = psi_beta(cstats, n, 0.05, b0).value;
      const double f1 = psi_beta(cstats, n, 0.05, b1).value;
      const double f2 = psi_beta(cstats, n, 0.05, b2).value;
      const double chord = f0 + (f2 - f0) * (b1 - b0) / (b2 - b0);
      tally(res, f1 <= chord * (1.0 + 1e-12), "psi_beta not convex near beta " + fmt(b1));
      tally(res, psi_beta(cstats, 2 * n, 0.05, b1).value < f1, "psi_beta not decreasing in N at " + std::to_string(n));
    }
  }
  res.passed = res.failures == 0;
  res.metrics = {{"trials", static_cast<double>(trials)}, {"assertions", static_cast<double>(res.trials)}};
  if (res.passed) res.detail = "all structural properties hold";
  return res;
}

CheckResult check_dataset(const LoggedDataset& ds, const std::string& name) {
  auto res = named(name);
  const auto violations = validate_dataset(ds);
  res.trials = std::max<std::size_t>(ds.size(), 1);
  res.failures = violations.size();
  res.passed = violations.empty();
  res.metrics = {{"records", static_cast<double>(ds.size())}, {"violations", static_cast<double>(violations.size())}};
  res.detail = violations.empty() ? "dataset is valid" : violations.front().message;
  return res;
}

// --- Suite ----------------------------------------------------------------------

namespace {

template <class Fn>
CheckResult guarded(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    auto res = named(name);
    res.trials = 1;
    res.failures = 1;
    res.detail = std::string("error: ") + e.what();
    return res;
  }
}

}  // namespace

std::vector<CheckResult> run_verification_suite(const SyntheticEnvironment& env, const SuiteConfig& cfg) {
  if (cfg.reps == 0) throw std::invalid_argument("reps must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  auto sub = [&](std::uint64_t k) { return CounterRng::derive(cfg.seed, k); };
  const std::size_t nx = env.num_contexts();
  const std::size_t na = env.num_actions();

  std::vector<PolicyPtr> policies;
  policies.push_back(std::make_shared<UniformPolicy>(na));
  for (std::uint64_t j = 0; j < 3; ++j) policies.push_back(std::make_shared<TablePolicy>(random_table_policy(nx, na, sub(100 + j))));

  std::vector<CheckResult> out;
  if (cfg.dataset) out.push_back(check_dataset(*cfg.dataset, "input_dataset_validation"));
  out.push_back(guarded("dataset_validation", [&] { return check_dataset(generate_logs(env, 1000, sub(1))); }));

  out.push_back(guarded("discrete_reduction", [&] {
    DiscreteReductionParams p;
    p.seed = sub(2);
    return check_discrete_reduction(p);
  }));
  out.push_back(guarded("continuous_reduction", [&] {
    ContinuousReductionParams p;
    p.seed = sub(3);
    return check_continuous_reduction(p);
  }));
  out.push_back(guarded("variance_domination", [&] {
    VarianceDominationParams p;
    p.seed = sub(4);
    return check_variance_domination(p);
  }));
  out.push_back(guarded("estimator_properties", [&] { return check_estimator_properties(env, 20, sub(5)); }));
  out.push_back(guarded("smoothed_policy_invariants", [&] { return check_smoothed_policy_invariants(200, sub(6)); }));
  out.push_back(guarded("smoothing_bounds", [&] {
    SmoothingParams p;
    p.seed = sub(7);
    return check_smoothing_bounds(p);
  }));

  CoverageParams cov;
  cov.alpha = cfg.alpha;
  cov.reps = cfg.reps;
  cov.min_coverage = 1.0 - cfg.alpha;
  cov.seed = sub(8);
  out.push_back(guarded("pl_band_coverage", [&] { return check_pl_band_coverage(env, policies, cov); }));
  cov.seed = sub(9);
  out.push_back(guarded("confidence_width_coverage", [&] { return check_confidence_width_coverage(env, policies, cov); }));
  out.push_back(guarded("ucb_coverage", [&] {
    std::vector<PolicyPtr> members = policies;
    CounterRng rng(sub(10));
    while (members.size() < 8) {
      std::vector<std::size_t> assign(nx);
      for (auto& a : assign) a = rng.uniform_int(0, na - 1);
      members.push_back(std::make_shared<DeterministicPolicy>(std::move(assign), na));
    }
    CoverageParams p = cov;
    p.n = 500;
    p.seed = sub(11);
    return check_ucb_coverage(env, PolicyClass::enumerated(std::move(members)), p);
  }));
  out.push_back(guarded("oracle_inequality", [&] {
    OracleInequalityParams p;
    p.alpha = cfg.alpha;
    p.max_violation_rate = cfg.alpha;
    p.reps = std::max<std::size_t>(cfg.reps / 5, 1);
    p.seed = sub(12);
    return check_oracle_inequality(env, p);
  }));
  out.push_back(guarded("unbiasedness", [&] {
    std::vector<PolicyPtr> pols;
    for (std::uint64_t j = 0; j < 10; ++j) pols.push_back(std::make_shared<TablePolicy>(random_table_policy(nx, na, sub(200 + j))));
    UnbiasednessParams p;
    p.reps = 10 * cfg.reps;
    p.seed = sub(13);
    return check_unbiasedness(env, pols, p);
  }));
  out.push_back(guarded("pessimism_payoff", [&] {
    PessimismParams p;
    p.reps = std::max<std::size_t>(cfg.reps / 2, 1);
    p.seed = sub(14);
    return check_pessimism_payoff(p);
  }));
  return out;
}

}  // namespace opo
