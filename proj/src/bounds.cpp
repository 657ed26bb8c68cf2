#include "opo/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opo/estimators.hpp"

namespace opo {

double BoundReport::term(std::string_view key) const {
  for (const auto& [k, v] : terms) {
    if (k == key) return v;
  }
  throw std::out_of_range("bound report has no term " + std::string(key));
}

double BoundReport::derived_value(std::string_view key) const {
  for (const auto& [k, v] : derived) {
    if (k == key) return v;
  }
  throw std::out_of_range("bound report has no derived value " + std::string(key));
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

void check_n(std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample size must be >= 1");
}

void check_stats(const ClassStats& s) {
  if (!(s.delta_sup_pi > 0.0 && s.delta_inf_mu > 0.0 && s.delta_sup_pi_mu > 0.0 && s.class_size >= 1.0)) {
    throw std::invalid_argument("invalid class statistics");
  }
}

// ln(4|Pi|/alpha), the union-bound log factor shared by the class-level bounds.
double class_log(const ClassStats& s, double alpha) { return std::log(4.0 * s.class_size / alpha); }

BoundReport summed(std::string name, std::vector<std::pair<std::string, double>> terms, double alpha) {
  BoundReport r;
  r.name = std::move(name);
  r.confidence = alpha;
  for (const auto& t : terms) r.value += t.second;
  r.terms = std::move(terms);
  return r;
}

}  // namespace

double bennett_bound(double variance, std::size_t n, double alpha, double range) {
  check_alpha(alpha);
  check_n(n);
  if (!(variance >= 0.0)) throw std::invalid_argument("variance must be non-negative");
  if (!(range > 0.0)) throw std::invalid_argument("range must be positive");
  const double log_term = std::log(1.0 / alpha);
  const double nn = static_cast<double>(n);
  return std::sqrt(2.0 * variance * log_term / nn) + range * log_term / (3.0 * nn);
}

Interval pl_concentration_band(double pl_hat, std::size_t n, double alpha, double delta_inf_mu) {
  check_alpha(alpha);
  check_n(n);
  if (!(delta_inf_mu > 0.0)) throw std::invalid_argument("delta_inf(mu) must be positive");
  if (!(pl_hat >= 0.0)) throw std::invalid_argument("pl_hat must be non-negative");
  const double c = 4.0 * std::log(2.0 / alpha) / (3.0 * static_cast<double>(n) * delta_inf_mu);
  return {std::max(0.0, 2.0 / 3.0 * (pl_hat - c)), 2.0 * (pl_hat + c)};
}

BoundReport confidence_width(double pl_hat, const ClassStats& stats, std::size_t n, double alpha) {
  check_alpha(alpha);
  check_n(n);
  check_stats(stats);
  if (!(pl_hat > 0.0)) throw std::invalid_argument("pl_hat must be positive");
  const double l = std::log(4.0 / alpha);
  const double nn = static_cast<double>(n);
  const double sqrt_term = std::sqrt(3.0 * l * stats.delta_sup_pi * pl_hat / nn);
  const double cross_term = std::sqrt(8.0 * stats.delta_sup_pi / (3.0 * stats.delta_inf_mu)) * l / nn;
  const double range_term = l * stats.delta_sup_pi_mu / (3.0 * nn);
  auto r = summed("confidenceWidth",
                  {{term_names::kSqrt, sqrt_term}, {term_names::kCross, cross_term}, {term_names::kRange, range_term}},
                  alpha);
  const double envelope =
      sqrt_term + l / nn *
                      std::max(2.0 * std::sqrt(8.0 * stats.delta_sup_pi / (3.0 * stats.delta_inf_mu)),
                               2.0 / 3.0 * stats.delta_sup_pi_mu);
  r.derived.emplace_back("maxEnvelope", envelope);
  return r;
}

BoundReport psi_beta(const ClassStats& stats, std::size_t n, double alpha, double beta) {
  check_alpha(alpha);
  check_n(n);
  check_stats(stats);
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const double l = class_log(stats, alpha);
  const double nn = static_cast<double>(n);
  return summed("psiBeta",
                {{term_names::kBeta, 3.0 * stats.delta_sup_pi * l / (4.0 * beta * nn)},
                 {term_names::kCross, std::sqrt(8.0 * stats.delta_sup_pi / (3.0 * stats.delta_inf_mu)) * l / nn},
                 {term_names::kRange, l * stats.delta_sup_pi_mu / (3.0 * nn)}},
                alpha);
}

double ucb_risk(const MassPolicy& pi, const LoggedDataset& ds, const ClassStats& stats, double alpha,
                double beta) {
  return penalized_objective(pi, ds, beta) + psi_beta(stats, ds.size(), alpha, beta).value;
}

BoundReport ucb_report(const MassPolicy& pi, const LoggedDataset& ds, const ClassStats& stats, double alpha,
                       double beta) {
  const auto psi = psi_beta(stats, ds.size(), alpha, beta);
  std::vector<std::pair<std::string, double>> terms{{"ipwRisk", ipw_risk(pi, ds)},
                                                    {"plPenalty", beta * pseudo_loss(pi, ds)}};
  terms.insert(terms.end(), psi.terms.begin(), psi.terms.end());
  auto r = summed("ucbRisk", std::move(terms), alpha);
  r.derived.emplace_back("beta", beta);
  return r;
}

double oracle_inequality_bound(const ClassStats& stats, std::size_t n, double alpha, double beta, double pl_hat) {
  check_alpha(alpha);
  check_n(n);
  check_stats(stats);
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(pl_hat >= 0.0)) throw std::invalid_argument("pl_hat must be non-negative");
  const double l = class_log(stats, alpha);
  return 2.0 * beta * pl_hat +
         (1.5 * stats.delta_sup_pi / beta + 8.0 * stats.delta_pi_mu) * l / static_cast<double>(n);
}

double beta_star_bound(const ClassStats& stats, std::size_t n, double alpha, double exact_pl) {
  check_alpha(alpha);
  check_n(n);
  check_stats(stats);
  if (!(exact_pl > 0.0) || !std::isfinite(exact_pl)) throw std::invalid_argument("exact PL must be positive");
  const double l = class_log(stats, alpha);
  const double nn = static_cast<double>(n);
  return std::sqrt(18.0 * stats.delta_sup_pi * exact_pl * l / nn) + 12.0 * stats.delta_pi_mu * l / nn;
}

double beta_for_pl(const ClassStats& stats, std::size_t n, double alpha, double pl_hat) {
  check_alpha(alpha);
  check_n(n);
  check_stats(stats);
  if (!(pl_hat > 0.0)) throw std::invalid_argument("pl_hat must be positive");
  return std::sqrt(3.0 * stats.delta_sup_pi * class_log(stats, alpha) / (4.0 * static_cast<double>(n) * pl_hat));
}

std::vector<BetaCandidate> beta_candidates(const PolicyClass& cls, const LoggedDataset& ds,
                                           const ClassStats& stats, double alpha) {
  if (!cls.is_enumerated()) throw std::invalid_argument("beta candidates need an enumerated class");
  std::vector<BetaCandidate> out;
  out.reserve(cls.members().size());
  for (std::size_t m = 0; m < cls.members().size(); ++m) {
    const double pl = pseudo_loss(cls.member(m), ds);
    out.push_back({m, pl, beta_for_pl(stats, ds.size(), alpha, pl)});
  }
  return out;
}

}  // namespace opo
