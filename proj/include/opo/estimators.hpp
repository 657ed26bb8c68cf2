#pragma once

#include <span>
#include <vector>

#include "opo/environment.hpp"
#include "opo/model.hpp"

namespace opo {

// Per-record IPW terms pi(a_i|x_i) / mu(a_i|x_i) * l_i.
std::vector<double> ipw_terms(const MassPolicy& pi, const LoggedDataset& ds);

// (1/N) sum_i pi(a_i|x_i) / mu(a_i|x_i) * l_i
double ipw_risk(const MassPolicy& pi, const LoggedDataset& ds);

// (1/N) sum_i sum_a pi(a|x_i) / mu(a|x_i). At least 1 for proper pmfs.
double pseudo_loss(const MassPolicy& pi, const LoggedDataset& ds);

// ipw_risk + beta * pseudo_loss. beta == 0 is accepted (plain IPW).
double penalized_objective(const MassPolicy& pi, const LoggedDataset& ds, double beta);

// Variance with 1/N normalization.
double population_variance(std::span<const double> xs);

struct RiskQuantities {
  double ipw_risk = 0.0;
  double pseudo_loss = 0.0;
  double sample_variance = 0.0;  // population variance of the IPW terms
};

RiskQuantities risk_quantities(const MassPolicy& pi, const LoggedDataset& ds);

// Variance-regularized baseline: ipw_risk + lambda * sqrt(V/N), V the
// population variance of the IPW terms. Needs N >= 2.
double eb_objective(const MassPolicy& pi, const LoggedDataset& ds, double lambda);

// Exact PL(pi) = E_x[sum_a pi(a|x) / mu(a|x)].
double exact_pl(const MassPolicy& pi, const SyntheticEnvironment& env);

// Exact variance of one IPW term under x ~ D, a ~ mu(.|x), l ~ noise model.
double exact_variance(const MassPolicy& pi, const SyntheticEnvironment& env);

}  // namespace opo
