#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opo/model.hpp"

namespace opo {

// A bound value together with the named terms it is the sum of.
struct BoundReport {
  std::string name;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  // Auxiliary quantities that are not part of the sum.
  std::vector<std::pair<std::string, double>> derived;
  double confidence = 0.0;  // alpha

  double term(std::string_view key) const;
  double derived_value(std::string_view key) const;
};

// Stable term names used in serialized reports.
namespace term_names {
inline constexpr const char* kSqrt = "sqrtTerm";
inline constexpr const char* kCross = "crossTerm";
inline constexpr const char* kRange = "rangeTerm";
inline constexpr const char* kBeta = "betaTerm";
}  // namespace term_names

// One-sided Bennett deviation for i.i.d. variables in [0, range]:
// sqrt(2 var ln(1/alpha) / n) + range ln(1/alpha) / (3n).
double bennett_bound(double variance, std::size_t n, double alpha, double range = 1.0);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// With c = 4 ln(2/alpha) / (3 n delta_inf(mu)), the band
// [(2/3)(pl_hat - c), 2 (pl_hat + c)] holds PL(pi) w.p. >= 1 - alpha. lo is clamped at 0.
Interval pl_concentration_band(double pl_hat, std::size_t n, double alpha, double delta_inf_mu);

// Width of the two-sided confidence interval for R(pi) around ipw_risk. `stats`
// describes the single policy pi. Terms: sqrtTerm, crossTerm, rangeTerm.
// derived["maxEnvelope"] holds the max(.)-form envelope.
BoundReport confidence_width(double pl_hat, const ClassStats& stats, std::size_t n, double alpha);

// Policy-independent slack Psi_beta. Terms: betaTerm, crossTerm, rangeTerm.
BoundReport psi_beta(const ClassStats& stats, std::size_t n, double alpha, double beta);

// ipw_risk + beta * pseudo_loss + psi_beta; valid simultaneously over the class
// described by `stats` w.p. >= 1 - alpha.
double ucb_risk(const MassPolicy& pi, const LoggedDataset& ds, const ClassStats& stats, double alpha,
                double beta);

// Same quantity as ucb_risk, itemized: ipwRisk, plPenalty, then the psi_beta terms.
BoundReport ucb_report(const MassPolicy& pi, const LoggedDataset& ds, const ClassStats& stats, double alpha,
                       double beta);

// Excess-risk bound at fixed beta against a comparator with empirical PL pl_hat:
// 2 beta pl_hat + ((3/2) delta_sup(Pi) / beta + 8 Delta(Pi, mu)) ln(4|Pi|/alpha) / n.
double oracle_inequality_bound(const ClassStats& stats, std::size_t n, double alpha, double beta, double pl_hat);

// Data-independent excess-risk bound at the selected beta against a comparator
// with exact PL: sqrt(18 delta_sup(Pi) PL ln(4|Pi|/alpha) / n) + 12 Delta ln(4|Pi|/alpha) / n.
double beta_star_bound(const ClassStats& stats, std::size_t n, double alpha, double exact_pl);

struct BetaCandidate {
  std::size_t member = 0;
  double pl_hat = 0.0;
  double beta = 0.0;
};

// beta_pi = sqrt(3 delta_sup(Pi) ln(4|Pi|/alpha) / (4 n pl_hat(pi))) for every member.
double beta_for_pl(const ClassStats& stats, std::size_t n, double alpha, double pl_hat);
std::vector<BetaCandidate> beta_candidates(const PolicyClass& cls, const LoggedDataset& ds,
                                           const ClassStats& stats, double alpha);

}  // namespace opo
