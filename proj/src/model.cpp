#include "opo/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace opo {

std::size_t Context::id() const {
  if (const auto* v = std::get_if<std::size_t>(&value_)) return *v;
  throw std::invalid_argument("context has no id (feature mode)");
}

const std::vector<double>& Context::features() const {
  if (const auto* v = std::get_if<std::vector<double>>(&value_)) return *v;
  throw std::invalid_argument("context has no features (id mode)");
}

std::vector<Context> LoggedDataset::contexts() const {
  std::vector<Context> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.context);
  return out;
}

std::size_t LoggedDataset::num_context_ids() const {
  std::size_t n = 0;
  for (const auto& r : records) n = std::max(n, r.context.id() + 1);
  return n;
}

std::vector<Violation> validate_dataset(const LoggedDataset& ds) {
  std::vector<Violation> out;
  auto add = [&](std::optional<std::size_t> i, const std::string& what) {
    std::ostringstream msg;
    msg << what;
    if (i) msg << " at record " << *i;
    out.push_back({i, msg.str()});
  };

  if (ds.num_actions < 2) add(std::nullopt, "action count must be >= 2");
  if (ds.records.empty()) add(std::nullopt, "dataset has no records");

  std::optional<std::size_t> feature_dim;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& r = ds.records[i];
    if (!(r.loss >= 0.0 && r.loss <= 1.0)) add(i, "loss out of [0,1]");
    if (r.propensities.size() != ds.num_actions) {
      add(i, "propensity vector length mismatch");
      continue;
    }
    if (r.action >= ds.num_actions) {
      add(i, "action out of range");
      continue;
    }
    double sum = 0.0;
    bool zero = false;
    bool finite = true;
    for (double p : r.propensities) {
      if (!std::isfinite(p)) finite = false;
      if (!(p >= kPropensityFloor)) zero = true;
      sum += p;
    }
    if (!finite) add(i, "non-finite propensity");
    if (zero) add(i, "zero propensity");
    if (std::abs(sum - 1.0) > kMassTolerance) add(i, "propensities do not sum to 1");
    if (!r.context.has_id()) {
      const auto dim = r.context.features().size();
      if (!feature_dim) feature_dim = dim;
      else if (*feature_dim != dim) add(i, "feature dimension mismatch");
    }
  }
  return out;
}

void require_valid(const LoggedDataset& ds) {
  const auto violations = validate_dataset(ds);
  if (!violations.empty()) throw std::invalid_argument(violations.front().message);
}

// --- MassPolicy -------------------------------------------------------------

double MassPolicy::prob(const Context& x, std::size_t action) const {
  return pmf(x).at(action);
}

double MassPolicy::expected_cost(const Context& x, std::span<const double> costs) const {
  const auto p = pmf(x);
  double acc = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) acc += p[a] * costs[a];
  return acc;
}

std::vector<double> MassPolicy::pmf(const Context& x) const {
  std::vector<double> out(num_actions());
  pmf(x, out);
  return out;
}

UniformPolicy::UniformPolicy(std::size_t num_actions) : num_actions_(num_actions) {
  if (num_actions == 0) throw std::invalid_argument("uniform policy needs at least one action");
}

void UniformPolicy::pmf(const Context&, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(num_actions_));
}

TablePolicy::TablePolicy(std::vector<std::vector<double>> table) : table_(std::move(table)) {
  if (table_.empty()) throw std::invalid_argument("table policy needs at least one context");
  num_actions_ = table_.front().size();
  for (const auto& row : table_) {
    if (row.size() != num_actions_ || num_actions_ == 0) {
      throw std::invalid_argument("table policy rows must share a positive action count");
    }
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw std::invalid_argument("table policy has a negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kMassTolerance) throw std::invalid_argument("table policy row does not sum to 1");
  }
}

void TablePolicy::pmf(const Context& x, std::span<double> out) const {
  const auto& row = table_.at(x.id());
  std::copy(row.begin(), row.end(), out.begin());
}

double TablePolicy::prob(const Context& x, std::size_t action) const { return table_.at(x.id()).at(action); }

DeterministicPolicy::DeterministicPolicy(std::vector<std::size_t> assignment, std::size_t num_actions)
    : assignment_(std::move(assignment)), num_actions_(num_actions) {
  for (auto a : assignment_) {
    if (a >= num_actions_) throw std::invalid_argument("deterministic assignment out of action range");
  }
}

std::size_t DeterministicPolicy::action(const Context& x) const { return assignment_.at(x.id()); }

void DeterministicPolicy::pmf(const Context& x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  out[action(x)] = 1.0;
}

double DeterministicPolicy::prob(const Context& x, std::size_t a) const { return action(x) == a ? 1.0 : 0.0; }

double DeterministicPolicy::expected_cost(const Context& x, std::span<const double> costs) const {
  return costs[action(x)];
}

// --- PolicyClass ------------------------------------------------------------

PolicyClass PolicyClass::enumerated(std::vector<PolicyPtr> members) {
  if (members.empty()) throw std::invalid_argument("enumerated policy class must be non-empty");
  PolicyClass cls;
  cls.size_ = static_cast<double>(members.size());
  cls.members_ = std::move(members);
  return cls;
}

PolicyClass PolicyClass::all_deterministic(std::size_t num_contexts, std::size_t num_actions) {
  if (num_contexts == 0 || num_actions == 0) throw std::invalid_argument("empty deterministic class");
  const double count = std::pow(static_cast<double>(num_actions), static_cast<double>(num_contexts));
  if (count > static_cast<double>(1u << 20)) {
    throw std::invalid_argument("deterministic class too large to enumerate");
  }
  const auto total = static_cast<std::size_t>(count);
  std::vector<PolicyPtr> members;
  members.reserve(total);
  for (std::size_t m = 0; m < total; ++m) {
    std::vector<std::size_t> assign(num_contexts);
    std::size_t code = m;
    for (std::size_t x = 0; x < num_contexts; ++x) {
      assign[x] = code % num_actions;
      code /= num_actions;
    }
    members.push_back(std::make_shared<DeterministicPolicy>(std::move(assign), num_actions));
  }
  return enumerated(std::move(members));
}

PolicyClass PolicyClass::parameterized(double size) {
  if (!(size >= 1.0)) throw std::invalid_argument("policy class size must be >= 1");
  PolicyClass cls;
  cls.size_ = size;
  return cls;
}

// --- Statistics -------------------------------------------------------------

Extrema pmf_extrema(const MassPolicy& pi, std::span<const Context> contexts) {
  if (contexts.empty()) throw std::invalid_argument("pmf_extrema needs at least one context");
  Extrema e{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  std::vector<double> p(pi.num_actions());
  for (const auto& x : contexts) {
    pi.pmf(x, p);
    for (double v : p) {
      e.sup = std::max(e.sup, v);
      e.inf = std::min(e.inf, v);
    }
  }
  return e;
}

ClassStats make_class_stats(double delta_sup_pi, double delta_inf_mu, double delta_sup_pi_mu,
                            double class_size) {
  if (!(delta_inf_mu > 0.0)) throw std::invalid_argument("delta_inf(mu) must be positive");
  if (!(delta_sup_pi > 0.0) || !(delta_sup_pi_mu > 0.0)) {
    throw std::invalid_argument("delta_sup statistics must be positive");
  }
  if (!(class_size >= 1.0)) throw std::invalid_argument("class size must be >= 1");
  ClassStats s;
  s.delta_sup_pi = delta_sup_pi;
  s.delta_inf_mu = delta_inf_mu;
  s.delta_sup_pi_mu = delta_sup_pi_mu;
  s.class_size = class_size;
  s.delta_pi_mu = std::max(std::sqrt(delta_sup_pi / delta_inf_mu), delta_sup_pi_mu);
  return s;
}

namespace {

// Running extrema over (member, context) pairs given a logging pmf per context.
struct StatsAccumulator {
  double sup_pi = 0.0;
  double inf_mu = std::numeric_limits<double>::infinity();
  double sup_ratio = 0.0;

  void add_mu(std::span<const double> mu) {
    for (double m : mu) {
      if (!(m >= kPropensityFloor)) throw std::invalid_argument("zero propensity in logging policy");
      inf_mu = std::min(inf_mu, m);
    }
  }

  void add_pair(std::span<const double> pi, std::span<const double> mu) {
    for (std::size_t a = 0; a < pi.size(); ++a) {
      sup_pi = std::max(sup_pi, pi[a]);
      sup_ratio = std::max(sup_ratio, pi[a] / mu[a]);
    }
  }
};

std::vector<const MassPolicy*> members_of(const PolicyClass& cls) {
  if (!cls.is_enumerated()) throw std::invalid_argument("class statistics need an enumerated class");
  std::vector<const MassPolicy*> out;
  for (const auto& m : cls.members()) out.push_back(m.get());
  return out;
}

}  // namespace

ClassStats class_stats(const PolicyClass& cls, const MassPolicy& mu, std::span<const Context> contexts) {
  if (contexts.empty()) throw std::invalid_argument("class statistics need at least one context");
  const auto members = members_of(cls);
  StatsAccumulator acc;
  std::vector<double> mu_pmf(mu.num_actions());
  std::vector<double> pi_pmf(mu.num_actions());
  for (const auto& x : contexts) {
    mu.pmf(x, mu_pmf);
    acc.add_mu(mu_pmf);
    for (const auto* pi : members) {
      if (pi->num_actions() != mu.num_actions()) throw std::invalid_argument("action count mismatch");
      pi->pmf(x, pi_pmf);
      acc.add_pair(pi_pmf, mu_pmf);
    }
  }
  return make_class_stats(acc.sup_pi, acc.inf_mu, acc.sup_ratio, cls.size());
}

ClassStats class_stats(const PolicyClass& cls, const LoggedDataset& ds) {
  if (ds.records.empty()) throw std::invalid_argument("class statistics need at least one record");
  const auto members = members_of(cls);
  StatsAccumulator acc;
  std::vector<double> pi_pmf(ds.num_actions);
  for (const auto& r : ds.records) {
    acc.add_mu(r.propensities);
    for (const auto* pi : members) {
      pi->pmf(r.context, pi_pmf);
      acc.add_pair(pi_pmf, r.propensities);
    }
  }
  return make_class_stats(acc.sup_pi, acc.inf_mu, acc.sup_ratio, cls.size());
}

ClassStats policy_stats(const MassPolicy& pi, const MassPolicy& mu, std::span<const Context> contexts) {
  // Non-owning alias; the class does not outlive this call.
  auto alias = std::shared_ptr<const MassPolicy>(std::shared_ptr<const MassPolicy>{}, &pi);
  return class_stats(PolicyClass::enumerated({alias}), mu, contexts);
}

}  // namespace opo
