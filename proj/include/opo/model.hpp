#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace opo {

// Propensities below this value are treated as zero.
inline constexpr double kPropensityFloor = 1e-12;
// Tolerance for "sums to one" checks on pmfs and densities.
inline constexpr double kMassTolerance = 1e-9;

// A context is either an index into a finite context table or a feature
// vector. Finite-context mode is what the exact ground-truth machinery uses.
class Context {
 public:
  Context() = default;
  static Context from_id(std::size_t id) { return Context(id); }
  static Context from_features(std::vector<double> features) { return Context(std::move(features)); }

  bool has_id() const { return std::holds_alternative<std::size_t>(value_); }
  std::size_t id() const;
  const std::vector<double>& features() const;

  friend bool operator==(const Context&, const Context&) = default;

 private:
  explicit Context(std::size_t id) : value_(id) {}
  explicit Context(std::vector<double> f) : value_(std::move(f)) {}

  std::variant<std::size_t, std::vector<double>> value_{std::size_t{0}};
};

struct LoggedRecord {
  Context context;
  std::size_t action = 0;
  double loss = 0.0;
  // Full logging pmf mu(.|x_i); the pseudo-loss needs every entry.
  std::vector<double> propensities;
};

struct LoggedDataset {
  std::size_t num_actions = 0;
  std::vector<LoggedRecord> records;

  std::size_t size() const { return records.size(); }
  std::vector<Context> contexts() const;
  // 1 + the largest context id; throws if any context is feature-mode.
  std::size_t num_context_ids() const;
};

struct Violation {
  std::optional<std::size_t> record;
  std::string message;
};

// Empty result iff every record invariant holds.
std::vector<Violation> validate_dataset(const LoggedDataset& ds);

// Throws std::invalid_argument carrying the first violation.
void require_valid(const LoggedDataset& ds);

// --- Policies -------------------------------------------------------------

// Maps a context to a probability mass function over num_actions() actions.
// Implementations are immutable and safe to share across threads.
class MassPolicy {
 public:
  virtual ~MassPolicy() = default;

  virtual std::size_t num_actions() const = 0;
  virtual void pmf(const Context& x, std::span<double> out) const = 0;

  virtual double prob(const Context& x, std::size_t action) const;
  // sum_a pi(a|x) * costs[a]
  virtual double expected_cost(const Context& x, std::span<const double> costs) const;

  std::vector<double> pmf(const Context& x) const;
};

using PolicyPtr = std::shared_ptr<const MassPolicy>;

class UniformPolicy final : public MassPolicy {
 public:
  explicit UniformPolicy(std::size_t num_actions);
  std::size_t num_actions() const override { return num_actions_; }
  using MassPolicy::pmf;
  void pmf(const Context& x, std::span<double> out) const override;
  double prob(const Context&, std::size_t) const override { return 1.0 / static_cast<double>(num_actions_); }

 private:
  std::size_t num_actions_;
};

// Explicit pmf per context id.
class TablePolicy final : public MassPolicy {
 public:
  explicit TablePolicy(std::vector<std::vector<double>> table);

  std::size_t num_actions() const override { return num_actions_; }
  std::size_t num_contexts() const { return table_.size(); }
  using MassPolicy::pmf;
  void pmf(const Context& x, std::span<double> out) const override;
  double prob(const Context& x, std::size_t action) const override;
  const std::vector<std::vector<double>>& table() const { return table_; }
  std::span<const double> row(std::size_t context_id) const { return table_.at(context_id); }

 private:
  std::vector<std::vector<double>> table_;
  std::size_t num_actions_ = 0;
};

// Indicator pmf at assignment[context id].
class DeterministicPolicy final : public MassPolicy {
 public:
  DeterministicPolicy(std::vector<std::size_t> assignment, std::size_t num_actions);

  std::size_t num_actions() const override { return num_actions_; }
  using MassPolicy::pmf;
  void pmf(const Context& x, std::span<double> out) const override;
  double prob(const Context& x, std::size_t action) const override;
  double expected_cost(const Context& x, std::span<const double> costs) const override;

  std::size_t action(const Context& x) const;
  const std::vector<std::size_t>& assignment() const { return assignment_; }

 private:
  std::vector<std::size_t> assignment_;
  std::size_t num_actions_;
};

// --- Policy classes and statistics ------------------------------------------

class PolicyClass {
 public:
  // Enumeration mode: explicit members, size == members.size().
  static PolicyClass enumerated(std::vector<PolicyPtr> members);
  // All num_actions^num_contexts deterministic maps. Member m assigns context
  // x the x-th base-num_actions digit of m (context 0 least significant).
  static PolicyClass all_deterministic(std::size_t num_contexts, std::size_t num_actions);
  // Parameterized family known only through its size.
  static PolicyClass parameterized(double size);

  bool is_enumerated() const { return !members_.empty(); }
  double size() const { return size_; }
  const std::vector<PolicyPtr>& members() const { return members_; }
  const MassPolicy& member(std::size_t i) const { return *members_.at(i); }

 private:
  std::vector<PolicyPtr> members_;
  double size_ = 0.0;
};

struct Extrema {
  double sup = 0.0;
  double inf = 0.0;
};

// Extrema of pi(a|x) over the given contexts and all actions.
Extrema pmf_extrema(const MassPolicy& pi, std::span<const Context> contexts);

struct ClassStats {
  double delta_sup_pi = 0.0;     // sup of member pmfs
  double delta_inf_mu = 0.0;     // inf of the logging pmf
  double delta_sup_pi_mu = 0.0;  // sup of pi(a|x)/mu(a|x) over members
  double delta_pi_mu = 0.0;      // max(sqrt(delta_sup_pi / delta_inf_mu), delta_sup_pi_mu)
  double class_size = 1.0;
};

// Fills delta_pi_mu from the other fields.
ClassStats make_class_stats(double delta_sup_pi, double delta_inf_mu, double delta_sup_pi_mu,
                            double class_size);

// Stats of an enumerated class against a logging policy over `contexts`.
ClassStats class_stats(const PolicyClass& cls, const MassPolicy& mu, std::span<const Context> contexts);

// Same, using each record's stored propensities as mu(.|x_i) (empirical extrema).
ClassStats class_stats(const PolicyClass& cls, const LoggedDataset& ds);

// Stats of the single-member class {pi}.
ClassStats policy_stats(const MassPolicy& pi, const MassPolicy& mu, std::span<const Context> contexts);

}  // namespace opo
