#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"
#include "opo/bounds.hpp"
#include "opo/continuous.hpp"
#include "opo/environment.hpp"
#include "opo/model.hpp"

namespace opo {

using Json = nlohmann::ordered_json;

Json to_json(const Context& x);
Context context_from_json(const Json& j);

Json to_json(const PiecewiseConstant& f);
PiecewiseConstant piecewise_from_json(const Json& j);

Json to_json(const BoundReport& r);

// --- Datasets (JSON Lines) --------------------------------------------------
// Discrete: header {"header": {"num_actions": A, ...}} then one
// {"context": ..., "action": a, "loss": l, "propensities": [...]} per line.
// Continuous: header {"header": {"action_space": "continuous", ...}} then
// {"context": ..., "action": 0.37, "loss": l, "density": {"breaks": [...], "values": [...]}}.
// Extra header fields (seed, rng, ...) are carried as metadata.

void write_dataset(std::ostream& out, const LoggedDataset& ds, const Json& metadata = Json::object());
void write_dataset(std::ostream& out, const ContinuousDataset& ds, const Json& metadata = Json::object());

using AnyDataset = std::variant<LoggedDataset, ContinuousDataset>;

// Parse errors carry the 1-based line number.
AnyDataset read_dataset(std::istream& in);
AnyDataset load_dataset(const std::string& path);
LoggedDataset load_discrete_dataset(const std::string& path);

// --- Environments -----------------------------------------------------------
// {"kind": "discrete", "context_dist": [...], "loss_means": [[...]], "logging": [[...]],
//  "noise": "bernoulli"|"none", "seed": s, "rng": "..."}
// {"kind": "continuous", "context_dist": [...], "losses": [{breaks, values}], "logging": [{breaks, values}], ...}

using AnyEnvironment = std::variant<SyntheticEnvironment, ContinuousEnvironment>;

Json to_json(const SyntheticEnvironment& env, std::optional<std::uint64_t> seed = std::nullopt);
Json to_json(const ContinuousEnvironment& env, std::optional<std::uint64_t> seed = std::nullopt);
AnyEnvironment environment_from_json(const Json& j);
AnyEnvironment load_environment(const std::string& path);

// --- Policies ---------------------------------------------------------------
// {"kind": "deterministic", "num_actions": A, "assignment": [...]}
// {"kind": "table", "pmf": [[...]]}
// {"kind": "linear_argmin", "weights": [[...]], "intercepts": [...]}
// {"kind": "smoothed", "h": H, "base": <grid policy>}

Json policy_to_json(const MassPolicy& pi);
Json policy_to_json(const SmoothedDensityPolicy& pi);

using AnyPolicy = std::variant<PolicyPtr, std::shared_ptr<const SmoothedDensityPolicy>>;
AnyPolicy policy_from_json(const Json& j);

// Whole-file helpers; throw std::runtime_error on I/O failure.
Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);
void save_text(const std::string& path, const std::string& text);

}  // namespace opo
