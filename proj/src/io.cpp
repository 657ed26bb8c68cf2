#include "opo/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "opo/csc.hpp"
#include "opo/rng.hpp"

namespace opo {

Json to_json(const Context& x) {
  if (x.has_id()) return Json{{"id", x.id()}};
  return Json{{"features", x.features()}};
}

Context context_from_json(const Json& j) {
  if (j.contains("id")) return Context::from_id(j.at("id").get<std::size_t>());
  if (j.contains("features")) return Context::from_features(j.at("features").get<std::vector<double>>());
  throw std::invalid_argument("context needs an 'id' or 'features' field");
}

Json to_json(const PiecewiseConstant& f) { return Json{{"breaks", f.breaks()}, {"values", f.values()}}; }

PiecewiseConstant piecewise_from_json(const Json& j) {
  return {j.at("breaks").get<std::vector<double>>(), j.at("values").get<std::vector<double>>()};
}

Json to_json(const BoundReport& r) {
  Json terms = Json::object();
  for (const auto& [k, v] : r.terms) terms[k] = v;
  Json out{{"name", r.name}, {"value", r.value}, {"confidence", r.confidence}, {"terms", terms}};
  if (!r.derived.empty()) {
    Json derived = Json::object();
    for (const auto& [k, v] : r.derived) derived[k] = v;
    out["derived"] = derived;
  }
  return out;
}

// --- Datasets ---------------------------------------------------------------

namespace {

Json header_with(Json fields, const Json& metadata) {
  for (const auto& [k, v] : metadata.items()) {
    if (!fields.contains(k)) fields[k] = v;
  }
  return Json{{"header", fields}};
}

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
  throw std::invalid_argument("line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_dataset(std::ostream& out, const LoggedDataset& ds, const Json& metadata) {
  out << header_with(Json{{"num_actions", ds.num_actions}}, metadata).dump() << '\n';
  for (const auto& r : ds.records) {
    Json j{{"context", to_json(r.context)}, {"action", r.action}, {"loss", r.loss}, {"propensities", r.propensities}};
    out << j.dump() << '\n';
  }
}

void write_dataset(std::ostream& out, const ContinuousDataset& ds, const Json& metadata) {
  out << header_with(Json{{"action_space", "continuous"}}, metadata).dump() << '\n';
  for (const auto& r : ds.records) {
    Json j{{"context", to_json(r.context)}, {"action", r.action}, {"loss", r.loss}, {"density", to_json(r.density)}};
    out << j.dump() << '\n';
  }
}

AnyDataset read_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<Json> header;
  while (!header && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      fail_at(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.contains("header")) fail_at(line_no, "first record must be a header");
    header = j.at("header");
  }
  if (!header) throw std::invalid_argument("dataset file is empty");

  const bool continuous = header->value("action_space", std::string("discrete")) == "continuous";
  LoggedDataset discrete;
  ContinuousDataset cont;
  if (!continuous) {
    if (!header->contains("num_actions")) fail_at(line_no, "header lacks num_actions");
    discrete.num_actions = header->at("num_actions").get<std::size_t>();
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      const Context ctx = context_from_json(j.at("context"));
      const double loss = j.at("loss").get<double>();
      if (continuous) {
        cont.records.push_back({ctx, j.at("action").get<double>(), loss, piecewise_from_json(j.at("density"))});
      } else {
        auto props = j.at("propensities").get<std::vector<double>>();
        if (props.size() != discrete.num_actions) fail_at(line_no, "propensity vector length differs from num_actions");
        discrete.records.push_back({ctx, j.at("action").get<std::size_t>(), loss, std::move(props)});
      }
    } catch (const Json::exception& e) {
      fail_at(line_no, e.what());
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) throw;
      fail_at(line_no, msg);
    }
  }
  if (continuous) return cont;
  return discrete;
}

AnyDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path);
  return read_dataset(in);
}

LoggedDataset load_discrete_dataset(const std::string& path) {
  auto any = load_dataset(path);
  if (auto* ds = std::get_if<LoggedDataset>(&any)) return std::move(*ds);
  throw std::invalid_argument("expected a discrete-action dataset: " + path);
}

// --- Environments -----------------------------------------------------------

Json to_json(const SyntheticEnvironment& env, std::optional<std::uint64_t> seed) {
  Json j{{"kind", "discrete"},
         {"context_dist", env.context_probs()},
         {"loss_means", env.loss_means()},
         {"logging", env.logging().table()},
         {"noise", to_string(env.noise())}};
  if (seed) {
    j["seed"] = *seed;
    j["rng"] = std::string(CounterRng::kName);
  }
  return j;
}

Json to_json(const ContinuousEnvironment& env, std::optional<std::uint64_t> seed) {
  Json losses = Json::array();
  for (const auto& l : env.losses()) losses.push_back(to_json(l));
  Json logging = Json::array();
  for (const auto& m : env.logging()) logging.push_back(to_json(m));
  Json j{{"kind", "continuous"},
         {"context_dist", env.context_probs()},
         {"losses", losses},
         {"logging", logging},
         {"noise", to_string(env.noise())}};
  if (seed) {
    j["seed"] = *seed;
    j["rng"] = std::string(CounterRng::kName);
  }
  return j;
}

AnyEnvironment environment_from_json(const Json& j) {
  try {
    const auto kind = j.value("kind", std::string("discrete"));
    const auto probs = j.at("context_dist").get<std::vector<double>>();
    const auto noise = parse_loss_noise(j.value("noise", std::string("bernoulli")));
    if (kind == "discrete") {
      return SyntheticEnvironment(probs, j.at("loss_means").get<std::vector<std::vector<double>>>(),
                                  TablePolicy(j.at("logging").get<std::vector<std::vector<double>>>()), noise);
    }
    if (kind == "continuous") {
      std::vector<PiecewiseConstant> losses;
      for (const auto& l : j.at("losses")) losses.push_back(piecewise_from_json(l));
      std::vector<PiecewiseConstant> logging;
      for (const auto& m : j.at("logging")) logging.push_back(piecewise_from_json(m));
      return ContinuousEnvironment(probs, std::move(losses), std::move(logging), noise);
    }
    throw std::invalid_argument("unknown environment kind '" + kind + "'");
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("invalid environment: ") + e.what());
  }
}

AnyEnvironment load_environment(const std::string& path) { return environment_from_json(load_json(path)); }

// --- Policies ---------------------------------------------------------------

Json policy_to_json(const MassPolicy& pi) {
  if (const auto* d = dynamic_cast<const DeterministicPolicy*>(&pi)) {
    return Json{{"kind", "deterministic"}, {"num_actions", d->num_actions()}, {"assignment", d->assignment()}};
  }
  if (const auto* t = dynamic_cast<const TablePolicy*>(&pi)) {
    return Json{{"kind", "table"}, {"pmf", t->table()}};
  }
  if (const auto* l = dynamic_cast<const LinearArgminPolicy*>(&pi)) {
    return Json{{"kind", "linear_argmin"}, {"weights", l->weights()}, {"intercepts", l->intercepts()}};
  }
  if (const auto* u = dynamic_cast<const UniformPolicy*>(&pi)) {
    return Json{{"kind", "uniform"}, {"num_actions", u->num_actions()}};
  }
  throw std::invalid_argument("policy type has no serialized form");
}

Json policy_to_json(const SmoothedDensityPolicy& pi) {
  return Json{{"kind", "smoothed"}, {"h", pi.h()}, {"base", policy_to_json(pi.base())}};
}

namespace {

PolicyPtr mass_policy_from_json(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "deterministic") {
    return std::make_shared<DeterministicPolicy>(j.at("assignment").get<std::vector<std::size_t>>(),
                                                 j.at("num_actions").get<std::size_t>());
  }
  if (kind == "table") return std::make_shared<TablePolicy>(j.at("pmf").get<std::vector<std::vector<double>>>());
  if (kind == "linear_argmin") {
    return std::make_shared<LinearArgminPolicy>(j.at("weights").get<std::vector<std::vector<double>>>(),
                                                j.at("intercepts").get<std::vector<double>>());
  }
  if (kind == "uniform") return std::make_shared<UniformPolicy>(j.at("num_actions").get<std::size_t>());
  throw std::invalid_argument("unknown policy kind '" + kind + "'");
}

}  // namespace

AnyPolicy policy_from_json(const Json& j) {
  try {
    if (j.at("kind").get<std::string>() == "smoothed") {
      return std::shared_ptr<const SmoothedDensityPolicy>(
          smooth_h(mass_policy_from_json(j.at("base")), j.at("h").get<double>()));
    }
    return mass_policy_from_json(j);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("invalid policy: ") + e.what());
  }
}

// --- Files ------------------------------------------------------------------

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void save_json(const std::string& path, const Json& j) { save_text(path, j.dump(2) + "\n"); }

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace opo
