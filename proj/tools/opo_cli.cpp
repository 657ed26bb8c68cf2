// opo: generate logs, train, sweep, evaluate and verify from the command line.
//
// Exit codes: 0 ok, 2 invalid input or usage, 3 verification failure, 1 other.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "opo/bounds.hpp"
#include "opo/continuous.hpp"
#include "opo/csc.hpp"
#include "opo/estimators.hpp"
#include "opo/io.hpp"
#include "opo/parallel.hpp"
#include "opo/rng.hpp"
#include "opo/simulator.hpp"
#include "opo/verify.hpp"

namespace fs = std::filesystem;
using namespace opo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitVerifyFailed = 3;

struct Options {
  std::string dataset;
  std::string env = "random";
  std::string cls = "deterministic";
  std::string oracle = "enum";
  std::string policy;
  std::string out;
  std::optional<double> beta;
  std::string beta_grid;
  std::optional<std::size_t> k;
  double h = 0.25;
  std::size_t h_grid_m = 0;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  std::size_t reps = 1000;
  long long n = 1000;
  std::size_t contexts = 4;
  std::size_t actions = 3;
  std::size_t pieces = 3;
  double epsilon = 0.01;
  double ridge = 1e-6;
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad grid value '" + item + "'");
    }
    if (used != item.size()) throw std::invalid_argument("bad grid value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("grid must be non-empty");
  return out;
}

std::vector<double> beta_values(const Options& o) {
  std::vector<double> betas = o.beta_grid.empty() ? std::vector<double>{} : parse_grid(o.beta_grid);
  if (o.beta) betas.insert(betas.begin(), *o.beta);
  if (betas.empty()) throw std::invalid_argument("give --beta or --beta-grid");
  for (double b : betas) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("beta must be finite and >= 0");
  }
  return betas;
}

std::string csv_number(std::optional<double> v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

void emit(const Options& o, const std::string& text, const std::string& default_name = "") {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  fs::path path(o.out);
  if (!default_name.empty() && fs::is_directory(path)) path /= default_name;
  save_text(path.string(), text);
}

// --- Environments ---------------------------------------------------------------

AnyEnvironment resolve_environment(const Options& o, std::uint64_t seed) {
  if (o.env == "hard") return hard_instance(o.contexts, o.actions, o.epsilon, seed);
  if (o.env == "random") return random_environment(o.contexts, o.actions, seed);
  if (o.env == "rate") return rate_environment();
  if (o.env == "continuous") return random_continuous_environment(o.contexts, o.pieces, seed);
  if (!fs::exists(o.env)) {
    throw std::invalid_argument("--env must be hard, random, rate, continuous or an environment file: " + o.env);
  }
  return load_environment(o.env);
}

std::optional<AnyEnvironment> optional_environment(const Options& o) {
  if (o.env.empty() || !fs::exists(o.env)) return std::nullopt;
  return load_environment(o.env);
}

// --- Policy classes and statistics --------------------------------------------

struct ClassSpec {
  std::optional<PolicyClass> enumerated;  // built for --oracle enum or a class file
  std::optional<ClassStats> stats;
  std::size_t num_contexts = 0;
};

double min_propensity(const LoggedDataset& ds) {
  double m = 1.0;
  for (const auto& r : ds.records) {
    for (double p : r.propensities) m = std::min(m, p);
  }
  return m;
}

PolicyClass load_class_file(const std::string& path) {
  const auto j = load_json(path);
  std::vector<PolicyPtr> members;
  for (const auto& pj : j.at("policies")) {
    auto any = policy_from_json(pj);
    auto* mass = std::get_if<PolicyPtr>(&any);
    if (!mass) throw std::invalid_argument("class files hold mass policies only");
    members.push_back(*mass);
  }
  return PolicyClass::enumerated(std::move(members));
}

// "deterministic": every map from observed context ids to actions, with stats
// in closed form (delta_sup = 1, delta_sup(Pi, mu) = 1 / delta_inf).
// "linear": feature-mode argmin policies, no finite class stats.
// Anything else is read as a JSON class file {"policies": [...]}.
ClassSpec discrete_class(const Options& o, const LoggedDataset& ds, bool need_members) {
  ClassSpec spec;
  if (o.cls == "linear") return spec;
  if (o.cls == "deterministic") {
    spec.num_contexts = ds.num_context_ids();
    const double inf = min_propensity(ds);
    const double size = std::pow(static_cast<double>(ds.num_actions), static_cast<double>(spec.num_contexts));
    spec.stats = make_class_stats(1.0, inf, 1.0 / inf, size);
    if (need_members) spec.enumerated = PolicyClass::all_deterministic(spec.num_contexts, ds.num_actions);
    return spec;
  }
  spec.enumerated = load_class_file(o.cls);
  spec.stats = class_stats(*spec.enumerated, ds);
  return spec;
}

std::unique_ptr<CscOracle> make_oracle(const Options& o, const ClassSpec& spec) {
  if (o.oracle == "enum") {
    if (!spec.enumerated) throw std::invalid_argument("--oracle enum needs an enumerable --class");
    return std::make_unique<EnumerationOracle>(*spec.enumerated);
  }
  if (o.oracle == "argmin") {
    if (o.cls != "deterministic") throw std::invalid_argument("--oracle argmin solves --class deterministic only");
    return std::make_unique<PointwiseArgminOracle>(spec.num_contexts);
  }
  return std::make_unique<RegressionOracle>(RegressionConfig{o.ridge});
}

// --- Metrics ----------------------------------------------------------------------

Json discrete_metrics(const MassPolicy& pi, const LoggedDataset& ds, double beta, const Options& o,
                      const ClassSpec& spec, const SyntheticEnvironment* env) {
  const double ipw = ipw_risk(pi, ds);
  const double pl = pseudo_loss(pi, ds);
  Json m{{"beta", beta}, {"ipwRisk", ipw}, {"pseudoLoss", pl}, {"objective", penalized_objective(pi, ds, beta)}};
  if (spec.stats && beta > 0.0) {
    m["alpha"] = o.alpha;
    m["ucbRisk"] = to_json(ucb_report(pi, ds, *spec.stats, o.alpha, beta));
  }
  if (env) m["exactRisk"] = exact_risk(pi, *env);
  return m;
}

ClassStats continuous_stats(const ContinuousDataset& ds, std::size_t k, double h) {
  const double size = std::pow(static_cast<double>(k), static_cast<double>(ds.num_context_ids()));
  return smoothed_class_stats(h, ds.delta_inf_mu(), size);
}

Json continuous_metrics(const SmoothedDensityPolicy& pi, const ContinuousDataset& ds, double beta, const Options& o,
                        const ContinuousEnvironment* env) {
  const double ipw = continuous_ipw_risk(pi, ds);
  const double pl = continuous_pseudo_loss(pi, ds);
  const double objective = continuous_penalized_objective(pi, ds, beta);
  Json m{{"beta", beta}, {"k", pi.grid().k()}, {"h", pi.h()}, {"ipwRisk", ipw}, {"pseudoLoss", pl}, {"objective", objective}};
  if (beta > 0.0) {
    const auto psi = psi_beta(continuous_stats(ds, pi.grid().k(), pi.h()), ds.size(), o.alpha, beta);
    BoundReport ucb{"ucbRisk", objective + psi.value, {{"ipwRisk", ipw}, {"plPenalty", beta * pl}}, {}, o.alpha};
    for (const auto& t : psi.terms) ucb.terms.push_back(t);
    m["alpha"] = o.alpha;
    m["ucbRisk"] = to_json(ucb);
  }
  if (env) m["exactRisk"] = exact_risk(pi, *env);
  return m;
}

std::size_t grid_size_for(const Options& o, const ContinuousDataset& ds, double h) {
  return o.k ? *o.k : suggest_k(ds.size(), ds.delta_inf_mu(), h, o.alpha);
}

std::unique_ptr<CscOracle> continuous_oracle(const Options& o, const ContinuousDataset& ds, std::size_t k) {
  const std::size_t nx = ds.num_context_ids();
  if (o.oracle == "enum") return std::make_unique<EnumerationOracle>(PolicyClass::all_deterministic(nx, k));
  if (o.oracle == "argmin") return std::make_unique<PointwiseArgminOracle>(nx);
  return std::make_unique<RegressionOracle>(RegressionConfig{o.ridge});
}

// --- Subcommands ------------------------------------------------------------------

int cmd_generate(const Options& o) {
  if (o.n < 1) throw std::invalid_argument("n must be ≥ 1");
  if (o.out.empty()) throw std::invalid_argument("--out is required");
  const std::uint64_t seed = *o.seed;
  const auto env = resolve_environment(o, seed);
  const auto n = static_cast<std::size_t>(o.n);
  const std::uint64_t log_seed = CounterRng::derive(seed, 1);
  Json meta{{"seed", seed}, {"log_seed", log_seed}, {"rng", std::string(CounterRng::kName)}, {"n", n}, {"env", o.env}};

  std::ostringstream data;
  Json env_json;
  if (const auto* d = std::get_if<SyntheticEnvironment>(&env)) {
    const auto ds = generate_logs(*d, n, log_seed);
    require_valid(ds);
    write_dataset(data, ds, meta);
    env_json = to_json(*d, seed);
  } else {
    const auto& c = std::get<ContinuousEnvironment>(env);
    write_dataset(data, generate_logs(c, n, log_seed), meta);
    env_json = to_json(c, seed);
  }
  save_text(o.out, data.str());
  save_json(o.out + ".env.json", env_json);
  std::cerr << "wrote " << n << " records to " << o.out << " and " << o.out << ".env.json\n";
  return kExitOk;
}

int cmd_train(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("--out directory is required");
  const auto betas = beta_values(o);
  const auto any = load_dataset(o.dataset);
  const auto env = optional_environment(o);
  fs::create_directories(o.out);
  Json runs = Json::array();

  auto policy_name = [&](std::size_t i) {
    return betas.size() == 1 ? std::string("policy.json") : "policy_" + std::to_string(i) + ".json";
  };
  if (const auto* ds = std::get_if<LoggedDataset>(&any)) {
    require_valid(*ds);
    const auto spec = discrete_class(o, *ds, o.oracle == "enum");
    const auto oracle = make_oracle(o, spec);
    const auto* denv = env ? std::get_if<SyntheticEnvironment>(&*env) : nullptr;
    for (std::size_t i = 0; i < betas.size(); ++i) {
      const auto res = train_ipw_pl(*ds, betas[i], *oracle);
      save_json((fs::path(o.out) / policy_name(i)).string(), policy_to_json(*res.policy));
      Json m = discrete_metrics(*res.policy, *ds, betas[i], o, spec, denv);
      m["policyFile"] = policy_name(i);
      if (res.member) m["member"] = *res.member;
      runs.push_back(m);
    }
  } else {
    const auto& cds = std::get<ContinuousDataset>(any);
    const auto* cenv = env ? std::get_if<ContinuousEnvironment>(&*env) : nullptr;
    const std::size_t k = grid_size_for(o, cds, o.h);
    const auto oracle = continuous_oracle(o, cds, k);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      const auto res = train_ipw_pl_continuous(cds, k, o.h, betas[i], *oracle);
      save_json((fs::path(o.out) / policy_name(i)).string(), policy_to_json(*res.policy));
      Json m = continuous_metrics(*res.policy, cds, betas[i], o, cenv);
      m["policyFile"] = policy_name(i);
      runs.push_back(m);
    }
  }
  Json report{{"dataset", o.dataset}, {"oracle", o.oracle}, {"class", o.cls}, {"runs", runs}};
  save_json((fs::path(o.out) / "metrics.json").string(), report);
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_evaluate(const Options& o) {
  if (o.policy.empty()) throw std::invalid_argument("--policy is required");
  const double beta = o.beta.value_or(0.0);
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  const auto any = load_dataset(o.dataset);
  const auto env = optional_environment(o);
  const auto policy = policy_from_json(load_json(o.policy));
  Json m;
  if (const auto* ds = std::get_if<LoggedDataset>(&any)) {
    require_valid(*ds);
    const auto* mass = std::get_if<PolicyPtr>(&policy);
    if (!mass) throw std::invalid_argument("a discrete dataset needs a mass policy");
    const auto spec = discrete_class(o, *ds, false);
    m = discrete_metrics(**mass, *ds, beta, o, spec, env ? std::get_if<SyntheticEnvironment>(&*env) : nullptr);
  } else {
    const auto* smoothed = std::get_if<std::shared_ptr<const SmoothedDensityPolicy>>(&policy);
    if (!smoothed) throw std::invalid_argument("a continuous dataset needs a smoothed policy");
    m = continuous_metrics(**smoothed, std::get<ContinuousDataset>(any), beta, o,
                           env ? std::get_if<ContinuousEnvironment>(&*env) : nullptr);
  }
  emit(o, m.dump(2) + "\n", "evaluation.json");
  return kExitOk;
}

int cmd_sweep(const Options& o) {
  const auto betas = beta_values(o);
  const auto any = load_dataset(o.dataset);
  const auto env = optional_environment(o);
  std::ostringstream csv;
  csv << "index,beta,k,h,objective,ipw_risk,pseudo_loss,ucb,exact_risk\n";

  struct Row {
    double beta = 0.0;
    std::optional<double> k, h, ucb, exact;
    double objective = 0.0, ipw = 0.0, pl = 0.0;
  };
  std::vector<Row> rows;

  if (const auto* ds = std::get_if<LoggedDataset>(&any)) {
    require_valid(*ds);
    const auto spec = discrete_class(o, *ds, o.oracle == "enum");
    const auto oracle = make_oracle(o, spec);
    const auto* denv = env ? std::get_if<SyntheticEnvironment>(&*env) : nullptr;
    rows.resize(betas.size());
    parallel_for(betas.size(), [&](std::size_t i) {
      const auto res = train_ipw_pl(*ds, betas[i], *oracle);
      Row& r = rows[i];
      r.beta = betas[i];
      r.ipw = ipw_risk(*res.policy, *ds);
      r.pl = pseudo_loss(*res.policy, *ds);
      r.objective = res.objective;
      if (spec.stats && betas[i] > 0.0) r.ucb = ucb_risk(*res.policy, *ds, *spec.stats, o.alpha, betas[i]);
      if (denv) r.exact = exact_risk(*res.policy, *denv);
    });
  } else {
    const auto& cds = std::get<ContinuousDataset>(any);
    const auto* cenv = env ? std::get_if<ContinuousEnvironment>(&*env) : nullptr;
    const std::vector<double> hs = o.h_grid_m > 0 ? h_grid(o.h_grid_m) : std::vector<double>{o.h};
    rows.resize(hs.size() * betas.size());
    parallel_for(rows.size(), [&](std::size_t idx) {
      const double h = hs[idx / betas.size()];
      const double beta = betas[idx % betas.size()];
      const std::size_t k = grid_size_for(o, cds, h);
      const auto res = train_ipw_pl_continuous(cds, k, h, beta, *continuous_oracle(o, cds, k));
      Row& r = rows[idx];
      r.beta = beta;
      r.k = static_cast<double>(k);
      r.h = h;
      r.ipw = continuous_ipw_risk(*res.policy, cds);
      r.pl = continuous_pseudo_loss(*res.policy, cds);
      r.objective = res.objective;
      if (beta > 0.0) r.ucb = res.objective + psi_beta(continuous_stats(cds, k, h), cds.size(), o.alpha, beta).value;
      if (cenv) r.exact = exact_risk(*res.policy, *cenv);
    });
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv << i << ',' << csv_number(r.beta) << ',' << csv_number(r.k) << ',' << csv_number(r.h) << ','
        << csv_number(r.objective) << ',' << csv_number(r.ipw) << ',' << csv_number(r.pl) << ',' << csv_number(r.ucb)
        << ',' << csv_number(r.exact) << '\n';
  }
  emit(o, csv.str(), "sweep.csv");
  return kExitOk;
}

int cmd_verify(const Options& o) {
  const std::uint64_t seed = *o.seed;
  const auto any_env = resolve_environment(o, seed);
  const auto* env = std::get_if<SyntheticEnvironment>(&any_env);
  if (!env) throw std::invalid_argument("verify needs a discrete environment");
  SuiteConfig cfg;
  cfg.reps = o.reps;
  cfg.alpha = o.alpha;
  cfg.seed = seed;
  if (!o.dataset.empty()) cfg.dataset = load_discrete_dataset(o.dataset);

  const auto results = run_verification_suite(*env, cfg);
  bool all = true;
  Json checks = Json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    Json metrics = Json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    checks.push_back(Json{{"name", r.name},
                          {"passed", r.passed},
                          {"trials", r.trials},
                          {"failures", r.failures},
                          {"metrics", metrics},
                          {"detail", r.detail}});
    std::cerr << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
  }
  Json report{{"seed", seed}, {"rng", std::string(CounterRng::kName)}, {"reps", o.reps}, {"alpha", o.alpha},
              {"passed", all}, {"checks", checks}};
  emit(o, report.dump(2) + "\n", "verify.json");
  return all ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pessimistic offline policy optimization for contextual bandits"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> oracles{"enum", "argmin", "regression"};

  auto add_env_shape = [&](CLI::App* sub) {
    sub->add_option("--contexts", o.contexts, "contexts of a built-in environment")->check(CLI::PositiveNumber);
    sub->add_option("--actions", o.actions, "actions of a built-in environment")->check(CLI::Range(2, 64));
    sub->add_option("--epsilon", o.epsilon, "spurious propensity of the hard environment");
    sub->add_option("--pieces", o.pieces, "max pieces of continuous losses and densities")->check(CLI::PositiveNumber);
  };
  auto add_training = [&](CLI::App* sub) {
    sub->add_option("--dataset", o.dataset, "JSONL dataset")->required()->check(CLI::ExistingFile);
    sub->add_option("--class", o.cls, "deterministic, linear, or a JSON class file");
    sub->add_option("--oracle", o.oracle, "CSC oracle")->check(CLI::IsMember(oracles));
    sub->add_option("--beta", o.beta, "pessimism weight");
    sub->add_option("--beta-grid", o.beta_grid, "comma-separated beta values");
    sub->add_option("--alpha", o.alpha, "confidence level")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    sub->add_option("--k", o.k, "grid size for continuous actions")->check(CLI::PositiveNumber);
    sub->add_option("--bandwidth", o.h, "bandwidth for continuous actions")->check(CLI::Range(1e-9, 1.0));
    sub->add_option("--env", o.env, "environment file for exact risks");
    sub->add_option("--ridge", o.ridge, "ridge penalty of the regression oracle");
    sub->add_option("--out", o.out, "output path");
  };

  auto* gen = app.add_subcommand("generate", "simulate a logged dataset");
  gen->add_option("--env", o.env, "hard, random, rate, continuous, or an environment file");
  gen->add_option("--n", o.n, "number of records");
  gen->add_option("--seed", o.seed, "RNG seed")->required();
  gen->add_option("--out", o.out, "dataset path; the environment goes to <out>.env.json")->required();
  add_env_shape(gen);

  auto* train = app.add_subcommand("train", "minimize IPW + beta * PL with one oracle call per beta");
  add_training(train);

  auto* sweep = app.add_subcommand("sweep", "train over a beta (and bandwidth) grid, one CSV row per point");
  add_training(sweep);
  sweep->add_option("--h-grid-m", o.h_grid_m, "bandwidths 1/1 .. 1/m for continuous data");

  auto* eval = app.add_subcommand("evaluate", "recompute metrics of a saved policy");
  add_training(eval);
  eval->add_option("--policy", o.policy, "policy JSON")->required()->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "run the invariant and coverage suite");
  verify->add_option("--env", o.env, "built-in name or discrete environment file");
  verify->add_option("--reps", o.reps, "replications of coverage checks")->check(CLI::PositiveNumber);
  verify->add_option("--alpha", o.alpha, "confidence level")->check(CLI::Range(1e-12, 1.0 - 1e-12));
  verify->add_option("--seed", o.seed, "RNG seed")->required();
  verify->add_option("--dataset", o.dataset, "extra dataset to validate")->check(CLI::ExistingFile);
  verify->add_option("--out", o.out, "report path");
  add_env_shape(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*gen) return cmd_generate(o);
    if (*train) return cmd_train(o);
    if (*sweep) return cmd_sweep(o);
    if (*eval) return cmd_evaluate(o);
    if (*verify) return cmd_verify(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
