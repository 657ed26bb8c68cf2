#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "opo/bounds.hpp"
#include "opo/continuous.hpp"
#include "opo/csc.hpp"
#include "opo/estimators.hpp"
#include "opo/io.hpp"
#include "opo/simulator.hpp"
#include "opo/verify.hpp"

namespace py = pybind11;
using namespace opo;

namespace {

// Datasets cross the boundary as JSONL text so Python sees the file format.
LoggedDataset dataset_from_text(const std::string& text) {
  std::istringstream in(text);
  auto any = read_dataset(in);
  if (auto* ds = std::get_if<LoggedDataset>(&any)) return std::move(*ds);
  throw std::invalid_argument("expected a discrete-action dataset");
}

std::string dataset_to_text(const LoggedDataset& ds) {
  std::ostringstream out;
  write_dataset(out, ds);
  return out.str();
}

py::dict report_dict(const BoundReport& r) {
  py::dict terms, derived;
  for (const auto& [k, v] : r.terms) terms[py::str(k)] = v;
  for (const auto& [k, v] : r.derived) derived[py::str(k)] = v;
  py::dict d;
  d["name"] = r.name;
  d["value"] = r.value;
  d["confidence"] = r.confidence;
  d["terms"] = terms;
  d["derived"] = derived;
  return d;
}

py::dict stats_dict(const ClassStats& s) {
  py::dict d;
  d["delta_sup_pi"] = s.delta_sup_pi;
  d["delta_inf_mu"] = s.delta_inf_mu;
  d["delta_sup_pi_mu"] = s.delta_sup_pi_mu;
  d["delta_pi_mu"] = s.delta_pi_mu;
  d["class_size"] = s.class_size;
  return d;
}

ClassStats stats_from(double delta_sup_pi, double delta_inf_mu, double delta_sup_pi_mu, double class_size) {
  return make_class_stats(delta_sup_pi, delta_inf_mu, delta_sup_pi_mu, class_size);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pessimistic offline policy optimization with the IPW + pseudo-loss objective";

  py::enum_<LossNoise>(m, "LossNoise").value("NONE", LossNoise::kNone).value("BERNOULLI", LossNoise::kBernoulli);

  py::class_<LoggedDataset>(m, "LoggedDataset")
      .def_static("from_jsonl", &dataset_from_text, py::arg("text"))
      .def_static(
          "from_records",
          [](std::size_t num_actions, const std::vector<std::tuple<std::size_t, std::size_t, double, std::vector<double>>>& rows) {
            LoggedDataset ds{num_actions, {}};
            for (const auto& [x, a, l, p] : rows) ds.records.push_back({Context::from_id(x), a, l, p});
            return ds;
          },
          py::arg("num_actions"), py::arg("records"), "records: (context_id, action, loss, propensities)")
      .def("to_jsonl", &dataset_to_text)
      .def_property_readonly("num_actions", [](const LoggedDataset& ds) { return ds.num_actions; })
      .def("__len__", &LoggedDataset::size)
      .def("validate", [](const LoggedDataset& ds) {
        std::vector<std::string> out;
        for (const auto& v : validate_dataset(ds)) out.push_back(v.message);
        return out;
      });

  py::class_<MassPolicy, std::shared_ptr<MassPolicy>>(m, "MassPolicy")
      .def_property_readonly("num_actions", &MassPolicy::num_actions)
      .def("pmf", [](const MassPolicy& pi, std::size_t x) { return pi.pmf(Context::from_id(x)); }, py::arg("context"))
      .def("to_json", [](const MassPolicy& pi) { return policy_to_json(pi).dump(); });
  py::class_<UniformPolicy, MassPolicy, std::shared_ptr<UniformPolicy>>(m, "UniformPolicy")
      .def(py::init<std::size_t>(), py::arg("num_actions"));
  py::class_<TablePolicy, MassPolicy, std::shared_ptr<TablePolicy>>(m, "TablePolicy")
      .def(py::init<std::vector<std::vector<double>>>(), py::arg("table"))
      .def_property_readonly("table", &TablePolicy::table);
  py::class_<DeterministicPolicy, MassPolicy, std::shared_ptr<DeterministicPolicy>>(m, "DeterministicPolicy")
      .def(py::init<std::vector<std::size_t>, std::size_t>(), py::arg("assignment"), py::arg("num_actions"))
      .def_property_readonly("assignment", &DeterministicPolicy::assignment);

  py::class_<SyntheticEnvironment>(m, "SyntheticEnvironment")
      .def(py::init([](std::vector<double> probs, std::vector<std::vector<double>> losses,
                       std::vector<std::vector<double>> logging, LossNoise noise) {
             return SyntheticEnvironment(std::move(probs), std::move(losses), TablePolicy(std::move(logging)), noise);
           }),
           py::arg("context_probs"), py::arg("loss_means"), py::arg("logging"), py::arg("noise") = LossNoise::kBernoulli)
      .def_property_readonly("num_contexts", &SyntheticEnvironment::num_contexts)
      .def_property_readonly("num_actions", &SyntheticEnvironment::num_actions)
      .def_property_readonly("context_probs", &SyntheticEnvironment::context_probs)
      .def_property_readonly("loss_means", &SyntheticEnvironment::loss_means)
      .def_property_readonly("logging", [](const SyntheticEnvironment& e) { return e.logging().table(); });

  m.def("hard_instance", &hard_instance, py::arg("num_contexts"), py::arg("num_actions"), py::arg("epsilon"),
        py::arg("seed"));
  m.def("random_environment", &random_environment, py::arg("num_contexts"), py::arg("num_actions"), py::arg("seed"),
        py::arg("noise") = LossNoise::kBernoulli, py::arg("min_propensity") = 0.05);
  m.def("generate_logs", py::overload_cast<const SyntheticEnvironment&, std::size_t, std::uint64_t>(&generate_logs),
        py::arg("env"), py::arg("n"), py::arg("seed"));

  m.def("ipw_risk", &ipw_risk, py::arg("policy"), py::arg("dataset"));
  m.def("pseudo_loss", &pseudo_loss, py::arg("policy"), py::arg("dataset"));
  m.def("penalized_objective", &penalized_objective, py::arg("policy"), py::arg("dataset"), py::arg("beta"));
  m.def("exact_risk", py::overload_cast<const MassPolicy&, const SyntheticEnvironment&>(&exact_risk),
        py::arg("policy"), py::arg("env"));
  m.def("exact_pl", py::overload_cast<const MassPolicy&, const SyntheticEnvironment&>(&exact_pl), py::arg("policy"),
        py::arg("env"));
  m.def("min_deterministic_risk", &min_deterministic_risk, py::arg("env"));

  m.def(
      "train",
      [](const LoggedDataset& ds, double beta, const std::string& oracle) {
        require_valid(ds);
        TrainResult res;
        if (oracle == "argmin") {
          res = train_ipw_pl(ds, beta, PointwiseArgminOracle(ds.num_context_ids()));
        } else if (oracle == "enum") {
          res = train_ipw_pl(ds, beta,
                             EnumerationOracle(PolicyClass::all_deterministic(ds.num_context_ids(), ds.num_actions)));
        } else {
          throw std::invalid_argument("oracle must be 'argmin' or 'enum'");
        }
        return py::make_tuple(std::const_pointer_cast<MassPolicy>(res.policy), res.objective);
      },
      py::arg("dataset"), py::arg("beta"), py::arg("oracle") = "argmin",
      "Minimize ipw_risk + beta * pseudo_loss over deterministic policies; returns (policy, objective).");

  m.def("class_stats",
        [](const LoggedDataset& ds) {
          return stats_dict(class_stats(PolicyClass::all_deterministic(ds.num_context_ids(), ds.num_actions), ds));
        },
        py::arg("dataset"), "Empirical statistics of the full deterministic class.");
  m.def("bennett_bound", &bennett_bound, py::arg("variance"), py::arg("n"), py::arg("alpha"), py::arg("range") = 1.0);
  m.def(
      "pl_concentration_band",
      [](double pl_hat, std::size_t n, double alpha, double dinf) {
        const auto b = pl_concentration_band(pl_hat, n, alpha, dinf);
        return py::make_tuple(b.lo, b.hi);
      },
      py::arg("pl_hat"), py::arg("n"), py::arg("alpha"), py::arg("delta_inf_mu"));
  m.def(
      "confidence_width",
      [](double pl_hat, double dsup, double dinf, double dsup_ratio, std::size_t n, double alpha) {
        return report_dict(confidence_width(pl_hat, stats_from(dsup, dinf, dsup_ratio, 1.0), n, alpha));
      },
      py::arg("pl_hat"), py::arg("delta_sup_pi"), py::arg("delta_inf_mu"), py::arg("delta_sup_pi_mu"), py::arg("n"),
      py::arg("alpha"));
  m.def(
      "psi_beta",
      [](double dsup, double dinf, double dsup_ratio, double size, std::size_t n, double alpha, double beta) {
        return report_dict(psi_beta(stats_from(dsup, dinf, dsup_ratio, size), n, alpha, beta));
      },
      py::arg("delta_sup_pi"), py::arg("delta_inf_mu"), py::arg("delta_sup_pi_mu"), py::arg("class_size"), py::arg("n"),
      py::arg("alpha"), py::arg("beta"));
  m.def(
      "oracle_inequality_bound",
      [](double dsup, double dinf, double dsup_ratio, double size, std::size_t n, double alpha, double beta,
         double pl_hat) {
        return oracle_inequality_bound(stats_from(dsup, dinf, dsup_ratio, size), n, alpha, beta, pl_hat);
      },
      py::arg("delta_sup_pi"), py::arg("delta_inf_mu"), py::arg("delta_sup_pi_mu"), py::arg("class_size"), py::arg("n"),
      py::arg("alpha"), py::arg("beta"), py::arg("pl_hat"));
  m.def(
      "beta_star_bound",
      [](double dsup, double dinf, double dsup_ratio, double size, std::size_t n, double alpha, double pl) {
        return beta_star_bound(stats_from(dsup, dinf, dsup_ratio, size), n, alpha, pl);
      },
      py::arg("delta_sup_pi"), py::arg("delta_inf_mu"), py::arg("delta_sup_pi_mu"), py::arg("class_size"), py::arg("n"),
      py::arg("alpha"), py::arg("exact_pl"));
  m.def(
      "ucb_risk",
      [](const MassPolicy& pi, const LoggedDataset& ds, double alpha, double beta) {
        const auto stats = class_stats(PolicyClass::all_deterministic(ds.num_context_ids(), ds.num_actions), ds);
        return report_dict(ucb_report(pi, ds, stats, alpha, beta));
      },
      py::arg("policy"), py::arg("dataset"), py::arg("alpha"), py::arg("beta"),
      "Itemized upper confidence bound, with statistics of the full deterministic class.");

  m.def("effective_bandwidth", &effective_bandwidth, py::arg("a_tilde"), py::arg("h"));
  m.def("corollary_bound_beta_star", &corollary_bound_beta_star, py::arg("n"), py::arg("alpha"), py::arg("h"),
        py::arg("delta_inf_mu"), py::arg("class_size"), py::arg("exact_pl"));
  m.def("corollary_bound_fixed_beta", &corollary_bound_fixed_beta, py::arg("n"), py::arg("alpha"), py::arg("h"),
        py::arg("delta_inf_mu"), py::arg("class_size"), py::arg("beta"), py::arg("pl_hat"));
  m.def("suggest_k", &suggest_k, py::arg("n"), py::arg("delta_inf_mu"), py::arg("h"), py::arg("alpha"));
  m.def("h_grid", &h_grid, py::arg("m"));

  m.def(
      "verify",
      [](const SyntheticEnvironment& env, std::size_t reps, double alpha, std::uint64_t seed) {
        SuiteConfig cfg;
        cfg.reps = reps;
        cfg.alpha = alpha;
        cfg.seed = seed;
        std::vector<CheckResult> results;
        {
          py::gil_scoped_release release;
          results = run_verification_suite(env, cfg);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict metrics;
          for (const auto& [k, v] : r.metrics) metrics[py::str(k)] = v;
          py::dict d;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["trials"] = r.trials;
          d["failures"] = r.failures;
          d["metrics"] = metrics;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("env"), py::arg("reps") = 1000, py::arg("alpha") = 0.05, py::arg("seed") = 0);
}
