// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is the number of failed criteria (0 when all pass).

#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "opo/model.hpp"
#include "opo/rng.hpp"
#include "opo/simulator.hpp"
#include "opo/verify.hpp"

using namespace opo;

namespace {

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // <= 0: no limit
  std::function<CheckResult()> run;
};

SyntheticEnvironment acceptance_env() { return random_environment(4, 3, 20240611, LossNoise::kBernoulli, 0.1); }

std::vector<PolicyPtr> random_policies(std::size_t count, std::uint64_t seed) {
  const auto env = acceptance_env();
  std::vector<PolicyPtr> out;
  for (std::size_t j = 0; j < count; ++j) {
    out.push_back(std::make_shared<TablePolicy>(
        random_table_policy(env.num_contexts(), env.num_actions(), CounterRng::derive(seed, j))));
  }
  return out;
}

std::string summarize(const CheckResult& r) {
  std::string s;
  for (const auto& [k, v] : r.metrics) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s%s=%.6g", s.empty() ? "" : ", ", k.c_str(), v);
    s += buf;
  }
  return s;
}

}  // namespace

int main() {
  const auto env = acceptance_env();
  std::vector<Criterion> criteria{
      {1, "discrete reduction equivalence", 10.0, [] { return check_discrete_reduction({}); }},
      {2, "continuous reduction equivalence", 10.0, [] { return check_continuous_reduction({}); }},
      {3, "variance domination", 0.0, [] { return check_variance_domination({}); }},
      {4, "PL concentration coverage", 60.0,
       [&] {
         CoverageParams p;
         p.n = 1000;
         p.alpha = 0.1;
         p.reps = 1000;
         p.min_coverage = 0.9;
         auto pols = random_policies(3, 41);
         pols.push_back(std::make_shared<UniformPolicy>(env.num_actions()));
         return check_pl_band_coverage(env, pols, p);
       }},
      {5, "simultaneous UCB validity", 120.0,
       [&] {
         CoverageParams p;
         p.n = 500;
         p.alpha = 0.05;
         p.reps = 1000;
         p.min_coverage = 0.95;
         auto members = random_policies(4, 51);
         CounterRng rng(52);
         while (members.size() < 8) {
           std::vector<std::size_t> assign(env.num_contexts());
           for (auto& a : assign) a = rng.uniform_int(0, env.num_actions() - 1);
           members.push_back(std::make_shared<DeterministicPolicy>(std::move(assign), env.num_actions()));
         }
         return check_ucb_coverage(env, PolicyClass::enumerated(std::move(members)), p);
       }},
      {6, "oracle-inequality sanity", 0.0,
       [&] {
         OracleInequalityParams p;
         p.n = 500;
         p.alpha = 0.05;
         p.reps = 200;
         p.max_violation_rate = 0.05;
         return check_oracle_inequality(env, p);
       }},
      {7, "smoothing bounds", 0.0, [] { return check_smoothing_bounds({}); }},
      {8, "pessimism payoff", 0.0, [] { return check_pessimism_payoff({}); }},
      {9, "rate check", 0.0, [] { return check_rate(rate_environment(), {}); }},
      {10, "unbiasedness", 0.0,
       [&] {
         UnbiasednessParams p;
         p.n = 20;
         p.reps = 10000;
         return check_unbiasedness(env, random_policies(10, 101), p);
       }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.name = c.title;
      r.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.time_limit_s <= 0.0 || secs < c.time_limit_s;
    const bool ok = r.passed && in_time;
    failed += ok ? 0 : 1;
    std::printf("[%s] criterion %d: %s (%.2fs%s) | %s | %s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                in_time ? "" : ", over time limit", summarize(r).c_str(), r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
