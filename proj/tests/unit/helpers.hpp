#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "opo/model.hpp"
#include "opo/rng.hpp"

namespace opo::test {

inline LoggedRecord record(std::size_t ctx, std::size_t action, double loss, std::vector<double> props) {
  return {Context::from_id(ctx), action, loss, std::move(props)};
}

inline LoggedDataset dataset(std::size_t num_actions, std::vector<LoggedRecord> records) {
  return {num_actions, std::move(records)};
}

// Random pmf with every entry at least floor.
inline std::vector<double> random_pmf(CounterRng& rng, std::size_t n, double floor = 0.05) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& v : w) total += (v = rng.uniform() + 1e-3);
  const double free_mass = 1.0 - floor * static_cast<double>(n);
  for (auto& v : w) v = floor + free_mass * v / total;
  return w;
}

// Random dataset over context ids [0, nx) with random logging pmfs per context.
inline LoggedDataset random_dataset(CounterRng& rng, std::size_t nx, std::size_t na, std::size_t n) {
  std::vector<std::vector<double>> mu(nx);
  for (auto& row : mu) row = random_pmf(rng, na);
  LoggedDataset ds{na, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t x = rng.uniform_int(0, nx - 1);
    const std::size_t a = rng.categorical(mu[x]);
    ds.records.push_back(record(x, a, rng.uniform(), mu[x]));
  }
  return ds;
}

// Plain table policy with random rows.
inline std::shared_ptr<TablePolicy> random_table(CounterRng& rng, std::size_t nx, std::size_t na) {
  std::vector<std::vector<double>> t(nx);
  for (auto& row : t) row = random_pmf(rng, na, 0.0);
  return std::make_shared<TablePolicy>(std::move(t));
}

}  // namespace opo::test
