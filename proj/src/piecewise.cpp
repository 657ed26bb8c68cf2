#include "opo/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "opo/model.hpp"

namespace opo {

PiecewiseConstant::PiecewiseConstant(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (values_.empty() || breaks_.size() != values_.size() + 1) {
    throw std::invalid_argument("piecewise function needs pieces + 1 breaks");
  }
  if (breaks_.front() != 0.0 || breaks_.back() != 1.0) {
    throw std::invalid_argument("piecewise breaks must start at 0 and end at 1");
  }
  for (std::size_t j = 0; j + 1 < breaks_.size(); ++j) {
    if (!(breaks_[j] < breaks_[j + 1])) throw std::invalid_argument("piecewise breaks must be strictly increasing");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("piecewise values must be finite");
  }
}

std::size_t PiecewiseConstant::piece_index(double a) const {
  if (a <= 0.0) return 0;
  if (a >= 1.0) return values_.size() - 1;
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), a);
  return static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

double PiecewiseConstant::operator()(double a) const { return values_[piece_index(a)]; }

double PiecewiseConstant::integral(double lo, double hi) const {
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const double len = std::min(hi, breaks_[j + 1]) - std::max(lo, breaks_[j]);
    if (len > 0.0) acc += len * values_[j];
  }
  return acc;
}

double PiecewiseConstant::reciprocal_integral(double lo, double hi) const {
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const double len = std::min(hi, breaks_[j + 1]) - std::max(lo, breaks_[j]);
    if (len <= 0.0) continue;
    if (!(values_[j] >= kPropensityFloor)) throw std::invalid_argument("zero density inside integration window");
    acc += len / values_[j];
  }
  return acc;
}

double PiecewiseConstant::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double PiecewiseConstant::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

bool PiecewiseConstant::is_density(double floor, double tol) const {
  return !values_.empty() && min_value() >= floor && std::abs(integral() - 1.0) <= tol;
}

std::vector<double> merge_breaks(std::span<const PiecewiseConstant* const> fns) {
  std::vector<double> out;
  for (const auto* f : fns) out.insert(out.end(), f->breaks().begin(), f->breaks().end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

template <class Integrand>
double integrate_merged(const PiecewiseConstant& f, const PiecewiseConstant& g, Integrand&& piece) {
  const PiecewiseConstant* fns[] = {&f, &g};
  const auto breaks = merge_breaks(fns);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double mid = 0.5 * (breaks[j] + breaks[j + 1]);
    acc += piece(f(mid), g(mid)) * (breaks[j + 1] - breaks[j]);
  }
  return acc;
}

}  // namespace

double integrate_product(const PiecewiseConstant& f, const PiecewiseConstant& g) {
  return integrate_merged(f, g, [](double fv, double gv) { return fv * gv; });
}

double integrate_ratio(const PiecewiseConstant& f, const PiecewiseConstant& g) {
  return integrate_merged(f, g, [](double fv, double gv) {
    if (fv == 0.0) return 0.0;
    if (!(gv >= kPropensityFloor)) throw std::invalid_argument("ratio integral: denominator vanishes");
    return fv / gv;
  });
}

}  // namespace opo
