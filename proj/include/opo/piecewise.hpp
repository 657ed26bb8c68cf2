#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace opo {

// Piecewise-constant function on [0, 1]. breaks = {0 = b_0 < b_1 < ... < b_m = 1},
// values[j] holds on [b_j, b_{j+1}). Every integral used by the continuous
// reduction is closed-form over this representation.
class PiecewiseConstant {
 public:
  PiecewiseConstant() = default;
  PiecewiseConstant(std::vector<double> breaks, std::vector<double> values);

  static PiecewiseConstant constant(double value) { return PiecewiseConstant({0.0, 1.0}, {value}); }

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }

  // Value at a; at an interior break the right-hand piece wins, at 1 the last piece.
  double operator()(double a) const;
  std::size_t piece_index(double a) const;

  double integral(double lo, double hi) const;
  double integral() const { return integral(0.0, 1.0); }
  // int_lo^hi 1/f(a) da; throws if a piece with value below the floor overlaps
  // [lo, hi] with positive length.
  double reciprocal_integral(double lo, double hi) const;

  double min_value() const;
  double max_value() const;

  // Positive everywhere (>= floor) and integrating to 1.
  bool is_density(double floor, double tol) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

// Common refinement of several break vectors (sorted, deduplicated).
std::vector<double> merge_breaks(std::span<const PiecewiseConstant* const> fns);

// int_0^1 f(a) g(a) da
double integrate_product(const PiecewiseConstant& f, const PiecewiseConstant& g);
// int_0^1 f(a) / g(a) da; throws where g vanishes under positive f.
double integrate_ratio(const PiecewiseConstant& f, const PiecewiseConstant& g);

}  // namespace opo
