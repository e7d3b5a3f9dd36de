#pragma once

#include "contmem/common.hpp"

#include <cstdint>

namespace contmem::numerics {

/// Trapezoidal quadrature grid: strictly increasing points spanning [a, b]
/// with positive weights that sum to b - a.
struct QuadratureGrid {
  Vector points;
  Vector weights;

  int size() const { return static_cast<int>(points.size()); }
  double a() const { return points(0); }
  double b() const { return points(points.size() - 1); }
};

/// Evenly spaced grid on [a, b]: endpoint weights h/2, interior weights h,
/// with h = (b - a) / (count - 1).
QuadratureGrid uniform_grid(double a, double b, int count);

/// Trapezoidal integral of sampled values: sum_k w_k * v_k.
double integrate(const Vector& values, const QuadratureGrid& grid);

/// Gibbs density from raw scores: exp(s - max s) normalized so the result
/// integrates to 1 on the grid. The max shift keeps exp() in range for any
/// finite scores.
Vector normalized_exp(const Vector& scores, const QuadratureGrid& grid);

enum class QuantileMode { Stratified, Random };

/// Draws `count` sorted locations from a sampled density by inverting its
/// piecewise-linear trapezoidal CDF. Stratified mode solves
/// CDF(t) = (i - 1/2)/count and is fully deterministic; Random mode draws
/// the quantiles from a seeded uniform generator instead.
Vector inverse_cdf_sample(const Vector& density, const QuadratureGrid& grid,
                          int count, QuantileMode mode, std::uint64_t seed = 0);

/// Same inversion for a normalized histogram read as a piecewise-constant
/// density over equal-width bins of [0, 1].
Vector sample_histogram(const Vector& histogram, int count, QuantileMode mode,
                        std::uint64_t seed = 0);

/// Exact integral of the piecewise-linear interpolant of `values` over
/// [lo, hi] (clamped to the grid span).
double interval_mass(const Vector& values, const QuadratureGrid& grid,
                     double lo, double hi);

/// Linear interpolation of sampled values at t (clamped to the grid span).
double interpolate(const Vector& values, const QuadratureGrid& grid, double t);

}  // namespace contmem::numerics
