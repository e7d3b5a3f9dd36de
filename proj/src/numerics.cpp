#include "contmem/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace contmem::numerics {

namespace {

void check_grid_compatible(const Vector& values, const QuadratureGrid& grid,
                           const char* what) {
  if (values.size() != grid.points.size()) {
    throw std::invalid_argument(std::string(what) +
                                ": length does not match grid");
  }
}

// Sorted quantiles in (0, 1): midpoints for Stratified, seeded draws for
// Random.
Vector make_quantiles(int count, QuantileMode mode, std::uint64_t seed) {
  Vector q(count);
  if (mode == QuantileMode::Stratified) {
    for (int i = 0; i < count; ++i) {
      q(i) = (i + 0.5) / count;
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
      q(i) = unit(rng);
    }
    std::sort(q.data(), q.data() + q.size());
  }
  return q;
}

}  // namespace

QuadratureGrid uniform_grid(double a, double b, int count) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("uniform_grid: bounds must be finite");
  }
  if (!(a < b)) {
    throw std::invalid_argument("uniform_grid: requires a < b");
  }
  if (count < 2) {
    throw std::invalid_argument("uniform_grid: requires count >= 2");
  }
  const double h = (b - a) / (count - 1);
  QuadratureGrid grid;
  grid.points.resize(count);
  grid.weights.resize(count);
  for (int k = 0; k < count; ++k) {
    grid.points(k) = a + h * k;
  }
  grid.points(count - 1) = b;  // exact endpoint
  grid.weights.setConstant(h);
  grid.weights(0) = 0.5 * h;
  grid.weights(count - 1) = 0.5 * h;
  return grid;
}

double integrate(const Vector& values, const QuadratureGrid& grid) {
  check_grid_compatible(values, grid, "integrate");
  if (!all_finite(values)) {
    throw std::invalid_argument("integrate: values must be finite");
  }
  return grid.weights.dot(values);
}

Vector normalized_exp(const Vector& scores, const QuadratureGrid& grid) {
  check_grid_compatible(scores, grid, "normalized_exp");
  if (!all_finite(scores)) {
    throw std::invalid_argument("normalized_exp: scores must be finite");
  }
  const double shift = scores.maxCoeff();
  Vector density = (scores.array() - shift).exp().matrix();
  const double mass = grid.weights.dot(density);
  // mass >= w_argmax * 1 > 0, so the division is always safe
  density /= mass;
  return density;
}

Vector inverse_cdf_sample(const Vector& density, const QuadratureGrid& grid,
                          int count, QuantileMode mode, std::uint64_t seed) {
  check_grid_compatible(density, grid, "inverse_cdf_sample");
  if (count < 1) {
    throw std::invalid_argument("inverse_cdf_sample: requires count >= 1");
  }
  if (!all_finite(density) || density.minCoeff() < 0.0) {
    throw std::invalid_argument(
        "inverse_cdf_sample: density must be finite and nonnegative");
  }
  const int n = grid.size();
  // CDF knots by cumulative trapezoid; linear interpolation in between.
  Vector cdf(n);
  cdf(0) = 0.0;
  for (int k = 1; k < n; ++k) {
    const double seg = grid.points(k) - grid.points(k - 1);
    cdf(k) = cdf(k - 1) + 0.5 * seg * (density(k) + density(k - 1));
  }
  const double total = cdf(n - 1);
  if (total == 0.0) {
    throw DegenerateDensityError("inverse_cdf_sample: density integrates to 0");
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw std::invalid_argument(
        "inverse_cdf_sample: density must integrate to 1 (within 1e-6)");
  }

  const Vector quantiles = make_quantiles(count, mode, seed);
  Vector locations(count);
  int k = 0;
  for (int i = 0; i < count; ++i) {
    const double target = quantiles(i) * total;
    while (k < n - 2 && cdf(k + 1) < target) {
      ++k;
    }
    const double span = cdf(k + 1) - cdf(k);
    if (span <= 0.0) {
      locations(i) = grid.points(k);
    } else {
      const double frac = (target - cdf(k)) / span;
      locations(i) =
          grid.points(k) + frac * (grid.points(k + 1) - grid.points(k));
    }
  }
  return locations;
}

Vector sample_histogram(const Vector& histogram, int count, QuantileMode mode,
                        std::uint64_t seed) {
  const int bins = static_cast<int>(histogram.size());
  if (bins < 1) {
    throw std::invalid_argument("sample_histogram: requires >= 1 bin");
  }
  if (count < 1) {
    throw std::invalid_argument("sample_histogram: requires count >= 1");
  }
  if (!all_finite(histogram) || histogram.minCoeff() < 0.0) {
    throw std::invalid_argument(
        "sample_histogram: masses must be finite and nonnegative");
  }
  Vector cum(bins + 1);
  cum(0) = 0.0;
  for (int j = 0; j < bins; ++j) {
    cum(j + 1) = cum(j) + histogram(j);
  }
  const double total = cum(bins);
  if (total == 0.0) {
    throw DegenerateDensityError("sample_histogram: all bins are empty");
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw std::invalid_argument(
        "sample_histogram: histogram must sum to 1 (within 1e-6)");
  }

  const double width = 1.0 / bins;
  const Vector quantiles = make_quantiles(count, mode, seed);
  Vector locations(count);
  int j = 0;
  for (int i = 0; i < count; ++i) {
    const double target = quantiles(i) * total;
    while (j < bins - 1 && cum(j + 1) < target) {
      ++j;
    }
    const double mass = histogram(j);
    double t = j * width;
    if (mass > 0.0) {
      t += (target - cum(j)) / mass * width;
    }
    locations(i) = std::min(t, 1.0);
  }
  return locations;
}

double interval_mass(const Vector& values, const QuadratureGrid& grid,
                     double lo, double hi) {
  check_grid_compatible(values, grid, "interval_mass");
  lo = std::max(lo, grid.a());
  hi = std::min(hi, grid.b());
  if (!(lo < hi)) {
    return 0.0;
  }
  const int n = grid.size();
  double mass = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    const double t0 = grid.points(k);
    const double t1 = grid.points(k + 1);
    const double a = std::max(lo, t0);
    const double b = std::min(hi, t1);
    if (!(a < b)) {
      continue;
    }
    const double seg = t1 - t0;
    const double va = values(k) + (values(k + 1) - values(k)) * (a - t0) / seg;
    const double vb = values(k) + (values(k + 1) - values(k)) * (b - t0) / seg;
    mass += 0.5 * (b - a) * (va + vb);
  }
  return mass;
}

double interpolate(const Vector& values, const QuadratureGrid& grid, double t) {
  check_grid_compatible(values, grid, "interpolate");
  if (t <= grid.a()) {
    return values(0);
  }
  if (t >= grid.b()) {
    return values(values.size() - 1);
  }
  // grid points are sorted; binary search for the segment
  const double* begin = grid.points.data();
  const double* end = begin + grid.points.size();
  const int k = static_cast<int>(std::upper_bound(begin, end, t) - begin) - 1;
  const double t0 = grid.points(k);
  const double t1 = grid.points(k + 1);
  const double frac = (t - t0) / (t1 - t0);
  return values(k) + frac * (values(k + 1) - values(k));
}

}  // namespace contmem::numerics
