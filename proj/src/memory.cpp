#include "contmem/memory.hpp"

#include <algorithm>
#include <cmath>

namespace contmem::memory {

namespace {

void check_config(const MemoryConfig& config) {
  basis::validate(config.basis);
  if (!(config.tau > 0.0 && config.tau < 1.0)) {
    throw std::invalid_argument("memory: tau must lie in (0, 1)");
  }
  if (config.past_samples < 1) {
    throw std::invalid_argument("memory: past_samples must be >= 1");
  }
  if (config.histogram_bins < 1) {
    throw std::invalid_argument("memory: histogram_bins must be >= 1");
  }
  if (!(config.ridge > 0.0) || !std::isfinite(config.ridge)) {
    throw std::invalid_argument("memory: lambda must be finite and > 0");
  }
}

// per-step seed so random-quantile runs stay reproducible chunk by chunk
std::uint64_t step_seed(const MemoryState& state) {
  return state.config.seed ^
         (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(state.chunks_seen + 1));
}

Vector stratified_uniform(int count) {
  Vector u(count);
  for (int i = 0; i < count; ++i) {
    u(i) = (i + 0.5) / count;
  }
  return u;
}

}  // namespace

MemoryState init(const MemoryConfig& config) {
  check_config(config);
  MemoryState state;
  state.config = config;
  state.chunks_seen = 0;
  return state;
}

PastSample sample_past(const MemoryState& state) {
  if (state.empty() || !state.signal) {
    throw EmptyMemoryError("sample_past: memory is empty");
  }
  const MemoryConfig& cfg = state.config;
  const int t = cfg.past_samples;

  Vector sources;
  const bool sticky = cfg.sampling == SamplingMode::Sticky && state.has_histogram();
  if (sticky) {
    sources = numerics::sample_histogram(state.histogram, t, cfg.quantiles,
                                         step_seed(state));
  } else if (cfg.quantiles == numerics::QuantileMode::Stratified) {
    sources = stratified_uniform(t);
  } else {
    Vector uniform_density = Vector::Ones(1);
    sources = numerics::sample_histogram(uniform_density, t, cfg.quantiles,
                                         step_seed(state));
  }

  PastSample past;
  past.sources = sources;
  past.targets = cfg.tau * sources;
  past.values.resize(t, state.signal->dim());
  for (int i = 0; i < t; ++i) {
    past.values.row(i) = signal::evaluate(*state.signal, sources(i)).transpose();
  }
  return past;
}

MemoryState consolidate(const MemoryState& state, const Matrix& new_frames) {
  check_config(state.config);
  const long m = new_frames.rows();
  if (m < 1) {
    throw std::invalid_argument("consolidate: new chunk has no frames");
  }
  if (!all_finite(new_frames)) {
    throw std::invalid_argument("consolidate: embeddings must be finite");
  }
  const MemoryConfig& cfg = state.config;
  const Vector times_new = signal::frame_times(static_cast<int>(m));

  MemoryState next;
  next.config = cfg;
  if (state.empty()) {
    next.signal = signal::fit(new_frames, times_new, cfg.basis, cfg.ridge);
    next.chunks_seen = 1;
    return next;
  }

  if (new_frames.cols() != state.signal->dim()) {
    throw std::invalid_argument("consolidate: embedding dim mismatch");
  }
  const PastSample past = sample_past(state);
  const long t = past.values.rows();
  Matrix stacked(t + m, new_frames.cols());
  stacked.topRows(t) = past.values;
  stacked.bottomRows(m) = new_frames;
  Vector times(t + m);
  times.head(t) = past.targets;
  times.tail(m) = (cfg.tau + (1.0 - cfg.tau) * times_new.array()).matrix();

  next.signal = signal::fit(stacked, times, cfg.basis, cfg.ridge);
  next.chunks_seen = state.chunks_seen + 1;
  // histogram is pending until the next attention pass records one
  return next;
}

MemoryState record_density(const MemoryState& state,
                           const attention::DensityProfile& profile, int bins) {
  if (bins < 1) {
    throw std::invalid_argument("record_density: bins must be >= 1");
  }
  Vector histogram = Vector::Zero(bins);
  for (const Matrix& head : profile.densities) {
    for (int i = 0; i < head.rows(); ++i) {
      const Vector slice = head.row(i).transpose();
      for (int j = 0; j < bins; ++j) {
        histogram(j) += numerics::interval_mass(
            slice, profile.grid, static_cast<double>(j) / bins,
            static_cast<double>(j + 1) / bins);
      }
    }
  }
  const double total = histogram.sum();
  if (total <= 0.0) {
    throw DegenerateDensityError("record_density: profile carries no mass");
  }
  MemoryState next = state;
  next.histogram = histogram / total;
  return next;
}

Vector aggregate_density(const attention::DensityProfile& profile) {
  if (profile.densities.empty()) {
    throw std::invalid_argument("aggregate_density: empty profile");
  }
  Vector sum = Vector::Zero(profile.grid_size());
  long slices = 0;
  for (const Matrix& head : profile.densities) {
    sum += head.colwise().sum().transpose();
    slices += head.rows();
  }
  return sum / static_cast<double>(slices);
}

std::vector<std::pair<int, double>> top_density_intervals(
    const attention::DensityProfile& profile, int count, int frame_count) {
  if (frame_count < 1) {
    throw std::invalid_argument("top_density_intervals: frame_count must be >= 1");
  }
  if (count < 1 || count > frame_count) {
    throw std::invalid_argument(
        "top_density_intervals: count must lie in [1, frame_count]");
  }
  const Vector aggregated = aggregate_density(profile);
  std::vector<std::pair<int, double>> ranked(frame_count);
  for (int m = 0; m < frame_count; ++m) {
    const double t = (m + 0.5) / frame_count;
    ranked[m] = {m, numerics::interpolate(aggregated, profile.grid, t)};
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  ranked.resize(count);
  return ranked;
}

}  // namespace contmem::memory
