#pragma once

#include "contmem/attention.hpp"
#include "contmem/basis.hpp"
#include "contmem/common.hpp"
#include "contmem/numerics.hpp"
#include "contmem/signal.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace contmem::memory {

enum class SamplingMode { Uniform, Sticky };

struct MemoryConfig {
  basis::BasisFamily basis;
  double ridge = 1e-3;
  double tau = 0.75;
  int past_samples = 1;  // T locations re-sampled from the old signal
  SamplingMode sampling = SamplingMode::Sticky;
  int histogram_bins = 64;  // D
  numerics::QuantileMode quantiles = numerics::QuantileMode::Stratified;
  std::uint64_t seed = 0;
};

/// Consolidation state: the running continuous signal plus the attention
/// histogram that drives sticky sampling. Treated as an immutable value;
/// consolidate and record_density return updated copies.
struct MemoryState {
  MemoryConfig config;
  std::optional<signal::ContinuousSignal> signal;
  Vector histogram;  // D bins summing to 1; empty until recorded
  int chunks_seen = 0;

  bool empty() const { return chunks_seen == 0; }
  bool has_histogram() const { return histogram.size() > 0; }
};

MemoryState init(const MemoryConfig& config);

struct PastSample {
  Matrix values;   // T x e, the old signal evaluated at the source points
  Vector targets;  // T positions in [0, tau], sorted
  Vector sources;  // T positions in [0, 1] on the old time axis, sorted
};

/// Samples T locations on the current memory — stratified-uniform, or by
/// inverting the recorded attention histogram in sticky mode — and maps
/// them into [0, tau] of the next time axis.
PastSample sample_past(const MemoryState& state);

/// One consolidation step: contract the past into [0, tau], place the new
/// frames in (tau, 1], refit. The first chunk is fit alone over [0, 1].
MemoryState consolidate(const MemoryState& state, const Matrix& new_frames);

/// Replaces the histogram with the per-bin mass of the profile summed over
/// heads and queries, normalized to 1.
MemoryState record_density(const MemoryState& state,
                           const attention::DensityProfile& profile, int bins);

/// The `count` frames with the highest head/query-aggregated density,
/// descending, ties broken toward the lower frame index. Frames map to
/// grid positions at their midpoints (m + 1/2)/frame_count.
std::vector<std::pair<int, double>> top_density_intervals(
    const attention::DensityProfile& profile, int count, int frame_count);

/// Head/query mean of the profile densities; integrates to 1 on the grid.
Vector aggregate_density(const attention::DensityProfile& profile);

}  // namespace contmem::memory
