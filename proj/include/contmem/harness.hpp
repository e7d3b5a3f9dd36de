#pragma once

#include "contmem/attention.hpp"
#include "contmem/memory.hpp"
#include "contmem/pipeline.hpp"
#include "contmem/signal.hpp"

#include <cstdint>
#include <vector>

namespace contmem::harness {

/// A planted direction spanning a few frames of one chunk.
struct NeedleSpec {
  int chunk_index = 0;
  int frame_begin = 0;
  int frame_count = 1;
  Vector direction;  // unit norm
  double amplitude = 0.0;
};

struct SyntheticStreamSpec {
  int chunks = 8;  // C
  int frames_per_chunk = 32;
  int patches = 1;
  int dim = 16;
  double noise_sigma = 1.0;
  NeedleSpec needle;
  std::uint64_t seed = 1234;
};

void validate(const SyntheticStreamSpec& spec);

/// Seeded unit-norm direction, handy for building specs.
Vector random_direction(int dim, std::uint64_t seed);

struct SyntheticStream {
  std::vector<signal::FrameChunk> chunks;
  NeedleSpec truth;
};

/// Gaussian-noise embeddings with amplitude * direction added to every
/// patch of the needle frames. Deterministic per seed.
SyntheticStream generate_stream(const SyntheticStreamSpec& spec);

/// Exact discrete softmax attention over all frames at once, written as
/// plain per-element loops so it stays independent of the library path it
/// cross-checks.
Matrix full_attention_oracle(const Matrix& all_frames,
                             const attention::QuerySet& queries,
                             const attention::ProjectionSet& proj);

/// The geometry of repeated consolidation: content placed at step c is
/// contracted by tau once per later step.
struct ContractionSchedule {
  int chunks = 1;
  int frames_per_chunk = 1;
  double tau = 0.75;
  int basis_size = 1;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Final-memory image of a frame span of one chunk under the nested
/// contraction map.
Interval map_span_to_final(const ContractionSchedule& schedule,
                           int chunk_index, int frame_begin, int frame_count);

/// Final-memory position of a single frame's midpoint.
double final_frame_position(const ContractionSchedule& schedule,
                            int chunk_index, int frame);

struct RetrievalReport {
  double needle_mass = 0.0;
  double needle_length = 0.0;
  double needle_per_unit = 0.0;
  double background_per_unit = 0.0;
  double mass_ratio = 0.0;
  double topk_hit_rate = 0.0;
  bool below_resolution = false;
};

/// Integrates the head/query-aggregated density over the mapped needle
/// interval and its complement; ranks all stream frames by density for the
/// top-k hit rate (k = needle frame count).
RetrievalReport evaluate_retrieval(const attention::DensityProfile& profile,
                                   const NeedleSpec& truth,
                                   const ContractionSchedule& schedule);

/// A full needle benchmark: one stream, three pipeline variants.
struct ScenarioConfig {
  SyntheticStreamSpec stream;
  pipeline::PipelineConfig pipeline;
  double query_gain = 4.0;  // scale of the needle-aligned query seed
  int control_queries = 1;  // extra random-direction query seeds
};

/// The standard scenario: 8 chunks of 32 frames, dim 16, amplitude 4.
ScenarioConfig default_scenario();

struct VariantResult {
  RetrievalReport report;
  Matrix tokens;
  memory::MemoryState final_state;
  std::shared_ptr<const attention::DensityProfile> final_profile;
};

struct ScenarioReport {
  VariantResult no_ltm;   // alpha = 1, uniform sampling
  VariantResult uniform;  // configured alpha, uniform sampling
  VariantResult sticky;   // configured alpha, sticky sampling
};

/// Builds the query set for a scenario: the needle direction at
/// query_gain, plus seeded random-direction controls.
attention::QuerySet scenario_queries(const ScenarioConfig& config);

ScenarioReport run_scenario(const ScenarioConfig& config);

/// Re-derives the retrieval report for a finished variant on an arbitrary
/// grid; the oracle route for pinning thresholds.
RetrievalReport rescore_variant(const VariantResult& variant,
                                const ScenarioConfig& config, int grid_points);

}  // namespace contmem::harness
