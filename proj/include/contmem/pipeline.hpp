#pragma once

#include "contmem/attention.hpp"
#include "contmem/memory.hpp"
#include "contmem/signal.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace contmem::pipeline {

struct PipelineConfig {
  int frames_per_chunk = 256;  // M
  int patches = 1;             // P
  int dim = 64;                // e
  int queries = 8;             // R
  int heads = 4;               // H
  int basis_size = 1024;       // N
  basis::BasisKind basis_kind = basis::BasisKind::Rectangular;
  double rbf_width = 0.0;  // 0 -> 1/N
  double ridge = 1e-3;     // lambda
  double tau = 0.75;
  double alpha = 0.9;
  int past_samples = 0;     // T; 0 -> frames_per_chunk
  int histogram_bins = 64;  // D
  int grid_points = 1000;   // G
  memory::SamplingMode sampling = memory::SamplingMode::Sticky;
  numerics::QuantileMode quantiles = numerics::QuantileMode::Stratified;
  int depth = 1;  // stacked cross-attention layers
  std::uint64_t seed = 0;
  int out_dim = 0;  // e_out; 0 -> dim
  bool ltm_from_second_chunk = false;
  bool keep_profiles = false;

  int effective_past_samples() const {
    return past_samples > 0 ? past_samples : frames_per_chunk;
  }
  int effective_out_dim() const { return out_dim > 0 ? out_dim : dim; }
  basis::BasisFamily basis() const {
    return basis::BasisFamily{basis_kind, basis_size, rbf_width};
  }
  memory::MemoryConfig memory_config() const;
};

void validate(const PipelineConfig& cfg);

struct ChunkDiagnostics {
  int chunk_index = 0;
  double seconds = 0.0;
  Vector histogram;  // recorded after this chunk's attention
  std::shared_ptr<const attention::DensityProfile> profile;
};

struct StreamResult {
  Matrix tokens;  // running average of projected contexts, R x e_out
  std::vector<ChunkDiagnostics> diagnostics;
  std::size_t peak_state_bytes = 0;
};

struct ChunkOutcome {
  memory::MemoryState state;
  Matrix running;  // R x e_out
  Matrix context;  // R x e, the blended Z
  ChunkDiagnostics diagnostics;
};

/// One step of the stream fold:
///   pool -> consolidate -> STM over raw tokens -> LTM over the refit
///   signal -> alpha-blend -> record density -> project -> running average.
/// alpha = 1 returns the STM context bit-exactly (the LTM pass still runs
/// for histogram bookkeeping); alpha = 0 returns the LTM context.
ChunkOutcome process_chunk(const memory::MemoryState& state,
                           const Matrix& running,
                           const signal::FrameChunk& chunk,
                           const PipelineConfig& cfg,
                           const std::vector<attention::ProjectionSet>& layers,
                           const attention::QuerySet& queries);

/// Pull-based chunk supplier so a stream is consumed in a single pass
/// without materializing it.
class ChunkSource {
 public:
  virtual ~ChunkSource() = default;
  virtual std::optional<signal::FrameChunk> next() = 0;
};

class VectorChunkSource : public ChunkSource {
 public:
  explicit VectorChunkSource(std::vector<signal::FrameChunk> chunks)
      : chunks_(std::move(chunks)) {}
  std::optional<signal::FrameChunk> next() override {
    if (index_ >= chunks_.size()) return std::nullopt;
    return chunks_[index_++];
  }

 private:
  std::vector<signal::FrameChunk> chunks_;
  std::size_t index_ = 0;
};

using DiagnosticsSink = std::function<void(const ChunkDiagnostics&)>;

/// Folds process_chunk over the source. With a sink, per-chunk diagnostics
/// are forwarded and not retained, keeping the resident state independent
/// of the stream length; otherwise they are collected in the result
/// (density profiles only when cfg.keep_profiles is set).
StreamResult run_stream(ChunkSource& source, const PipelineConfig& cfg,
                        const std::vector<attention::ProjectionSet>& layers,
                        const attention::QuerySet& queries,
                        const DiagnosticsSink& sink = {});

StreamResult run_stream(const std::vector<signal::FrameChunk>& chunks,
                        const PipelineConfig& cfg,
                        const std::vector<attention::ProjectionSet>& layers,
                        const attention::QuerySet& queries,
                        const DiagnosticsSink& sink = {});

/// Seeded random-orthogonal projections, one set per layer.
std::vector<attention::ProjectionSet> make_projections(const PipelineConfig& cfg);

/// Seeded Gaussian query seeds, R x e.
attention::QuerySet make_queries(const PipelineConfig& cfg);

/// Bytes held by the persistent stream state: signal coefficients,
/// histogram, running tokens, and the last density profile.
std::size_t state_footprint_bytes(const memory::MemoryState& state,
                                  const Matrix& running,
                                  const attention::DensityProfile* profile);

}  // namespace contmem::pipeline
