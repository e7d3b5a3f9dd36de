#include "contmem/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace contmem::pipeline {

namespace {

Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g(i, j) = gauss(rng);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // fix the QR sign ambiguity so the result is a function of the seed alone
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  return q;
}

}  // namespace

memory::MemoryConfig PipelineConfig::memory_config() const {
  memory::MemoryConfig mem;
  mem.basis = basis();
  mem.ridge = ridge;
  mem.tau = tau;
  mem.past_samples = effective_past_samples();
  mem.sampling = sampling;
  mem.histogram_bins = histogram_bins;
  mem.quantiles = quantiles;
  mem.seed = seed;
  return mem;
}

void validate(const PipelineConfig& cfg) {
  if (cfg.frames_per_chunk < 1 || cfg.patches < 1) {
    throw std::invalid_argument("config: frames and patches must be >= 1");
  }
  if (cfg.dim < 1 || cfg.queries < 1 || cfg.heads < 1) {
    throw std::invalid_argument("config: dim, queries, heads must be >= 1");
  }
  if (cfg.dim % cfg.heads != 0) {
    throw std::invalid_argument("config: heads must divide dim");
  }
  if (cfg.basis_size < 1) {
    throw std::invalid_argument("config: basis_size must be >= 1");
  }
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) {
    throw std::invalid_argument("config: alpha must lie in [0, 1]");
  }
  if (cfg.grid_points < 2) {
    throw std::invalid_argument("config: grid_points must be >= 2");
  }
  if (cfg.depth < 1) {
    throw std::invalid_argument("config: depth must be >= 1");
  }
  if (cfg.past_samples < 0 || cfg.out_dim < 0 || cfg.rbf_width < 0.0) {
    throw std::invalid_argument("config: negative size parameter");
  }
  // tau/ridge/histogram_bins are validated by the memory module
  memory::init(cfg.memory_config());
}

ChunkOutcome process_chunk(const memory::MemoryState& state,
                           const Matrix& running,
                           const signal::FrameChunk& chunk,
                           const PipelineConfig& cfg,
                           const std::vector<attention::ProjectionSet>& layers,
                           const attention::QuerySet& queries) {
  if (layers.size() != static_cast<std::size_t>(cfg.depth)) {
    throw std::invalid_argument("process_chunk: expected one layer per depth");
  }
  if (chunk.dim() != cfg.dim) {
    throw std::invalid_argument("process_chunk: chunk dim mismatch");
  }
  const auto started = std::chrono::steady_clock::now();

  const Matrix pooled = signal::pool_patches(chunk);
  memory::MemoryState consolidated = memory::consolidate(state, pooled);

  const numerics::QuadratureGrid grid =
      numerics::uniform_grid(0.0, 1.0, cfg.grid_points);
  const bool stm_only =
      cfg.ltm_from_second_chunk && consolidated.chunks_seen == 1;

  attention::QuerySet current = queries;
  Matrix blended;
  std::shared_ptr<attention::DensityProfile> last_profile;
  for (const attention::ProjectionSet& proj : layers) {
    const Matrix z_stm = attention::stm_attention(current, chunk.tokens, proj);
    // the continuous pass always runs; it owns the density bookkeeping
    attention::LtmResult ltm =
        attention::ltm_attention(current, *consolidated.signal, proj, grid);
    if (stm_only || cfg.alpha == 1.0) {
      blended = z_stm;
    } else if (cfg.alpha == 0.0) {
      blended = ltm.context;
    } else {
      blended = cfg.alpha * z_stm + (1.0 - cfg.alpha) * ltm.context;
    }
    last_profile =
        std::make_shared<attention::DensityProfile>(std::move(ltm.profile));
    current.seeds = blended;
  }

  ChunkOutcome out;
  out.state = memory::record_density(consolidated, *last_profile,
                                     cfg.histogram_bins);
  out.context = blended;

  const Matrix projected = blended * layers.back().w_token;
  const double count = static_cast<double>(out.state.chunks_seen);
  if (running.size() == 0) {
    out.running = projected;
  } else {
    out.running = ((count - 1.0) / count) * running + (1.0 / count) * projected;
  }

  out.diagnostics.chunk_index = chunk.chunk_index;
  out.diagnostics.histogram = out.state.histogram;
  out.diagnostics.profile = std::move(last_profile);
  out.diagnostics.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return out;
}

StreamResult run_stream(ChunkSource& source, const PipelineConfig& cfg,
                        const std::vector<attention::ProjectionSet>& layers,
                        const attention::QuerySet& queries,
                        const DiagnosticsSink& sink) {
  validate(cfg);
  memory::MemoryState state = memory::init(cfg.memory_config());
  Matrix running;
  StreamResult result;
  bool saw_chunk = false;

  while (std::optional<signal::FrameChunk> chunk = source.next()) {
    saw_chunk = true;
    ChunkOutcome outcome =
        process_chunk(state, running, *chunk, cfg, layers, queries);
    state = std::move(outcome.state);
    running = std::move(outcome.running);

    result.peak_state_bytes = std::max(
        result.peak_state_bytes,
        state_footprint_bytes(state, running, outcome.diagnostics.profile.get()));

    if (sink) {
      sink(outcome.diagnostics);
    } else {
      if (!cfg.keep_profiles) {
        outcome.diagnostics.profile.reset();
      }
      result.diagnostics.push_back(std::move(outcome.diagnostics));
    }
  }
  if (!saw_chunk) {
    throw std::invalid_argument("run_stream: stream has no chunks");
  }
  result.tokens = std::move(running);
  return result;
}

StreamResult run_stream(const std::vector<signal::FrameChunk>& chunks,
                        const PipelineConfig& cfg,
                        const std::vector<attention::ProjectionSet>& layers,
                        const attention::QuerySet& queries,
                        const DiagnosticsSink& sink) {
  VectorChunkSource source(chunks);
  return run_stream(source, cfg, layers, queries, sink);
}

std::vector<attention::ProjectionSet> make_projections(const PipelineConfig& cfg) {
  validate(cfg);
  const int e = cfg.dim;
  const int d = e / cfg.heads;
  const int e_out = cfg.effective_out_dim();

  std::vector<attention::ProjectionSet> layers;
  layers.reserve(cfg.depth);
  for (int layer = 0; layer < cfg.depth; ++layer) {
    std::mt19937_64 rng(cfg.seed + 0x51a2b3c4ULL * (layer + 1));
    attention::ProjectionSet proj;
    for (int h = 0; h < cfg.heads; ++h) {
      proj.w_query.push_back(random_orthogonal(e, rng).leftCols(d));
      proj.w_key.push_back(random_orthogonal(e, rng).leftCols(d));
      proj.w_value.push_back(random_orthogonal(e, rng).leftCols(d));
    }
    proj.w_out = random_orthogonal(e, rng);
    proj.w_token =
        random_orthogonal(std::max(e, e_out), rng).topLeftCorner(e, e_out);
    attention::validate(proj);
    layers.push_back(std::move(proj));
  }
  return layers;
}

attention::QuerySet make_queries(const PipelineConfig& cfg) {
  std::mt19937_64 rng(cfg.seed ^ 0x7f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix seeds(cfg.queries, cfg.dim);
  for (int i = 0; i < seeds.rows(); ++i) {
    for (int j = 0; j < seeds.cols(); ++j) {
      seeds(i, j) = gauss(rng);
    }
  }
  return attention::QuerySet{std::move(seeds)};
}

std::size_t state_footprint_bytes(const memory::MemoryState& state,
                                  const Matrix& running,
                                  const attention::DensityProfile* profile) {
  std::size_t bytes = 0;
  if (state.signal) {
    bytes += sizeof(double) * state.signal->coefficients.size();
  }
  bytes += sizeof(double) * state.histogram.size();
  bytes += sizeof(double) * running.size();
  if (profile) {
    bytes += sizeof(double) *
             (profile->grid.points.size() + profile->grid.weights.size());
    for (const Matrix& head : profile->densities) {
      bytes += sizeof(double) * head.size();
    }
  }
  return bytes;
}

}  // namespace contmem::pipeline
