#include "contmem/harness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace contmem::harness {

namespace {

constexpr double kUnitNormTolerance = 1e-9;

std::vector<double> softmax_row(const std::vector<double>& logits) {
  double peak = logits[0];
  for (double v : logits) {
    peak = std::max(peak, v);
  }
  double total = 0.0;
  std::vector<double> out(logits.size());
  for (std::size_t s = 0; s < logits.size(); ++s) {
    out[s] = std::exp(logits[s] - peak);
    total += out[s];
  }
  for (double& v : out) {
    v /= total;
  }
  return out;
}

}  // namespace

void validate(const SyntheticStreamSpec& spec) {
  if (spec.chunks < 1 || spec.frames_per_chunk < 1 || spec.patches < 1 ||
      spec.dim < 1) {
    throw std::invalid_argument("stream spec: sizes must be >= 1");
  }
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw std::invalid_argument("stream spec: noise sigma must be finite, >= 0");
  }
  const NeedleSpec& n = spec.needle;
  if (n.chunk_index < 0 || n.chunk_index >= spec.chunks) {
    throw std::invalid_argument("stream spec: needle chunk out of range");
  }
  if (n.frame_begin < 0 || n.frame_count < 1 ||
      n.frame_begin + n.frame_count > spec.frames_per_chunk) {
    throw std::invalid_argument("stream spec: needle span out of range");
  }
  if (n.direction.size() != spec.dim) {
    throw std::invalid_argument("stream spec: needle direction dim mismatch");
  }
  if (std::abs(n.direction.norm() - 1.0) > kUnitNormTolerance) {
    throw std::invalid_argument("stream spec: needle direction must be unit norm");
  }
  if (!std::isfinite(n.amplitude) || n.amplitude < 0.0) {
    throw std::invalid_argument("stream spec: amplitude must be finite, >= 0");
  }
}

Vector random_direction(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  do {
    for (int i = 0; i < dim; ++i) {
      v(i) = gauss(rng);
    }
  } while (v.norm() == 0.0);
  return v / v.norm();
}

SyntheticStream generate_stream(const SyntheticStreamSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticStream stream;
  stream.truth = spec.needle;
  stream.chunks.reserve(spec.chunks);
  const long rows = static_cast<long>(spec.frames_per_chunk) * spec.patches;
  for (int c = 0; c < spec.chunks; ++c) {
    Matrix tokens(rows, spec.dim);
    for (long i = 0; i < rows; ++i) {
      for (int j = 0; j < spec.dim; ++j) {
        tokens(i, j) = spec.noise_sigma * gauss(rng);
      }
    }
    if (c == spec.needle.chunk_index) {
      for (int m = spec.needle.frame_begin;
           m < spec.needle.frame_begin + spec.needle.frame_count; ++m) {
        for (int p = 0; p < spec.patches; ++p) {
          tokens.row(static_cast<long>(m) * spec.patches + p) +=
              spec.needle.amplitude * spec.needle.direction.transpose();
        }
      }
    }
    stream.chunks.push_back(
        signal::make_chunk(std::move(tokens), spec.frames_per_chunk,
                           spec.patches, c));
  }
  return stream;
}

Matrix full_attention_oracle(const Matrix& all_frames,
                             const attention::QuerySet& queries,
                             const attention::ProjectionSet& proj) {
  attention::validate(proj);
  const int s = static_cast<int>(all_frames.rows());
  const int r = queries.count();
  const int e = proj.model_dim();
  const int d = proj.head_dim();
  if (s < 1) {
    throw EmptyMemoryError("full_attention_oracle: no frames");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  Matrix concat = Matrix::Zero(r, e);
  for (int h = 0; h < proj.heads(); ++h) {
    for (int i = 0; i < r; ++i) {
      std::vector<double> q(d, 0.0);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < e; ++b) {
          q[a] += queries.seeds(i, b) * proj.w_query[h](b, a);
        }
      }
      std::vector<double> logits(s, 0.0);
      for (int f = 0; f < s; ++f) {
        double dot = 0.0;
        for (int a = 0; a < d; ++a) {
          double key = 0.0;
          for (int b = 0; b < e; ++b) {
            key += all_frames(f, b) * proj.w_key[h](b, a);
          }
          dot += q[a] * key;
        }
        logits[f] = scale * dot;
      }
      const std::vector<double> weights = softmax_row(logits);
      for (int a = 0; a < d; ++a) {
        double acc = 0.0;
        for (int f = 0; f < s; ++f) {
          double value = 0.0;
          for (int b = 0; b < e; ++b) {
            value += all_frames(f, b) * proj.w_value[h](b, a);
          }
          acc += weights[f] * value;
        }
        concat(i, h * d + a) = acc;
      }
    }
  }

  Matrix out = Matrix::Zero(r, e);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < e; ++j) {
      double acc = 0.0;
      for (int b = 0; b < e; ++b) {
        acc += concat(i, b) * proj.w_out(b, j);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Interval map_span_to_final(const ContractionSchedule& schedule,
                           int chunk_index, int frame_begin, int frame_count) {
  if (chunk_index < 0 || chunk_index >= schedule.chunks) {
    throw std::invalid_argument("map_span_to_final: chunk out of range");
  }
  const double m = schedule.frames_per_chunk;
  Interval span{frame_begin / m, (frame_begin + frame_count) / m};
  if (chunk_index > 0) {
    span.lo = schedule.tau + (1.0 - schedule.tau) * span.lo;
    span.hi = schedule.tau + (1.0 - schedule.tau) * span.hi;
  }
  const int later_steps = schedule.chunks - 1 - chunk_index;
  const double shrink = std::pow(schedule.tau, later_steps);
  span.lo *= shrink;
  span.hi *= shrink;
  return span;
}

double final_frame_position(const ContractionSchedule& schedule,
                            int chunk_index, int frame) {
  const double m = schedule.frames_per_chunk;
  double t = (frame + 0.5) / m;
  if (chunk_index > 0) {
    t = schedule.tau + (1.0 - schedule.tau) * t;
  }
  return t * std::pow(schedule.tau, schedule.chunks - 1 - chunk_index);
}

RetrievalReport evaluate_retrieval(const attention::DensityProfile& profile,
                                   const NeedleSpec& truth,
                                   const ContractionSchedule& schedule) {
  const Vector aggregated = memory::aggregate_density(profile);
  const Interval needle = map_span_to_final(schedule, truth.chunk_index,
                                            truth.frame_begin,
                                            truth.frame_count);

  RetrievalReport report;
  report.needle_length = needle.length();
  report.below_resolution =
      report.needle_length < 1.0 / std::max(1, schedule.basis_size);
  report.needle_mass =
      numerics::interval_mass(aggregated, profile.grid, needle.lo, needle.hi);

  const double total =
      numerics::interval_mass(aggregated, profile.grid, 0.0, 1.0);
  const double background_mass = total - report.needle_mass;
  const double background_length = 1.0 - report.needle_length;
  report.needle_per_unit =
      report.needle_length > 0.0 ? report.needle_mass / report.needle_length
                                 : 0.0;
  report.background_per_unit =
      background_length > 0.0 ? background_mass / background_length : 0.0;
  if (report.background_per_unit > 0.0) {
    report.mass_ratio = report.needle_per_unit / report.background_per_unit;
  } else {
    report.mass_ratio = std::numeric_limits<double>::infinity();
  }

  // top-k over all stream frames, k = needle frame count
  const int total_frames = schedule.chunks * schedule.frames_per_chunk;
  std::vector<std::pair<int, double>> ranked(total_frames);
  for (int g = 0; g < total_frames; ++g) {
    const int chunk = g / schedule.frames_per_chunk;
    const int frame = g % schedule.frames_per_chunk;
    const double pos = final_frame_position(schedule, chunk, frame);
    ranked[g] = {g, numerics::interpolate(aggregated, profile.grid, pos)};
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  const int k = truth.frame_count;
  const int needle_lo =
      truth.chunk_index * schedule.frames_per_chunk + truth.frame_begin;
  const int needle_hi = needle_lo + truth.frame_count;
  int hits = 0;
  for (int i = 0; i < k && i < total_frames; ++i) {
    if (ranked[i].first >= needle_lo && ranked[i].first < needle_hi) {
      ++hits;
    }
  }
  report.topk_hit_rate = static_cast<double>(hits) / k;
  return report;
}

ScenarioConfig default_scenario() {
  ScenarioConfig config;
  config.stream.chunks = 8;
  config.stream.frames_per_chunk = 32;
  config.stream.patches = 1;
  config.stream.dim = 16;
  config.stream.noise_sigma = 1.0;
  config.stream.seed = 1234;
  config.stream.needle.chunk_index = 5;
  config.stream.needle.frame_begin = 8;
  config.stream.needle.frame_count = 8;
  config.stream.needle.amplitude = 4.0;
  config.stream.needle.direction = random_direction(16, 99);

  pipeline::PipelineConfig& p = config.pipeline;
  p.frames_per_chunk = 32;
  p.patches = 1;
  p.dim = 16;
  p.queries = 2;
  p.heads = 1;
  p.basis_size = 128;
  p.ridge = 1e-3;
  p.tau = 0.75;
  p.alpha = 0.9;
  p.histogram_bins = 64;
  p.grid_points = 1000;
  p.seed = 7;

  config.query_gain = 4.0;
  config.control_queries = 1;
  return config;
}

attention::QuerySet scenario_queries(const ScenarioConfig& config) {
  const int r = 1 + config.control_queries;
  Matrix seeds(r, config.stream.dim);
  seeds.row(0) =
      config.query_gain * config.stream.needle.direction.transpose();
  for (int i = 1; i < r; ++i) {
    seeds.row(i) = config.query_gain *
                   random_direction(config.stream.dim,
                                    config.pipeline.seed + 1000 + i)
                       .transpose();
  }
  return attention::QuerySet{std::move(seeds)};
}

namespace {

VariantResult run_variant(const SyntheticStream& stream,
                          const ScenarioConfig& config,
                          pipeline::PipelineConfig cfg) {
  cfg.queries = 1 + config.control_queries;
  cfg.keep_profiles = true;
  const std::vector<attention::ProjectionSet> layers(
      cfg.depth, attention::identity_projections(cfg.dim, cfg.heads));
  const attention::QuerySet queries = scenario_queries(config);

  // fold manually so the final state stays available for re-scoring
  memory::MemoryState state = memory::init(cfg.memory_config());
  Matrix running;
  std::shared_ptr<const attention::DensityProfile> profile;
  for (const signal::FrameChunk& chunk : stream.chunks) {
    pipeline::ChunkOutcome outcome =
        pipeline::process_chunk(state, running, chunk, cfg, layers, queries);
    state = std::move(outcome.state);
    running = std::move(outcome.running);
    profile = outcome.diagnostics.profile;
  }

  const ContractionSchedule schedule{config.stream.chunks,
                                     config.stream.frames_per_chunk, cfg.tau,
                                     cfg.basis_size};
  VariantResult result;
  result.report = evaluate_retrieval(*profile, stream.truth, schedule);
  result.tokens = std::move(running);
  result.final_state = std::move(state);
  result.final_profile = std::move(profile);
  return result;
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& config) {
  validate(config.stream);
  pipeline::validate(config.pipeline);
  const SyntheticStream stream = generate_stream(config.stream);

  ScenarioReport report;
  pipeline::PipelineConfig cfg = config.pipeline;

  cfg.alpha = 1.0;
  cfg.sampling = memory::SamplingMode::Uniform;
  report.no_ltm = run_variant(stream, config, cfg);

  cfg.alpha = config.pipeline.alpha;
  cfg.sampling = memory::SamplingMode::Uniform;
  report.uniform = run_variant(stream, config, cfg);

  cfg.sampling = memory::SamplingMode::Sticky;
  report.sticky = run_variant(stream, config, cfg);
  return report;
}

RetrievalReport rescore_variant(const VariantResult& variant,
                                const ScenarioConfig& config, int grid_points) {
  pipeline::PipelineConfig cfg = config.pipeline;
  cfg.queries = 1 + config.control_queries;
  const attention::ProjectionSet proj =
      attention::identity_projections(cfg.dim, cfg.heads);
  const attention::QuerySet queries = scenario_queries(config);
  const numerics::QuadratureGrid grid =
      numerics::uniform_grid(0.0, 1.0, grid_points);
  const attention::LtmResult ltm = attention::ltm_attention(
      queries, *variant.final_state.signal, proj, grid);
  const ContractionSchedule schedule{config.stream.chunks,
                                     config.stream.frames_per_chunk, cfg.tau,
                                     cfg.basis_size};
  return evaluate_retrieval(ltm.profile, config.stream.needle, schedule);
}

}  // namespace contmem::harness
