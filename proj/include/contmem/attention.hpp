#pragma once

#include "contmem/common.hpp"
#include "contmem/numerics.hpp"
#include "contmem/signal.hpp"

#include <vector>

namespace contmem::attention {

/// Frozen projection weights. The same per-head W_Q/W_K/W_V matrices feed
/// both the discrete and the continuous attention paths.
struct ProjectionSet {
  std::vector<Matrix> w_query;  // per head, e x d
  std::vector<Matrix> w_key;    // per head, e x d
  std::vector<Matrix> w_value;  // per head, e x d
  Matrix w_out;                 // e x e
  Matrix w_token;               // e x e_out

  int heads() const { return static_cast<int>(w_query.size()); }
  int model_dim() const { return static_cast<int>(w_out.rows()); }
  int head_dim() const {
    return w_query.empty() ? 0 : static_cast<int>(w_query[0].cols());
  }
  int token_dim() const { return static_cast<int>(w_token.cols()); }
};

void validate(const ProjectionSet& proj);

/// Identity projections: H heads slicing I_e into contiguous d-column
/// blocks, identity output and token maps. Useful for tests and the
/// retrieval harness.
ProjectionSet identity_projections(int dim, int heads = 1);

/// The R learned query seeds, R x e. Queries are Y W_Q per head.
struct QuerySet {
  Matrix seeds;

  int count() const { return static_cast<int>(seeds.rows()); }
  int dim() const { return static_cast<int>(seeds.cols()); }
};

/// Gibbs densities p_i^h sampled on a quadrature grid; every (head, query)
/// slice integrates to 1 on the grid.
struct DensityProfile {
  numerics::QuadratureGrid grid;
  std::vector<Matrix> densities;  // one R x G matrix per head

  int heads() const { return static_cast<int>(densities.size()); }
  int queries() const {
    return densities.empty() ? 0 : static_cast<int>(densities[0].rows());
  }
  int grid_size() const { return grid.size(); }
};

enum class Role { Query, Key, Value };

/// Right-multiplication by the selected head matrix.
Matrix project(const Matrix& input, const ProjectionSet& proj, Role role,
               int head);

/// Discrete multi-head cross-attention over S token rows:
/// softmax(Q K^T / sqrt(d)) V per head, heads concatenated, times W_Z.
Matrix stm_attention(const QuerySet& queries, const Matrix& tokens,
                     const ProjectionSet& proj);

/// Continuous query-key similarity s_i^h(t_k) = q_i . (W_K^h)^T B^T psi(t_k)
/// on the grid; one psi table is shared by all heads and queries.
/// Returns one R x G matrix per head.
std::vector<Matrix> continuous_scores(const QuerySet& queries,
                                      const signal::ContinuousSignal& sig,
                                      const ProjectionSet& proj,
                                      const numerics::QuadratureGrid& grid);

/// Per-slice Gibbs normalization of raw scores.
DensityProfile gibbs_density(const std::vector<Matrix>& scores,
                             const numerics::QuadratureGrid& grid);

struct LtmResult {
  Matrix context;  // R x e
  DensityProfile profile;
};

/// Continuous attention over the signal: Z_i^h = (W_V^h)^T B^T m_i^h with
/// m_i^h = integral of p_i^h(t) psi(t) dt, heads concatenated, times W_Z.
LtmResult ltm_attention(const QuerySet& queries,
                        const signal::ContinuousSignal& sig,
                        const ProjectionSet& proj,
                        const numerics::QuadratureGrid& grid);

}  // namespace contmem::attention
