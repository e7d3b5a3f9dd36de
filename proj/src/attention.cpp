#include "contmem/attention.hpp"

#include <cmath>

namespace contmem::attention {

namespace {

// psi sampled over the whole grid. Rectangular families collapse the
// N x G table to one box index per grid point; the products below then
// reduce to gathers and scatter-adds with a fixed summation order, which
// matches the dense one-hot product exactly.
struct PsiTable {
  bool rectangular = false;
  int size = 0;
  std::vector<int> boxes;  // rectangular: box index per grid point
  Matrix dense;            // gaussian: N x G
};

PsiTable tabulate_psi(const basis::BasisFamily& basis,
                      const numerics::QuadratureGrid& grid) {
  PsiTable table;
  table.size = basis.size;
  table.rectangular = basis.kind == basis::BasisKind::Rectangular;
  const int g = grid.size();
  if (table.rectangular) {
    table.boxes.resize(g);
    for (int k = 0; k < g; ++k) {
      table.boxes[k] = basis::box_index(basis.size, grid.points(k));
    }
  } else {
    table.dense = basis::design_matrix(basis, grid.points);
  }
  return table;
}

// A (R x N) -> A * Psi (R x G)
Matrix psi_gather(const PsiTable& table, const Matrix& a) {
  if (!table.rectangular) {
    return a * table.dense;
  }
  const int g = static_cast<int>(table.boxes.size());
  Matrix out(a.rows(), g);
  for (int k = 0; k < g; ++k) {
    out.col(k) = a.col(table.boxes[k]);
  }
  return out;
}

// W (G x R) -> Psi * W (N x R), summed in ascending grid order
Matrix psi_moments(const PsiTable& table, const Matrix& weighted) {
  if (!table.rectangular) {
    return table.dense * weighted;
  }
  Matrix out = Matrix::Zero(table.size, weighted.cols());
  for (int k = 0; k < weighted.rows(); ++k) {
    out.row(table.boxes[k]) += weighted.row(k);
  }
  return out;
}

std::vector<Matrix> scores_from_table(const QuerySet& queries,
                                      const signal::ContinuousSignal& sig,
                                      const ProjectionSet& proj,
                                      const PsiTable& table) {
  std::vector<Matrix> scores;
  scores.reserve(proj.heads());
  for (int h = 0; h < proj.heads(); ++h) {
    const Matrix q = queries.seeds * proj.w_query[h];       // R x d
    const Matrix keys = sig.coefficients * proj.w_key[h];   // N x d
    scores.push_back(psi_gather(table, q * keys.transpose()));
  }
  return scores;
}

void check_query_dims(const QuerySet& queries, const ProjectionSet& proj) {
  if (queries.count() < 1) {
    throw std::invalid_argument("attention: empty query set");
  }
  if (queries.dim() != proj.model_dim()) {
    throw std::invalid_argument("attention: query dim does not match weights");
  }
}

}  // namespace

void validate(const ProjectionSet& proj) {
  const int h = proj.heads();
  if (h < 1) {
    throw std::invalid_argument("projections: need at least one head");
  }
  const int e = proj.model_dim();
  if (e < 1 || e % h != 0) {
    throw std::invalid_argument(
        "projections: model dim must be a positive multiple of the head count");
  }
  const int d = e / h;
  if (proj.w_key.size() != proj.w_query.size() ||
      proj.w_value.size() != proj.w_query.size()) {
    throw std::invalid_argument("projections: per-head matrix count mismatch");
  }
  for (int i = 0; i < h; ++i) {
    for (const Matrix* m : {&proj.w_query[i], &proj.w_key[i], &proj.w_value[i]}) {
      if (m->rows() != e || m->cols() != d) {
        throw std::invalid_argument("projections: head matrix must be e x d");
      }
      if (!all_finite(*m)) {
        throw std::invalid_argument("projections: weights must be finite");
      }
    }
  }
  if (proj.w_out.rows() != e || proj.w_out.cols() != e) {
    throw std::invalid_argument("projections: output matrix must be e x e");
  }
  if (proj.w_token.rows() != e || proj.w_token.cols() < 1) {
    throw std::invalid_argument("projections: token matrix must have e rows");
  }
  if (!all_finite(proj.w_out) || !all_finite(proj.w_token)) {
    throw std::invalid_argument("projections: weights must be finite");
  }
}

ProjectionSet identity_projections(int dim, int heads) {
  if (heads < 1 || dim < 1 || dim % heads != 0) {
    throw std::invalid_argument(
        "identity_projections: dim must be a positive multiple of heads");
  }
  const int d = dim / heads;
  ProjectionSet proj;
  const Matrix eye = Matrix::Identity(dim, dim);
  for (int h = 0; h < heads; ++h) {
    Matrix slice = eye.middleCols(static_cast<long>(h) * d, d);
    proj.w_query.push_back(slice);
    proj.w_key.push_back(slice);
    proj.w_value.push_back(std::move(slice));
  }
  proj.w_out = eye;
  proj.w_token = eye;
  return proj;
}

Matrix project(const Matrix& input, const ProjectionSet& proj, Role role,
               int head) {
  if (head < 0 || head >= proj.heads()) {
    throw std::invalid_argument("project: head out of range");
  }
  if (input.cols() != proj.model_dim()) {
    throw std::invalid_argument("project: input dim does not match weights");
  }
  switch (role) {
    case Role::Query:
      return input * proj.w_query[head];
    case Role::Key:
      return input * proj.w_key[head];
    case Role::Value:
      return input * proj.w_value[head];
  }
  throw std::invalid_argument("project: unknown role");
}

Matrix stm_attention(const QuerySet& queries, const Matrix& tokens,
                     const ProjectionSet& proj) {
  validate(proj);
  check_query_dims(queries, proj);
  if (tokens.rows() < 1) {
    throw EmptyMemoryError("stm_attention: no tokens to attend over");
  }
  if (tokens.cols() != proj.model_dim()) {
    throw std::invalid_argument("stm_attention: token dim mismatch");
  }

  const int r = queries.count();
  const int e = proj.model_dim();
  const int d = proj.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  Matrix concat(r, e);
  for (int h = 0; h < proj.heads(); ++h) {
    const Matrix q = queries.seeds * proj.w_query[h];  // R x d
    const Matrix k = tokens * proj.w_key[h];           // S x d
    const Matrix v = tokens * proj.w_value[h];         // S x d
    Matrix logits = scale * (q * k.transpose());       // R x S
    for (int i = 0; i < r; ++i) {
      const double shift = logits.row(i).maxCoeff();
      Eigen::ArrayXd row = (logits.row(i).array() - shift).exp();
      logits.row(i) = (row / row.sum()).matrix();
    }
    concat.middleCols(static_cast<long>(h) * d, d) = logits * v;
  }
  return concat * proj.w_out;
}

std::vector<Matrix> continuous_scores(const QuerySet& queries,
                                      const signal::ContinuousSignal& sig,
                                      const ProjectionSet& proj,
                                      const numerics::QuadratureGrid& grid) {
  validate(proj);
  check_query_dims(queries, proj);
  if (sig.dim() != proj.model_dim()) {
    throw std::invalid_argument("continuous_scores: signal dim mismatch");
  }
  const PsiTable table = tabulate_psi(sig.basis, grid);
  return scores_from_table(queries, sig, proj, table);
}

DensityProfile gibbs_density(const std::vector<Matrix>& scores,
                             const numerics::QuadratureGrid& grid) {
  DensityProfile profile;
  profile.grid = grid;
  profile.densities.reserve(scores.size());
  for (const Matrix& head : scores) {
    Matrix density(head.rows(), head.cols());
    for (int i = 0; i < head.rows(); ++i) {
      density.row(i) =
          numerics::normalized_exp(head.row(i).transpose(), grid).transpose();
    }
    profile.densities.push_back(std::move(density));
  }
  return profile;
}

LtmResult ltm_attention(const QuerySet& queries,
                        const signal::ContinuousSignal& sig,
                        const ProjectionSet& proj,
                        const numerics::QuadratureGrid& grid) {
  validate(proj);
  check_query_dims(queries, proj);
  if (sig.dim() != proj.model_dim()) {
    throw std::invalid_argument("ltm_attention: signal dim mismatch");
  }

  const PsiTable table = tabulate_psi(sig.basis, grid);
  const std::vector<Matrix> scores = scores_from_table(queries, sig, proj, table);
  DensityProfile profile = gibbs_density(scores, grid);

  const int r = queries.count();
  const int e = proj.model_dim();
  const int d = proj.head_dim();
  Matrix concat(r, e);
  for (int h = 0; h < proj.heads(); ++h) {
    // m_i = Psi (w .* p_i), all queries at once as a G x R block
    const Matrix& density = profile.densities[h];
    Matrix weighted(grid.size(), r);
    for (int i = 0; i < r; ++i) {
      weighted.col(i) =
          density.row(i).transpose().cwiseProduct(grid.weights);
    }
    const Matrix moments = psi_moments(table, weighted);     // N x R
    const Matrix values = sig.coefficients * proj.w_value[h];  // N x d
    concat.middleCols(static_cast<long>(h) * d, d) =
        moments.transpose() * values;
  }
  return LtmResult{concat * proj.w_out, std::move(profile)};
}

}  // namespace contmem::attention
