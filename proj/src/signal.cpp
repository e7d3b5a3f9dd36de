#include "contmem/signal.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>

namespace contmem::signal {

namespace {

void check_times(const Vector& times) {
  for (int l = 0; l < times.size(); ++l) {
    if (!(times(l) >= 0.0 && times(l) <= 1.0)) {
      throw std::domain_error("fit: times outside [0, 1]");
    }
    if (l > 0 && times(l) < times(l - 1)) {
      throw std::invalid_argument("fit: times must be nondecreasing");
    }
  }
}

// SPD solve with a pivoted fallback. A is symmetric by construction.
Matrix solve_spd(const Matrix& a, const Matrix& rhs, double ridge) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) {
    return llt.solve(rhs);
  }
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) {
    if (ridge == 0.0) {
      throw SingularMatrixError("fit: F F^T is singular and lambda = 0");
    }
    throw SingularMatrixError("fit: normal equations are singular");
  }
  return lu.solve(rhs);
}

}  // namespace

FrameChunk make_chunk(Matrix tokens, int frames, int patches, int chunk_index) {
  if (frames < 1 || patches < 1) {
    throw std::invalid_argument("chunk: frames and patches must be >= 1");
  }
  if (tokens.cols() < 1 ||
      tokens.rows() != static_cast<long>(frames) * patches) {
    throw std::invalid_argument("chunk: token matrix shape mismatch");
  }
  if (chunk_index < 0) {
    throw std::invalid_argument("chunk: index must be >= 0");
  }
  if (!all_finite(tokens)) {
    throw std::invalid_argument("chunk: embeddings must be finite");
  }
  return FrameChunk{std::move(tokens), frames, patches, chunk_index};
}

Matrix pool_patches(const FrameChunk& chunk) {
  Matrix pooled(chunk.frames, chunk.dim());
  for (int m = 0; m < chunk.frames; ++m) {
    pooled.row(m) =
        chunk.tokens.middleRows(static_cast<long>(m) * chunk.patches,
                                chunk.patches)
            .colwise()
            .mean();
  }
  return pooled;
}

Vector frame_times(int frames) {
  if (frames < 1) {
    throw std::invalid_argument("frame_times: requires frames >= 1");
  }
  Vector times(frames);
  for (int m = 0; m < frames; ++m) {
    times(m) = (m + 0.5) / frames;
  }
  return times;
}

ContinuousSignal fit(const Matrix& samples, const Vector& times,
                     const basis::BasisFamily& basis, double ridge) {
  basis::validate(basis);
  const long s = samples.rows();
  if (s < 1) {
    throw std::invalid_argument("fit: requires at least one sample");
  }
  if (times.size() != s) {
    throw std::invalid_argument("fit: times length does not match samples");
  }
  if (!all_finite(samples) || !all_finite(times)) {
    throw std::invalid_argument("fit: inputs must be finite");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw std::invalid_argument("fit: lambda must be finite and >= 0");
  }
  check_times(times);

  const Matrix f = basis::design_matrix(basis, times);
  const int n = basis.size;
  Matrix b;
  if (ridge > 0.0 && n > s) {
    // dual form: B = F (F^T F + lambda I)^{-1} X, an S x S system
    Matrix a = f.transpose() * f;
    a.diagonal().array() += ridge;
    b = f * solve_spd(a, samples, ridge);
  } else {
    Matrix a = f * f.transpose();
    a.diagonal().array() += ridge;
    b = solve_spd(a, f * samples, ridge);
  }
  if (!all_finite(b)) {
    throw SingularMatrixError("fit: solve produced non-finite coefficients");
  }
  return ContinuousSignal{std::move(b), basis, ridge};
}

Vector evaluate(const ContinuousSignal& signal, double t) {
  if (signal.basis.kind == basis::BasisKind::Rectangular) {
    // one-hot psi: plain row lookup
    return signal.coefficients.row(basis::box_index(signal.basis.size, t))
        .transpose();
  }
  return signal.coefficients.transpose() * basis::eval_psi(signal.basis, t);
}

}  // namespace contmem::signal
