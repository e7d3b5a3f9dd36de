#pragma once

#include "contmem/basis.hpp"
#include "contmem/common.hpp"

namespace contmem::signal {

/// One chunk of the stream: M frames x P patches x e channels, stored as an
/// (M*P) x e matrix in frame-major row order (frame m, patch p at row
/// m*P + p).
struct FrameChunk {
  Matrix tokens;
  int frames = 0;
  int patches = 0;
  int chunk_index = 0;

  int dim() const { return static_cast<int>(tokens.cols()); }
};

/// Validates shape and finiteness.
FrameChunk make_chunk(Matrix tokens, int frames, int patches, int chunk_index);

/// x(t) = B^T psi(t): a vector-valued function on [0, 1] defined by an
/// N x e coefficient matrix over a basis family.
struct ContinuousSignal {
  Matrix coefficients;
  basis::BasisFamily basis;
  double ridge = 0.0;

  int dim() const { return static_cast<int>(coefficients.cols()); }
};

/// Mean over the P patch embeddings of each frame; M x e.
Matrix pool_patches(const FrameChunk& chunk);

/// Frame time instants in (0, 1): midpoints (m + 1/2)/M.
Vector frame_times(int frames);

/// Multivariate ridge regression of the sampled rows onto the basis:
/// B^T = X^T F^T (F F^T + lambda I)^{-1}. When N > S and lambda > 0 the
/// equivalent S x S dual system is solved instead. lambda = 0 is accepted
/// only if F F^T is invertible.
ContinuousSignal fit(const Matrix& samples, const Vector& times,
                     const basis::BasisFamily& basis, double ridge);

/// B^T psi(t), an e-vector.
Vector evaluate(const ContinuousSignal& signal, double t);

}  // namespace contmem::signal
