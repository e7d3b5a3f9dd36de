#pragma once

#include "contmem/common.hpp"

namespace contmem::basis {

enum class BasisKind { Rectangular, GaussianRbf };

/// A family of N fixed basis functions on [0, 1]. Rectangular boxes
/// partition the interval into N equal right-open pieces (t = 1 belongs to
/// the last box); Gaussian bumps sit at box midpoints with a shared width.
struct BasisFamily {
  BasisKind kind = BasisKind::Rectangular;
  int size = 1;
  double rbf_width = 0.0;  // Gaussian only; 0 means the default 1/size

  double width() const { return rbf_width > 0.0 ? rbf_width : 1.0 / size; }
};

BasisFamily rectangular(int size);
BasisFamily gaussian_rbf(int size, double width = 0.0);

void validate(const BasisFamily& basis);

/// Index of the rectangular box containing t in [0, 1].
int box_index(int size, double t);

/// psi(t) in R^N. Rectangular: one-hot box indicator. Gaussian:
/// exp(-(t - mu_j)^2 / (2 sigma^2)) with mu_j = (j + 1/2)/N.
Vector eval_psi(const BasisFamily& basis, double t);

/// Design matrix F = [psi(t_1), ..., psi(t_L)], N x L. Times must be
/// nondecreasing and inside [0, 1].
Matrix design_matrix(const BasisFamily& basis, const Vector& times);

}  // namespace contmem::basis
