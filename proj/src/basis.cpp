#include "contmem/basis.hpp"

#include <cmath>

namespace contmem::basis {

namespace {

void check_domain(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error(std::string(what) + ": t outside [0, 1]");
  }
}

}  // namespace

BasisFamily rectangular(int size) {
  BasisFamily b{BasisKind::Rectangular, size, 0.0};
  validate(b);
  return b;
}

BasisFamily gaussian_rbf(int size, double width) {
  BasisFamily b{BasisKind::GaussianRbf, size, width};
  validate(b);
  return b;
}

void validate(const BasisFamily& basis) {
  if (basis.size < 1) {
    throw std::invalid_argument("basis: size must be >= 1");
  }
  if (basis.rbf_width < 0.0 || !std::isfinite(basis.rbf_width)) {
    throw std::invalid_argument("basis: rbf width must be finite and >= 0");
  }
}

int box_index(int size, double t) {
  check_domain(t, "box_index");
  const int j = static_cast<int>(t * size);
  return j >= size ? size - 1 : j;  // the right endpoint joins the last box
}

Vector eval_psi(const BasisFamily& basis, double t) {
  check_domain(t, "eval_psi");
  Vector psi = Vector::Zero(basis.size);
  if (basis.kind == BasisKind::Rectangular) {
    psi(box_index(basis.size, t)) = 1.0;
  } else {
    const double sigma = basis.width();
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int j = 0; j < basis.size; ++j) {
      const double mu = (j + 0.5) / basis.size;
      const double diff = t - mu;
      psi(j) = std::exp(-diff * diff * inv);
    }
  }
  return psi;
}

Matrix design_matrix(const BasisFamily& basis, const Vector& times) {
  Matrix f(basis.size, times.size());
  for (int l = 0; l < times.size(); ++l) {
    f.col(l) = eval_psi(basis, times(l));
  }
  return f;
}

}  // namespace contmem::basis
