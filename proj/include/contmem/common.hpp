#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace contmem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A ridge system with lambda = 0 has no unique solution.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation asked for memory content that does not exist yet.
class EmptyMemoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A density integrates to zero and cannot be sampled.
class DegenerateDensityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace contmem
