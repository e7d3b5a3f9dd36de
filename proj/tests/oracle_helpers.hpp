// Independent brute-force reference implementations used to pin expected
// values. These deliberately avoid the library's linear-algebra paths:
// plain loops, long double accumulation.
#pragma once

#include "contmem/attention.hpp"
#include "contmem/basis.hpp"
#include "contmem/common.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using contmem::Matrix;
using contmem::Vector;

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = gauss(rng);
    }
  }
  return m;
}

// c = a * b by naive triple loop
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      long double acc = 0.0L;
      for (int k = 0; k < a.cols(); ++k) {
        acc += static_cast<long double>(a(i, k)) * b(k, j);
      }
      c(i, j) = static_cast<double>(acc);
    }
  }
  return c;
}

// Multi-head softmax attention at long double precision.
inline Matrix softmax_attention(const Matrix& query_seeds, const Matrix& tokens,
                                const contmem::attention::ProjectionSet& proj) {
  const int heads = proj.heads();
  const int d = proj.head_dim();
  const int e = proj.model_dim();
  const int r = static_cast<int>(query_seeds.rows());
  const int s = static_cast<int>(tokens.rows());
  const long double scale = 1.0L / std::sqrt(static_cast<long double>(d));

  Matrix concat(r, e);
  for (int h = 0; h < heads; ++h) {
    for (int i = 0; i < r; ++i) {
      std::vector<long double> q(d, 0.0L);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < e; ++b) {
          q[a] += static_cast<long double>(query_seeds(i, b)) *
                  proj.w_query[h](b, a);
        }
      }
      std::vector<long double> logits(s, 0.0L);
      long double peak = -1e300L;
      for (int f = 0; f < s; ++f) {
        long double dot = 0.0L;
        for (int a = 0; a < d; ++a) {
          long double key = 0.0L;
          for (int b = 0; b < e; ++b) {
            key += static_cast<long double>(tokens(f, b)) * proj.w_key[h](b, a);
          }
          dot += q[a] * key;
        }
        logits[f] = scale * dot;
        peak = std::max(peak, logits[f]);
      }
      long double total = 0.0L;
      for (int f = 0; f < s; ++f) {
        logits[f] = std::exp(logits[f] - peak);
        total += logits[f];
      }
      for (int a = 0; a < d; ++a) {
        long double acc = 0.0L;
        for (int f = 0; f < s; ++f) {
          long double value = 0.0L;
          for (int b = 0; b < e; ++b) {
            value += static_cast<long double>(tokens(f, b)) *
                     proj.w_value[h](b, a);
          }
          acc += (logits[f] / total) * value;
        }
        concat(i, h * d + a) = static_cast<double>(acc);
      }
    }
  }
  return matmul(concat, proj.w_out);
}

// Dense ridge solve at long double precision via Gauss-Jordan on the
// N x N normal equations (F F^T + lambda I) B = F X.
inline Matrix ridge_coefficients(const Matrix& samples, const Vector& times,
                                 const contmem::basis::BasisFamily& basis,
                                 double ridge) {
  const int n = basis.size;
  const int s = static_cast<int>(samples.rows());
  const int e = static_cast<int>(samples.cols());

  std::vector<std::vector<long double>> f(n, std::vector<long double>(s));
  for (int l = 0; l < s; ++l) {
    const Vector psi = contmem::basis::eval_psi(basis, times(l));
    for (int j = 0; j < n; ++j) {
      f[j][l] = psi(j);
    }
  }
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n, 0.0L));
  std::vector<std::vector<long double>> rhs(n, std::vector<long double>(e, 0.0L));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      long double acc = 0.0L;
      for (int l = 0; l < s; ++l) {
        acc += f[i][l] * f[j][l];
      }
      a[i][j] = acc;
    }
    a[i][i] += ridge;
    for (int c = 0; c < e; ++c) {
      long double acc = 0.0L;
      for (int l = 0; l < s; ++l) {
        acc += f[i][l] * samples(l, c);
      }
      rhs[i][c] = acc;
    }
  }
  // Gauss-Jordan with partial pivoting
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int rrow = col + 1; rrow < n; ++rrow) {
      if (std::abs(a[rrow][col]) > std::abs(a[pivot][col])) {
        pivot = rrow;
      }
    }
    std::swap(a[col], a[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    const long double diag = a[col][col];
    for (int j = 0; j < n; ++j) {
      a[col][j] /= diag;
    }
    for (int c = 0; c < e; ++c) {
      rhs[col][c] /= diag;
    }
    for (int rrow = 0; rrow < n; ++rrow) {
      if (rrow == col) continue;
      const long double factor = a[rrow][col];
      if (factor == 0.0L) continue;
      for (int j = 0; j < n; ++j) {
        a[rrow][j] -= factor * a[col][j];
      }
      for (int c = 0; c < e; ++c) {
        rhs[rrow][c] -= factor * rhs[col][c];
      }
    }
  }
  Matrix b(n, e);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < e; ++c) {
      b(i, c) = static_cast<double>(rhs[i][c]);
    }
  }
  return b;
}

}  // namespace oracle
