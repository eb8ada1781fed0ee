#ifndef MLEQLAB_SRC_LINALG_HPP
#define MLEQLAB_SRC_LINALG_HPP

#include <cmath>
#include <utility>
#include <vector>

namespace mleq::detail {

// Gaussian elimination with partial pivoting; a is k x k row-major.
// Returns false when the system is numerically singular.
inline bool solve_linear(std::vector<double> a, std::vector<double> b, int k,
                         std::vector<double>& x) {
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    for (int row = col + 1; row < k; ++row) {
      if (std::abs(a[row * k + col]) > std::abs(a[pivot * k + col])) pivot = row;
    }
    if (std::abs(a[pivot * k + col]) < 1e-300) return false;
    if (pivot != col) {
      for (int j = 0; j < k; ++j) std::swap(a[col * k + j], a[pivot * k + j]);
      std::swap(b[col], b[pivot]);
    }
    for (int row = col + 1; row < k; ++row) {
      const double factor = a[row * k + col] / a[col * k + col];
      for (int j = col; j < k; ++j) a[row * k + j] -= factor * a[col * k + j];
      b[row] -= factor * b[col];
    }
  }
  x.assign(k, 0.0);
  for (int row = k - 1; row >= 0; --row) {
    double sum = b[row];
    for (int j = row + 1; j < k; ++j) sum -= a[row * k + j] * x[j];
    x[row] = sum / a[row * k + row];
  }
  return true;
}

}  // namespace mleq::detail

#endif
