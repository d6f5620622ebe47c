#include "msdiar/assignment.hpp"

#include <algorithm>
#include <limits>

namespace msdiar {

std::vector<int> max_weight_assignment(const Matrix& weights) {
  const Eigen::Index rows = weights.rows();
  const Eigen::Index cols = weights.cols();
  if (rows == 0) return {};
  const Eigen::Index n = std::max(rows, cols);
  const double peak = cols > 0 ? weights.maxCoeff() : 0.0;
  // Square cost matrix, padded with zero weight.
  Matrix cost = Matrix::Constant(n, n, peak);
  if (cols > 0) cost.topLeftCorner(rows, cols) = Matrix::Constant(rows, cols, peak) - weights;

  // Potentials-based Hungarian method, 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  const auto N = static_cast<std::size_t>(n);
  std::vector<double> u(N + 1, 0.0), v(N + 1, 0.0);
  std::vector<std::size_t> match(N + 1, 0), way(N + 1, 0);
  for (std::size_t i = 1; i <= N; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(N + 1, inf);
    std::vector<char> used(N + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= N; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1),
                                static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= N; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> out(static_cast<std::size_t>(rows), -1);
  for (std::size_t j = 1; j <= N; ++j) {
    const std::size_t i = match[j];
    if (i >= 1 && i <= static_cast<std::size_t>(rows) && j <= static_cast<std::size_t>(cols)) {
      out[i - 1] = static_cast<int>(j - 1);
    }
  }
  return out;
}

}  // namespace msdiar
