#include "poseval/assignment.hpp"

#include <cmath>
#include <limits>

#include "poseval/error.hpp"

namespace poseval {

Assignment solve_assignment(const CostMatrix& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows ? cost[0].size() : 0;
  for (const auto& r : cost) {
    if (r.size() != cols) throw PreconditionError("assignment: ragged cost matrix");
    for (double v : r)
      if (!std::isfinite(v)) throw PreconditionError("assignment: non-finite cost");
  }
  Assignment out;
  out.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return out;

  // Potentials formulation over an n x n padded matrix, 1-based as in the classical presentation.
  const std::size_t n = std::max(rows, cols);
  auto a = [&](std::size_t i, std::size_t j) { return (i <= rows && j <= cols) ? cost[i - 1][j - 1] : 0.0; };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] >= 1 && p[j] <= rows && j <= cols) {
      out.row_to_col[p[j] - 1] = static_cast<int>(j - 1);
      out.cost += cost[p[j] - 1][j - 1];
    }
  return out;
}

}  // namespace poseval
