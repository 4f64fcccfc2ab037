#include "diafuse/assignment.hpp"

#include <algorithm>
#include <limits>

namespace diafuse {

Assignment solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = (int)cost.size();
  const int m = n > 0 ? (int)cost[0].size() : 0;
  if (n == 0 || m == 0) return {std::vector<int>(n, -1), 0.0};

  const int N = std::max(n, m);
  const double inf = std::numeric_limits<double>::infinity();

  // Pad rectangular inputs with zero-cost cells.
  auto at = [&](int i, int j) -> double { return (i < n && j < m) ? cost[i][j] : 0.0; };

  // 1-indexed potentials; p[j] = row matched to column j.
  std::vector<double> u(N + 1, 0.0), v(N + 1, 0.0);
  std::vector<int> p(N + 1, 0), way(N + 1, 0);

  for (int i = 1; i <= N; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(N + 1, inf);
    std::vector<char> used(N + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= N; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= N; ++j) {
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
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  Assignment out;
  out.row_to_col.assign(n, -1);
  for (int j = 1; j <= N; ++j) {
    const int row = p[j];
    if (row >= 1 && row <= n && j <= m) {
      out.row_to_col[row - 1] = j - 1;
      out.cost += cost[row - 1][j - 1];
    }
  }
  return out;
}

}  // namespace diafuse
