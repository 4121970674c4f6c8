#include "advperr/assignment.hpp"

#include <algorithm>
#include <limits>

namespace advperr {

std::vector<std::pair<int, int>> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int rows = static_cast<int>(cost.size());
  const int cols = rows > 0 ? static_cast<int>(cost[0].size()) : 0;
  if (rows == 0 || cols == 0) return {};

  // Pad to square with forbidden entries.
  const int n = std::max(rows, cols);
  auto at = [&](int r, int c) -> double {
    if (r < rows && c < cols) return std::min(cost[r][c], kUnassignable);
    return kUnassignable;
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials/links, standard O(n^3) formulation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> link(n + 1, 0);  // link[col] = row assigned to col
  for (int i = 1; i <= n; ++i) {
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    std::vector<int> way(n + 1, 0);
    link[0] = i;
    int j0 = 0;
    do {
      used[j0] = true;
      const int i0 = link[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
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
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[link[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (link[j0] != 0);
    do {
      const int j1 = way[j0];
      link[j0] = link[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<std::pair<int, int>> out;
  for (int j = 1; j <= n; ++j) {
    const int i = link[j];
    if (i >= 1 && i <= rows && j <= cols && at(i - 1, j - 1) < kUnassignable)
      out.emplace_back(i - 1, j - 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace advperr
