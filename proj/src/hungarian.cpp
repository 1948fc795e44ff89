#include "sasnet/hungarian.hpp"

#include <algorithm>
#include <limits>

namespace sasnet {

// Potentials (Jonker-Volgenant style) algorithm on a squared matrix; dummy
// columns encode "leave the row unassigned" at value zero.
std::vector<int> hungarian_max(const std::vector<std::vector<double>>& score, double forbidden) {
  const int rows = static_cast<int>(score.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(score[0].size());
  if (rows == 0) return {};
  const int n = rows + cols;
  constexpr double kBig = 1e300;

  // cost = -value; dummy rows/cols cost 0.
  auto cost = [&](int r, int c) -> double {
    if (r < rows && c < cols) {
      const double v = score[r][c];
      return v <= forbidden ? kBig : -v;
    }
    return 0.0;
  };

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = std::numeric_limits<double>::infinity();
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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

  std::vector<int> match(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int r = p[j] - 1;
    const int c = j - 1;
    if (r >= 0 && r < rows && c < cols && score[r][c] > forbidden) match[r] = c;
  }
  return match;
}

}  // namespace sasnet
