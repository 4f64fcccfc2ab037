#pragma once

#include <vector>

namespace diafuse {

struct Assignment {
  std::vector<int> row_to_col;  // -1 when a row is unassigned
  double cost = 0.0;
};

// Minimum-cost assignment on an n x m cost matrix (Kuhn-Munkres with
// potentials, O(n^3)). Rectangular inputs are padded with zero-cost cells.
Assignment solve_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace diafuse
