#pragma once

#include <vector>

namespace poseval {

using CostMatrix = std::vector<std::vector<double>>;

struct Assignment {
  std::vector<int> row_to_col;  // -1 when the row is left unassigned (more rows than columns)
  double cost = 0;
};

/// Minimum-cost assignment (Hungarian method, O(n^3)). Rectangular inputs are padded with zero cost.
/// All rows must have equal length; entries must be finite.
Assignment solve_assignment(const CostMatrix& cost);

}  // namespace poseval
