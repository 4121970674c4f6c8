#pragma once

#include <utility>
#include <vector>

namespace advperr {

// Minimum-cost assignment on a rectangular cost matrix (rows x cols), O(n^3)
// shortest-augmenting-path Hungarian. Entries >= kUnassignable are treated as
// forbidden; the solver maximises the number of assignable pairs and, among
// those, minimises total cost. Returns (row, col) pairs for assignable
// matches only.
inline constexpr double kUnassignable = 1e9;

std::vector<std::pair<int, int>> min_cost_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace advperr
