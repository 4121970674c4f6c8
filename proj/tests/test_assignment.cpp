#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "advperr/assignment.hpp"
#include "advperr/rng.hpp"

using namespace advperr;

namespace {

// Exhaustive oracle: try every injection of the smaller side into the larger,
// maximising match count first, then minimising cost.
std::pair<int, double> brute_force(const std::vector<std::vector<double>>& cost) {
  const int rows = static_cast<int>(cost.size());
  const int cols = rows ? static_cast<int>(cost[0].size()) : 0;
  const int n = std::max(rows, cols);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int best_count = -1;
  double best_cost = 0.0;
  do {
    int count = 0;
    double total = 0.0;
    for (int r = 0; r < rows; ++r) {
      const int c = perm[r];
      if (c >= cols || cost[r][c] >= kUnassignable) continue;
      ++count;
      total += cost[r][c];
    }
    if (count > best_count || (count == best_count && total < best_cost - 1e-12)) {
      best_count = count;
      best_cost = total;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best_count, best_cost};
}

double solution_cost(const std::vector<std::vector<double>>& cost,
                     const std::vector<std::pair<int, int>>& sol) {
  double total = 0.0;
  for (const auto& [r, c] : sol) total += cost[r][c];
  return total;
}

}  // namespace

TEST_CASE("hungarian equals brute force on random instances up to 6x6") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int rows = 1 + static_cast<int>(rng.uniform_int(6));
    const int cols = 1 + static_cast<int>(rng.uniform_int(6));
    std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
    for (auto& row : cost)
      for (double& v : row) v = rng.bernoulli(0.2) ? kUnassignable : rng.uniform(0.0, 10.0);
    const auto sol = min_cost_assignment(cost);
    const auto [oracle_count, oracle_cost] = brute_force(cost);
    REQUIRE(static_cast<int>(sol.size()) == oracle_count);
    CHECK(solution_cost(cost, sol) == doctest::Approx(oracle_cost).epsilon(1e-9));
  }
}

TEST_CASE("assignment is a partial matching") {
  Rng rng(13);
  std::vector<std::vector<double>> cost(5, std::vector<double>(3));
  for (auto& row : cost)
    for (double& v : row) v = rng.uniform(0.0, 4.0);
  const auto sol = min_cost_assignment(cost);
  CHECK(sol.size() == 3);
  std::vector<int> rows_used, cols_used;
  for (const auto& [r, c] : sol) {
    rows_used.push_back(r);
    cols_used.push_back(c);
  }
  std::sort(rows_used.begin(), rows_used.end());
  std::sort(cols_used.begin(), cols_used.end());
  CHECK(std::adjacent_find(rows_used.begin(), rows_used.end()) == rows_used.end());
  CHECK(std::adjacent_find(cols_used.begin(), cols_used.end()) == cols_used.end());
}

TEST_CASE("forbidden entries never appear in the solution") {
  const std::vector<std::vector<double>> cost = {{kUnassignable, 1.0}, {kUnassignable, kUnassignable}};
  const auto sol = min_cost_assignment(cost);
  REQUIRE(sol.size() == 1);
  CHECK(sol[0] == std::pair<int, int>{0, 1});
}

TEST_CASE("empty matrix") {
  CHECK(min_cost_assignment({}).empty());
  CHECK(min_cost_assignment({{}}).empty());
}
