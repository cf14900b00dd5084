#pragma once

#include <vector>

namespace geomorse {

// Exact linear assignment: minimizes sum_i cost[i*n + assign[i]] over
// permutations. Shortest-augmenting-path with dual potentials, O(n^3).
std::vector<int> solve_assignment(const std::vector<double>& cost, int n);

double assignment_cost(const std::vector<double>& cost, int n,
                       const std::vector<int>& assign);

}  // namespace geomorse
