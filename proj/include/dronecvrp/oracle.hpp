#pragma once

#include "dronecvrp/core_model.hpp"
#include "dronecvrp/exact_solver.hpp"

namespace dronecvrp {

inline constexpr int kBruteForceMaxAssets = 9;

// Exhaustive optimum: every permutation of the assets cut into exactly m
// non-empty consecutive pieces, evaluated with evaluate_solution. Kept
// deliberately naive so that it stays independent of the solvers it checks.
// Ties go to the lexicographically smallest sorted route list.
// Throws InvalidInput when n > max_n.
SolveResult solve_bruteforce(const Instance& instance, int max_n = kBruteForceMaxAssets);

}  // namespace dronecvrp
