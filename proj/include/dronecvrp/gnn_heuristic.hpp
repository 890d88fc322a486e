#pragma once

#include <map>
#include <vector>

#include "dronecvrp/core_model.hpp"

namespace dronecvrp {

// Capacitated p-median partition of the assets (phase 1 of GNN).
struct Clustering {
  int K = 0;
  std::vector<int> medians;           // ascending asset ids
  std::map<int, int> assignment;      // asset id -> median id
  std::map<int, double> cluster_demand;  // median id -> liters
  double objective = 0.0;             // sum of C(median, asset) over all assets

  std::vector<int> members(int median) const;  // ascending, median included
};

struct ClusteringOptions {
  // Up to this many assets the median subset is chosen by exhaustive
  // branch and bound; above it, farthest-point seeding plus swap search.
  int exact_threshold = 20;
  // Search budget for one capacitated assignment (nodes of the DFS).
  long assignment_node_limit = 2'000'000;
};

// Throws InfeasibleProblem when no capacity-feasible K-clustering is found.
Clustering cluster_assets(const Instance& instance, const CostMatrix& costs, int K,
                          const ClusteringOptions& options = {});

// Optimal single-source capacitated assignment of the assets to a fixed set
// of medians (each median serves itself). Returns false when none exists
// or the node budget runs out before one is found.
bool assign_to_medians(const Instance& instance, const CostMatrix& costs, const std::vector<int>& medians,
                       long node_limit, Clustering& out);

// Depot -> median, then nearest unvisited member by C (ties: lowest id),
// then back to the depot.
Route route_cluster(const Instance& instance, const CostMatrix& costs, const std::vector<int>& cluster,
                    int median, int drone_id = 0);

// Cluster with K = m, route each cluster; drone ids follow median order.
Solution solve_gnn(const Instance& instance, const ClusteringOptions& options = {});

}  // namespace dronecvrp
