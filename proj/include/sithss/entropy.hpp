#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sithss/graph.hpp"

namespace sithss {

/// Volume V_p (sum of member degrees), cut g_p (weight leaving the cluster)
/// and member count of one cluster.
struct ClusterStats {
  double volume = 0.0;
  double cut = 0.0;
  std::int64_t size = 0;
};

class InconsistentPartition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A flat clustering of graph nodes with cached per-cluster statistics.
struct Partition {
  std::vector<std::int32_t> assignment;
  std::map<std::int32_t, ClusterStats> clusters;

  /// Computes the statistics of `assignment` directly from the graph's edges.
  static Partition from_assignment(const WeightedGraph& graph, std::span<const std::int32_t> assignment);

  /// Every node in its own cluster, id = node index.
  static Partition singletons(const WeightedGraph& graph);
  static Partition single_cluster(const WeightedGraph& graph);
};

/// Throws InconsistentPartition when the assignment and cluster map disagree
/// with each other or with the graph's degrees.
void check_partition(const WeightedGraph& graph, const Partition& partition);

/// Two-level structural entropy of the graph under `partition`:
///   -sum_p [ g_p/V log(V_p/V) + sum_{j in p} d_j/V log(d_j/V_p) ].
double two_dim_se(const WeightedGraph& graph, const Partition& partition, double base = 2.0);

/// Entropy decrease from merging clusters i and j joined by total weight w_ij,
/// in closed form from the two clusters' statistics alone. Positive means the
/// merge lowers the two-level entropy.
double merge_delta(const ClusterStats& i, const ClusterStats& j, double w_ij, double graph_volume,
                   double base = 2.0);

/// Statistics of the union: volumes and sizes add, cut = g_i + g_j - 2 w_ij.
/// Throws std::domain_error if the cut would go negative beyond rounding.
ClusterStats merged_stats(const ClusterStats& i, const ClusterStats& j, double w_ij);

struct OptimalPartition {
  Partition partition;
  double entropy = 0.0;
};

/// Largest graph the exhaustive search accepts.
inline constexpr std::size_t kBruteForceMaxNodes = 12;

/// Exhaustive minimization of two_dim_se over all set partitions (or over
/// those with exactly `blocks` blocks). Assignments are canonical restricted
/// growth strings; ties resolve to the lexicographically smallest one.
OptimalPartition brute_force_min_2dse(const WeightedGraph& graph, std::optional<int> blocks = std::nullopt,
                                      double base = 2.0);

}  // namespace sithss
