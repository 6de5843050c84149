#include "sithss/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sithss {

namespace {

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// (V - g) log V, with the V = 0 limit taken as 0.
double weighted_log(double volume, double cut) { return volume > 0.0 ? (volume - cut) * std::log(volume) : 0.0; }

}  // namespace

Partition Partition::from_assignment(const WeightedGraph& graph, std::span<const std::int32_t> assignment) {
  if (assignment.size() != graph.node_count()) {
    throw InconsistentPartition("assignment has " + std::to_string(assignment.size()) + " entries for " +
                                std::to_string(graph.node_count()) + " nodes");
  }
  Partition p;
  p.assignment.assign(assignment.begin(), assignment.end());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    auto& s = p.clusters[assignment[i]];
    s.volume += graph.degree(i);
    s.size += 1;
    const auto nbrs = graph.neighbors(i);
    const auto ws = graph.weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (assignment[std::size_t(nbrs[k])] != assignment[i]) s.cut += ws[k];
    }
  }
  return p;
}

Partition Partition::singletons(const WeightedGraph& graph) {
  std::vector<std::int32_t> a(graph.node_count());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<std::int32_t>(i);
  return from_assignment(graph, a);
}

Partition Partition::single_cluster(const WeightedGraph& graph) {
  std::vector<std::int32_t> a(graph.node_count(), 0);
  return from_assignment(graph, a);
}

void check_partition(const WeightedGraph& graph, const Partition& partition) {
  if (partition.assignment.size() != graph.node_count()) {
    throw InconsistentPartition("assignment length does not match node count");
  }
  std::map<std::int32_t, ClusterStats> recomputed;
  for (std::size_t i = 0; i < partition.assignment.size(); ++i) {
    const auto id = partition.assignment[i];
    if (!partition.clusters.contains(id)) {
      throw InconsistentPartition("node " + std::to_string(i) + " assigned to unknown cluster " + std::to_string(id));
    }
    auto& s = recomputed[id];
    s.volume += graph.degree(i);
    s.size += 1;
  }
  if (recomputed.size() != partition.clusters.size()) {
    throw InconsistentPartition("cluster map lists clusters with no members");
  }
  double total = 0.0;
  for (const auto& [id, s] : partition.clusters) {
    const auto& r = recomputed.at(id);
    if (r.size != s.size || !close_rel(r.volume, s.volume, 1e-9)) {
      throw InconsistentPartition("statistics of cluster " + std::to_string(id) + " disagree with the graph");
    }
    if (s.cut < 0.0 || s.cut > s.volume * (1.0 + 1e-9) + 1e-12) {
      throw InconsistentPartition("cut of cluster " + std::to_string(id) + " outside [0, volume]");
    }
    total += s.volume;
  }
  if (!close_rel(total, graph.volume(), 1e-9)) throw InconsistentPartition("cluster volumes do not sum to V_G");
}

double two_dim_se(const WeightedGraph& graph, const Partition& partition, double base) {
  check_partition(graph, partition);
  const double volume = graph.volume();
  if (!(volume > 0.0)) throw std::domain_error("two_dim_se: graph has zero volume");
  const double scale = 1.0 / (volume * std::log(base));

  double h = 0.0;
  for (const auto& [id, s] : partition.clusters) {
    if (s.volume > 0.0) h -= s.cut * std::log(s.volume / volume) * scale;
  }
  for (std::size_t j = 0; j < partition.assignment.size(); ++j) {
    const double d = graph.degree(j);
    if (d <= 0.0) continue;
    const double vp = partition.clusters.at(partition.assignment[j]).volume;
    h -= d * std::log(d / vp) * scale;
  }
  return h;
}

double merge_delta(const ClusterStats& i, const ClusterStats& j, double w_ij, double graph_volume, double base) {
  const double merged_volume = i.volume + j.volume;
  const double merged_cut = i.cut + j.cut - 2.0 * w_ij;
  const double sum = weighted_log(i.volume, i.cut) + weighted_log(j.volume, j.cut) -
                     weighted_log(merged_volume, merged_cut) + (i.cut + j.cut - merged_cut) * std::log(graph_volume);
  return sum / (graph_volume * std::log(base));
}

ClusterStats merged_stats(const ClusterStats& i, const ClusterStats& j, double w_ij) {
  ClusterStats out;
  out.volume = i.volume + j.volume;
  out.size = i.size + j.size;
  out.cut = i.cut + j.cut - 2.0 * w_ij;
  if (out.cut < 0.0) {
    if (out.cut < -1e-9 * std::max(1.0, i.cut + j.cut)) {
      throw std::domain_error("merged cut is negative: inter-cluster weight exceeds the clusters' cuts");
    }
    out.cut = 0.0;
  }
  return out;
}

OptimalPartition brute_force_min_2dse(const WeightedGraph& graph, std::optional<int> blocks, double base) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw std::invalid_argument("brute force search needs at least one node");
  if (n > kBruteForceMaxNodes) {
    throw std::invalid_argument("brute force search is limited to " + std::to_string(kBruteForceMaxNodes) +
                                " nodes, got " + std::to_string(n));
  }
  if (blocks && (*blocks < 1 || std::size_t(*blocks) > n)) {
    throw std::invalid_argument("block count out of range");
  }
  const double volume = graph.volume();
  if (!(volume > 0.0)) throw std::domain_error("brute force search: graph has zero volume");
  const auto edges = graph.edges();
  const double scale = 1.0 / (volume * std::log(base));

  std::vector<std::int32_t> rgs(n, 0);
  std::vector<std::int32_t> prefix_max(n, 0);
  std::vector<double> vol(n), cut(n);

  std::vector<std::int32_t> best;
  double best_h = std::numeric_limits<double>::infinity();

  auto evaluate = [&](int block_count) {
    std::fill_n(vol.begin(), block_count, 0.0);
    std::fill_n(cut.begin(), block_count, 0.0);
    for (std::size_t v = 0; v < n; ++v) vol[std::size_t(rgs[v])] += graph.degree(v);
    for (const auto& e : edges) {
      const auto a = rgs[std::size_t(e.u)];
      const auto b = rgs[std::size_t(e.v)];
      if (a != b) {
        cut[std::size_t(a)] += e.weight;
        cut[std::size_t(b)] += e.weight;
      }
    }
    double h = 0.0;
    for (int p = 0; p < block_count; ++p) {
      if (vol[std::size_t(p)] > 0.0) h -= cut[std::size_t(p)] * std::log(vol[std::size_t(p)] / volume) * scale;
    }
    for (std::size_t v = 0; v < n; ++v) {
      const double d = graph.degree(v);
      if (d > 0.0) h -= d * std::log(d / vol[std::size_t(rgs[v])]) * scale;
    }
    return h;
  };

  // Restricted growth strings in lexicographic order: rgs[0] = 0 and
  // rgs[i] <= max(rgs[0..i-1]) + 1.
  while (true) {
    const int block_count = prefix_max[n - 1] + 1;
    if (!blocks || block_count == *blocks) {
      const double h = evaluate(block_count);
      if (best.empty() || h < best_h - 1e-12 * std::max(1.0, std::abs(best_h))) {
        best_h = h;
        best = rgs;
      }
    }
    std::size_t i = n - 1;
    while (i > 0 && rgs[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) break;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t k = i + 1; k < n; ++k) {
      rgs[k] = 0;
      prefix_max[k] = prefix_max[i];
    }
  }

  OptimalPartition out;
  out.partition = Partition::from_assignment(graph, best);
  out.entropy = best_h;
  return out;
}

}  // namespace sithss
