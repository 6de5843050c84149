#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sithss/entropy.hpp"
#include "sithss/graph.hpp"
#include "sithss/image_io.hpp"
#include "sithss/pixel_graph.hpp"

namespace sithss {

/// Unweighted symmetric relation listing which nodes may be merged with which.
/// For images this is the 8-connected lattice, independent of the radius of
/// the weighted graph.
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<std::int32_t> neighbors;

  std::size_t node_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::span<const std::int32_t> row(std::size_t node) const {
    return {neighbors.data() + offsets[node], offsets[node + 1] - offsets[node]};
  }
};

/// 8-connected pixel lattice.
Adjacency lattice_adjacency(int width, int height);
/// Every edge of the graph is a candidate pair.
Adjacency graph_adjacency(const WeightedGraph& graph);

struct MergeEvent {
  int round = 0;
  std::int32_t survivor = 0;
  std::int32_t absorbed = 0;
  double delta = 0.0;

  friend bool operator==(const MergeEvent&, const MergeEvent&) = default;
};

/// Ordered merge log. Cluster ids are the smallest node index they contain,
/// so the survivor of every merge is the smaller of the two ids.
struct Dendrogram {
  std::int32_t initial_count = 0;
  std::vector<MergeEvent> events;

  std::size_t final_count() const { return std::size_t(initial_count) - events.size(); }

  friend bool operator==(const Dendrogram&, const Dendrogram&) = default;
};

/// One entry of a cluster's neighbor list: an adjacent cluster reached by
/// at least one graph edge or one candidate pair.
struct ClusterLink {
  std::int32_t cluster = 0;
  /// Total graph weight between the two clusters.
  double weight = 0.0;
  /// The pair may be merged (shares a candidate pair).
  bool adjacent = false;
};

struct MergeTarget {
  std::int32_t target = 0;
  double delta = 0.0;
};

/// Live clustering during agglomeration: union-find over nodes, per-cluster
/// statistics and the aggregated inter-cluster weights.
class PartitionState {
 public:
  PartitionState(const WeightedGraph& graph, const Adjacency& candidates, double entropy_base = 2.0);

  std::size_t node_count() const { return parent_.size(); }
  std::size_t live_count() const { return live_.size(); }
  /// Live cluster ids, ascending.
  std::span<const std::int32_t> live_clusters() const { return live_; }
  bool is_live(std::int32_t id) const;

  const ClusterStats& stats(std::int32_t id) const;
  std::span<const ClusterLink> links(std::int32_t id) const;
  /// Total graph weight between two live clusters, 0 when none.
  double inter_weight(std::int32_t a, std::int32_t b) const;
  bool candidates_adjacent(std::int32_t a, std::int32_t b) const;

  /// Cluster containing `node`.
  std::int32_t cluster_of(std::int32_t node) const { return parent_[std::size_t(node)]; }
  /// Cluster id per node.
  std::span<const std::int32_t> assignment() const { return parent_; }

  double graph_volume() const { return volume_; }
  double entropy_base() const { return base_; }

  /// Best merge partner of live cluster p among its candidate neighbors.
  /// With `gated`, only strictly positive deltas qualify; otherwise the
  /// least harmful merge is returned. Ties go to the smaller target id.
  std::optional<MergeTarget> best_target(std::int32_t p, bool gated = true) const;

  /// One agglomeration round. Every live cluster picks its best target
  /// against the statistics frozen at round start; the picks are committed
  /// in descending delta order, skipping pairs already joined, until
  /// `target_count` clusters remain or the list is exhausted. At most
  /// `max_commits` merges are committed when given. Statistics and links of
  /// the merged clusters are then rebuilt.
  std::vector<MergeEvent> merge_round(std::size_t target_count, int round, bool gated = true, int threads = 0,
                                      std::optional<std::size_t> max_commits = std::nullopt);

 private:
  std::size_t position(std::int32_t id) const;
  void rebuild(int threads);

  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> position_;  // live position per cluster id, -1 if absorbed
  std::vector<std::int32_t> live_;
  std::vector<ClusterStats> stats_;     // per live position
  std::vector<std::size_t> link_offsets_;
  std::vector<ClusterLink> links_;
  double volume_ = 0.0;
  double base_ = 2.0;
};

struct SegmentOptions {
  int threads = 0;
  double entropy_base = 2.0;
};

struct SegmentResult {
  /// Per-node labels renumbered 0..K-1 in first-appearance scan order.
  std::vector<std::int32_t> labels;
  Dendrogram dendrogram;
  int rounds = 0;
  /// Rounds that had to run without the positive-delta gate.
  int forced_rounds = 0;
  /// Live cluster count before the first round and after each round.
  std::vector<std::size_t> live_history;
};

/// Agglomerates singletons down to exactly `k` clusters. Throws
/// std::invalid_argument for k outside [1, node count] and
/// std::runtime_error when the candidate relation is too disconnected to
/// reach k.
SegmentResult segment(const WeightedGraph& graph, const Adjacency& candidates, std::size_t k,
                      const SegmentOptions& options = {});

struct ImageSegmentation {
  LabelMap labels;
  Dendrogram dendrogram;
  int rounds = 0;
  int forced_rounds = 0;
  std::vector<std::size_t> live_history;
};

ImageSegmentation segment(const PixelGraph& graph, std::size_t k, const SegmentOptions& options = {});

/// Replays the first merges of `dendrogram` until `k` clusters are live.
std::vector<std::int32_t> extract_level(const Dendrogram& dendrogram, std::size_t k);
LabelMap extract_level(const Dendrogram& dendrogram, int width, int height, std::size_t k);

/// Renumbers arbitrary ids to 0..L-1 in order of first appearance.
std::vector<std::int32_t> renumber_scan_order(std::span<const std::int32_t> ids);

std::string dendrogram_to_json(const Dendrogram& dendrogram);
Dendrogram dendrogram_from_json(const std::string& text);
void write_dendrogram(const std::filesystem::path& path, const Dendrogram& dendrogram);

}  // namespace sithss
