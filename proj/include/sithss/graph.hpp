#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sithss {

struct WeightedEdge {
  std::int32_t u = 0;
  std::int32_t v = 0;
  double weight = 0.0;
};

/// Undirected weighted graph in compressed-row form. Every undirected edge is
/// stored once in each endpoint's row.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Builds from raw CSR arrays and fills degrees and volume.
  WeightedGraph(std::vector<std::size_t> offsets, std::vector<std::int32_t> neighbors, std::vector<double> weights);

  /// Builds from an undirected edge list. Rejects self-loops, duplicate pairs
  /// and nonpositive weights.
  static WeightedGraph from_edges(std::size_t node_count, std::span<const WeightedEdge> edges);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  /// Undirected edge count.
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  std::span<const std::int32_t> neighbors(std::size_t node) const {
    return {neighbors_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
  }
  std::span<const double> weights(std::size_t node) const {
    return {weights_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
  }

  double degree(std::size_t node) const { return degree_[node]; }
  std::span<const double> degrees() const { return degree_; }
  double volume() const { return volume_; }

  /// Every undirected edge once, with u < v, in row order.
  std::vector<WeightedEdge> edges() const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::int32_t> neighbors_;
  std::vector<double> weights_;
  std::vector<double> degree_;
  double volume_ = 0.0;
};

}  // namespace sithss
