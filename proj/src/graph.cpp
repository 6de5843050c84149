#include "sithss/graph.hpp"

#include <algorithm>
#include <string>

namespace sithss {

WeightedGraph::WeightedGraph(std::vector<std::size_t> offsets, std::vector<std::int32_t> neighbors,
                             std::vector<double> weights)
    : offsets_(std::move(offsets)), neighbors_(std::move(neighbors)), weights_(std::move(weights)) {
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != neighbors_.size() ||
      neighbors_.size() != weights_.size()) {
    throw std::invalid_argument("malformed compressed-row graph");
  }
  const std::size_t n = offsets_.size() - 1;
  degree_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) sum += weights_[k];
    degree_[i] = sum;
  }
  volume_ = 0.0;
  for (double d : degree_) volume_ += d;
}

WeightedGraph WeightedGraph::from_edges(std::size_t node_count, std::span<const WeightedEdge> edges) {
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows(node_count);
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || std::size_t(e.u) >= node_count || std::size_t(e.v) >= node_count) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.u == e.v) throw std::invalid_argument("self-loop at node " + std::to_string(e.u));
    if (!(e.weight > 0.0)) throw std::invalid_argument("edge weights must be positive");
    rows[std::size_t(e.u)].emplace_back(e.v, e.weight);
    rows[std::size_t(e.v)].emplace_back(e.u, e.weight);
  }
  std::vector<std::size_t> offsets(node_count + 1, 0);
  std::vector<std::int32_t> neighbors;
  std::vector<double> weights;
  for (std::size_t i = 0; i < node_count; ++i) {
    auto& row = rows[i];
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0 && row[k].first == row[k - 1].first) {
        throw std::invalid_argument("duplicate edge (" + std::to_string(i) + "," + std::to_string(row[k].first) + ")");
      }
      neighbors.push_back(row[k].first);
      weights.push_back(row[k].second);
    }
    offsets[i + 1] = neighbors.size();
  }
  return WeightedGraph(std::move(offsets), std::move(neighbors), std::move(weights));
}

std::vector<WeightedEdge> WeightedGraph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < node_count(); ++i) {
    const auto nbrs = neighbors(i);
    const auto ws = weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (std::size_t(nbrs[k]) > i) out.push_back({std::int32_t(i), nbrs[k], ws[k]});
    }
  }
  return out;
}

}  // namespace sithss
