#include "sithss/partitioner.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "sithss/parallel.hpp"

namespace sithss {

namespace {

struct Candidate {
  std::int32_t source;
  std::int32_t target;
  double delta;
};

std::int32_t find_root(std::vector<std::int32_t>& parent, std::int32_t x) {
  std::int32_t root = x;
  while (parent[std::size_t(root)] != root) root = parent[std::size_t(root)];
  while (parent[std::size_t(x)] != root) {
    const std::int32_t next = parent[std::size_t(x)];
    parent[std::size_t(x)] = root;
    x = next;
  }
  return root;
}

}  // namespace

Adjacency lattice_adjacency(int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("lattice dimensions must be positive");
  Adjacency adj;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  adj.offsets.assign(n + 1, 0);
  adj.neighbors.reserve(8 * n);
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      for (int y = std::max(row - 1, 0); y <= std::min(row + 1, height - 1); ++y) {
        for (int x = std::max(col - 1, 0); x <= std::min(col + 1, width - 1); ++x) {
          if (y != row || x != col) adj.neighbors.push_back(y * width + x);
        }
      }
      adj.offsets[std::size_t(row) * width + col + 1] = adj.neighbors.size();
    }
  }
  return adj;
}

Adjacency graph_adjacency(const WeightedGraph& graph) {
  Adjacency adj;
  adj.offsets.assign(graph.node_count() + 1, 0);
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto row = graph.neighbors(i);
    adj.neighbors.insert(adj.neighbors.end(), row.begin(), row.end());
    adj.offsets[i + 1] = adj.neighbors.size();
  }
  return adj;
}

PartitionState::PartitionState(const WeightedGraph& graph, const Adjacency& candidates, double entropy_base)
    : volume_(graph.volume()), base_(entropy_base) {
  const std::size_t n = graph.node_count();
  if (candidates.node_count() != n) throw std::invalid_argument("candidate relation and graph differ in size");
  if (n == 0) throw std::invalid_argument("empty graph");
  if (!(volume_ > 0.0)) throw std::domain_error("graph has zero volume");

  parent_.resize(n);
  std::iota(parent_.begin(), parent_.end(), 0);
  position_ = parent_;
  live_ = parent_;
  stats_.resize(n);
  link_offsets_.assign(n + 1, 0);
  links_.reserve(2 * graph.edge_count() + n);

  std::vector<std::int32_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = links_.size();
    const auto nbrs = graph.neighbors(i);
    const auto ws = graph.weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const auto j = nbrs[k];
      if (std::size_t(j) == i) continue;
      if (slot[std::size_t(j)] < 0) {
        slot[std::size_t(j)] = static_cast<std::int32_t>(links_.size() - start);
        links_.push_back({j, ws[k], false});
      } else {
        links_[start + std::size_t(slot[std::size_t(j)])].weight += ws[k];
      }
    }
    for (const auto j : candidates.row(i)) {
      if (std::size_t(j) == i) continue;
      if (slot[std::size_t(j)] < 0) {
        slot[std::size_t(j)] = static_cast<std::int32_t>(links_.size() - start);
        links_.push_back({j, 0.0, true});
      } else {
        links_[start + std::size_t(slot[std::size_t(j)])].adjacent = true;
      }
    }
    for (std::size_t k = start; k < links_.size(); ++k) slot[std::size_t(links_[k].cluster)] = -1;
    link_offsets_[i + 1] = links_.size();
    stats_[i] = {graph.degree(i), graph.degree(i), 1};
  }
}

bool PartitionState::is_live(std::int32_t id) const {
  return id >= 0 && std::size_t(id) < position_.size() && position_[std::size_t(id)] >= 0;
}

std::size_t PartitionState::position(std::int32_t id) const {
  if (!is_live(id)) throw std::out_of_range("cluster " + std::to_string(id) + " is not live");
  return std::size_t(position_[std::size_t(id)]);
}

const ClusterStats& PartitionState::stats(std::int32_t id) const { return stats_[position(id)]; }

std::span<const ClusterLink> PartitionState::links(std::int32_t id) const {
  const std::size_t p = position(id);
  return {links_.data() + link_offsets_[p], link_offsets_[p + 1] - link_offsets_[p]};
}

double PartitionState::inter_weight(std::int32_t a, std::int32_t b) const {
  for (const auto& l : links(a)) {
    if (l.cluster == b) return l.weight;
  }
  position(b);
  return 0.0;
}

bool PartitionState::candidates_adjacent(std::int32_t a, std::int32_t b) const {
  for (const auto& l : links(a)) {
    if (l.cluster == b) return l.adjacent;
  }
  return false;
}

std::optional<MergeTarget> PartitionState::best_target(std::int32_t p, bool gated) const {
  const ClusterStats& own = stats(p);
  std::optional<MergeTarget> best;
  for (const auto& l : links(p)) {
    if (!l.adjacent) continue;
    const double delta = merge_delta(own, stats_[std::size_t(position_[std::size_t(l.cluster)])], l.weight, volume_,
                                     base_);
    if (gated && !(delta > 0.0)) continue;
    if (!best || delta > best->delta || (delta == best->delta && l.cluster < best->target)) {
      best = MergeTarget{l.cluster, delta};
    }
  }
  return best;
}

std::vector<MergeEvent> PartitionState::merge_round(std::size_t target_count, int round, bool gated, int threads,
                                                    std::optional<std::size_t> max_commits) {
  if (live_.size() <= target_count) {
    throw std::logic_error("merge_round: " + std::to_string(live_.size()) + " live clusters, target " +
                           std::to_string(target_count));
  }

  // Scoring against frozen round-start statistics.
  std::vector<std::optional<MergeTarget>> picks(live_.size());
  parallel_chunks(live_.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) picks[i] = best_target(live_[i], gated);
  });
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < live_.size(); ++i) {
    if (picks[i]) candidates.push_back({live_[i], picks[i]->target, picks[i]->delta});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    if (a.source != b.source) return a.source < b.source;
    return a.target < b.target;
  });

  // Sequential commit in total order.
  std::vector<MergeEvent> events;
  std::size_t live = live_.size();
  for (const Candidate& c : candidates) {
    if (live == target_count || (max_commits && events.size() == *max_commits)) break;
    const std::int32_t ra = find_root(parent_, c.source);
    const std::int32_t rb = find_root(parent_, c.target);
    if (ra == rb) continue;
    const std::int32_t survivor = std::min(ra, rb);
    const std::int32_t absorbed = std::max(ra, rb);
    parent_[std::size_t(absorbed)] = survivor;
    events.push_back({round, survivor, absorbed, c.delta});
    --live;
  }
  if (!events.empty()) rebuild(threads);
  return events;
}

void PartitionState::rebuild(int threads) {
  const std::size_t n = parent_.size();
  for (std::size_t i = 0; i < n; ++i) parent_[i] = find_root(parent_, parent_[i]);

  // Old live clusters grouped by their new root; ascending order is kept
  // because old live ids are ascending.
  std::vector<std::int32_t> next_live;
  for (const auto id : live_) {
    if (parent_[std::size_t(id)] == id) next_live.push_back(id);
  }
  std::vector<std::int32_t> next_position(n, -1);
  for (std::size_t p = 0; p < next_live.size(); ++p) next_position[std::size_t(next_live[p])] = std::int32_t(p);

  std::vector<std::size_t> member_offsets(next_live.size() + 1, 0);
  for (const auto id : live_) ++member_offsets[std::size_t(next_position[std::size_t(parent_[std::size_t(id)])]) + 1];
  std::partial_sum(member_offsets.begin(), member_offsets.end(), member_offsets.begin());
  std::vector<std::size_t> members(live_.size());
  {
    std::vector<std::size_t> fill(member_offsets.begin(), member_offsets.end() - 1);
    for (std::size_t old = 0; old < live_.size(); ++old) {
      const auto p = std::size_t(next_position[std::size_t(parent_[std::size_t(live_[old])])]);
      members[fill[p]++] = old;
    }
  }

  const std::size_t chunks = chunk_count(next_live.size(), threads);
  std::vector<std::vector<ClusterLink>> chunk_links(chunks);
  std::vector<std::vector<std::size_t>> chunk_lengths(chunks);
  std::vector<ClusterStats> next_stats(next_live.size());

  parallel_chunks(next_live.size(), threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    std::vector<std::int32_t> slot(n, -1);
    auto& out = chunk_links[chunk];
    auto& lengths = chunk_lengths[chunk];
    for (std::size_t p = begin; p < end; ++p) {
      const std::int32_t root = next_live[p];
      const std::size_t start = out.size();
      ClusterStats merged{0.0, 0.0, 0};
      double cut_sum = 0.0;
      double internal = 0.0;
      for (std::size_t m = member_offsets[p]; m < member_offsets[p + 1]; ++m) {
        const std::size_t old = members[m];
        const ClusterStats& s = stats_[old];
        merged.volume += s.volume;
        merged.size += s.size;
        cut_sum += s.cut;
        for (std::size_t k = link_offsets_[old]; k < link_offsets_[old + 1]; ++k) {
          const ClusterLink& l = links_[k];
          const std::int32_t other = parent_[std::size_t(l.cluster)];
          if (other == root) {
            internal += l.weight;
            continue;
          }
          auto& s_slot = slot[std::size_t(other)];
          if (s_slot < 0) {
            s_slot = static_cast<std::int32_t>(out.size() - start);
            out.push_back({other, l.weight, l.adjacent});
          } else {
            ClusterLink& acc = out[start + std::size_t(s_slot)];
            acc.weight += l.weight;
            acc.adjacent = acc.adjacent || l.adjacent;
          }
        }
      }
      for (std::size_t k = start; k < out.size(); ++k) slot[std::size_t(out[k].cluster)] = -1;
      // Internal links were seen from both endpoints: internal = 2 w_internal.
      merged.cut = cut_sum - internal;
      if (merged.cut < 0.0) {
        if (merged.cut < -1e-9 * std::max(1.0, cut_sum)) throw std::logic_error("negative cut after merge");
        merged.cut = 0.0;
      }
      next_stats[p] = merged;
      lengths.push_back(out.size() - start);
    }
  });

  std::vector<std::size_t> next_offsets(next_live.size() + 1, 0);
  std::vector<ClusterLink> next_links;
  std::size_t total = 0;
  for (const auto& c : chunk_links) total += c.size();
  next_links.reserve(total);
  std::size_t p = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    next_links.insert(next_links.end(), chunk_links[c].begin(), chunk_links[c].end());
    for (const auto len : chunk_lengths[c]) {
      next_offsets[p + 1] = next_offsets[p] + len;
      ++p;
    }
  }

  live_ = std::move(next_live);
  position_ = std::move(next_position);
  stats_ = std::move(next_stats);
  link_offsets_ = std::move(next_offsets);
  links_ = std::move(next_links);
}

std::vector<std::int32_t> renumber_scan_order(std::span<const std::int32_t> ids) {
  std::unordered_map<std::int32_t, std::int32_t> remap;
  std::vector<std::int32_t> out;
  out.reserve(ids.size());
  for (const auto id : ids) {
    auto [it, inserted] = remap.emplace(id, static_cast<std::int32_t>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

SegmentResult segment(const WeightedGraph& graph, const Adjacency& candidates, std::size_t k,
                      const SegmentOptions& options) {
  const std::size_t n = graph.node_count();
  if (k < 1 || k > n) {
    throw std::invalid_argument("target count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  PartitionState state(graph, candidates, options.entropy_base);
  SegmentResult result;
  result.dendrogram.initial_count = static_cast<std::int32_t>(n);
  result.live_history.push_back(state.live_count());

  while (state.live_count() > k) {
    const int round = result.rounds + 1;
    auto events = state.merge_round(k, round, true, options.threads);
    if (events.empty()) {
      // No merge lowers the entropy: fall back to least-harm merges so the
      // exact-k contract holds, then return to gated rounds.
      events = state.merge_round(k, round, false, options.threads);
      if (events.empty()) {
        throw std::runtime_error("cannot reach " + std::to_string(k) + " clusters: " +
                                 std::to_string(state.live_count()) +
                                 " remain with no candidate pairs between them");
      }
      ++result.forced_rounds;
    }
    result.rounds = round;
    result.dendrogram.events.insert(result.dendrogram.events.end(), events.begin(), events.end());
    result.live_history.push_back(state.live_count());
  }
  result.labels = renumber_scan_order(state.assignment());
  return result;
}

ImageSegmentation segment(const PixelGraph& graph, std::size_t k, const SegmentOptions& options) {
  auto raw = segment(graph.graph, lattice_adjacency(graph.width, graph.height), k, options);
  ImageSegmentation out;
  out.labels.width = graph.width;
  out.labels.height = graph.height;
  out.labels.labels = std::move(raw.labels);
  out.dendrogram = std::move(raw.dendrogram);
  out.rounds = raw.rounds;
  out.forced_rounds = raw.forced_rounds;
  out.live_history = std::move(raw.live_history);
  return out;
}

std::vector<std::int32_t> extract_level(const Dendrogram& dendrogram, std::size_t k) {
  const auto n = std::size_t(dendrogram.initial_count);
  if (k < dendrogram.final_count() || k > n) {
    throw std::invalid_argument("level " + std::to_string(k) + " outside [" + std::to_string(dendrogram.final_count()) +
                                ", " + std::to_string(n) + "]");
  }
  std::vector<std::int32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const std::size_t replay = n - k;
  for (std::size_t e = 0; e < replay; ++e) {
    const auto& ev = dendrogram.events[e];
    const auto a = find_root(parent, ev.survivor);
    const auto b = find_root(parent, ev.absorbed);
    if (a == b) throw std::invalid_argument("dendrogram merges a cluster with itself");
    parent[std::size_t(std::max(a, b))] = std::min(a, b);
  }
  for (std::size_t i = 0; i < n; ++i) parent[i] = find_root(parent, std::int32_t(i));
  return renumber_scan_order(parent);
}

LabelMap extract_level(const Dendrogram& dendrogram, int width, int height, std::size_t k) {
  if (static_cast<std::size_t>(width) * height != std::size_t(dendrogram.initial_count)) {
    throw std::invalid_argument("dendrogram does not match the image size");
  }
  LabelMap out;
  out.width = width;
  out.height = height;
  out.labels = extract_level(dendrogram, k);
  return out;
}

}  // namespace sithss
