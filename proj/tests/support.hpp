#pragma once

// Test-only helpers: synthetic inputs and reference computations that do not
// share code with the library paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <unistd.h>
#include <vector>

#include "sithss/graph.hpp"
#include "sithss/image_io.hpp"

namespace sithss::testing {

inline WeightedGraph random_connected_graph(std::mt19937_64& rng, std::size_t n, double extra_edge_p = 0.3) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::set<std::pair<int, int>> seen;
  std::vector<WeightedEdge> edges;
  auto add = [&](int a, int b) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    if (!seen.emplace(a, b).second) return;
    edges.push_back({a, b, 1.0 - unit(rng)});  // (0, 1]
  };
  for (std::size_t i = 1; i < n; ++i) {
    add(int(i), int(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (unit(rng) < extra_edge_p) add(int(i), int(j));
    }
  }
  return WeightedGraph::from_edges(n, edges);
}

/// Two cliques of sizes a and b (weight 1 inside) joined by one edge.
inline WeightedGraph planted_two_cliques(std::size_t a, std::size_t b, double bridge = 0.01) {
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = i + 1; j < a; ++j) edges.push_back({int(i), int(j), 1.0});
  for (std::size_t i = a; i < a + b; ++i)
    for (std::size_t j = i + 1; j < a + b; ++j) edges.push_back({int(i), int(j), 1.0});
  edges.push_back({int(a - 1), int(a), bridge});
  return WeightedGraph::from_edges(a + b, edges);
}

/// Two-level encoding tree entropy summed node by node over the tree:
/// each non-root node contributes -(g/V) log2(V_node / V_parent), where a
/// leaf's cut is its degree. Works from the raw edge list only.
inline double tree_form_2dse(std::size_t n, const std::vector<WeightedEdge>& edges,
                             const std::vector<std::int32_t>& assignment) {
  std::vector<double> degree(n, 0.0);
  std::map<std::int32_t, double> vol, cut;
  for (const auto& e : edges) {
    degree[std::size_t(e.u)] += e.weight;
    degree[std::size_t(e.v)] += e.weight;
    const auto a = assignment[std::size_t(e.u)];
    const auto b = assignment[std::size_t(e.v)];
    if (a != b) {
      cut[a] += e.weight;
      cut[b] += e.weight;
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    vol[assignment[i]] += degree[i];
    total += degree[i];
  }
  double h = 0.0;
  for (const auto& [id, v] : vol) {
    const double g = cut.count(id) ? cut[id] : 0.0;
    if (v > 0) h += -(g / total) * std::log2(v / total);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (degree[i] > 0) h += -(degree[i] / total) * std::log2(degree[i] / vol[assignment[i]]);
  }
  return h;
}

inline double tree_form_2dse(const WeightedGraph& g, const std::vector<std::int32_t>& assignment) {
  return tree_form_2dse(g.node_count(), g.edges(), assignment);
}

/// Degree-distribution entropy in bits from the raw edge list.
inline double direct_1dse(std::size_t n, const std::vector<WeightedEdge>& edges) {
  std::vector<double> degree(n, 0.0);
  double total = 0.0;
  for (const auto& e : edges) {
    degree[std::size_t(e.u)] += e.weight;
    degree[std::size_t(e.v)] += e.weight;
    total += 2 * e.weight;
  }
  double h = 0.0;
  for (double d : degree)
    if (d > 0) h -= d / total * std::log2(d / total);
  return h;
}

inline RgbImage solid(int w, int h, Rgb c) {
  RgbImage img;
  img.width = w;
  img.height = h;
  img.pixels.assign(std::size_t(w) * h, c);
  return img;
}

/// Left half black, right half white.
inline RgbImage half_black_white(int w, int h) {
  RgbImage img = solid(w, h, {0, 0, 0});
  for (int r = 0; r < h; ++r)
    for (int c = w / 2; c < w; ++c) img.at(r, c) = {255, 255, 255};
  return img;
}

inline RgbImage noise(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  RgbImage img = solid(w, h, {0, 0, 0});
  for (auto& p : img.pixels) p = {std::uint8_t(byte(rng)), std::uint8_t(byte(rng)), std::uint8_t(byte(rng))};
  return img;
}

/// Piecewise-smooth scene: a color gradient background, overlapping
/// ellipses of flat color, and mild additive sensor noise.
inline RgbImage synthetic_scene(int w, int h, std::uint64_t seed, int blobs = 25) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> grain(0.0, 6.0);
  std::vector<double> px(std::size_t(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double* p = &px[(std::size_t(y) * w + x) * 3];
      p[0] = 120 + 60 * std::sin(x / 70.0);
      p[1] = 100 + 50 * std::cos(y / 50.0);
      p[2] = 140 + 40 * std::sin((x + y) / 90.0);
    }
  }
  const double scale = std::min(w, h) / 321.0;
  for (int b = 0; b < blobs; ++b) {
    const double cy = unit(rng) * h, cx = unit(rng) * w;
    const double ry = (10 + 70 * unit(rng)) * scale, rx = (10 + 70 * unit(rng)) * scale;
    const double col[3] = {255 * unit(rng), 255 * unit(rng), 255 * unit(rng)};
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dy = (y - cy) / ry, dx = (x - cx) / rx;
        if (dy * dy + dx * dx < 1.0) {
          double* p = &px[(std::size_t(y) * w + x) * 3];
          p[0] = col[0];
          p[1] = col[1];
          p[2] = col[2];
        }
      }
    }
  }
  RgbImage img = solid(w, h, {0, 0, 0});
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      img.pixels[i][std::size_t(c)] = std::uint8_t(std::clamp(std::lround(px[i * 3 + std::size_t(c)] + grain(rng)), 0L, 255L));
    }
  }
  return img;
}

/// Number of 8-connected components of each label; all ones means every
/// label class is connected.
inline std::map<std::int32_t, int> components_per_label(const LabelMap& m) {
  std::vector<char> seen(m.size(), 0);
  std::map<std::int32_t, int> out;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < m.size(); ++s) {
    if (seen[s]) continue;
    const auto label = m.labels[s];
    ++out[label];
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      const int r = int(i) / m.width, c = int(i) % m.width;
      for (int y = std::max(r - 1, 0); y <= std::min(r + 1, m.height - 1); ++y) {
        for (int x = std::max(c - 1, 0); x <= std::min(c + 1, m.width - 1); ++x) {
          const std::size_t j = std::size_t(y) * m.width + x;
          if (!seen[j] && m.labels[j] == label) {
            seen[j] = 1;
            stack.push_back(j);
          }
        }
      }
    }
  }
  return out;
}

inline bool all_connected(const LabelMap& m) {
  for (const auto& [label, count] : components_per_label(m))
    if (count != 1) return false;
  return true;
}

/// true when every fine label lies inside exactly one coarse label.
inline bool nested(const std::vector<std::int32_t>& fine, const std::vector<std::int32_t>& coarse) {
  std::map<std::int32_t, std::int32_t> parent;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    auto [it, inserted] = parent.emplace(fine[i], coarse[i]);
    if (it->second != coarse[i]) return false;
  }
  return true;
}

inline std::size_t distinct(const std::vector<std::int32_t>& v) { return std::set<std::int32_t>(v.begin(), v.end()).size(); }

inline LabelMap label_map(int w, int h, std::vector<std::int32_t> labels) {
  LabelMap m;
  m.width = w;
  m.height = h;
  m.labels = std::move(labels);
  return m;
}

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("sithss_test_" + std::to_string(std::random_device{}()) + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace sithss::testing
