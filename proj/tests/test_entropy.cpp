#include <cmath>

#include <gtest/gtest.h>

#include "sithss/entropy.hpp"
#include "sithss/pixel_graph.hpp"
#include "support.hpp"

using namespace sithss;
namespace st = sithss::testing;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

std::vector<std::int32_t> random_assignment(std::mt19937_64& rng, std::size_t n, std::size_t blocks) {
  std::vector<std::int32_t> a(n);
  for (auto& v : a) v = std::int32_t(rng() % blocks);
  return a;
}

}  // namespace

TEST(TwoDimSe, CollapseIdentities) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = st::random_connected_graph(rng, 2 + rng() % 29);
    const double h1 = one_dim_se(g);
    EXPECT_LT(rel_err(two_dim_se(g, Partition::single_cluster(g)), h1), 1e-9);
    EXPECT_LT(rel_err(two_dim_se(g, Partition::singletons(g)), h1), 1e-9);
  }
}

TEST(TwoDimSe, TwoTrianglesMatchTreeForm) {
  const std::vector<WeightedEdge> edges{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}, {2, 3, 1}};
  const auto g = WeightedGraph::from_edges(6, edges);
  const std::vector<std::int32_t> split{0, 0, 0, 1, 1, 1};
  const double expected = st::tree_form_2dse(6, edges, split);
  EXPECT_NEAR(two_dim_se(g, Partition::from_assignment(g, split)), expected, 1e-12);
  // Hand evaluation: V = 14, each side V_p = 7, g_p = 1; degrees 2,2,3 per side.
  const double hand = -2 * ((1.0 / 14) * std::log2(7.0 / 14) + (2 * (2.0 / 14) * std::log2(2.0 / 7) +
                                                                 (3.0 / 14) * std::log2(3.0 / 7)));
  EXPECT_NEAR(expected, hand, 1e-12);
}

TEST(TwoDimSe, RandomPartitionsMatchTreeForm) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = st::random_connected_graph(rng, 2 + rng() % 29);
    const auto a = random_assignment(rng, g.node_count(), 1 + rng() % 6);
    const double h = two_dim_se(g, Partition::from_assignment(g, a));
    EXPECT_LT(rel_err(h, st::tree_form_2dse(g, a)), 1e-9);
    EXPECT_GE(h, 0.0);
  }
}

TEST(TwoDimSe, RejectsInconsistentPartitions) {
  std::mt19937_64 rng(3);
  const auto g = st::random_connected_graph(rng, 6);
  Partition p = Partition::singletons(g);
  p.assignment.pop_back();
  EXPECT_THROW(two_dim_se(g, p), InconsistentPartition);
  p = Partition::singletons(g);
  p.assignment[0] = 99;
  EXPECT_THROW(two_dim_se(g, p), InconsistentPartition);
  p = Partition::singletons(g);
  p.clusters[42] = {1.0, 0.0, 1};
  EXPECT_THROW(two_dim_se(g, p), InconsistentPartition);
  p = Partition::singletons(g);
  p.clusters[0].volume *= 2;
  EXPECT_THROW(two_dim_se(g, p), InconsistentPartition);
}

TEST(MergeDelta, SingleEdgeIsZero) {
  const ClusterStats s{1.0, 1.0, 1};
  EXPECT_NEAR(merge_delta(s, s, 1.0, 2.0), 0.0, 1e-15);
}

TEST(MergeDelta, NonAdjacentClustersMatchDirectDifference) {
  const std::vector<WeightedEdge> path{{0, 1, 0.7}, {1, 2, 0.4}, {2, 3, 0.9}, {3, 4, 0.2}};
  const auto g = WeightedGraph::from_edges(5, path);
  const std::vector<std::int32_t> before{0, 1, 2, 3, 4};
  const std::vector<std::int32_t> after{0, 1, 2, 3, 0};
  const auto p = Partition::from_assignment(g, before);
  const double delta = merge_delta(p.clusters.at(0), p.clusters.at(4), 0.0, g.volume());
  EXPECT_NEAR(delta, st::tree_form_2dse(g, before) - st::tree_form_2dse(g, after), 1e-12);
}

TEST(MergeDelta, EqualsEntropyDifferenceOnRandomGraphs) {
  std::mt19937_64 rng(4);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto g = st::random_connected_graph(rng, 2 + rng() % 29);
    const auto a = random_assignment(rng, g.node_count(), 1 + rng() % 8);
    const auto p = Partition::from_assignment(g, a);
    // Pick an edge whose endpoints lie in different clusters.
    std::vector<WeightedEdge> crossing;
    for (const auto& e : g.edges())
      if (a[std::size_t(e.u)] != a[std::size_t(e.v)]) crossing.push_back(e);
    if (crossing.empty()) continue;
    const auto e = crossing[rng() % crossing.size()];
    const auto ci = a[std::size_t(e.u)], cj = a[std::size_t(e.v)];
    double w = 0.0;
    for (const auto& f : g.edges()) {
      const auto x = a[std::size_t(f.u)], y = a[std::size_t(f.v)];
      if ((x == ci && y == cj) || (x == cj && y == ci)) w += f.weight;
    }
    auto merged = a;
    for (auto& v : merged)
      if (v == cj) v = ci;
    const double direct = st::tree_form_2dse(g, a) - st::tree_form_2dse(g, merged);
    const double delta = merge_delta(p.clusters.at(ci), p.clusters.at(cj), w, g.volume());
    EXPECT_LT(std::abs(delta - direct), 1e-9 * std::max(1.0, std::abs(direct))) << trial;
    ++checked;

    const auto ms = merged_stats(p.clusters.at(ci), p.clusters.at(cj), w);
    const auto recomputed = Partition::from_assignment(g, merged).clusters.at(ci);
    EXPECT_LT(rel_err(ms.cut, recomputed.cut), 1e-9);
    EXPECT_EQ(ms.volume, p.clusters.at(ci).volume + p.clusters.at(cj).volume);
    EXPECT_EQ(ms.size, recomputed.size);
  }
  EXPECT_GE(checked, 100);
}

TEST(MergeDelta, ArgmaxInvariantUnderWeightScaling) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = st::random_connected_graph(rng, 12 + rng() % 18, 0.4);
    const double alpha = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng));
    std::vector<WeightedEdge> scaled_edges;
    for (auto e : g.edges()) {
      e.weight *= alpha;
      scaled_edges.push_back(e);
    }
    const auto gs = WeightedGraph::from_edges(g.node_count(), scaled_edges);
    const auto a = Partition::singletons(g);
    const auto b = Partition::singletons(gs);
    auto best_for = [](const WeightedGraph& graph, const Partition& p, std::int32_t node) {
      std::int32_t best = -1;
      double best_delta = -1e300;
      const auto nbrs = graph.neighbors(std::size_t(node));
      const auto ws = graph.weights(std::size_t(node));
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        const double d = merge_delta(p.clusters.at(node), p.clusters.at(nbrs[k]), ws[k], graph.volume());
        if (d > best_delta) {
          best_delta = d;
          best = nbrs[k];
        }
      }
      return best;
    };
    for (std::int32_t v = 0; v < std::int32_t(g.node_count()); ++v) EXPECT_EQ(best_for(g, a, v), best_for(gs, b, v));
  }
}

TEST(MergedStats, Examples) {
  const ClusterStats a{0.8, 0.8, 1}, b{0.8, 0.8, 1};
  EXPECT_EQ(merged_stats(a, b, 0.8).cut, 0.0);
  const ClusterStats c{5.0, 1.5, 3}, d{4.0, 2.5, 2};
  const auto m = merged_stats(c, d, 0.0);
  EXPECT_EQ(m.cut, 4.0);
  EXPECT_EQ(m.volume, 9.0);
  EXPECT_EQ(m.size, 5);
  EXPECT_THROW(merged_stats(c, d, 3.0), std::domain_error);
}

TEST(BruteForce, TwoNodeTieResolvesToSingleCluster) {
  const std::vector<WeightedEdge> e{{0, 1, 1.0}};
  const auto g = WeightedGraph::from_edges(2, e);
  const auto best = brute_force_min_2dse(g);
  EXPECT_EQ(best.partition.assignment, (std::vector<std::int32_t>{0, 0}));
  EXPECT_NEAR(best.entropy, 1.0, 1e-12);
}

TEST(BruteForce, PlantedSplit) {
  const auto g = st::planted_two_cliques(4, 4);
  const auto best = brute_force_min_2dse(g, 2);
  EXPECT_EQ(best.partition.assignment, (std::vector<std::int32_t>{0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_NEAR(best.entropy, st::tree_form_2dse(g, best.partition.assignment), 1e-12);
}

TEST(BruteForce, AllBlocksIsSingletons) {
  std::mt19937_64 rng(6);
  const auto g = st::random_connected_graph(rng, 7);
  const auto best = brute_force_min_2dse(g, 7);
  EXPECT_EQ(best.partition.assignment, (std::vector<std::int32_t>{0, 1, 2, 3, 4, 5, 6}));
  EXPECT_NEAR(best.entropy, one_dim_se(g), 1e-12);
}

TEST(BruteForce, NeverWorseThanRandomPartitions) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = st::random_connected_graph(rng, 3 + rng() % 6);
    const auto free_best = brute_force_min_2dse(g);
    EXPECT_NEAR(free_best.entropy, st::tree_form_2dse(g, free_best.partition.assignment), 1e-12);
    for (int s = 0; s < 50; ++s) {
      const auto a = random_assignment(rng, g.node_count(), 1 + rng() % g.node_count());
      EXPECT_LE(free_best.entropy, st::tree_form_2dse(g, a) + 1e-12);
    }
  }
}

TEST(BruteForce, Limits) {
  std::mt19937_64 rng(8);
  EXPECT_THROW(brute_force_min_2dse(st::random_connected_graph(rng, 13)), std::invalid_argument);
  EXPECT_THROW(brute_force_min_2dse(st::random_connected_graph(rng, 5), 6), std::invalid_argument);
  EXPECT_THROW(brute_force_min_2dse(st::random_connected_graph(rng, 5), 0), std::invalid_argument);
}

TEST(BruteForce, UnbalancedPlantedOptimumSplitsLargerClique) {
  // A 2-clique bridged to a 6-clique: the two-block minimum carves three
  // nodes off the large clique rather than cutting the bridge.
  const auto g = st::planted_two_cliques(2, 6);
  const auto best = brute_force_min_2dse(g, 2);
  const std::vector<std::int32_t> planted{0, 0, 1, 1, 1, 1, 1, 1};
  EXPECT_NE(best.partition.assignment, planted);
  EXPECT_LT(best.entropy, st::tree_form_2dse(g, planted));
}
