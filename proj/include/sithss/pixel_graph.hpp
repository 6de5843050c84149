#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sithss/graph.hpp"
#include "sithss/image_io.hpp"

namespace sithss {

/// Graph-construction parameters.
///
/// t scales the mean edge distance inside the weight kernel, tau is the
/// smallest 1D-entropy gain (in bits, or in `entropy_base` units) that still
/// justifies growing the neighborhood, r_max caps the search.
struct GraphConfig {
  double t = 0.1;
  double tau = 2e-7;
  int r_max = 5;
  /// Logarithm base of the entropy used for the plateau test.
  double entropy_base = 2.0;
  /// Reuse the radius-1 mean distance as the normalizer at every radius
  /// instead of recomputing it over each radius' own edge set.
  bool freeze_normalizer = false;

  /// Throws std::invalid_argument unless t > 0, tau > 0 (or +inf) and 1 <= r_max <= 16.
  void validate() const;
};

struct PixelPos {
  int row = 0;
  int col = 0;
};

/// Squared color distance times Euclidean pixel distance.
double pixel_distance(const Lab& ci, PixelPos si, const Lab& cj, PixelPos sj);

/// exp(-rho / (t * mean)); mean below 1e-12 maps every weight to 1. Results
/// are floored at the smallest normal double so weights stay strictly positive.
double weight_from_distance(double rho, double t, double mean_rho);

std::vector<double> edge_weights(std::span<const double> distances, double t);

/// Pixels within Chebyshev distance r of `index`, excluding itself, in
/// row-major order.
std::vector<std::int32_t> neighborhood(std::int32_t index, int r, int width, int height);

struct PixelGraph {
  int width = 0;
  int height = 0;
  int radius = 0;
  /// Mean edge distance used by the weight kernel.
  double mean_distance = 0.0;
  WeightedGraph graph;

  std::size_t node_count() const { return graph.node_count(); }
};

/// Graph over every pixel pair at Chebyshev distance <= r.
/// `normalizer` overrides the mean distance of this radius' edge set.
PixelGraph build_graph_at_radius(const LabImage& image, int r, double t, int threads = 0,
                                 std::optional<double> normalizer = std::nullopt);

/// Mean pixel_distance over the undirected radius-r edge set.
double mean_edge_distance(const LabImage& image, int r, int threads = 0);

/// -sum_i (d_i/V) log(d_i/V) in the given base. Throws on zero volume.
double one_dim_se(const WeightedGraph& graph, double base = 2.0);
double one_dim_se(std::span<const double> degrees, double base = 2.0);

/// 1D entropy of the radius-r graph without materializing it; equals
/// one_dim_se(build_graph_at_radius(image, r, t).graph) bit for bit.
double one_dim_se_at_radius(const LabImage& image, int r, double t, int threads = 0, double base = 2.0,
                            std::optional<double> normalizer = std::nullopt);

struct RadiusSelection {
  int radius = 1;
  /// entropies[k] is the 1D entropy at radius k + 1, for every radius scanned.
  std::vector<double> entropies;
  /// false when the scan reached r_max without the gain dropping to tau.
  bool plateau_found = true;
  PixelGraph graph;
};

/// Scans r = 1, 2, ...; at the first r >= 2 whose entropy gain over r-1 is
/// <= tau, returns r-1 and its graph. Falls back to r_max with a warning on
/// stderr when no plateau shows up.
RadiusSelection select_radius(const LabImage& image, const GraphConfig& config, int threads = 0);

}  // namespace sithss
