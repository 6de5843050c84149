#include "sithss/pixel_graph.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sithss/parallel.hpp"

namespace sithss {

namespace {

constexpr double kUniformMean = 1e-12;

struct Offset {
  int dy;
  int dx;
  double spatial;
};

// Offsets with (dy, dx) > (0, 0) lexicographically: each undirected edge once.
std::vector<Offset> half_window(int r) {
  std::vector<Offset> out;
  for (int dy = 0; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dy == 0 && dx <= 0) continue;
      out.push_back({dy, dx, std::sqrt(double(dy * dy + dx * dx))});
    }
  }
  return out;
}

double color_distance_sq(const Lab& a, const Lab& b) {
  const double dl = a.l - b.l;
  const double da = a.a - b.a;
  const double db = a.b - b.b;
  return dl * dl + da * da + db * db;
}

std::size_t row_degree_count(int row, int col, int r, int width, int height) {
  const int rows = std::min(row + r, height - 1) - std::max(row - r, 0) + 1;
  const int cols = std::min(col + r, width - 1) - std::max(col - r, 0) + 1;
  return static_cast<std::size_t>(rows) * cols - 1;
}

void check_image(const LabImage& image) {
  if (image.width < 2 || image.height < 2) throw std::invalid_argument("image too small: need at least 2x2 pixels");
  if (image.lab.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw std::invalid_argument("image buffer does not match its dimensions");
  }
}

// Visits the radius-r row of `node` in row-major order, calling f(neighbor, rho).
template <class F>
void for_each_in_window(const LabImage& image, int r, std::int32_t node, F&& f) {
  const int w = image.width;
  const int h = image.height;
  const int row = node / w;
  const int col = node % w;
  const Lab& ci = image.lab[static_cast<std::size_t>(node)];
  const int y0 = std::max(row - r, 0);
  const int y1 = std::min(row + r, h - 1);
  const int x0 = std::max(col - r, 0);
  const int x1 = std::min(col + r, w - 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (y == row && x == col) continue;
      const auto j = static_cast<std::int32_t>(y * w + x);
      const int dy = y - row;
      const int dx = x - col;
      const double rho = color_distance_sq(ci, image.lab[static_cast<std::size_t>(j)]) *
                         std::sqrt(double(dy * dy + dx * dx));
      f(j, rho);
    }
  }
}

double resolve_mean(const LabImage& image, int r, int threads, std::optional<double> normalizer) {
  return normalizer ? *normalizer : mean_edge_distance(image, r, threads);
}

std::vector<double> degrees_at_radius(const LabImage& image, int r, double t, double mean, int threads) {
  std::vector<double> degree(image.size(), 0.0);
  parallel_chunks(image.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for_each_in_window(image, r, static_cast<std::int32_t>(i),
                         [&](std::int32_t, double rho) { sum += weight_from_distance(rho, t, mean); });
      degree[i] = sum;
    }
  });
  return degree;
}

}  // namespace

void GraphConfig::validate() const {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("t must be a positive finite number");
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
  if (r_max < 1 || r_max > 16) throw std::invalid_argument("r_max must be in [1, 16]");
  if (!(entropy_base > 1.0)) throw std::invalid_argument("entropy_base must exceed 1");
}

double pixel_distance(const Lab& ci, PixelPos si, const Lab& cj, PixelPos sj) {
  const double dy = si.row - sj.row;
  const double dx = si.col - sj.col;
  return color_distance_sq(ci, cj) * std::sqrt(dy * dy + dx * dx);
}

double weight_from_distance(double rho, double t, double mean_rho) {
  if (mean_rho < kUniformMean) return 1.0;
  return std::max(std::exp(-rho / (t * mean_rho)), std::numeric_limits<double>::min());
}

std::vector<double> edge_weights(std::span<const double> distances, double t) {
  if (distances.empty()) throw std::invalid_argument("edge_weights: no distances");
  const double mean = std::accumulate(distances.begin(), distances.end(), 0.0) / double(distances.size());
  std::vector<double> out;
  out.reserve(distances.size());
  for (double rho : distances) out.push_back(weight_from_distance(rho, t, mean));
  return out;
}

std::vector<std::int32_t> neighborhood(std::int32_t index, int r, int width, int height) {
  if (r < 1) throw std::invalid_argument("neighborhood radius must be >= 1");
  if (index < 0 || index >= width * height) throw std::out_of_range("pixel index out of range");
  std::vector<std::int32_t> out;
  const int row = index / width;
  const int col = index % width;
  for (int y = std::max(row - r, 0); y <= std::min(row + r, height - 1); ++y) {
    for (int x = std::max(col - r, 0); x <= std::min(col + r, width - 1); ++x) {
      if (y != row || x != col) out.push_back(y * width + x);
    }
  }
  return out;
}

double mean_edge_distance(const LabImage& image, int r, int threads) {
  check_image(image);
  const int w = image.width;
  const int h = image.height;
  const auto window = half_window(r);
  std::vector<double> row_sum(static_cast<std::size_t>(h), 0.0);
  std::vector<std::size_t> row_count(static_cast<std::size_t>(h), 0);
  parallel_chunks(static_cast<std::size_t>(h), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t y = begin; y < end; ++y) {
      const int row = static_cast<int>(y);
      double sum = 0.0;
      std::size_t count = 0;
      for (int col = 0; col < w; ++col) {
        const Lab& ci = image.at(row, col);
        for (const Offset& o : window) {
          const int yy = row + o.dy;
          const int xx = col + o.dx;
          if (yy >= h || xx < 0 || xx >= w) continue;
          sum += color_distance_sq(ci, image.at(yy, xx)) * o.spatial;
          ++count;
        }
      }
      row_sum[y] = sum;
      row_count[y] = count;
    }
  });
  const double total = std::accumulate(row_sum.begin(), row_sum.end(), 0.0);
  const std::size_t count = std::accumulate(row_count.begin(), row_count.end(), std::size_t{0});
  return total / double(count);
}

PixelGraph build_graph_at_radius(const LabImage& image, int r, double t, int threads,
                                 std::optional<double> normalizer) {
  check_image(image);
  if (r < 1) throw std::invalid_argument("radius must be >= 1");
  const int w = image.width;
  const int h = image.height;
  const std::size_t n = image.size();
  if (n > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw std::invalid_argument("image has too many pixels");
  }
  const double mean = resolve_mean(image, r, threads, normalizer);

  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i + 1] = offsets[i] + row_degree_count(int(i) / w, int(i) % w, r, w, h);
  }
  std::vector<std::int32_t> neighbors(offsets.back());
  std::vector<double> weights(offsets.back());
  parallel_chunks(n, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::size_t k = offsets[i];
      for_each_in_window(image, r, static_cast<std::int32_t>(i), [&](std::int32_t j, double rho) {
        neighbors[k] = j;
        weights[k] = weight_from_distance(rho, t, mean);
        ++k;
      });
    }
  });

  PixelGraph out;
  out.width = w;
  out.height = h;
  out.radius = r;
  out.mean_distance = mean;
  out.graph = WeightedGraph(std::move(offsets), std::move(neighbors), std::move(weights));
  return out;
}

double one_dim_se(std::span<const double> degrees, double base) {
  double volume = 0.0;
  for (double d : degrees) volume += d;
  if (!(volume > 0.0)) throw std::domain_error("one_dim_se: graph has zero volume");
  const double inv_log_base = 1.0 / std::log(base);
  double h = 0.0;
  for (double d : degrees) {
    if (d <= 0.0) continue;
    const double p = d / volume;
    h -= p * std::log(p) * inv_log_base;
  }
  return h;
}

double one_dim_se(const WeightedGraph& graph, double base) { return one_dim_se(graph.degrees(), base); }

double one_dim_se_at_radius(const LabImage& image, int r, double t, int threads, double base,
                            std::optional<double> normalizer) {
  check_image(image);
  const double mean = resolve_mean(image, r, threads, normalizer);
  return one_dim_se(degrees_at_radius(image, r, t, mean, threads), base);
}

RadiusSelection select_radius(const LabImage& image, const GraphConfig& config, int threads) {
  config.validate();
  check_image(image);

  std::optional<double> normalizer;
  if (config.freeze_normalizer) normalizer = mean_edge_distance(image, 1, threads);

  RadiusSelection out;
  out.plateau_found = false;
  out.entropies.push_back(one_dim_se_at_radius(image, 1, config.t, threads, config.entropy_base, normalizer));
  int chosen = config.r_max;
  if (config.r_max == 1) {
    out.plateau_found = true;
  }
  for (int r = 2; r <= config.r_max; ++r) {
    out.entropies.push_back(one_dim_se_at_radius(image, r, config.t, threads, config.entropy_base, normalizer));
    const double gain = out.entropies[r - 1] - out.entropies[r - 2];
    if (gain <= config.tau) {
      chosen = r - 1;
      out.plateau_found = true;
      break;
    }
  }
  if (!out.plateau_found) {
    std::cerr << "warning: 1D structural entropy still rising by more than tau=" << config.tau
              << " at r_max=" << config.r_max << "; using radius " << config.r_max << "\n";
  }
  out.radius = chosen;
  out.graph = build_graph_at_radius(image, chosen, config.t, threads, normalizer);
  return out;
}

}  // namespace sithss
