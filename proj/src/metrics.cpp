#include "sithss/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

namespace sithss {

namespace {

void check_dims(const LabelMap& a, const LabelMap& b) {
  if (a.width != b.width || a.height != b.height || a.size() != b.size()) {
    throw DimensionMismatch("label maps differ in size: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                            " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
  }
  if (a.labels.empty()) throw DimensionMismatch("empty label map");
}

std::vector<std::int32_t> dense(const LabelMap& map, std::size_t& count) {
  std::unordered_map<std::int32_t, std::int32_t> remap;
  std::vector<std::int32_t> out;
  out.reserve(map.size());
  for (auto v : map.labels) out.push_back(remap.emplace(v, std::int32_t(remap.size())).first->second);
  count = remap.size();
  return out;
}

// Sparse overlap counts |p & g| plus marginal sizes.
struct Contingency {
  std::size_t superpixels = 0;
  std::size_t segments = 0;
  std::unordered_map<std::uint64_t, std::size_t> overlap;
  std::vector<std::size_t> superpixel_size;

  Contingency(const LabelMap& labels, const LabelMap& gt) {
    const auto p = dense(labels, superpixels);
    const auto g = dense(gt, segments);
    superpixel_size.assign(superpixels, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      ++overlap[(std::uint64_t(std::uint32_t(p[i])) << 32) | std::uint32_t(g[i])];
      ++superpixel_size[std::size_t(p[i])];
    }
  }
  static std::size_t sp(std::uint64_t key) { return std::size_t(key >> 32); }
};

}  // namespace

GtReduce parse_gt_reduce(const std::string& name) {
  if (name == "mean") return GtReduce::kMean;
  if (name == "best") return GtReduce::kBest;
  throw std::invalid_argument("gt reduction must be 'mean' or 'best', got '" + name + "'");
}

double asa(const LabelMap& labels, const LabelMap& gt) {
  check_dims(labels, gt);
  const Contingency c(labels, gt);
  std::vector<std::size_t> best(c.superpixels, 0);
  for (const auto& [key, count] : c.overlap) {
    auto& b = best[Contingency::sp(key)];
    b = std::max(b, count);
  }
  std::size_t total = 0;
  for (auto b : best) total += b;
  return double(total) / double(labels.size());
}

double undersegmentation_error(const LabelMap& labels, const LabelMap& gt) {
  check_dims(labels, gt);
  const Contingency c(labels, gt);
  std::size_t leak = 0;
  for (const auto& [key, inside] : c.overlap) {
    const std::size_t outside = c.superpixel_size[Contingency::sp(key)] - inside;
    leak += std::min(inside, outside);
  }
  return double(leak) / double(labels.size());
}

double boundary_recall(const LabelMap& labels, const LabelMap& gt, int tolerance) {
  check_dims(labels, gt);
  if (tolerance < 0) throw std::invalid_argument("boundary tolerance must be nonnegative");
  const int w = labels.width;
  const int h = labels.height;
  const auto predicted = boundary_mask(labels);
  const auto truth = boundary_mask(gt);

  // Summed-area table of predicted boundary pixels, (h+1) x (w+1).
  std::vector<std::size_t> sat(std::size_t(w + 1) * std::size_t(h + 1), 0);
  auto at = [&](int row, int col) -> std::size_t& { return sat[std::size_t(row) * std::size_t(w + 1) + col]; };
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      at(row + 1, col + 1) =
          predicted[std::size_t(row) * w + col] + at(row, col + 1) + at(row + 1, col) - at(row, col);
    }
  }

  std::size_t boundary = 0;
  std::size_t recalled = 0;
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      if (!truth[std::size_t(row) * w + col]) continue;
      ++boundary;
      const int y0 = std::max(row - tolerance, 0);
      const int y1 = std::min(row + tolerance, h - 1) + 1;
      const int x0 = std::max(col - tolerance, 0);
      const int x1 = std::min(col + tolerance, w - 1) + 1;
      if (at(y1, x1) + at(y0, x0) - at(y0, x1) - at(y1, x0) > 0) ++recalled;
    }
  }
  return boundary == 0 ? 1.0 : double(recalled) / double(boundary);
}

double explained_variation(const LabelMap& labels, const LabImage& image) {
  if (labels.width != image.width || labels.height != image.height || labels.size() != image.size()) {
    throw DimensionMismatch("labels and image differ in size");
  }
  if (labels.labels.empty()) throw DimensionMismatch("empty label map");
  std::size_t count = 0;
  const auto p = dense(labels, count);
  std::vector<Lab> sum(count);
  std::vector<std::size_t> size(count, 0);
  Lab total;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Lab& x = image.lab[i];
    Lab& s = sum[std::size_t(p[i])];
    s.l += x.l;
    s.a += x.a;
    s.b += x.b;
    ++size[std::size_t(p[i])];
    total.l += x.l;
    total.a += x.a;
    total.b += x.b;
  }
  const double n = double(p.size());
  const Lab mean{total.l / n, total.a / n, total.b / n};
  auto sq = [](const Lab& x, const Lab& m) {
    const double dl = x.l - m.l, da = x.a - m.a, db = x.b - m.b;
    return dl * dl + da * da + db * db;
  };
  double variance = 0.0;
  for (const Lab& x : image.lab) variance += sq(x, mean);
  if (variance < 1e-12) return 1.0;
  double between = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double m = double(size[k]);
    between += m * sq({sum[k].l / m, sum[k].a / m, sum[k].b / m}, mean);
  }
  return std::clamp(between / variance, 0.0, 1.0);
}

MetricsReport evaluate(const LabelMap& labels, std::span<const LabelMap> gts, const LabImage& image, int br_tolerance,
                       GtReduce reduce) {
  if (gts.empty()) throw std::invalid_argument("evaluate: at least one ground truth is required");
  MetricsReport report;
  report.br_tolerance = br_tolerance;
  report.gt_count = static_cast<int>(gts.size());
  report.reduce = reduce;
  report.ev = explained_variation(labels, image);

  std::vector<double> a, b, u;
  for (const auto& gt : gts) {
    a.push_back(asa(labels, gt));
    b.push_back(boundary_recall(labels, gt, br_tolerance));
    u.push_back(undersegmentation_error(labels, gt));
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
  };
  if (reduce == GtReduce::kMean) {
    report.asa = mean(a);
    report.br = mean(b);
    report.ue = mean(u);
  } else {
    report.asa = *std::max_element(a.begin(), a.end());
    report.br = *std::max_element(b.begin(), b.end());
    report.ue = *std::min_element(u.begin(), u.end());
  }
  return report;
}

std::string format_report_row(const ReportRow& row) {
  auto fixed6 = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  auto sig6 = [](std::optional<double> v) {
    if (!v) return std::string();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", *v);
    return std::string(buf);
  };
  std::string out = row.image;
  out += ',' + std::to_string(row.k);
  out += ',' + sig6(row.t);
  out += ',' + sig6(row.tau);
  out += ',' + (row.radius ? std::to_string(*row.radius) : std::string());
  out += ',' + fixed6(row.metrics.asa);
  out += ',' + fixed6(row.metrics.br);
  out += ',' + fixed6(row.metrics.ue);
  out += ',' + fixed6(row.metrics.ev);
  out += ',' + std::to_string(row.metrics.gt_count);
  out += ',' + std::to_string(row.metrics.br_tolerance);
  out += ',' + (row.seconds ? fixed6(*row.seconds) : std::string());
  return out;
}

}  // namespace sithss
