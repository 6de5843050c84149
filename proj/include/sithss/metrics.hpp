#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sithss/image_io.hpp"

namespace sithss {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How per-annotation scores are combined when an image has several ground truths.
enum class GtReduce { kMean, kBest };

GtReduce parse_gt_reduce(const std::string& name);

struct MetricsReport {
  double asa = 0.0;
  double br = 0.0;
  /// Undersegmentation error in the Neubert-Protzel min(in, out) form.
  double ue = 0.0;
  double ev = 0.0;
  int br_tolerance = 2;
  int gt_count = 0;
  GtReduce reduce = GtReduce::kMean;
};

/// Achievable segmentation accuracy: fraction of pixels that keep their
/// ground-truth segment when each superpixel takes its majority segment.
double asa(const LabelMap& labels, const LabelMap& gt);

/// Fraction of ground-truth boundary pixels with a predicted boundary pixel
/// within Chebyshev distance `tolerance`. 1 when gt has no boundary.
double boundary_recall(const LabelMap& labels, const LabelMap& gt, int tolerance = 2);

/// (1/N) sum_g sum_{p meets g} min(|p & g|, |p \ g|).
double undersegmentation_error(const LabelMap& labels, const LabelMap& gt);

/// Between-superpixel color variance over total color variance; 1 for a
/// uniform image.
double explained_variation(const LabelMap& labels, const LabImage& image);

MetricsReport evaluate(const LabelMap& labels, std::span<const LabelMap> gts, const LabImage& image,
                       int br_tolerance = 2, GtReduce reduce = GtReduce::kMean);

/// One row of the benchmark CSV.
/// Unknown fields (e.g. when scoring an existing label map) print empty.
struct ReportRow {
  std::string image;
  std::size_t k = 0;
  std::optional<double> t;
  std::optional<double> tau;
  std::optional<int> radius;
  MetricsReport metrics;
  std::optional<double> seconds;
};

inline constexpr const char* kReportHeader = "image,k,t,tau,radius,asa,br,ue,ev,gt_count,br_tol,seconds";

/// Scores and seconds with 6 decimals, t and tau with 6 significant digits.
std::string format_report_row(const ReportRow& row);

}  // namespace sithss
