#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "sithss/entropy.hpp"
#include "sithss/image_io.hpp"
#include "sithss/metrics.hpp"
#include "sithss/parallel.hpp"
#include "sithss/partitioner.hpp"
#include "sithss/pixel_graph.hpp"

namespace sithss::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Thrown for flag values CLI11 cannot validate on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

ColorSpace parse_color_space(const std::string& name) {
  if (name == "lab") return ColorSpace::kLab;
  if (name == "rgb") return ColorSpace::kRgb;
  throw UsageError("--color-space must be lab or rgb");
}

struct GraphFlags {
  double t = 0.1;
  double tau = 2e-7;
  int r_max = 5;
  bool freeze_normalizer = false;
  std::string color_space = "lab";

  void add_to(CLI::App& app) {
    app.add_option("--t", t, "Weight normalization parameter")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--tau", tau, "1D structural entropy increment threshold")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_option("--r-max", r_max, "Largest neighborhood radius considered")
        ->check(CLI::Range(1, 16))
        ->capture_default_str();
    app.add_flag("--freeze-normalizer", freeze_normalizer, "Normalize weights by the radius-1 mean distance");
    app.add_option("--color-space", color_space, "lab or rgb")
        ->check(CLI::IsMember({"lab", "rgb"}))
        ->capture_default_str();
  }

  GraphConfig config() const {
    GraphConfig c;
    c.t = t;
    c.tau = tau;
    c.r_max = r_max;
    c.freeze_normalizer = freeze_normalizer;
    return c;
  }
};

std::vector<std::size_t> parse_levels(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(std::size_t(v));
    } catch (const std::exception&) {
      throw UsageError("--levels expects positive integers, got '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("--levels is empty");
  return out;
}

fs::path with_suffix(const fs::path& path, std::size_t level) {
  fs::path out = path;
  out.replace_filename(path.stem().string() + "_" + std::to_string(level) + path.extension().string());
  return out;
}

// ---------------------------------------------------------------------------

struct SegmentArgs {
  std::string input;
  std::size_t k = 0;
  GraphFlags graph;
  std::string levels;
  std::string out;
  std::string overlay;
  std::string dendrogram;
};

int cmd_segment(const SegmentArgs& a, int threads, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const RgbImage rgb = load_rgb(a.input);
  const std::size_t pixels = rgb.pixels.size();
  if (a.k > pixels) throw UsageError("--k must not exceed the pixel count (" + std::to_string(pixels) + ")");
  std::vector<std::size_t> levels;
  if (!a.levels.empty()) {
    levels = parse_levels(a.levels);
    for (auto level : levels) {
      if (level < a.k || level > pixels) {
        throw UsageError("--levels entries must lie in [k, pixel count], got " + std::to_string(level));
      }
    }
  }

  const LabImage image = to_color_features(rgb, parse_color_space(a.graph.color_space));
  const RadiusSelection selection = select_radius(image, a.graph.config(), threads);
  const ImageSegmentation seg = segment(selection.graph, a.k, {threads, 2.0});

  if (levels.empty()) {
    write_label_map(a.out, seg.labels);
  } else {
    for (auto level : levels) {
      write_label_map(with_suffix(a.out, level), extract_level(seg.dendrogram, image.width, image.height, level));
    }
  }
  if (!a.overlay.empty()) write_rgb_png(a.overlay, render_overlay(rgb, seg.labels, {255, 0, 0}));
  if (!a.dendrogram.empty()) write_dendrogram(a.dendrogram, seg.dendrogram);

  out << "radius=" << selection.radius << " rounds=" << seg.rounds << " seconds=" << fixed(seconds_since(start))
      << "\n";
  if (seg.forced_rounds > 0) err << "note: " << seg.forced_rounds << " round(s) merged without entropy decrease\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string labels;
  std::vector<std::string> gts;
  std::string image;
  int br_tolerance = 2;
  std::string gt_reduce = "mean";
  std::string color_space = "lab";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const LabelMap labels = load_label_map(a.labels);
  std::vector<LabelMap> gts;
  for (const auto& path : a.gts) gts.push_back(load_label_map(path));
  const LabImage image = load_image(a.image, parse_color_space(a.color_space));

  ReportRow row;
  row.image = fs::path(a.image).stem().string();
  row.k = labels.count();
  row.metrics = evaluate(labels, gts, image, a.br_tolerance, parse_gt_reduce(a.gt_reduce));
  out << kReportHeader << "\n" << format_report_row(row) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string images;
  std::string gt;
  std::string k_range;
  GraphFlags graph;
  std::string report;
  int br_tolerance = 2;
  std::string gt_reduce = "mean";
  bool omit_timing = false;
};

std::vector<std::size_t> parse_k_range(const std::string& text) {
  static const std::regex pattern(R"((\d+):(\d+):(\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw UsageError("--k-range must look like lo:hi:step");
  const auto lo = std::stoull(m[1]);
  const auto hi = std::stoull(m[2]);
  const auto step = std::stoull(m[3]);
  if (lo < 1 || hi < lo || step < 1) throw UsageError("--k-range needs 1 <= lo <= hi and step >= 1");
  std::vector<std::size_t> out;
  for (auto k = lo; k <= hi; k += step) out.push_back(std::size_t(k));
  return out;
}

bool is_raster(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

bool is_label_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return ext == ".png" || ext == ".csv";
}

// Ground truths for `stem`: <stem>.<ext>, <stem>_<n>.<ext>, or files in <stem>/.
std::vector<fs::path> match_ground_truth(const fs::path& gt_dir, const std::string& stem) {
  std::vector<fs::path> out;
  const std::regex numbered(std::regex_replace(stem, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") + R"(_\d+)");
  for (const auto& entry : fs::directory_iterator(gt_dir)) {
    const fs::path& p = entry.path();
    if (entry.is_regular_file() && is_label_file(p)) {
      const std::string s = p.stem().string();
      if (s == stem || std::regex_match(s, numbered)) out.push_back(p);
    } else if (entry.is_directory() && p.filename().string() == stem) {
      for (const auto& inner : fs::directory_iterator(p)) {
        if (inner.is_regular_file() && is_label_file(inner.path())) out.push_back(inner.path());
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_bench(const BenchArgs& a, int threads, std::ostream& out, std::ostream& err) {
  const auto ks = parse_k_range(a.k_range);
  const GtReduce reduce = parse_gt_reduce(a.gt_reduce);
  if (!fs::is_directory(a.images)) throw std::runtime_error("not a directory: " + a.images);
  if (!fs::is_directory(a.gt)) throw std::runtime_error("not a directory: " + a.gt);

  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(a.images)) {
    if (entry.is_regular_file() && is_raster(entry.path())) images.push_back(entry.path());
  }
  std::sort(images.begin(), images.end());

  std::vector<std::pair<fs::path, std::vector<fs::path>>> pairs;
  for (const auto& img : images) {
    auto gts = match_ground_truth(a.gt, img.stem().string());
    if (gts.empty()) {
      err << "skip " << img.filename().string() << ": no ground truth\n";
      continue;
    }
    pairs.emplace_back(img, std::move(gts));
  }
  if (pairs.empty()) {
    err << "error: no image/ground-truth pairs found\n";
    return kExitRuntime;
  }

  std::vector<ReportRow> rows;
  std::map<std::size_t, std::vector<const ReportRow*>> by_k;
  const GraphConfig config = a.graph.config();
  const ColorSpace space = parse_color_space(a.graph.color_space);
  for (const auto& [img_path, gt_paths] : pairs) {
    const RgbImage rgb = load_rgb(img_path);
    const LabImage image = to_color_features(rgb, space);
    std::vector<LabelMap> gts;
    for (const auto& p : gt_paths) gts.push_back(load_label_map(p));

    const auto graph_start = Clock::now();
    const RadiusSelection selection = select_radius(image, config, threads);
    const double graph_seconds = seconds_since(graph_start);
    out << img_path.filename().string() << " radius=" << selection.radius << "\n";

    for (const auto k : ks) {
      if (k > image.size()) {
        err << "skip " << img_path.filename().string() << " k=" << k << ": exceeds pixel count\n";
        continue;
      }
      const auto seg_start = Clock::now();
      const ImageSegmentation seg = segment(selection.graph, k, {threads, 2.0});
      const double seconds = graph_seconds + seconds_since(seg_start);
      ReportRow row;
      row.image = img_path.stem().string();
      row.k = k;
      row.t = config.t;
      row.tau = config.tau;
      row.radius = selection.radius;
      row.metrics = evaluate(seg.labels, gts, image, a.br_tolerance, reduce);
      row.seconds = a.omit_timing ? 0.0 : seconds;
      rows.push_back(std::move(row));
    }
  }
  for (const auto& r : rows) by_k[r.k].push_back(&r);

  std::ofstream report(a.report, std::ios::binary);
  if (!report) throw std::runtime_error("cannot write " + a.report);
  report << kReportHeader << "\n";
  for (const auto& r : rows) report << format_report_row(r) << "\n";
  for (const auto& [k, group] : by_k) {
    ReportRow mean;
    mean.image = "__mean__";
    mean.k = k;
    mean.t = config.t;
    mean.tau = config.tau;
    mean.metrics.br_tolerance = a.br_tolerance;
    double seconds = 0.0;
    for (const ReportRow* r : group) {
      mean.metrics.asa += r->metrics.asa;
      mean.metrics.br += r->metrics.br;
      mean.metrics.ue += r->metrics.ue;
      mean.metrics.ev += r->metrics.ev;
      mean.metrics.gt_count += r->metrics.gt_count;
      seconds += *r->seconds;
    }
    const double n = double(group.size());
    mean.metrics.asa /= n;
    mean.metrics.br /= n;
    mean.metrics.ue /= n;
    mean.metrics.ev /= n;
    mean.seconds = seconds / n;
    report << format_report_row(mean) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string edges = "-";
  int k = 0;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  std::string text;
  if (a.edges == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    text = buf.str();
  } else {
    std::ifstream in(a.edges);
    if (!in) throw std::runtime_error("cannot open " + a.edges);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  std::vector<WeightedEdge> edges;
  std::int32_t max_node = -1;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream cells(line);
    WeightedEdge e;
    if (!(cells >> e.u >> e.v >> e.weight)) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) + ": expected i,j,w");
    }
    max_node = std::max({max_node, e.u, e.v});
    edges.push_back(e);
  }
  if (edges.empty()) throw std::runtime_error("edge list is empty");
  const auto graph = WeightedGraph::from_edges(std::size_t(max_node) + 1, edges);
  const auto best = brute_force_min_2dse(graph, a.k > 0 ? std::optional<int>(a.k) : std::nullopt);

  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", best.entropy);
  out << "entropy=" << buf << "\nassignment=";
  for (std::size_t i = 0; i < best.partition.assignment.size(); ++i) {
    out << (i ? "," : "") << best.partition.assignment[i];
  }
  out << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Superpixel segmentation by structural entropy", "sit-hss"};
  app.require_subcommand(1);

  SegmentArgs seg;
  auto* segment_cmd = app.add_subcommand("segment", "Segment an image into exactly K superpixels");
  segment_cmd->add_option("--input", seg.input, "Input PNG/JPEG")->required();
  segment_cmd->add_option("--k", seg.k, "Target superpixel count")->required()->check(CLI::PositiveNumber);
  seg.graph.add_to(*segment_cmd);
  segment_cmd->add_option("--levels", seg.levels, "Comma-separated counts to extract from the hierarchy");
  segment_cmd->add_option("--out", seg.out, "Label map output (.png or .csv)")->required();
  segment_cmd->add_option("--overlay", seg.overlay, "Boundary overlay PNG");
  segment_cmd->add_option("--dendrogram", seg.dendrogram, "Merge log JSON");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a label map against ground truth");
  eval_cmd->add_option("--labels", ev.labels, "Label map (.png or .csv)")->required();
  eval_cmd->add_option("--gt", ev.gts, "Ground truth label map(s), comma-separated")->required()->delimiter(',');
  eval_cmd->add_option("--image", ev.image, "Source image")->required();
  eval_cmd->add_option("--br-tolerance", ev.br_tolerance, "Boundary recall tolerance in pixels")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  eval_cmd->add_option("--gt-reduce", ev.gt_reduce, "mean or best over annotations")
      ->check(CLI::IsMember({"mean", "best"}))
      ->capture_default_str();
  eval_cmd->add_option("--color-space", ev.color_space, "lab or rgb, for explained variation")
      ->check(CLI::IsMember({"lab", "rgb"}))
      ->capture_default_str();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Sweep K over a directory of images and write a CSV report");
  bench_cmd->add_option("--images", bench.images, "Image directory")->required();
  bench_cmd->add_option("--gt", bench.gt, "Ground-truth directory, matched by file stem")->required();
  bench_cmd->add_option("--k-range", bench.k_range, "lo:hi:step")->required();
  bench.graph.add_to(*bench_cmd);
  bench_cmd->add_option("--report", bench.report, "CSV report path")->required();
  bench_cmd->add_option("--br-tolerance", bench.br_tolerance, "Boundary recall tolerance in pixels")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bench_cmd->add_option("--gt-reduce", bench.gt_reduce, "mean or best over annotations")
      ->check(CLI::IsMember({"mean", "best"}))
      ->capture_default_str();
  bench_cmd->add_flag("--omit-timing", bench.omit_timing, "Write 0 seconds so reports are reproducible");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive 2D structural entropy minimum of a small graph");
  oracle_cmd->group("");
  oracle_cmd->add_option("--edges", oracle.edges, "CSV edge list i,j,w ('-' for stdin)");
  oracle_cmd->add_option("--k", oracle.k, "Exact block count (0 = unconstrained)")->check(CLI::NonNegativeNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    CLI::App* failed = &app;
    for (auto* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return kExitUsage;
  }

  const int threads = threads_from_env();
  try {
    if (segment_cmd->parsed()) return cmd_segment(seg, threads, out, err);
    if (eval_cmd->parsed()) return cmd_eval(ev, out);
    if (bench_cmd->parsed()) return cmd_bench(bench, threads, out, err);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace sithss::cli
