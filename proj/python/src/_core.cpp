#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sithss/entropy.hpp"
#include "sithss/image_io.hpp"
#include "sithss/metrics.hpp"
#include "sithss/partitioner.hpp"
#include "sithss/pixel_graph.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using ImageArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>;

sithss::RgbImage to_rgb(const ImageArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("image must have shape (height, width, 3)");
  sithss::RgbImage img;
  img.height = int(a.shape(0));
  img.width = int(a.shape(1));
  img.pixels.resize(std::size_t(img.width) * img.height);
  const std::uint8_t* p = a.data();
  for (auto& px : img.pixels) {
    px = {p[0], p[1], p[2]};
    p += 3;
  }
  return img;
}

sithss::ColorSpace color_space(const std::string& name) {
  if (name == "lab") return sithss::ColorSpace::kLab;
  if (name == "rgb") return sithss::ColorSpace::kRgb;
  throw py::value_error("color_space must be 'lab' or 'rgb'");
}

sithss::LabelMap to_labels(const LabelArray& a) {
  if (a.ndim() != 2) throw py::value_error("labels must have shape (height, width)");
  sithss::LabelMap m;
  m.height = int(a.shape(0));
  m.width = int(a.shape(1));
  m.labels.assign(a.data(), a.data() + a.size());
  return m;
}

py::array_t<std::int32_t> from_labels(const sithss::LabelMap& m) {
  py::array_t<std::int32_t> out({m.height, m.width});
  std::copy(m.labels.begin(), m.labels.end(), out.mutable_data());
  return out;
}

sithss::GraphConfig config(double t, double tau, int r_max, bool freeze) {
  sithss::GraphConfig c;
  c.t = t;
  c.tau = tau;
  c.r_max = r_max;
  c.freeze_normalizer = freeze;
  c.validate();
  return c;
}

sithss::WeightedGraph graph_from(std::size_t n, const std::vector<std::tuple<int, int, double>>& edges) {
  std::vector<sithss::WeightedEdge> e;
  for (const auto& [u, v, w] : edges) e.push_back({u, v, w});
  return sithss::WeightedGraph::from_edges(n, e);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Superpixel segmentation by structural entropy";

  py::register_exception<sithss::ImageIoError>(m, "ImageIoError", PyExc_IOError);
  py::register_exception<sithss::DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);

  m.def(
      "rgb_to_lab",
      [](const ImageArray& image) {
        const auto lab = sithss::to_color_features(to_rgb(image), sithss::ColorSpace::kLab);
        py::array_t<double> out({lab.height, lab.width, 3});
        double* p = out.mutable_data();
        for (const auto& x : lab.lab) {
          *p++ = x.l;
          *p++ = x.a;
          *p++ = x.b;
        }
        return out;
      },
      "image"_a, "CIELAB (D65) of an sRGB uint8 image, shape (h, w, 3).");

  m.def(
      "select_radius",
      [](const ImageArray& image, double t, double tau, int r_max, bool freeze_normalizer, const std::string& space,
         int threads) {
        const auto features = sithss::to_color_features(to_rgb(image), color_space(space));
        const auto sel = sithss::select_radius(features, config(t, tau, r_max, freeze_normalizer), threads);
        return py::dict("radius"_a = sel.radius, "entropies"_a = sel.entropies, "plateau_found"_a = sel.plateau_found,
                        "edge_count"_a = sel.graph.graph.edge_count());
      },
      "image"_a, "t"_a = 0.1, "tau"_a = 2e-7, "r_max"_a = 5, "freeze_normalizer"_a = false, "color_space"_a = "lab",
      "threads"_a = 0);

  m.def(
      "segment",
      [](const ImageArray& image, std::size_t k, double t, double tau, int r_max, bool freeze_normalizer,
         const std::string& space, std::vector<std::size_t> levels, int threads) {
        const auto features = sithss::to_color_features(to_rgb(image), color_space(space));
        if (k < 1 || k > features.size()) throw py::value_error("k must lie in [1, pixel count]");
        const auto cfg = config(t, tau, r_max, freeze_normalizer);
        sithss::RadiusSelection sel;
        sithss::ImageSegmentation seg;
        {
          py::gil_scoped_release release;
          sel = sithss::select_radius(features, cfg, threads);
          seg = sithss::segment(sel.graph, k, {threads, 2.0});
        }
        py::dict level_maps;
        for (auto level : levels) {
          level_maps[py::int_(level)] =
              from_labels(sithss::extract_level(seg.dendrogram, features.width, features.height, level));
        }
        py::list events;
        for (const auto& e : seg.dendrogram.events) events.append(py::make_tuple(e.round, e.survivor, e.absorbed, e.delta));
        return py::dict("labels"_a = from_labels(seg.labels), "radius"_a = sel.radius, "rounds"_a = seg.rounds,
                        "forced_rounds"_a = seg.forced_rounds, "live_history"_a = seg.live_history,
                        "levels"_a = level_maps, "events"_a = events);
      },
      "image"_a, "k"_a, "t"_a = 0.1, "tau"_a = 2e-7, "r_max"_a = 5, "freeze_normalizer"_a = false,
      "color_space"_a = "lab", "levels"_a = std::vector<std::size_t>{}, "threads"_a = 0,
      "Segment into exactly k 8-connected superpixels; labels are numbered in scan order.");

  m.def(
      "asa", [](const LabelArray& labels, const LabelArray& gt) { return sithss::asa(to_labels(labels), to_labels(gt)); },
      "labels"_a, "gt"_a);
  m.def(
      "boundary_recall",
      [](const LabelArray& labels, const LabelArray& gt, int tolerance) {
        return sithss::boundary_recall(to_labels(labels), to_labels(gt), tolerance);
      },
      "labels"_a, "gt"_a, "tolerance"_a = 2);
  m.def(
      "undersegmentation_error",
      [](const LabelArray& labels, const LabelArray& gt) {
        return sithss::undersegmentation_error(to_labels(labels), to_labels(gt));
      },
      "labels"_a, "gt"_a);
  m.def(
      "explained_variation",
      [](const LabelArray& labels, const ImageArray& image) {
        return sithss::explained_variation(to_labels(labels), sithss::to_color_features(to_rgb(image)));
      },
      "labels"_a, "image"_a);

  m.def(
      "one_dim_se",
      [](std::size_t n, const std::vector<std::tuple<int, int, double>>& edges, double base) {
        return sithss::one_dim_se(graph_from(n, edges), base);
      },
      "n"_a, "edges"_a, "base"_a = 2.0, "Degree-distribution entropy of a weighted graph given as (i, j, w) edges.");
  m.def(
      "two_dim_se",
      [](std::size_t n, const std::vector<std::tuple<int, int, double>>& edges, std::vector<std::int32_t> assignment,
         double base) {
        const auto g = graph_from(n, edges);
        return sithss::two_dim_se(g, sithss::Partition::from_assignment(g, assignment), base);
      },
      "n"_a, "edges"_a, "assignment"_a, "base"_a = 2.0);
  m.def(
      "min_two_dim_se",
      [](std::size_t n, const std::vector<std::tuple<int, int, double>>& edges, std::optional<int> blocks) {
        const auto best = sithss::brute_force_min_2dse(graph_from(n, edges), blocks);
        return py::make_tuple(best.entropy, best.partition.assignment);
      },
      "n"_a, "edges"_a, "blocks"_a = py::none(), "Exhaustive minimum over partitions of at most 12 nodes.");
}
