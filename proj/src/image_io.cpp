#include "sithss/image_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace sithss {

namespace {

double srgb_to_linear(std::uint8_t value) {
  const double c = value / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  if (t > delta * delta * delta) return std::cbrt(t);
  return t / (3.0 * delta * delta) + 4.0 / 29.0;
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::size_t LabelMap::count() const {
  std::unordered_map<std::int32_t, char> seen;
  for (auto v : labels) seen.emplace(v, 0);
  return seen.size();
}

Lab rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double rl = srgb_to_linear(r);
  const double gl = srgb_to_linear(g);
  const double bl = srgb_to_linear(b);

  // sRGB primaries, D65 white.
  const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
  const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
  const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;

  constexpr double xn = 0.95047;
  constexpr double yn = 1.0;
  constexpr double zn = 1.08883;

  const double fx = lab_f(x / xn);
  const double fy = lab_f(y / yn);
  const double fz = lab_f(z / zn);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabImage to_color_features(const RgbImage& image, ColorSpace space) {
  LabImage out;
  out.width = image.width;
  out.height = image.height;
  out.lab.reserve(image.pixels.size());
  for (const Rgb& p : image.pixels) {
    if (space == ColorSpace::kLab) {
      out.lab.push_back(rgb_to_lab(p[0], p[1], p[2]));
    } else {
      out.lab.push_back({double(p[0]), double(p[1]), double(p[2])});
    }
  }
  return out;
}

RgbImage load_rgb(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ImageIoError("cannot read " + path.string());
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (raw.empty()) throw ImageIoError("unsupported or corrupt image: " + path.string());
  if (raw.cols < 2 || raw.rows < 2) throw ImageIoError("image too small: " + path.string());

  RgbImage out;
  out.width = raw.cols;
  out.height = raw.rows;
  out.pixels.resize(static_cast<std::size_t>(raw.cols) * raw.rows);
  for (int row = 0; row < raw.rows; ++row) {
    const auto* src = raw.ptr<cv::Vec3b>(row);
    for (int col = 0; col < raw.cols; ++col) {
      out.at(row, col) = {src[col][2], src[col][1], src[col][0]};
    }
  }
  return out;
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
  cv::Mat mat(image.height, image.width, CV_8UC3);
  for (int row = 0; row < image.height; ++row) {
    auto* dst = mat.ptr<cv::Vec3b>(row);
    for (int col = 0; col < image.width; ++col) {
      const Rgb& p = image.at(row, col);
      dst[col] = cv::Vec3b(p[2], p[1], p[0]);
    }
  }
  if (!cv::imwrite(path.string(), mat)) throw ImageIoError("cannot write " + path.string());
}

LabImage load_image(const std::filesystem::path& path, ColorSpace space) {
  return to_color_features(load_rgb(path), space);
}

void normalize_labels(LabelMap& map) {
  std::unordered_map<std::int32_t, std::int32_t> remap;
  for (auto& v : map.labels) {
    auto [it, inserted] = remap.emplace(v, static_cast<std::int32_t>(remap.size()));
    v = it->second;
  }
}

LabelMap parse_label_csv(const std::string& text) {
  LabelMap map;
  std::size_t row_width = 0;
  int rows = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t cells = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      std::string_view cell(line.data() + start, end - start);
      while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
      while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
      long long value = 0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ImageIoError("non-integer cell '" + std::string(cell) + "' in row " + std::to_string(rows + 1));
      }
      if (value < 0 || value > INT32_MAX) throw ImageIoError("label out of range in row " + std::to_string(rows + 1));
      map.labels.push_back(static_cast<std::int32_t>(value));
      ++cells;
      if (end == line.size()) break;
      start = end + 1;
    }
    if (rows == 0) {
      row_width = cells;
    } else if (cells != row_width) {
      throw ImageIoError("ragged rows: row " + std::to_string(rows + 1) + " has " + std::to_string(cells) +
                         " cells, expected " + std::to_string(row_width));
    }
    ++rows;
  }
  if (rows == 0) throw ImageIoError("empty label file");
  map.width = static_cast<int>(row_width);
  map.height = rows;
  normalize_labels(map);
  return map;
}

std::string format_label_csv(const LabelMap& map) {
  std::string out;
  out.reserve(map.size() * 4);
  for (int row = 0; row < map.height; ++row) {
    for (int col = 0; col < map.width; ++col) {
      if (col) out += ',';
      out += std::to_string(map.at(row, col));
    }
    out += '\n';
  }
  return out;
}

LabelMap load_label_map(const std::filesystem::path& path) {
  if (lower_extension(path) == ".csv") return parse_label_csv(read_text(path));

  if (!std::filesystem::exists(path)) throw ImageIoError("cannot read " + path.string());
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw ImageIoError("unsupported or corrupt label map: " + path.string());
  if (raw.channels() != 1) throw ImageIoError("label map must be single-channel: " + path.string());
  if (raw.depth() != CV_8U && raw.depth() != CV_16U) {
    throw ImageIoError("label map must be 8- or 16-bit: " + path.string());
  }
  cv::Mat wide;
  raw.convertTo(wide, CV_32S);

  LabelMap map;
  map.width = wide.cols;
  map.height = wide.rows;
  map.labels.resize(static_cast<std::size_t>(wide.cols) * wide.rows);
  for (int row = 0; row < wide.rows; ++row) {
    const auto* src = wide.ptr<std::int32_t>(row);
    std::copy(src, src + wide.cols, map.labels.begin() + static_cast<std::ptrdiff_t>(row) * wide.cols);
  }
  normalize_labels(map);
  return map;
}

void write_label_map(const std::filesystem::path& path, const LabelMap& map) {
  if (map.labels.size() != static_cast<std::size_t>(map.width) * map.height) {
    throw ImageIoError("label map size does not match its dimensions");
  }
  if (lower_extension(path) == ".csv") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError("cannot write " + path.string());
    out << format_label_csv(map);
    return;
  }
  cv::Mat mat(map.height, map.width, CV_16UC1);
  for (int row = 0; row < map.height; ++row) {
    auto* dst = mat.ptr<std::uint16_t>(row);
    for (int col = 0; col < map.width; ++col) {
      const auto v = map.at(row, col);
      if (v < 0 || v > 65535) throw ImageIoError("label " + std::to_string(v) + " does not fit a 16-bit PNG");
      dst[col] = static_cast<std::uint16_t>(v);
    }
  }
  if (!cv::imwrite(path.string(), mat)) throw ImageIoError("cannot write " + path.string());
}

std::vector<std::uint8_t> boundary_mask(const LabelMap& labels) {
  const int w = labels.width;
  const int h = labels.height;
  std::vector<std::uint8_t> mask(labels.size(), 0);
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const auto v = labels.at(row, col);
      const bool edge = (row > 0 && labels.at(row - 1, col) != v) || (row + 1 < h && labels.at(row + 1, col) != v) ||
                        (col > 0 && labels.at(row, col - 1) != v) || (col + 1 < w && labels.at(row, col + 1) != v);
      mask[static_cast<std::size_t>(row) * w + col] = edge ? 1 : 0;
    }
  }
  return mask;
}

RgbImage render_overlay(const RgbImage& image, const LabelMap& labels, Rgb color) {
  if (image.width != labels.width || image.height != labels.height) {
    throw ImageIoError("overlay: image is " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                       " but labels are " + std::to_string(labels.width) + "x" + std::to_string(labels.height));
  }
  RgbImage out = image;
  const auto mask = boundary_mask(labels);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.pixels[i] = color;
  }
  return out;
}

}  // namespace sithss
