#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace sithss {

/// Thrown for unreadable, malformed or out-of-contract image and label files.
class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CIELAB (or raw RGB, see ColorSpace) triple attached to one pixel.
struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const Lab&, const Lab&) = default;
};

enum class ColorSpace { kLab, kRgb };

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit sRGB raster, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  const Rgb& at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  Rgb& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Color features of every pixel. The pixel's row/column is implied by its
/// row-major index and serves as the position feature.
struct LabImage {
  int width = 0;
  int height = 0;
  std::vector<Lab> lab;

  std::size_t size() const { return lab.size(); }
  const Lab& at(int row, int col) const { return lab[static_cast<std::size_t>(row) * width + col]; }
};

/// Row-major integer labels. After load or normalize() the values are a
/// contiguous range 0..count()-1.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;

  std::size_t size() const { return labels.size(); }
  std::int32_t at(int row, int col) const { return labels[static_cast<std::size_t>(row) * width + col]; }

  /// Number of distinct label values.
  std::size_t count() const;
};

Lab rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Converts every pixel; kRgb copies byte values verbatim into the triple.
LabImage to_color_features(const RgbImage& image, ColorSpace space = ColorSpace::kLab);

/// Decodes PNG/JPEG into 8-bit RGB, dropping any alpha channel.
RgbImage load_rgb(const std::filesystem::path& path);
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);

LabImage load_image(const std::filesystem::path& path, ColorSpace space = ColorSpace::kLab);

/// Renumbers labels to 0..L-1 by order of first appearance in scan order.
void normalize_labels(LabelMap& map);

/// Accepts a single-channel 8/16-bit PNG or a headerless CSV of integers.
LabelMap load_label_map(const std::filesystem::path& path);

/// Writes 16-bit grayscale PNG or CSV depending on the extension.
void write_label_map(const std::filesystem::path& path, const LabelMap& map);

LabelMap parse_label_csv(const std::string& text);
std::string format_label_csv(const LabelMap& map);

/// Paints every pixel whose 4-neighborhood contains another label.
RgbImage render_overlay(const RgbImage& image, const LabelMap& labels, Rgb color = {255, 0, 0});

/// true where the 4-neighborhood of a pixel contains a different label.
std::vector<std::uint8_t> boundary_mask(const LabelMap& labels);

}  // namespace sithss
