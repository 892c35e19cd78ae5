#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace ragseg {

using Rgb = std::array<double, 3>;

// Interleaved RGB, channels normalized to [0,1].
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {0.0, 0.0, 0.0});

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  Rgb at(int x, int y) const;
  void set(int x, int y, const Rgb& c);
  bool operator==(const RgbImage&) const = default;
};

struct GrayImage {
  int width = 0;
  int height = 0;
  int levels = 0;
  std::vector<int> data;  // bin index per pixel, row-major

  int at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Integer label raster (superpixel ids, class ids).
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> data;

  int at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const LabelMap&) const = default;
};

// ITU-R BT.601 luma.
inline double luma(const Rgb& c) { return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]; }

RgbImage load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const RgbImage& img);

// Decoders exposed for tests; load_image dispatches on the file signature.
RgbImage decode_ppm(std::span<const std::uint8_t> bytes);
RgbImage decode_png(std::span<const std::uint8_t> bytes);

// Writes 8-bit grayscale when every label fits in [0,255], otherwise 16-bit.
void save_label_png(const std::filesystem::path& path, const LabelMap& labels, bool force_16bit = false);
LabelMap load_label_png(const std::filesystem::path& path);

GrayImage to_gray_quantized(const RgbImage& img, int levels);

namespace corruption {

struct Jitter {
  double brightness = 0.2;
  double contrast = 0.3;
  double saturation = 0.3;
  double hue = 0.1;
  std::uint64_t seed = 0;
};

struct Brightness {
  double factor = 1.0;
};

struct Blur {
  int kernel = 9;
  double sigma = 5.0;
};

struct Grayscale {};

}  // namespace corruption

using Corruption = std::variant<corruption::Jitter, corruption::Brightness, corruption::Blur,
                                corruption::Grayscale>;

RgbImage corrupt(const RgbImage& img, const Corruption& mode);

}  // namespace ragseg
