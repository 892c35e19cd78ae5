#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ragseg/imaging.hpp"

namespace ragseg {

// Symmetric, normalized L x L co-occurrence matrix; probs[m * levels + n].
struct GlcmMatrix {
  int levels = 0;
  std::vector<double> probs;

  double operator()(int m, int n) const { return probs[static_cast<std::size_t>(m) * levels + n]; }
};

struct TextureFeatures {
  double contrast = 0.0;
  double homogeneity = 1.0;
  double energy = 1.0;
  double correlation = 1.0;

  static constexpr std::size_t kCount = 4;
  std::array<double, kCount> as_array() const { return {contrast, homogeneity, energy, correlation}; }
};

// Which texture features enter the region distance.
struct FeatureSubset {
  bool contrast = true;
  bool homogeneity = true;
  bool energy = true;
  bool correlation = true;

  static constexpr FeatureSubset all() { return {}; }
  static constexpr FeatureSubset f2f4() { return {true, true, false, false}; }
  static constexpr FeatureSubset none() { return {false, false, false, false}; }

  std::array<bool, TextureFeatures::kCount> as_array() const { return {contrast, homogeneity, energy, correlation}; }
  bool operator==(const FeatureSubset&) const = default;
};

// "all" | "f2f4" | "none"
FeatureSubset parse_feature_subset(std::string_view name);
std::string_view feature_subset_name(const FeatureSubset& subset);

struct PixelOffset {
  int dx;
  int dy;
};

// Distance 1 at 0, 90, 45 and 135 degrees.
inline constexpr std::array<PixelOffset, 4> kIsotropicOffsets = {{{1, 0}, {0, 1}, {1, 1}, {-1, 1}}};

// Co-occurrences of pixel pairs (p, p + offset) with both ends in `mask`
// (one byte per pixel, non-zero = member), accumulated over all offsets,
// symmetrized and normalized. A mask without any valid pair yields
// P[b][b] = 1 at the bin of its first pixel.
GlcmMatrix glcm(const GrayImage& gray, std::span<const std::uint8_t> mask,
                std::span<const PixelOffset> offsets = kIsotropicOffsets);

// One GLCM per label in [0, region_count), built in a single raster pass.
std::vector<GlcmMatrix> region_glcms(const GrayImage& gray, const LabelMap& labels, int region_count,
                                     std::span<const PixelOffset> offsets = kIsotropicOffsets);

// Correlation is defined as 1 when either marginal has zero variance.
TextureFeatures texture_features(const GlcmMatrix& p);

}  // namespace ragseg
