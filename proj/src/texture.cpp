#include "ragseg/texture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ragseg/errors.hpp"

namespace ragseg {

FeatureSubset parse_feature_subset(std::string_view name) {
  if (name == "all") return FeatureSubset::all();
  if (name == "f2f4") return FeatureSubset::f2f4();
  if (name == "none") return FeatureSubset::none();
  throw ParameterError("unknown feature subset '" + std::string(name) + "' (expected all|f2f4|none)");
}

std::string_view feature_subset_name(const FeatureSubset& subset) {
  if (subset == FeatureSubset::all()) return "all";
  if (subset == FeatureSubset::f2f4()) return "f2f4";
  if (subset == FeatureSubset::none()) return "none";
  return "custom";
}

namespace {

GlcmMatrix normalize_counts(const std::uint64_t* counts, int levels, int fallback_bin) {
  GlcmMatrix p;
  p.levels = levels;
  const std::size_t cells = static_cast<std::size_t>(levels) * levels;
  p.probs.assign(cells, 0.0);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < cells; ++i) total += counts[i];
  if (total == 0) {
    p.probs[static_cast<std::size_t>(fallback_bin) * levels + fallback_bin] = 1.0;
    return p;
  }
  const double denom = static_cast<double>(total);
  for (std::size_t i = 0; i < cells; ++i) p.probs[i] = static_cast<double>(counts[i]) / denom;
  return p;
}

void check_gray(const GrayImage& gray) {
  if (gray.levels < 2) throw ParameterError("gray image must have >= 2 levels");
  if (gray.data.size() != static_cast<std::size_t>(gray.width) * gray.height) {
    throw ParameterError("gray image data length does not match shape");
  }
}

}  // namespace

GlcmMatrix glcm(const GrayImage& gray, std::span<const std::uint8_t> mask, std::span<const PixelOffset> offsets) {
  check_gray(gray);
  if (mask.size() != gray.data.size()) throw ParameterError("mask size does not match image");
  const int w = gray.width, h = gray.height, levels = gray.levels;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(levels) * levels, 0);
  int fallback = -1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      if (!mask[p]) continue;
      const int a = gray.data[p];
      if (fallback < 0) fallback = a;
      for (const auto& o : offsets) {
        const int xx = x + o.dx, yy = y + o.dy;
        if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
        const std::size_t q = static_cast<std::size_t>(yy) * w + xx;
        if (!mask[q]) continue;
        const int b = gray.data[q];
        ++counts[static_cast<std::size_t>(a) * levels + b];
        ++counts[static_cast<std::size_t>(b) * levels + a];
      }
    }
  }
  if (fallback < 0) throw ParameterError("glcm mask is empty");
  return normalize_counts(counts.data(), levels, fallback);
}

std::vector<GlcmMatrix> region_glcms(const GrayImage& gray, const LabelMap& labels, int region_count,
                                     std::span<const PixelOffset> offsets) {
  check_gray(gray);
  if (labels.width != gray.width || labels.height != gray.height) {
    throw ParameterError("label map and gray image dimensions differ");
  }
  const int w = gray.width, h = gray.height, levels = gray.levels;
  const std::size_t cells = static_cast<std::size_t>(levels) * levels;
  std::vector<std::uint64_t> counts(cells * static_cast<std::size_t>(region_count), 0);
  std::vector<int> fallback(static_cast<std::size_t>(region_count), -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      const int r = labels.data[p];
      if (r < 0 || r >= region_count) throw ParameterError("label outside [0, region_count)");
      const int a = gray.data[p];
      if (fallback[r] < 0) fallback[r] = a;
      std::uint64_t* c = counts.data() + cells * static_cast<std::size_t>(r);
      for (const auto& o : offsets) {
        const int xx = x + o.dx, yy = y + o.dy;
        if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
        const std::size_t q = static_cast<std::size_t>(yy) * w + xx;
        if (labels.data[q] != r) continue;
        const int b = gray.data[q];
        ++c[static_cast<std::size_t>(a) * levels + b];
        ++c[static_cast<std::size_t>(b) * levels + a];
      }
    }
  }
  std::vector<GlcmMatrix> out;
  out.reserve(static_cast<std::size_t>(region_count));
  for (int r = 0; r < region_count; ++r) {
    if (fallback[r] < 0) throw ParameterError("region " + std::to_string(r) + " has no pixels");
    out.push_back(normalize_counts(counts.data() + cells * static_cast<std::size_t>(r), levels, fallback[r]));
  }
  return out;
}

TextureFeatures texture_features(const GlcmMatrix& p) {
  const int levels = p.levels;
  std::vector<double> row_marginal(static_cast<std::size_t>(levels), 0.0);
  std::vector<double> col_marginal(static_cast<std::size_t>(levels), 0.0);
  TextureFeatures f{0.0, 0.0, 0.0, 0.0};
  for (int m = 0; m < levels; ++m) {
    for (int n = 0; n < levels; ++n) {
      const double v = p(m, n);
      if (v == 0.0) continue;
      const double diff = m - n;
      f.contrast += diff * diff * v;
      f.homogeneity += v / (1.0 + std::abs(diff));
      f.energy += v * v;
      row_marginal[m] += v;
      col_marginal[n] += v;
    }
  }
  double mu_m = 0.0, mu_n = 0.0;
  for (int k = 0; k < levels; ++k) {
    mu_m += k * row_marginal[k];
    mu_n += k * col_marginal[k];
  }
  double var_m = 0.0, var_n = 0.0;
  for (int k = 0; k < levels; ++k) {
    var_m += (k - mu_m) * (k - mu_m) * row_marginal[k];
    var_n += (k - mu_n) * (k - mu_n) * col_marginal[k];
  }
  const double denom = std::sqrt(var_m) * std::sqrt(var_n);
  if (denom <= 0.0) {
    f.correlation = 1.0;
  } else {
    double cov = 0.0;
    for (int m = 0; m < levels; ++m) {
      for (int n = 0; n < levels; ++n) cov += (m - mu_m) * (n - mu_n) * p(m, n);
    }
    f.correlation = std::clamp(cov / denom, -1.0, 1.0);
  }
  return f;
}

}  // namespace ragseg
