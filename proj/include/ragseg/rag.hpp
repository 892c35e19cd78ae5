#pragma once

#include <array>
#include <vector>

#include "json.hpp"
#include "ragseg/imaging.hpp"
#include "ragseg/superpixel.hpp"
#include "ragseg/texture.hpp"

namespace ragseg {

struct RegionProfile {
  int region_id = 0;
  std::size_t pixel_count = 0;
  Rgb mean_color{0.0, 0.0, 0.0};
  TextureFeatures glcm_features;
};

// Per-image min-max scaling of each texture feature, mapping the observed
// range onto [0,1]. Features with an empty range scale to 0.
struct FeatureScaling {
  std::array<double, TextureFeatures::kCount> min{0.0, 0.0, 0.0, 0.0};
  std::array<double, TextureFeatures::kCount> range{1.0, 1.0, 1.0, 1.0};

  static FeatureScaling identity() { return {}; }
  static FeatureScaling fit(const std::vector<RegionProfile>& profiles);
  double apply(std::size_t k, double v) const { return range[k] > 0.0 ? (v - min[k]) / range[k] : 0.0; }
};

// ||mu_a - mu_b||_2 + sum over selected k of |f_a^k - f_b^k|, features scaled first.
double region_distance(const RegionProfile& a, const RegionProfile& b, const FeatureSubset& subset,
                       const FeatureScaling& scaling = FeatureScaling::identity());

struct RagEdge {
  int i = 0;  // i < j
  int j = 0;
  double w = 0.0;  // normalized by norm_max
};

struct RagGraph {
  std::vector<RegionProfile> profiles;
  std::vector<RagEdge> edges;  // sorted by (i, j)
  double norm_max = 1.0;
  FeatureSubset subset;
  FeatureScaling scaling;

  int region_count() const { return static_cast<int>(profiles.size()); }
  double raw_distance(int a, int b) const {
    return region_distance(profiles[a], profiles[b], subset, scaling);
  }
  // Any pair of regions, adjacent or not, on the stored-weight scale.
  double normalized_distance(int a, int b) const { return raw_distance(a, b) / norm_max; }
};

std::vector<RegionProfile> region_profiles(const SuperpixelMap& map, const RgbImage& img, const GrayImage& gray);

// Unordered pairs of labels that meet across a horizontal or vertical pixel boundary.
std::vector<std::array<int, 2>> region_adjacency(const SuperpixelMap& map);

RagGraph build_rag(const SuperpixelMap& map, const RgbImage& img, const GrayImage& gray,
                   const FeatureSubset& subset);

// Fixed key order: region_count, nodes, edges, norm_max.
nlohmann::ordered_json rag_to_json(const RagGraph& graph);

}  // namespace ragseg
