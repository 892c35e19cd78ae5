#include "ragseg/rag.hpp"

#include <algorithm>
#include <cmath>

#include "ragseg/errors.hpp"

namespace ragseg {

FeatureScaling FeatureScaling::fit(const std::vector<RegionProfile>& profiles) {
  FeatureScaling s;
  if (profiles.empty()) return s;
  std::array<double, TextureFeatures::kCount> hi{};
  s.min = profiles.front().glcm_features.as_array();
  hi = s.min;
  for (const auto& p : profiles) {
    const auto f = p.glcm_features.as_array();
    for (std::size_t k = 0; k < f.size(); ++k) {
      s.min[k] = std::min(s.min[k], f[k]);
      hi[k] = std::max(hi[k], f[k]);
    }
  }
  for (std::size_t k = 0; k < hi.size(); ++k) s.range[k] = hi[k] - s.min[k];
  return s;
}

double region_distance(const RegionProfile& a, const RegionProfile& b, const FeatureSubset& subset,
                       const FeatureScaling& scaling) {
  double color2 = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    const double d = a.mean_color[c] - b.mean_color[c];
    color2 += d * d;
  }
  double texture = 0.0;
  const auto fa = a.glcm_features.as_array();
  const auto fb = b.glcm_features.as_array();
  const auto use = subset.as_array();
  for (std::size_t k = 0; k < fa.size(); ++k) {
    if (use[k]) texture += std::abs(scaling.apply(k, fa[k]) - scaling.apply(k, fb[k]));
  }
  return std::sqrt(color2) + texture;
}

std::vector<RegionProfile> region_profiles(const SuperpixelMap& map, const RgbImage& img, const GrayImage& gray) {
  if (map.width() != img.width || map.height() != img.height || gray.width != img.width ||
      gray.height != img.height) {
    throw ParameterError("superpixel map, image and gray image dimensions differ");
  }
  const int k = map.region_count;
  std::vector<RegionProfile> profiles(static_cast<std::size_t>(k));
  // Running means stay exact on constant regions; sum / count does not, and
  // the max-normalization of edge weights would amplify the residue.
  std::vector<std::array<double, 3>> means(static_cast<std::size_t>(k), {0.0, 0.0, 0.0});
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const int r = map.labels.data[p];
    if (r < 0 || r >= k) throw ParameterError("superpixel label outside [0, region_count)");
    const double n = static_cast<double>(++profiles[r].pixel_count);
    for (int c = 0; c < 3; ++c) means[r][c] += (img.data[3 * p + c] - means[r][c]) / n;
  }
  const auto glcms = region_glcms(gray, map.labels, k);
  for (int r = 0; r < k; ++r) {
    auto& prof = profiles[r];
    prof.region_id = r;
    for (int c = 0; c < 3; ++c) {
      prof.mean_color[c] = std::clamp(means[r][c], 0.0, 1.0);
    }
    prof.glcm_features = texture_features(glcms[r]);
  }
  return profiles;
}

std::vector<std::array<int, 2>> region_adjacency(const SuperpixelMap& map) {
  const int w = map.width(), h = map.height();
  std::vector<std::array<int, 2>> pairs;
  auto add = [&](int a, int b) {
    if (a != b) pairs.push_back({std::min(a, b), std::max(a, b)});
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = map.at(x, y);
      if (x + 1 < w) add(a, map.at(x + 1, y));
      if (y + 1 < h) add(a, map.at(x, y + 1));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

RagGraph build_rag(const SuperpixelMap& map, const RgbImage& img, const GrayImage& gray,
                   const FeatureSubset& subset) {
  RagGraph g;
  g.profiles = region_profiles(map, img, gray);
  g.subset = subset;
  g.scaling = FeatureScaling::fit(g.profiles);

  double max_raw = 0.0;
  for (const auto& [a, b] : region_adjacency(map)) {
    const double raw = g.raw_distance(a, b);
    max_raw = std::max(max_raw, raw);
    g.edges.push_back({a, b, raw});
  }
  g.norm_max = max_raw > 0.0 ? max_raw : 1.0;
  for (auto& e : g.edges) e.w /= g.norm_max;
  return g;
}

nlohmann::ordered_json rag_to_json(const RagGraph& graph) {
  nlohmann::ordered_json j;
  j["region_count"] = graph.region_count();
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& p : graph.profiles) {
    nlohmann::ordered_json n;
    n["id"] = p.region_id;
    n["pixels"] = p.pixel_count;
    n["mean_color"] = {p.mean_color[0], p.mean_color[1], p.mean_color[2]};
    nlohmann::ordered_json t;
    t["contrast"] = p.glcm_features.contrast;
    t["homogeneity"] = p.glcm_features.homogeneity;
    t["energy"] = p.glcm_features.energy;
    t["correlation"] = p.glcm_features.correlation;
    n["glcm"] = std::move(t);
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges) {
    nlohmann::ordered_json ej;
    ej["i"] = e.i;
    ej["j"] = e.j;
    ej["w"] = e.w;
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);
  j["norm_max"] = graph.norm_max;
  return j;
}

}  // namespace ragseg
