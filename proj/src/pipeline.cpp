#include "ragseg/pipeline.hpp"

#include <cmath>
#include <string>

#include "ragseg/errors.hpp"

namespace ragseg {

void PipelineConfig::validate() const {
  if (n_segments < 1) throw ParameterError("n_segments must be >= 1");
  if (!(compactness > 0.0)) throw ParameterError("compactness must be positive");
  if (slic_iterations < 1) throw ParameterError("slic iterations must be >= 1");
  if (glcm_levels < 2) throw ParameterError("glcm levels must be >= 2");
  if (neighborhood != Neighborhood::Four && neighborhood != Neighborhood::Eight) {
    throw ParameterError("neighborhood must be 4 or 8");
  }
  if (patch_size < 1) throw ParameterError("patch size must be >= 1");
  if (!(sigma_spatial > 0.0)) throw ParameterError("spatial sigma must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0,1]");
  if (fusion_kernel < 1 || fusion_kernel % 2 == 0) throw ParameterError("fusion kernel must be odd and >= 1");
  if (!(fusion_sigma > 0.0)) throw ParameterError("fusion sigma must be positive");
}

int grid_cols(int width, int patch_size) { return (width + patch_size - 1) / patch_size; }
int grid_rows(int height, int patch_size) { return (height + patch_size - 1) / patch_size; }

StructureAnalysis analyze_structure(const RgbImage& img, const PipelineConfig& cfg) {
  cfg.validate();
  StructureAnalysis a;
  a.superpixels = slic(img, cfg.slic_params());
  const GrayImage gray = to_gray_quantized(img, cfg.glcm_levels);
  a.graph = build_rag(a.superpixels, img, gray, cfg.feature_subset);
  a.grid = assign_patches(a.superpixels, cfg.patch_size);
  a.stats = patch_pair_stats(a.grid, a.graph, cfg.neighborhood);
  a.node_bias = rag_bias(a.stats, a.grid, cfg.neighborhood);
  a.bias = bilateral_bias(spatial_gaussian(a.grid.grid_w, a.grid.grid_h, cfg.sigma_spatial), a.node_bias,
                          cfg.sigma_spatial);
  return a;
}

BiasMatrix compute_bias_for_image(const RgbImage& img, const PipelineConfig& cfg) {
  return analyze_structure(img, cfg).bias;
}

LabelMap upsample_nearest(std::span<const int> patch_labels, int grid_w, int grid_h, int width, int height,
                          int patch_size) {
  if (patch_labels.size() != static_cast<std::size_t>(grid_w) * grid_h) {
    throw ParameterError("patch label count does not match grid");
  }
  if (grid_cols(width, patch_size) != grid_w || grid_rows(height, patch_size) != grid_h) {
    throw ParameterError("grid does not cover the image at this patch size");
  }
  LabelMap out{width, height, std::vector<std::int32_t>(static_cast<std::size_t>(width) * height)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out.data[static_cast<std::size_t>(y) * width + x] =
          patch_labels[static_cast<std::size_t>(y / patch_size) * grid_w + x / patch_size];
    }
  }
  return out;
}

SegmentationResult segment(const RgbImage& img, const EmbeddingSet& emb, const PipelineConfig& cfg,
                           std::shared_ptr<const BiasMatrix> bias) {
  cfg.validate();
  const int gw = grid_cols(img.width, cfg.patch_size), gh = grid_rows(img.height, cfg.patch_size);
  if (emb.grid_w != gw || emb.grid_h != gh) {
    throw ParameterError("embedding grid " + std::to_string(emb.grid_w) + "x" + std::to_string(emb.grid_h) +
                         " does not match image grid " + std::to_string(gw) + "x" + std::to_string(gh));
  }
  const Matrix raw = cosine_similarity(emb);
  const Matrix smoothed = cosine_similarity(smooth_visual(emb, cfg.fusion_kernel, cfg.fusion_sigma));
  SegmentationResult r;
  r.fused_similarity = fuse(raw, smoothed, cfg.alpha);
  r.patch_labels = predict(r.fused_similarity);
  r.pixel_labels = upsample_nearest(r.patch_labels, gw, gh, img.width, img.height, cfg.patch_size);
  r.bias = std::move(bias);
  return r;
}

MiouReport evaluate_miou(const LabelMap& pred, const LabelMap& gt, int num_classes, std::optional<int> ignore_label) {
  if (pred.width != gt.width || pred.height != gt.height || pred.data.size() != gt.data.size()) {
    throw ParameterError("prediction and ground truth shapes differ");
  }
  if (num_classes < 1) throw ParameterError("num_classes must be >= 1");
  const std::size_t c = static_cast<std::size_t>(num_classes);
  std::vector<std::uint64_t> inter(c, 0), pred_count(c, 0), gt_count(c, 0);
  auto check = [&](int v, const char* what) {
    if (v < 0 || v >= num_classes) {
      throw ParameterError(std::string(what) + " label " + std::to_string(v) + " outside [0, num_classes)");
    }
  };
  for (std::size_t i = 0; i < gt.data.size(); ++i) {
    const int g = gt.data[i], p = pred.data[i];
    if (ignore_label && g == *ignore_label) continue;
    check(g, "ground-truth");
    check(p, "predicted");
    ++gt_count[g];
    ++pred_count[p];
    if (g == p) ++inter[g];
  }
  MiouReport r;
  r.per_class.resize(c);
  double sum = 0.0;
  int present = 0;
  for (std::size_t k = 0; k < c; ++k) {
    const std::uint64_t uni = pred_count[k] + gt_count[k] - inter[k];
    if (uni == 0) continue;
    r.per_class[k] = static_cast<double>(inter[k]) / static_cast<double>(uni);
    sum += *r.per_class[k];
    ++present;
  }
  r.miou = present > 0 ? sum / present : 0.0;
  return r;
}

nlohmann::ordered_json miou_to_json(const MiouReport& report) {
  nlohmann::ordered_json j;
  auto per = nlohmann::ordered_json::array();
  for (const auto& v : report.per_class) per.push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json());
  j["per_class"] = std::move(per);
  j["miou"] = report.miou;
  return j;
}

}  // namespace ragseg
