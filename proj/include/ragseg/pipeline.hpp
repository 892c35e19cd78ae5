#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "json.hpp"
#include "ragseg/bias.hpp"
#include "ragseg/imaging.hpp"
#include "ragseg/patch_bridge.hpp"
#include "ragseg/rag.hpp"
#include "ragseg/simfusion.hpp"
#include "ragseg/superpixel.hpp"

namespace ragseg {

struct PipelineConfig {
  int n_segments = 300;
  double compactness = 10.0;
  int slic_iterations = 10;
  int glcm_levels = 32;
  FeatureSubset feature_subset = FeatureSubset::all();
  Neighborhood neighborhood = Neighborhood::Eight;
  int patch_size = 16;
  double sigma_spatial = 5.0;
  double alpha = 0.6;
  int fusion_kernel = 3;
  double fusion_sigma = 3.0;
  std::uint64_t seed = 0;

  void validate() const;
  SlicParams slic_params() const { return {n_segments, compactness, slic_iterations, seed}; }
};

// Every intermediate of the structure branch, for inspection and export.
struct StructureAnalysis {
  SuperpixelMap superpixels;
  RagGraph graph;
  PatchGrid grid;
  PatchEdgeStats stats;
  NodeBias node_bias;
  BiasMatrix bias;
};

StructureAnalysis analyze_structure(const RgbImage& img, const PipelineConfig& cfg);

// image -> superpixels -> RAG -> patch statistics -> bilateral bias
BiasMatrix compute_bias_for_image(const RgbImage& img, const PipelineConfig& cfg);

struct SegmentationResult {
  std::vector<int> patch_labels;
  LabelMap pixel_labels;
  Matrix fused_similarity;
  std::shared_ptr<const BiasMatrix> bias;
};

// Grid dimensions expected for an image under cfg.patch_size.
int grid_cols(int width, int patch_size);
int grid_rows(int height, int patch_size);

// Smooth -> cosine (raw and smoothed) -> fuse -> argmax -> nearest upsample.
// `emb` grid must equal (ceil(W/patch), ceil(H/patch)).
SegmentationResult segment(const RgbImage& img, const EmbeddingSet& emb, const PipelineConfig& cfg,
                           std::shared_ptr<const BiasMatrix> bias = nullptr);

// Each pixel takes the label of the patch containing it.
LabelMap upsample_nearest(std::span<const int> patch_labels, int grid_w, int grid_h, int width, int height,
                          int patch_size);

struct MiouReport {
  std::vector<std::optional<double>> per_class;  // empty when class absent from both maps
  double miou = 0.0;
};

MiouReport evaluate_miou(const LabelMap& pred, const LabelMap& gt, int num_classes,
                         std::optional<int> ignore_label = std::nullopt);

// {"per_class": [...], "miou": x}; absent classes are null.
nlohmann::ordered_json miou_to_json(const MiouReport& report);

}  // namespace ragseg
