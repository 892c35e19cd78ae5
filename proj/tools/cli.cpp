#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "ragseg/errors.hpp"
#include "ragseg/pipeline.hpp"
#include "ragseg/tensorio.hpp"

namespace ragseg::cli {

namespace {

namespace fs = std::filesystem;

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

struct StructureFlags {
  std::string image;
  PipelineConfig cfg;
  std::string features = "all";
  int neigh = 8;

  void attach(CLI::App* cmd) {
    cmd->add_option("--image", image, "Input PNG or PPM (P6)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--segments", cfg.n_segments, "SLIC n_segments")->capture_default_str();
    cmd->add_option("--compactness", cfg.compactness, "SLIC compactness")->capture_default_str();
    cmd->add_option("--iterations", cfg.slic_iterations, "SLIC iterations")->capture_default_str();
    cmd->add_option("--levels", cfg.glcm_levels, "GLCM grey levels")->capture_default_str();
    cmd->add_option("--features", features, "GLCM features in edge weights")
        ->check(CLI::IsMember({"all", "f2f4", "none"}))
        ->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  }

  void attach_patch(CLI::App* cmd) {
    cmd->add_option("--patch", cfg.patch_size, "Patch size in pixels")->capture_default_str();
    cmd->add_option("--neigh", neigh, "Patch neighbourhood")->check(CLI::IsMember({4, 8}))->capture_default_str();
    cmd->add_option("--sigma-spatial", cfg.sigma_spatial, "Spatial Gaussian sigma (patch units)")
        ->capture_default_str();
  }

  PipelineConfig resolved() {
    cfg.feature_subset = parse_feature_subset(features);
    cfg.neighborhood = parse_neighborhood(neigh);
    cfg.validate();
    return cfg;
  }
};

int cmd_rag(StructureFlags& f, const std::string& out, const std::string& sp_out) {
  const PipelineConfig cfg = f.resolved();
  const RgbImage img = load_image(f.image);
  const SuperpixelMap map = slic(img, cfg.slic_params());
  const GrayImage gray = to_gray_quantized(img, cfg.glcm_levels);
  const RagGraph graph = build_rag(map, img, gray, cfg.feature_subset);
  write_json(out, rag_to_json(graph));
  if (!sp_out.empty()) {
    fs::path json_path = sp_out;
    json_path.replace_extension(".json");
    save_superpixels(sp_out, json_path, map);
  }
  return kExitOk;
}

// exp(b) per patch, expanded to patch_size blocks and scaled to [0,1] by the maximum.
RgbImage bias_heatmap(const StructureAnalysis& a, int width, int height) {
  std::vector<double> e(a.node_bias.b.size());
  std::transform(a.node_bias.b.begin(), a.node_bias.b.end(), e.begin(), [](double b) { return std::exp(b); });
  const double lo = 1.0;
  const double hi = *std::max_element(e.begin(), e.end());
  RgbImage vis(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double v = e[static_cast<std::size_t>(a.grid.index(x / a.grid.patch_size, y / a.grid.patch_size))];
      const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
      vis.set(x, y, {t, t, t});
    }
  }
  return vis;
}

int cmd_bias(StructureFlags& f, const std::string& out, const std::string& vis, const std::string& stats_out) {
  const PipelineConfig cfg = f.resolved();
  const RgbImage img = load_image(f.image);
  const StructureAnalysis a = analyze_structure(img, cfg);
  write_matrix(out, a.bias.values);
  if (!vis.empty()) save_png(vis, bias_heatmap(a, img.width, img.height));
  if (!stats_out.empty()) write_json(stats_out, patch_stats_to_json(a.grid, a.stats));
  return kExitOk;
}

struct SegmentFlags {
  std::string image, vis, txt, labels, out, report;
  PipelineConfig cfg;
};

int cmd_segment(SegmentFlags& f) {
  f.cfg.validate();
  const RgbImage img = load_image(f.image);
  EmbeddingSet emb;
  emb.visual = read_matrix(f.vis);
  emb.text = read_matrix(f.txt);
  {
    std::ifstream in(f.labels);
    if (!in) throw IoError("cannot open " + f.labels);
    nlohmann::json names;
    try {
      in >> names;
      emb.class_names = names.get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("labels file must be a JSON array of strings: " + std::string(e.what()));
    }
  }
  emb.grid_w = grid_cols(img.width, f.cfg.patch_size);
  emb.grid_h = grid_rows(img.height, f.cfg.patch_size);
  const SegmentationResult r = segment(img, emb, f.cfg);
  save_label_png(f.out, r.pixel_labels);
  if (!f.report.empty()) {
    nlohmann::ordered_json j;
    j["grid"] = {emb.grid_h, emb.grid_w};
    j["patch_size"] = f.cfg.patch_size;
    j["alpha"] = f.cfg.alpha;
    auto legend = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < emb.class_names.size(); ++k) {
      legend.push_back({{"id", k}, {"name", emb.class_names[k]}});
    }
    j["legend"] = std::move(legend);
    j["patch_labels"] = r.patch_labels;
    write_json(f.report, j);
  }
  return kExitOk;
}

int cmd_eval(const std::string& pred, const std::string& gt, int classes, std::optional<int> ignore,
             const std::string& out) {
  const MiouReport r = evaluate_miou(load_label_png(pred), load_label_png(gt), classes, ignore);
  write_json(out, miou_to_json(r));
  return kExitOk;
}

int cmd_corrupt(const std::string& image, const std::string& mode, std::uint64_t seed, const std::string& out) {
  const RgbImage img = load_image(image);
  Corruption c;
  if (mode == "jitter") {
    c = corruption::Jitter{0.2, 0.3, 0.3, 0.1, seed};
  } else if (mode == "over") {
    c = corruption::Brightness{1.8};
  } else if (mode == "under") {
    c = corruption::Brightness{0.4};
  } else if (mode == "blur") {
    c = corruption::Blur{9, 5.0};
  } else {
    c = corruption::Grayscale{};
  }
  save_png(out, corrupt(img, c));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-aware feature rectification for open-vocabulary segmentation", "ragseg"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  StructureFlags rag_flags;
  std::string rag_out, rag_sp;
  auto* rag = app.add_subcommand("rag", "Build the region adjacency graph of an image");
  rag_flags.attach(rag);
  rag->add_option("--out", rag_out, "Output RAG JSON")->required();
  rag->add_option("--superpixels", rag_sp, "Optional 16-bit label PNG (JSON sidecar beside it)");

  StructureFlags bias_flags;
  std::string bias_out, bias_vis, bias_stats;
  auto* bias = app.add_subcommand("bias", "Compute the bilateral attention bias matrix");
  bias_flags.attach(bias);
  bias_flags.attach_patch(bias);
  bias->add_option("--out", bias_out, "Output N x N tensor (.ragt)")->required();
  bias->add_option("--bias-vis", bias_vis, "Optional heatmap PNG of exp(b) per patch");
  bias->add_option("--stats", bias_stats, "Optional JSON dump of patch memberships and pair statistics");

  SegmentFlags seg;
  auto* segment_cmd = app.add_subcommand("segment", "Fuse similarities and predict a label map");
  segment_cmd->add_option("--image", seg.image, "Input image")->required()->check(CLI::ExistingFile);
  segment_cmd->add_option("--vis", seg.vis, "Patch embeddings tensor [N, D]")->required()->check(CLI::ExistingFile);
  segment_cmd->add_option("--txt", seg.txt, "Text embeddings tensor [M, D]")->required()->check(CLI::ExistingFile);
  segment_cmd->add_option("--labels", seg.labels, "JSON array of class names")->required()->check(CLI::ExistingFile);
  segment_cmd->add_option("--patch", seg.cfg.patch_size, "Patch size in pixels")->capture_default_str();
  segment_cmd->add_option("--alpha", seg.cfg.alpha, "Fusion weight of the smoothed similarity")->capture_default_str();
  segment_cmd->add_option("--kernel", seg.cfg.fusion_kernel, "Smoothing kernel size (odd)")->capture_default_str();
  segment_cmd->add_option("--sigma", seg.cfg.fusion_sigma, "Smoothing kernel sigma")->capture_default_str();
  segment_cmd->add_option("--out", seg.out, "Output label PNG")->required();
  segment_cmd->add_option("--report", seg.report, "Optional JSON report with class legend");

  std::string eval_pred, eval_gt, eval_out;
  int eval_classes = 0;
  std::optional<int> eval_ignore;
  auto* eval = app.add_subcommand("eval", "Per-class IoU and mIoU of a predicted label map");
  eval->add_option("--pred", eval_pred, "Predicted label PNG")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", eval_gt, "Ground-truth label PNG")->required()->check(CLI::ExistingFile);
  eval->add_option("--classes", eval_classes, "Number of classes")->required()->check(CLI::PositiveNumber);
  eval->add_option("--ignore", eval_ignore, "Ground-truth label excluded from all counts");
  eval->add_option("--out", eval_out, "Output metrics JSON")->required();

  std::string cor_image, cor_mode, cor_out;
  std::uint64_t cor_seed = 0;
  auto* cor = app.add_subcommand("corrupt", "Apply a robustness corruption to an image");
  cor->add_option("--image", cor_image, "Input image")->required()->check(CLI::ExistingFile);
  cor->add_option("--mode", cor_mode, "jitter | over (x1.8) | under (x0.4) | blur (9x9, sigma 5) | gray")
      ->required()
      ->check(CLI::IsMember({"jitter", "over", "under", "blur", "gray"}));
  cor->add_option("--seed", cor_seed, "Jitter seed")->capture_default_str();
  cor->add_option("--out", cor_out, "Output PNG")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rag->parsed()) return cmd_rag(rag_flags, rag_out, rag_sp);
    if (bias->parsed()) return cmd_bias(bias_flags, bias_out, bias_vis, bias_stats);
    if (segment_cmd->parsed()) return cmd_segment(seg);
    if (eval->parsed()) return cmd_eval(eval_pred, eval_gt, eval_classes, eval_ignore, eval_out);
    if (cor->parsed()) return cmd_corrupt(cor_image, cor_mode, cor_seed, cor_out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace ragseg::cli
