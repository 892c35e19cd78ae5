#pragma once

#include <cstdint>
#include <filesystem>

#include "ragseg/imaging.hpp"

namespace ragseg {

// Per-pixel region labels in [0, region_count), each label used at least once.
struct SuperpixelMap {
  LabelMap labels;
  int region_count = 0;

  int width() const { return labels.width; }
  int height() const { return labels.height; }
  int at(int x, int y) const { return labels.at(x, y); }
};

struct SlicParams {
  int n_segments = 300;
  double compactness = 10.0;
  int iterations = 10;
  std::uint64_t seed = 0;
};

// Simple linear iterative clustering in CIELAB + xy, followed by connectivity
// enforcement (components under S*S/4 pixels merge into their largest
// neighbour) and contiguous relabeling in raster order.
SuperpixelMap slic(const RgbImage& img, const SlicParams& params);

// Grid spacing S = sqrt(HW / n_segments).
double slic_grid_step(int width, int height, int n_segments);

// Exposed for tests: relabels 4-connected components and absorbs the ones
// smaller than `min_size` into their largest adjacent component.
SuperpixelMap enforce_connectivity(const LabelMap& labels, double min_size);

// Converts an arbitrary label raster into contiguous ids in order of first
// appearance.
SuperpixelMap relabel_contiguous(const LabelMap& labels);

// Label ids as 16-bit PNG plus {width, height, region_count} JSON sidecar.
void save_superpixels(const std::filesystem::path& png_path, const std::filesystem::path& json_path,
                      const SuperpixelMap& map);

}  // namespace ragseg
