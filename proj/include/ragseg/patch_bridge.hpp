#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "ragseg/rag.hpp"
#include "ragseg/superpixel.hpp"

namespace ragseg {

enum class Neighborhood { Four = 4, Eight = 8 };

Neighborhood parse_neighborhood(int n);

// Superpixel ids intersecting each patch of the tokenization lattice.
struct PatchGrid {
  int patch_size = 16;
  int grid_w = 0;
  int grid_h = 0;
  std::vector<std::vector<int>> memberships;  // per patch, sorted region ids

  std::size_t patch_count() const { return static_cast<std::size_t>(grid_w) * grid_h; }
  int index(int gx, int gy) const { return gy * grid_w + gx; }
};

// Patches (ceil(W/patch), ceil(H/patch)); border patches may be smaller.
PatchGrid assign_patches(const SuperpixelMap& map, int patch_size);

// In-grid neighbours of patch (gx, gy), raster order.
std::vector<int> patch_neighbors(int gx, int gy, int grid_w, int grid_h, Neighborhood nb);

struct PatchPairStat {
  int i = 0;  // i < j
  int j = 0;
  double mu = 0.0;
  double sigma = 0.0;  // population standard deviation
};

struct PatchEdgeStats {
  Neighborhood neighborhood = Neighborhood::Eight;
  std::vector<PatchPairStat> pairs;  // sorted by (i, j)

  // Symmetric lookup; empty when (i, j) are not neighbours.
  std::optional<PatchPairStat> find(int i, int j) const;
};

// For each neighbouring patch pair, mean and population standard deviation of
// the normalized distances between every region of one patch and every
// region of the other.
PatchEdgeStats patch_pair_stats(const PatchGrid& grid, const RagGraph& graph, Neighborhood nb);

nlohmann::ordered_json patch_stats_to_json(const PatchGrid& grid, const PatchEdgeStats& stats);

}  // namespace ragseg
