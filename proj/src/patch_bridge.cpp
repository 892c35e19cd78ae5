#include "ragseg/patch_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ragseg/errors.hpp"

namespace ragseg {

Neighborhood parse_neighborhood(int n) {
  if (n == 4) return Neighborhood::Four;
  if (n == 8) return Neighborhood::Eight;
  throw ParameterError("neighborhood must be 4 or 8, got " + std::to_string(n));
}

PatchGrid assign_patches(const SuperpixelMap& map, int patch_size) {
  if (patch_size < 1) throw ParameterError("patch size must be >= 1");
  PatchGrid grid;
  grid.patch_size = patch_size;
  grid.grid_w = (map.width() + patch_size - 1) / patch_size;
  grid.grid_h = (map.height() + patch_size - 1) / patch_size;
  grid.memberships.resize(grid.patch_count());
  for (int y = 0; y < map.height(); ++y) {
    const int gy = y / patch_size;
    for (int x = 0; x < map.width(); ++x) {
      grid.memberships[grid.index(x / patch_size, gy)].push_back(map.at(x, y));
    }
  }
  for (auto& m : grid.memberships) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }
  return grid;
}

std::vector<int> patch_neighbors(int gx, int gy, int grid_w, int grid_h, Neighborhood nb) {
  std::vector<int> out;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (nb == Neighborhood::Four && dx != 0 && dy != 0) continue;
      const int x = gx + dx, y = gy + dy;
      if (x < 0 || y < 0 || x >= grid_w || y >= grid_h) continue;
      out.push_back(y * grid_w + x);
    }
  }
  return out;
}

std::optional<PatchPairStat> PatchEdgeStats::find(int i, int j) const {
  const int a = std::min(i, j), b = std::max(i, j);
  auto it = std::lower_bound(pairs.begin(), pairs.end(), std::pair{a, b},
                             [](const PatchPairStat& s, const std::pair<int, int>& key) {
                               return std::pair{s.i, s.j} < key;
                             });
  if (it == pairs.end() || it->i != a || it->j != b) return std::nullopt;
  return *it;
}

PatchEdgeStats patch_pair_stats(const PatchGrid& grid, const RagGraph& graph, Neighborhood nb) {
  PatchEdgeStats stats;
  stats.neighborhood = nb;
  const int k = graph.region_count();
  for (const auto& m : grid.memberships) {
    if (m.empty()) throw ParameterError("patch with empty membership");
    if (m.back() >= k) throw ParameterError("patch grid references a region missing from the graph");
  }
  std::vector<double> dists;
  for (int gy = 0; gy < grid.grid_h; ++gy) {
    for (int gx = 0; gx < grid.grid_w; ++gx) {
      const int i = grid.index(gx, gy);
      for (int j : patch_neighbors(gx, gy, grid.grid_w, grid.grid_h, nb)) {
        if (j <= i) continue;
        dists.clear();
        for (int a : grid.memberships[i]) {
          for (int b : grid.memberships[j]) dists.push_back(a == b ? 0.0 : graph.normalized_distance(a, b));
        }
        double mean = 0.0;
        for (double d : dists) mean += d;
        mean /= static_cast<double>(dists.size());
        double var = 0.0;
        for (double d : dists) var += (d - mean) * (d - mean);
        var /= static_cast<double>(dists.size());
        stats.pairs.push_back({i, j, mean, std::sqrt(var)});
      }
    }
  }
  std::sort(stats.pairs.begin(), stats.pairs.end(),
            [](const PatchPairStat& x, const PatchPairStat& y) { return std::pair{x.i, x.j} < std::pair{y.i, y.j}; });
  return stats;
}

nlohmann::ordered_json patch_stats_to_json(const PatchGrid& grid, const PatchEdgeStats& stats) {
  nlohmann::ordered_json j;
  j["patch_size"] = grid.patch_size;
  j["grid"] = {grid.grid_h, grid.grid_w};
  j["neighborhood"] = static_cast<int>(stats.neighborhood);
  j["memberships"] = grid.memberships;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : stats.pairs) {
    nlohmann::ordered_json e;
    e["i"] = p.i;
    e["j"] = p.j;
    e["mu"] = p.mu;
    e["sigma"] = p.sigma;
    pairs.push_back(std::move(e));
  }
  j["pairs"] = std::move(pairs);
  return j;
}

}  // namespace ragseg
