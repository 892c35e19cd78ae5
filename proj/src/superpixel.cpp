#include "ragseg/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "json.hpp"

#include "ragseg/errors.hpp"

namespace ragseg {

namespace {

struct Lab {
  double l, a, b;
};

double srgb_to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// sRGB (D65) -> CIELAB.
Lab to_lab(double r, double g, double b) {
  r = srgb_to_linear(r);
  g = srgb_to_linear(g);
  b = srgb_to_linear(b);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(x / 0.95047);
  const double fy = lab_f(y / 1.00000);
  const double fz = lab_f(z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double lab_dist2(const Lab& p, const Lab& q) {
  const double dl = p.l - q.l, da = p.a - q.a, db = p.b - q.b;
  return dl * dl + da * da + db * db;
}

struct Center {
  Lab color;
  double x, y;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void attach(std::size_t child_root, std::size_t parent_root) { parent_[child_root] = parent_root; }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

double slic_grid_step(int width, int height, int n_segments) {
  return std::sqrt(static_cast<double>(width) * height / n_segments);
}

SuperpixelMap relabel_contiguous(const LabelMap& labels) {
  SuperpixelMap out;
  out.labels = labels;
  std::vector<int> remap;
  int next = 0;
  for (auto& v : out.labels.data) {
    if (v < 0) throw ParameterError("negative label");
    if (static_cast<std::size_t>(v) >= remap.size()) remap.resize(static_cast<std::size_t>(v) + 1, -1);
    if (remap[v] < 0) remap[v] = next++;
    v = remap[v];
  }
  out.region_count = next;
  return out;
}

SuperpixelMap enforce_connectivity(const LabelMap& labels, double min_size) {
  const int w = labels.width, h = labels.height;
  const std::size_t n = labels.data.size();

  // 4-connected components of equal label.
  std::vector<int> comp(n, -1);
  std::vector<std::size_t> comp_size;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int id = static_cast<int>(comp_size.size());
    const int lab = labels.data[start];
    std::size_t size = 0;
    comp[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const int x = static_cast<int>(p % w), y = static_cast<int>(p / w);
      const std::size_t nb[4] = {x > 0 ? p - 1 : p, x + 1 < w ? p + 1 : p, y > 0 ? p - w : p,
                                 y + 1 < h ? p + w : p};
      for (std::size_t q : nb) {
        if (q != p && comp[q] < 0 && labels.data[q] == lab) {
          comp[q] = id;
          stack.push_back(q);
        }
      }
    }
    comp_size.push_back(size);
  }

  const std::size_t ncomp = comp_size.size();
  std::vector<std::set<std::size_t>> adj(ncomp);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w && comp[p] != comp[p + 1]) {
        adj[comp[p]].insert(comp[p + 1]);
        adj[comp[p + 1]].insert(comp[p]);
      }
      if (y + 1 < h && comp[p] != comp[p + w]) {
        adj[comp[p]].insert(comp[p + w]);
        adj[comp[p + w]].insert(comp[p]);
      }
    }
  }

  // Components are visited in raster order of their first pixel. A merged
  // group keeps the union of its members' neighbours, so a group that is
  // still too small after absorbing is merged again when its root is visited.
  UnionFind uf(ncomp);
  std::vector<std::size_t> group_size = comp_size;
  for (std::size_t c = 0; c < ncomp; ++c) {
    const std::size_t root = uf.find(c);
    if (root != c || static_cast<double>(group_size[root]) >= min_size) continue;
    std::size_t best = root;
    std::size_t best_size = 0;
    for (std::size_t nb : adj[root]) {
      const std::size_t r = uf.find(nb);
      if (r == root) continue;
      if (group_size[r] > best_size || (group_size[r] == best_size && r < best)) {
        best = r;
        best_size = group_size[r];
      }
    }
    if (best == root) continue;  // whole image
    uf.attach(root, best);
    group_size[best] += group_size[root];
    if (adj[root].size() > adj[best].size()) std::swap(adj[root], adj[best]);
    adj[best].insert(adj[root].begin(), adj[root].end());
    adj[root].clear();
  }

  LabelMap merged = labels;
  for (std::size_t p = 0; p < n; ++p) merged.data[p] = static_cast<int>(uf.find(static_cast<std::size_t>(comp[p])));
  return relabel_contiguous(merged);
}

SuperpixelMap slic(const RgbImage& img, const SlicParams& params) {
  if (params.n_segments < 1) throw ParameterError("n_segments must be >= 1");
  if (!(params.compactness > 0.0)) throw ParameterError("compactness must be positive");
  if (params.iterations < 1) throw ParameterError("iterations must be >= 1");
  const int w = img.width, h = img.height;
  const std::size_t n = img.pixel_count();
  if (n == 0) throw ParameterError("empty image");
  if (static_cast<std::size_t>(params.n_segments) > n) throw ParameterError("n_segments exceeds pixel count");

  std::vector<Lab> lab(n);
  for (std::size_t i = 0; i < n; ++i) lab[i] = to_lab(img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]);

  const double step = slic_grid_step(w, h, params.n_segments);
  const int nx = std::max(1, static_cast<int>(std::lround(w / step)));
  const int ny = std::max(1, static_cast<int>(std::lround(h / step)));
  const double cell_w = static_cast<double>(w) / nx;
  const double cell_h = static_cast<double>(h) / ny;

  auto gradient = [&](int x, int y) {
    const auto idx = [&](int xx, int yy) {
      return static_cast<std::size_t>(std::clamp(yy, 0, h - 1)) * w + std::clamp(xx, 0, w - 1);
    };
    return lab_dist2(lab[idx(x + 1, y)], lab[idx(x - 1, y)]) + lab_dist2(lab[idx(x, y + 1)], lab[idx(x, y - 1)]);
  };

  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int cx = std::min(w - 1, static_cast<int>((i + 0.5) * cell_w));
      int cy = std::min(h - 1, static_cast<int>((j + 0.5) * cell_h));
      int bx = cx, by = cy;
      double best = gradient(cx, cy);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = cx + dx, yy = cy + dy;
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
          const double g = gradient(xx, yy);
          if (g < best) {
            best = g;
            bx = xx;
            by = yy;
          }
        }
      }
      centers.push_back({lab[static_cast<std::size_t>(by) * w + bx], static_cast<double>(bx), static_cast<double>(by)});
    }
  }

  // Pixels outside every search window keep their grid-cell label.
  LabelMap labels{w, h, std::vector<std::int32_t>(n)};
  for (int y = 0; y < h; ++y) {
    const int j = std::min(ny - 1, static_cast<int>(y / cell_h));
    for (int x = 0; x < w; ++x) {
      const int i = std::min(nx - 1, static_cast<int>(x / cell_w));
      labels.data[static_cast<std::size_t>(y) * w + x] = j * nx + i;
    }
  }

  const double spatial_weight = (params.compactness / step) * (params.compactness / step);
  std::vector<double> dist(n);
  const int window = static_cast<int>(std::ceil(step));
  for (int it = 0; it < params.iterations; ++it) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const Center& c = centers[k];
      const int x0 = std::max(0, static_cast<int>(std::floor(c.x)) - window);
      const int x1 = std::min(w - 1, static_cast<int>(std::floor(c.x)) + window);
      const int y0 = std::max(0, static_cast<int>(std::floor(c.y)) - window);
      const int y1 = std::min(h - 1, static_cast<int>(std::floor(c.y)) + window);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const std::size_t p = static_cast<std::size_t>(y) * w + x;
          const double dx = x - c.x, dy = y - c.y;
          const double d = lab_dist2(lab[p], c.color) + (dx * dx + dy * dy) * spatial_weight;
          if (d < dist[p]) {
            dist[p] = d;
            labels.data[p] = static_cast<std::int32_t>(k);
          }
        }
      }
    }

    std::vector<double> sum(centers.size() * 5, 0.0);
    std::vector<std::size_t> count(centers.size(), 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        const std::size_t k = static_cast<std::size_t>(labels.data[p]);
        double* s = &sum[k * 5];
        s[0] += lab[p].l;
        s[1] += lab[p].a;
        s[2] += lab[p].b;
        s[3] += x;
        s[4] += y;
        ++count[k];
      }
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (count[k] == 0) continue;
      const double inv = 1.0 / static_cast<double>(count[k]);
      const double* s = &sum[k * 5];
      centers[k] = {{s[0] * inv, s[1] * inv, s[2] * inv}, s[3] * inv, s[4] * inv};
    }
  }

  return enforce_connectivity(labels, step * step / 4.0);
}

void save_superpixels(const std::filesystem::path& png_path, const std::filesystem::path& json_path,
                      const SuperpixelMap& map) {
  save_label_png(png_path, map.labels, /*force_16bit=*/true);
  nlohmann::ordered_json j;
  j["width"] = map.width();
  j["height"] = map.height();
  j["region_count"] = map.region_count;
  std::ofstream out(json_path);
  if (!out) throw IoError("cannot open for writing: " + json_path.string());
  out << j.dump(2) << '\n';
}

}  // namespace ragseg
