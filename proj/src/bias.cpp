#include "ragseg/bias.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ragseg/errors.hpp"

namespace ragseg {

NodeBias rag_bias(const PatchEdgeStats& stats, const PatchGrid& grid, Neighborhood nb) {
  if (stats.neighborhood != nb) throw ParameterError("patch stats were computed under a different neighborhood");
  NodeBias out;
  out.b.assign(grid.patch_count(), 0.0);
  for (int gy = 0; gy < grid.grid_h; ++gy) {
    for (int gx = 0; gx < grid.grid_w; ++gx) {
      const int i = grid.index(gx, gy);
      const auto neighbors = patch_neighbors(gx, gy, grid.grid_w, grid.grid_h, nb);
      if (neighbors.empty()) continue;
      double sum = 0.0;
      for (int k : neighbors) {
        const auto s = stats.find(i, k);
        if (!s) throw ParameterError("missing patch pair statistics");
        sum += s->mu + s->sigma;
      }
      out.b[i] = sum / static_cast<double>(neighbors.size());
    }
  }
  return out;
}

Matrix spatial_gaussian(int grid_w, int grid_h, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("spatial sigma must be positive");
  if (grid_w < 1 || grid_h < 1) throw ParameterError("grid dimensions must be positive");
  const std::size_t n = static_cast<std::size_t>(grid_w) * grid_h;
  Matrix g(n, n);
  const double denom = 2.0 * sigma * sigma;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = static_cast<double>(i % grid_w), yi = static_cast<double>(i / grid_w);
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = xi - static_cast<double>(j % grid_w);
      const double dy = yi - static_cast<double>(j / grid_w);
      g(i, j) = std::exp(-(dx * dx + dy * dy) / denom);
    }
  }
  return g;
}

BiasMatrix bilateral_bias(const Matrix& spatial, const NodeBias& bias, double sigma_spatial) {
  if (spatial.rows() != spatial.cols() || spatial.rows() != bias.b.size()) {
    throw ParameterError("spatial kernel and node bias dimensions differ");
  }
  BiasMatrix out{spatial, sigma_spatial};
  for (std::size_t i = 0; i < spatial.rows(); ++i) {
    const double factor = std::exp(bias.b[i]);
    for (double& v : out.values.row(i)) v *= factor;
  }
  return out;
}

namespace {

void require_finite(const Matrix& m, const char* name) {
  for (double v : m.data()) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + name);
  }
}

}  // namespace

Matrix attention_weights(const Matrix& q, const Matrix& k, const Matrix& bias) {
  if (q.cols() != k.cols() || q.rows() != k.rows()) throw ParameterError("Q and K shapes differ");
  if (bias.rows() != q.rows() || bias.cols() != k.rows()) throw ParameterError("bias must be N x N");
  require_finite(q, "Q");
  require_finite(k, "K");
  require_finite(bias, "B");
  const std::size_t n = q.rows(), d = q.cols();
  const double scale = d > 0 ? 1.0 / std::sqrt(static_cast<double>(d)) : 1.0;
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = w.row(i);
    const auto qi = q.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const auto kj = k.row(j);
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += qi[c] * kj[c];
      row[j] = dot * scale + bias(i, j);
      mx = std::max(mx, row[j]);
    }
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
  return w;
}

Matrix biased_attention(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& bias) {
  if (v.rows() != k.rows()) throw ParameterError("V must have N rows");
  require_finite(v, "V");
  const Matrix w = attention_weights(q, k, bias);
  const std::size_t n = q.rows(), dv = v.cols();
  Matrix out(n, dv);
  for (std::size_t i = 0; i < n; ++i) {
    auto o = out.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = w(i, j);
      const auto vj = v.row(j);
      for (std::size_t c = 0; c < dv; ++c) o[c] += a * vj[c];
    }
  }
  return out;
}

}  // namespace ragseg
