#include "ragseg/simfusion.hpp"

#include <algorithm>
#include <cmath>

#include "ragseg/errors.hpp"
#include "ragseg/filters.hpp"

namespace ragseg {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

void EmbeddingSet::validate() const {
  if (grid_w < 1 || grid_h < 1) throw ParameterError("embedding grid dimensions must be positive");
  if (visual.rows() != static_cast<std::size_t>(grid_w) * grid_h) {
    throw ParameterError("visual embedding count does not match grid_w * grid_h");
  }
  if (text.rows() < 1) throw ParameterError("at least one text embedding is required");
  if (visual.cols() != text.cols() || visual.cols() == 0) {
    throw ParameterError("visual and text embedding dimensions differ");
  }
  if (!class_names.empty() && class_names.size() != text.rows()) {
    throw ParameterError("class name count does not match text embeddings");
  }
  for (const Matrix* m : {&visual, &text}) {
    for (std::size_t r = 0; r < m->rows(); ++r) {
      const double n = norm(m->row(r));
      if (!(n >= kMinEmbeddingNorm) || !std::isfinite(n)) throw ParameterError("zero-norm or non-finite embedding row");
    }
  }
}

Matrix cosine_similarity(const EmbeddingSet& emb) {
  emb.validate();
  const std::size_t n = emb.visual.rows(), m = emb.text.rows(), d = emb.visual.cols();
  std::vector<double> tnorm(m);
  for (std::size_t j = 0; j < m; ++j) tnorm[j] = norm(emb.text.row(j));
  Matrix s(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = emb.visual.row(i);
    const double vn = norm(v);
    for (std::size_t j = 0; j < m; ++j) {
      const auto t = emb.text.row(j);
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += v[c] * t[c];
      s(i, j) = std::clamp(dot / (vn * tnorm[j]), -1.0, 1.0);
    }
  }
  return s;
}

EmbeddingSet smooth_visual(const EmbeddingSet& emb, int kernel_size, double sigma) {
  if (kernel_size < 1 || kernel_size % 2 == 0) throw ParameterError("smoothing kernel size must be odd and >= 1");
  if (!(sigma > 0.0)) throw ParameterError("smoothing sigma must be positive");
  emb.validate();
  EmbeddingSet out = emb;
  if (kernel_size == 1) return out;
  const auto kernel = gaussian_kernel_1d(kernel_size, sigma);
  const std::size_t n = emb.visual.rows(), d = emb.visual.cols();
  std::vector<double> plane(n);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t i = 0; i < n; ++i) plane[i] = emb.visual(i, c);
    convolve_separable(plane, emb.grid_w, emb.grid_h, kernel);
    for (std::size_t i = 0; i < n; ++i) out.visual(i, c) = plane[i];
  }
  return out;
}

Matrix fuse(const Matrix& s, const Matrix& s_smooth, double alpha) {
  if (s.rows() != s_smooth.rows() || s.cols() != s_smooth.cols()) {
    throw ParameterError("similarity matrices have different shapes");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0,1]");
  Matrix out(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double raw = std::max(s.data()[i], kFusionEpsilon);
    const double smooth = std::max(s_smooth.data()[i], kFusionEpsilon);
    if (alpha == 0.0 || smooth == raw) {
      out.data()[i] = raw;
    } else if (alpha == 1.0) {
      out.data()[i] = smooth;
    } else {
      out.data()[i] = std::pow(smooth, alpha) * std::pow(raw, 1.0 - alpha);
    }
  }
  return out;
}

std::vector<int> predict(const Matrix& s) {
  if (s.cols() < 1) throw ParameterError("similarity matrix needs at least one class");
  std::vector<int> labels(s.rows());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const auto row = s.row(i);
    labels[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return labels;
}

}  // namespace ragseg
