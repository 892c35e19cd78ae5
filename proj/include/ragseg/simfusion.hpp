#pragma once

#include <string>
#include <vector>

#include "ragseg/matrix.hpp"

namespace ragseg {

// Patch embeddings (N x D, row-major over the patch grid) and class text
// embeddings (M x D).
struct EmbeddingSet {
  Matrix visual;
  Matrix text;
  int grid_w = 0;
  int grid_h = 0;
  std::vector<std::string> class_names;

  // Throws ParameterError on shape mismatch or rows with norm < 1e-12.
  void validate() const;
};

inline constexpr double kFusionEpsilon = 1e-6;
inline constexpr double kMinEmbeddingNorm = 1e-12;

// S[i][j] = <v_i, t_j> / (|v_i| |t_j|), N x M.
Matrix cosine_similarity(const EmbeddingSet& emb);

// Gaussian smoothing of each visual channel over the grid_h x grid_w
// lattice, reflect padding. Text embeddings pass through unchanged.
EmbeddingSet smooth_visual(const EmbeddingSet& emb, int kernel_size, double sigma);

// max(S_smooth, eps)^alpha * max(S, eps)^(1 - alpha)
Matrix fuse(const Matrix& s, const Matrix& s_smooth, double alpha);

// Row-wise argmax, ties to the lowest class index.
std::vector<int> predict(const Matrix& s);

}  // namespace ragseg
