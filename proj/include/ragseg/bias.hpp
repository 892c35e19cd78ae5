#pragma once

#include <vector>

#include "ragseg/matrix.hpp"
#include "ragseg/patch_bridge.hpp"

namespace ragseg {

// Per-patch structural bias b[i] = mean over neighbours k of (mu_ik + sigma_ik).
struct NodeBias {
  std::vector<double> b;
};

struct BiasMatrix {
  Matrix values;  // N x N, B[i][j] = g(i,j) * exp(b[i])
  double sigma_spatial = 5.0;
};

// A patch with no in-grid neighbours (1x1 grid) gets b = 0.
NodeBias rag_bias(const PatchEdgeStats& stats, const PatchGrid& grid, Neighborhood nb);

// g(i,j) = exp(-||p_i - p_j||^2 / (2 sigma^2)) over integer patch coordinates,
// patches in row-major grid order.
Matrix spatial_gaussian(int grid_w, int grid_h, double sigma);

BiasMatrix bilateral_bias(const Matrix& spatial, const NodeBias& bias, double sigma_spatial);

// softmax_j(q_i . k_j / sqrt(d) + B_ij) V, row-wise with max subtraction.
// Throws NumericError on non-finite input.
Matrix biased_attention(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& bias);

// Row-stochastic attention weights used by biased_attention.
Matrix attention_weights(const Matrix& q, const Matrix& k, const Matrix& bias);

}  // namespace ragseg
