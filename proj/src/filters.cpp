#include "ragseg/filters.hpp"

#include <cmath>

#include "ragseg/errors.hpp"

namespace ragseg {

std::vector<double> gaussian_kernel_1d(int size, double sigma) {
  if (size < 1 || size % 2 == 0) throw ParameterError("gaussian kernel size must be odd and >= 1");
  if (!(sigma > 0.0)) throw ParameterError("gaussian sigma must be positive");
  const int half = size / 2;
  std::vector<double> k(static_cast<std::size_t>(size));
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + half)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

void convolve_separable(std::span<double> plane, int width, int height, std::span<const double> kernel) {
  const int half = static_cast<int>(kernel.size()) / 2;
  if (half == 0) return;
  std::vector<double> tmp(plane.size());
  for (int y = 0; y < height; ++y) {
    const double* src = plane.data() + static_cast<std::size_t>(y) * width;
    double* dst = tmp.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) acc += kernel[k + half] * src[reflect_index(x + k, width)];
      dst[x] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        acc += kernel[k + half] * tmp[static_cast<std::size_t>(reflect_index(y + k, height)) * width + x];
      }
      plane[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
}

}  // namespace ragseg
