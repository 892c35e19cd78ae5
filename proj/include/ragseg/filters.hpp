#pragma once

#include <span>
#include <vector>

namespace ragseg {

// Discrete Gaussian of odd `size`, normalized to sum 1 after truncation.
std::vector<double> gaussian_kernel_1d(int size, double sigma);

// Reflect-101 boundary index (dcb|abcd|cba); single-element axes map to 0.
int reflect_index(int i, int n);

// Separable convolution of a single plane in place, reflect padding on both axes.
void convolve_separable(std::span<double> plane, int width, int height, std::span<const double> kernel);

}  // namespace ragseg
