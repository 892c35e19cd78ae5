#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ragseg/matrix.hpp"

namespace ragseg {

// "RAGT" container: magic, version (1), dtype (1 = float32 LE), ndim (1..4),
// ndim little-endian uint32 dims, then row-major float32 LE payload.
struct Tensor {
  std::vector<std::uint32_t> shape;
  std::vector<float> values;

  bool operator==(const Tensor&) const = default;
};

inline constexpr std::uint8_t kTensorVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 1;

std::vector<std::uint8_t> encode_tensor(std::span<const std::uint32_t> shape, std::span<const float> values);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, std::span<const std::uint32_t> shape,
                  std::span<const float> values);
Tensor read_tensor(const std::filesystem::path& path);

// 2-D helpers; values narrowed to float32 on write.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

}  // namespace ragseg
