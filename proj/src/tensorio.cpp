#include "ragseg/tensorio.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "ragseg/errors.hpp"

namespace ragseg {

namespace {

constexpr std::uint8_t kMagic[4] = {'R', 'A', 'G', 'T'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xff));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t element_count(std::span<const std::uint32_t> shape) {
  std::uint64_t n = 1;
  for (auto d : shape) {
    n *= d;
    if (n > (std::uint64_t{1} << 40)) throw FormatError("tensor too large");
  }
  return n;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(std::span<const std::uint32_t> shape, std::span<const float> values) {
  if (shape.empty() || shape.size() > 4) throw ParameterError("tensor ndim must be in [1,4]");
  if (element_count(shape) != values.size()) throw ParameterError("tensor values do not match shape");
  std::vector<std::uint8_t> out;
  out.reserve(7 + 4 * shape.size() + 4 * values.size());
  for (std::uint8_t b : kMagic) out.push_back(b);
  out.push_back(kTensorVersion);
  out.push_back(kDtypeFloat32);
  out.push_back(static_cast<std::uint8_t>(shape.size()));
  for (auto d : shape) put_u32(out, d);
  for (float v : values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 7) throw FormatError("tensor header truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad tensor magic");
  if (bytes[4] != kTensorVersion) throw FormatError("unsupported tensor version " + std::to_string(bytes[4]));
  if (bytes[5] != kDtypeFloat32) throw FormatError("unsupported tensor dtype " + std::to_string(bytes[5]));
  const std::size_t ndim = bytes[6];
  if (ndim < 1 || ndim > 4) throw FormatError("tensor ndim must be in [1,4]");
  const std::size_t header = 7 + 4 * ndim;
  if (bytes.size() < header) throw FormatError("tensor dims truncated");
  Tensor t;
  for (std::size_t k = 0; k < ndim; ++k) t.shape.push_back(get_u32(bytes.data() + 7 + 4 * k));
  const std::uint64_t n = element_count(t.shape);
  if (bytes.size() - header < n * 4) throw FormatError("tensor payload truncated");
  if (bytes.size() - header > n * 4) throw FormatError("trailing bytes after tensor payload");
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.values[i] = std::bit_cast<float>(get_u32(bytes.data() + header + 4 * i));
  return t;
}

void write_tensor(const std::filesystem::path& path, std::span<const std::uint32_t> shape,
                  std::span<const float> values) {
  const auto bytes = encode_tensor(shape, values);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return decode_tensor(bytes);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  const std::uint32_t shape[2] = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  std::vector<float> values(m.data().begin(), m.data().end());
  write_tensor(path, shape, values);
}

Matrix read_matrix(const std::filesystem::path& path) {
  const Tensor t = read_tensor(path);
  if (t.shape.size() != 2) throw FormatError("expected a 2-D tensor in " + path.string());
  return Matrix(t.shape[0], t.shape[1], std::vector<double>(t.values.begin(), t.values.end()));
}

}  // namespace ragseg
