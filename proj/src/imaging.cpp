#include "ragseg/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>

#include "ragseg/errors.hpp"
#include "ragseg/filters.hpp"

namespace ragseg {

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw ParameterError("image dimensions must be positive");
  data.resize(pixel_count() * 3);
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    std::copy(fill.begin(), fill.end(), data.begin() + static_cast<std::ptrdiff_t>(i * 3));
  }
}

Rgb RgbImage::at(int x, int y) const {
  const std::size_t o = (static_cast<std::size_t>(y) * width + x) * 3;
  return {data[o], data[o + 1], data[o + 2]};
}

void RgbImage::set(int x, int y, const Rgb& c) {
  const std::size_t o = (static_cast<std::size_t>(y) * width + x) * 3;
  data[o] = c[0];
  data[o + 1] = c[1];
  data[o + 2] = c[2];
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

bool has_png_signature(std::span<const std::uint8_t> b) {
  return b.size() >= 8 && png_sig_cmp(b.data(), 0, 8) == 0;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(clamp01(v) * 255.0)); }

}  // namespace

RgbImage decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&]() -> long {
    skip_space();
    long v = 0;
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > (1L << 24)) throw FormatError("ppm header value too large");
      ++pos;
    }
    if (pos == start) throw FormatError("malformed ppm header");
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw FormatError("not a binary PPM (P6)");
  pos = 2;
  const long w = read_uint();
  const long h = read_uint();
  const long maxval = read_uint();
  if (w <= 0 || h <= 0) throw FormatError("ppm dimensions must be positive");
  if (maxval <= 0 || maxval > 65535) throw FormatError("ppm maxval out of range");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError("malformed ppm header");
  ++pos;

  const std::size_t bpc = maxval < 256 ? 1 : 2;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  if (bytes.size() - pos < n * bpc) throw FormatError("truncated ppm payload");

  RgbImage img(static_cast<int>(w), static_cast<int>(h));
  const double scale = static_cast<double>(maxval);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned v = bytes[pos + i * bpc];
    if (bpc == 2) v = (v << 8) | bytes[pos + i * bpc + 1];
    img.data[i] = std::min(1.0, v / scale);
  }
  return img;
}

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("png decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("png decode failed: " + msg);
  }
  RgbImage img(static_cast<int>(image.width), static_cast<int>(image.height));
  for (std::size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i] / 255.0;
  return img;
}

RgbImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (has_png_signature(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes);
  throw FormatError("unsupported image format: " + path.string());
}

void save_png(const std::filesystem::path& path, const RgbImage& img) {
  std::vector<std::uint8_t> buf(img.data.size());
  std::transform(img.data.begin(), img.data.end(), buf.begin(), to_byte);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, buf.data(), 0, nullptr)) {
    throw IoError(std::string("png write failed: ") + image.message);
  }
}

namespace {

// Low-level libpng is used for label rasters so that bit depth and sample
// values are written verbatim (no gamma or colour-space handling).
bool write_gray_png(std::FILE* fp, int width, int height, int bit_depth, const std::vector<png_bytep>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct GrayRead {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> pixels;
};

bool read_gray_png(std::FILE* fp, GrayRead* out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  int color_type = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color_type == PNG_COLOR_TYPE_RGB || color_type == PNG_COLOR_TYPE_RGB_ALPHA ||
      color_type == PNG_COLOR_TYPE_PALETTE) {
    // Label maps stored as RGB are read from the red channel.
    png_set_rgb_to_gray_fixed(png, 1, 100000, 0);
  }
  if (depth == 16) png_set_swap(png);
  png_read_update_info(png, info);
  out->width = png_get_image_width(png, info);
  out->height = png_get_image_height(png, info);
  out->bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  out->pixels.assign(rowbytes * out->height, 0);
  std::vector<png_bytep> rows(out->height);
  for (png_uint_32 y = 0; y < out->height; ++y) rows[y] = out->pixels.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

}  // namespace

void save_label_png(const std::filesystem::path& path, const LabelMap& labels, bool force_16bit) {
  if (labels.width <= 0 || labels.height <= 0 ||
      labels.data.size() != static_cast<std::size_t>(labels.width) * labels.height) {
    throw ParameterError("label map shape is inconsistent");
  }
  int max_label = 0;
  for (auto v : labels.data) {
    if (v < 0 || v > 65535) throw ParameterError("label out of PNG range [0,65535]");
    max_label = std::max(max_label, static_cast<int>(v));
  }
  const int depth = (force_16bit || max_label > 255) ? 16 : 8;
  const std::size_t bps = depth / 8;
  std::vector<std::uint8_t> buf(labels.data.size() * bps);
  for (std::size_t i = 0; i < labels.data.size(); ++i) {
    if (depth == 8) {
      buf[i] = static_cast<std::uint8_t>(labels.data[i]);
    } else {
      // little-endian in memory; png_set_swap writes big-endian
      buf[2 * i] = static_cast<std::uint8_t>(labels.data[i] & 0xff);
      buf[2 * i + 1] = static_cast<std::uint8_t>((labels.data[i] >> 8) & 0xff);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(labels.height));
  for (int y = 0; y < labels.height; ++y) rows[y] = buf.data() + static_cast<std::size_t>(y) * labels.width * bps;

  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw IoError("cannot open for writing: " + path.string());
  if (!write_gray_png(fp.get(), labels.width, labels.height, depth, rows)) {
    throw IoError("png write failed: " + path.string());
  }
}

LabelMap load_label_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());
  std::uint8_t sig[8] = {};
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError("not a PNG file: " + path.string());
  }
  std::rewind(fp.get());
  GrayRead r;
  if (!read_gray_png(fp.get(), &r)) throw FormatError("png decode failed: " + path.string());
  LabelMap out;
  out.width = static_cast<int>(r.width);
  out.height = static_cast<int>(r.height);
  out.data.resize(static_cast<std::size_t>(out.width) * out.height);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = r.bit_depth == 16 ? (r.pixels[2 * i] | (r.pixels[2 * i + 1] << 8)) : r.pixels[i];
  }
  return out;
}

GrayImage to_gray_quantized(const RgbImage& img, int levels) {
  if (levels < 2) throw ParameterError("quantization levels must be >= 2");
  GrayImage g;
  g.width = img.width;
  g.height = img.height;
  g.levels = levels;
  g.data.resize(img.pixel_count());
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    const double y = luma({img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]});
    // The BT.601 weights do not sum to exactly 1 in binary, so a neutral gray
    // on a bin edge can land one ulp low.
    const int bin = static_cast<int>(std::floor(y * levels + 1e-9));
    g.data[i] = std::clamp(bin, 0, levels - 1);
  }
  return g;
}

namespace {

// Uniform double in [lo, hi] from the top 53 bits of a mt19937_64 draw; the
// engine output sequence is fixed by the standard, so results are portable.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

void rgb_to_hsv(const Rgb& c, double& h, double& s, double& v) {
  const double mx = std::max({c[0], c[1], c[2]});
  const double mn = std::min({c[0], c[1], c[2]});
  const double d = mx - mn;
  v = mx;
  s = mx > 0.0 ? d / mx : 0.0;
  if (d <= 0.0) {
    h = 0.0;
    return;
  }
  if (mx == c[0]) {
    h = (c[1] - c[2]) / d;
  } else if (mx == c[1]) {
    h = 2.0 + (c[2] - c[0]) / d;
  } else {
    h = 4.0 + (c[0] - c[1]) / d;
  }
  h /= 6.0;
  h -= std::floor(h);
}

Rgb hsv_to_rgb(double h, double s, double v) {
  const double h6 = h * 6.0;
  const int sector = static_cast<int>(std::floor(h6)) % 6;
  const double f = h6 - std::floor(h6);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

void check_magnitude(double x, const char* name) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ParameterError(std::string("jitter ") + name + " must be >= 0");
}

RgbImage apply(const RgbImage& img, const corruption::Brightness& m) {
  if (!(m.factor > 0.0)) throw ParameterError("brightness factor must be positive");
  RgbImage out = img;
  for (double& v : out.data) v = clamp01(v * m.factor);
  return out;
}

RgbImage apply(const RgbImage& img, const corruption::Grayscale&) {
  RgbImage out = img;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double y = luma({img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]});
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = y;
  }
  return out;
}

RgbImage apply(const RgbImage& img, const corruption::Blur& m) {
  const auto kernel = gaussian_kernel_1d(m.kernel, m.sigma);
  RgbImage out = img;
  std::vector<double> plane(img.pixel_count());
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = img.data[3 * i + c];
    convolve_separable(plane, img.width, img.height, kernel);
    for (std::size_t i = 0; i < plane.size(); ++i) out.data[3 * i + c] = clamp01(plane[i]);
  }
  return out;
}

RgbImage apply(const RgbImage& img, const corruption::Jitter& m) {
  check_magnitude(m.brightness, "brightness");
  check_magnitude(m.contrast, "contrast");
  check_magnitude(m.saturation, "saturation");
  check_magnitude(m.hue, "hue");
  if (m.hue > 0.5) throw ParameterError("jitter hue must be <= 0.5");

  std::mt19937_64 rng(m.seed);
  const double fb = std::max(0.0, uniform(rng, 1.0 - m.brightness, 1.0 + m.brightness));
  const double fc = std::max(0.0, uniform(rng, 1.0 - m.contrast, 1.0 + m.contrast));
  const double fs = std::max(0.0, uniform(rng, 1.0 - m.saturation, 1.0 + m.saturation));
  const double angle = uniform(rng, -m.hue * 2.0 * std::numbers::pi, m.hue * 2.0 * std::numbers::pi);

  RgbImage out = img;
  const std::size_t n = img.pixel_count();

  for (double& v : out.data) v = clamp01(v * fb);

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += luma({out.data[3 * i], out.data[3 * i + 1], out.data[3 * i + 2]});
  mean /= static_cast<double>(n);
  for (double& v : out.data) v = clamp01(fc * v + (1.0 - fc) * mean);

  for (std::size_t i = 0; i < n; ++i) {
    const double y = luma({out.data[3 * i], out.data[3 * i + 1], out.data[3 * i + 2]});
    for (int c = 0; c < 3; ++c) out.data[3 * i + c] = clamp01(fs * out.data[3 * i + c] + (1.0 - fs) * y);
  }

  const double shift = angle / (2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    double h, s, v;
    rgb_to_hsv({out.data[3 * i], out.data[3 * i + 1], out.data[3 * i + 2]}, h, s, v);
    h += shift;
    h -= std::floor(h);
    const Rgb c = hsv_to_rgb(h, s, v);
    for (int k = 0; k < 3; ++k) out.data[3 * i + k] = clamp01(c[k]);
  }
  return out;
}

}  // namespace

RgbImage corrupt(const RgbImage& img, const Corruption& mode) {
  return std::visit([&](const auto& m) { return apply(img, m); }, mode);
}

}  // namespace ragseg
