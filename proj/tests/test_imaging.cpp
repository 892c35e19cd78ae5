#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ragseg/errors.hpp"
#include "ragseg/filters.hpp"
#include "ragseg/imaging.hpp"
#include "test_support.hpp"

using namespace ragseg;
using ragseg::testing::TempDir;

TEST_CASE("load_image normalizes 8-bit PNG channels by 255") {
  TempDir dir("imaging");
  save_png(dir / "white.png", RgbImage(1, 1, {1.0, 1.0, 1.0}));
  save_png(dir / "black.png", RgbImage(1, 1, {0.0, 0.0, 0.0}));
  CHECK(load_image(dir / "white.png").data == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(load_image(dir / "black.png").data == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("decode_ppm reads a hand-built 2x2 P6 file") {
  std::string header = "P6\n# comment\n2 2\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  const std::uint8_t px[] = {255, 0, 0, 0, 255, 0, 0, 0, 255, 51, 102, 204};
  bytes.insert(bytes.end(), std::begin(px), std::end(px));
  const RgbImage img = decode_ppm(bytes);
  REQUIRE(img.width == 2);
  REQUIRE(img.height == 2);
  CHECK(img.at(0, 0) == Rgb{1.0, 0.0, 0.0});
  CHECK(img.at(1, 0) == Rgb{0.0, 1.0, 0.0});
  CHECK(img.at(0, 1) == Rgb{0.0, 0.0, 1.0});
  CHECK(img.at(1, 1) == Rgb{51 / 255.0, 102 / 255.0, 204 / 255.0});

  TempDir dir("ppm");
  ragseg::testing::write_bytes(dir / "a.ppm", bytes);
  CHECK(load_image(dir / "a.ppm") == img);
}

TEST_CASE("load_image error paths") {
  TempDir dir("imgerr");
  CHECK_THROWS_AS(load_image(dir / "missing.png"), IoError);
  ragseg::testing::write_bytes(dir / "junk.bin", {'G', 'I', 'F', '8', '9', 'a'});
  CHECK_THROWS_AS(load_image(dir / "junk.bin"), FormatError);
  std::string truncated = "P6 4 4 255\n";
  ragseg::testing::write_bytes(dir / "short.ppm", {truncated.begin(), truncated.end()});
  CHECK_THROWS_AS(load_image(dir / "short.ppm"), FormatError);
}

TEST_CASE("label PNG round trip at 8 and 16 bits") {
  TempDir dir("labels");
  LabelMap small{3, 2, {0, 1, 2, 255, 7, 0}};
  save_label_png(dir / "a.png", small);
  CHECK(load_label_png(dir / "a.png") == small);
  LabelMap wide{2, 2, {0, 300, 65535, 1}};
  save_label_png(dir / "b.png", wide);
  CHECK(load_label_png(dir / "b.png") == wide);
  save_label_png(dir / "c.png", small, true);
  CHECK(load_label_png(dir / "c.png") == small);
}

TEST_CASE("to_gray_quantized") {
  SUBCASE("white clamps to the top bin") {
    const GrayImage g = to_gray_quantized(RgbImage(3, 2, {1.0, 1.0, 1.0}), 8);
    for (int v : g.data) CHECK(v == 7);
  }
  SUBCASE("black maps to bin 0") {
    const GrayImage g = to_gray_quantized(RgbImage(3, 2, {0.0, 0.0, 0.0}), 8);
    for (int v : g.data) CHECK(v == 0);
  }
  SUBCASE("mid gray at 4 levels") {
    CHECK(to_gray_quantized(RgbImage(1, 1, {0.5, 0.5, 0.5}), 4).data[0] == 2);
  }
  SUBCASE("levels below 2 rejected") {
    CHECK_THROWS_AS(to_gray_quantized(RgbImage(1, 1), 1), ParameterError);
  }
}

TEST_CASE("brightness corruption") {
  CHECK(corrupt(RgbImage(1, 1, {0.6, 0.6, 0.6}), corruption::Brightness{1.8}).at(0, 0) == Rgb{1.0, 1.0, 1.0});
  const Rgb under = corrupt(RgbImage(1, 1, {0.5, 0.5, 0.5}), corruption::Brightness{0.4}).at(0, 0);
  for (double v : under) CHECK(v == doctest::Approx(0.2).epsilon(1e-15));

  std::mt19937_64 rng(3);
  const RgbImage img = ragseg::testing::random_image(7, 5, rng);
  CHECK(corrupt(img, corruption::Brightness{1.0}) == img);
  CHECK_THROWS_AS(corrupt(img, corruption::Brightness{0.0}), ParameterError);
  CHECK_THROWS_AS(corrupt(img, corruption::Brightness{-1.0}), ParameterError);
}

TEST_CASE("gaussian blur") {
  SUBCASE("kernel weights sum to one") {
    for (int size : {1, 3, 9, 15}) {
      const auto k = gaussian_kernel_1d(size, 5.0);
      const double s = std::accumulate(k.begin(), k.end(), 0.0);
      CHECK(std::abs(s - 1.0) < 1e-9);
      // the 2-D kernel is the outer product, so its sum is s*s
      CHECK(std::abs(s * s - 1.0) < 1e-9);
    }
  }
  SUBCASE("constant image is preserved") {
    const RgbImage img(12, 10, {0.3, 0.7, 0.1});
    const RgbImage out = corrupt(img, corruption::Blur{9, 5.0});
    for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(std::abs(out.data[i] - img.data[i]) < 1e-6);
  }
  SUBCASE("even or non-positive parameters rejected") {
    const RgbImage img(4, 4);
    CHECK_THROWS_AS(corrupt(img, corruption::Blur{8, 5.0}), ParameterError);
    CHECK_THROWS_AS(corrupt(img, corruption::Blur{9, 0.0}), ParameterError);
  }
  SUBCASE("reflect-101 indexing") {
    CHECK(reflect_index(-1, 5) == 1);
    CHECK(reflect_index(-2, 5) == 2);
    CHECK(reflect_index(5, 5) == 3);
    CHECK(reflect_index(6, 5) == 2);
    CHECK(reflect_index(-3, 1) == 0);
  }
  SUBCASE("impulse matches the separable kernel with reflection") {
    RgbImage img(5, 1);
    img.set(0, 0, {1.0, 1.0, 1.0});
    const auto k = gaussian_kernel_1d(3, 1.0);
    const RgbImage out = corrupt(img, corruption::Blur{3, 1.0});
    // x=0 sees itself (k[1]) only; x=1 sees x=0 through k[0]. Row axis is length 1.
    CHECK(out.at(0, 0)[0] == doctest::Approx(k[1]));
    CHECK(out.at(1, 0)[0] == doctest::Approx(k[0]));
    CHECK(out.at(2, 0)[0] == doctest::Approx(0.0));
  }
}

TEST_CASE("grayscale corruption replicates luma") {
  const Rgb c = corrupt(RgbImage(1, 1, {0.2, 0.4, 0.6}), corruption::Grayscale{}).at(0, 0);
  const double y = 0.299 * 0.2 + 0.587 * 0.4 + 0.114 * 0.6;
  CHECK(c[0] == doctest::Approx(y));
  CHECK(c[1] == c[0]);
  CHECK(c[2] == c[0]);
}

TEST_CASE("jitter is seeded and shape preserving") {
  std::mt19937_64 rng(11);
  const RgbImage img = ragseg::testing::random_image(9, 6, rng);
  const RgbImage a = corrupt(img, corruption::Jitter{0.2, 0.3, 0.3, 0.1, 42});
  const RgbImage b = corrupt(img, corruption::Jitter{0.2, 0.3, 0.3, 0.1, 42});
  const RgbImage c = corrupt(img, corruption::Jitter{0.2, 0.3, 0.3, 0.1, 43});
  CHECK(a == b);
  CHECK(a.data != c.data);
  CHECK(a.width == img.width);
  CHECK(a.height == img.height);
  for (double v : a.data) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // zero magnitudes leave the image unchanged up to the HSV round trip
  const RgbImage id = corrupt(img, corruption::Jitter{0.0, 0.0, 0.0, 0.0, 5});
  for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(std::abs(id.data[i] - img.data[i]) < 1e-12);
  CHECK_THROWS_AS(corrupt(img, corruption::Jitter{-0.1, 0.3, 0.3, 0.1, 0}), ParameterError);
  CHECK_THROWS_AS(corrupt(img, corruption::Jitter{0.2, 0.3, 0.3, 0.6, 0}), ParameterError);
}

TEST_CASE("all corruption modes preserve dimensions") {
  const RgbImage img(13, 4, {0.5, 0.2, 0.9});
  const Corruption modes[] = {corruption::Jitter{}, corruption::Brightness{1.8}, corruption::Blur{9, 5.0},
                              corruption::Grayscale{}};
  for (const auto& m : modes) {
    const RgbImage out = corrupt(img, m);
    CHECK(out.width == 13);
    CHECK(out.height == 4);
  }
}
