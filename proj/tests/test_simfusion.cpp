#include <cmath>
#include <random>

#include "doctest.h"
#include "ragseg/errors.hpp"
#include "ragseg/filters.hpp"
#include "ragseg/simfusion.hpp"

using namespace ragseg;

namespace {

EmbeddingSet make(int gw, int gh, std::vector<double> visual, std::vector<double> text, std::size_t dim) {
  EmbeddingSet e;
  e.grid_w = gw;
  e.grid_h = gh;
  const std::size_t n = visual.size() / dim, m = text.size() / dim;
  e.visual = Matrix(n, dim, std::move(visual));
  e.text = Matrix(m, dim, std::move(text));
  return e;
}

}  // namespace

TEST_CASE("cosine_similarity") {
  CHECK(cosine_similarity(make(1, 1, {0.3, 0.4}, {0.3, 0.4}, 2))(0, 0) == doctest::Approx(1.0));
  CHECK(cosine_similarity(make(1, 1, {1.0, 0.0}, {0.0, 1.0}, 2))(0, 0) == 0.0);
  CHECK(cosine_similarity(make(1, 1, {1.0, 1.0}, {1.0, 0.0}, 2))(0, 0) == doctest::Approx(0.707107).epsilon(1e-6));
  CHECK_THROWS_AS(cosine_similarity(make(1, 1, {0.0, 0.0}, {1.0, 0.0}, 2)), ParameterError);
  CHECK_THROWS_AS(cosine_similarity(make(2, 1, {1.0, 0.0}, {1.0, 0.0}, 2)), ParameterError);
}

TEST_CASE("smooth_visual") {
  SUBCASE("constant field is unchanged") {
    std::vector<double> v;
    for (int i = 0; i < 12; ++i) v.insert(v.end(), {0.2, -1.0, 3.0});
    const auto out = smooth_visual(make(4, 3, v, {1, 0, 0}, 3), 3, 3.0);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(out.visual.data()[i] - v[i]) < 1e-9);
  }
  SUBCASE("kernel size 1 is the identity") {
    const auto in = make(3, 1, {0.0, 1.0, 3.0, 1.0, 0.0, 1.0}, {1.0, 0.0}, 2);
    CHECK(smooth_visual(in, 1, 3.0).visual == in.visual);
  }
  SUBCASE("3x1 grid centre value") {
    // weights exp(-1/18), 1, exp(-1/18) normalized; the row axis has length 1
    const double side = std::exp(-1.0 / 18.0);
    const double expected = 3.0 / (1.0 + 2.0 * side);
    // channel 0 carries [0, 3, 0]; channel 1 is a constant that keeps rows non-zero
    const auto out = smooth_visual(make(3, 1, {0.0, 1.0, 3.0, 1.0, 0.0, 1.0}, {1.0, 0.0}, 2), 3, 3.0);
    CHECK(out.visual(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.visual(1, 0) == doctest::Approx(expected).epsilon(1e-12));
    // border cell reflects onto the centre from both sides
    CHECK(out.visual(0, 0) == doctest::Approx(2.0 * side * 3.0 / (1.0 + 2.0 * side)).epsilon(1e-12));
  }
  SUBCASE("per-cell weights sum to one") {
    // smoothing an all-ones channel measures the total weight at every cell
    for (int gw : {1, 2, 5}) {
      for (int gh : {1, 3, 4}) {
        const auto out =
            smooth_visual(make(gw, gh, std::vector<double>(static_cast<std::size_t>(gw) * gh, 1.0), {1.0}, 1), 3, 3.0);
        for (double x : out.visual.data()) CHECK(std::abs(x - 1.0) < 1e-9);
      }
    }
  }
  CHECK_THROWS_AS(smooth_visual(make(3, 1, {1.0, 3.0, 1.0}, {1.0}, 1), 2, 3.0), ParameterError);
  CHECK_THROWS_AS(smooth_visual(make(3, 1, {1.0, 3.0, 1.0}, {1.0}, 1), 3, 0.0), ParameterError);
}

TEST_CASE("fuse") {
  const Matrix s(1, 3, std::vector<double>{0.04, -0.2, 0.5});
  SUBCASE("alpha zero returns the clamped raw similarity") {
    const Matrix f = fuse(s, Matrix(1, 3, 0.9), 0.0);
    CHECK(f.data() == std::vector<double>{0.04, kFusionEpsilon, 0.5});
  }
  SUBCASE("equal inputs return the clamped input") {
    const Matrix f = fuse(s, s, 0.6);
    CHECK(f.data() == std::vector<double>{0.04, kFusionEpsilon, 0.5});
  }
  SUBCASE("geometric mean") {
    CHECK(fuse(Matrix(1, 1, 0.04), Matrix(1, 1, 0.25), 0.5)(0, 0) == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("monotone in the raw similarity") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(1e-5, 1.0);
    for (int t = 0; t < 200; ++t) {
      const double smooth = u(rng), a = u(rng), b = u(rng), alpha = u(rng);
      const double fa = fuse(Matrix(1, 1, std::min(a, b)), Matrix(1, 1, smooth), alpha)(0, 0);
      const double fb = fuse(Matrix(1, 1, std::max(a, b)), Matrix(1, 1, smooth), alpha)(0, 0);
      CHECK(fa <= fb);
    }
  }
  CHECK_THROWS_AS(fuse(s, Matrix(1, 2, 0.1), 0.5), ParameterError);
  CHECK_THROWS_AS(fuse(s, s, 1.5), ParameterError);
}

TEST_CASE("predict") {
  CHECK(predict(Matrix(3, 1, 0.2)) == std::vector<int>{0, 0, 0});
  CHECK(predict(Matrix(1, 3, std::vector<double>{0.1, 0.9, 0.3})) == std::vector<int>{1});
  CHECK(predict(Matrix(1, 2, std::vector<double>{0.5, 0.5})) == std::vector<int>{0});
  // exhaustive two-class oracle over a small value grid
  const double vals[] = {-1.0, 0.0, 0.25, 0.5, 1.0};
  for (double a : vals)
    for (double b : vals) CHECK(predict(Matrix(1, 2, std::vector<double>{a, b}))[0] == (b > a ? 1 : 0));
}

TEST_CASE("fusion with equal inputs never changes predictions") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 20; ++t) {
    Matrix s(10, 6);
    for (double& v : s.data()) v = u(rng);
    for (double alpha : {0.0, 0.3, 0.6, 1.0}) CHECK(predict(fuse(s, s, alpha)) == predict(s));
  }
}
