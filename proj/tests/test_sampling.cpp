#include <doctest.h>

#include <array>

#include "nrs/image_io.hpp"
#include "nrs/sampling.hpp"
#include "test_support.hpp"

using namespace nrs;

namespace {

bool one_per_cell(const BoolRaster& mask) {
  for (Eigen::Index y = 0; y < mask.rows(); y += 2)
    for (Eigen::Index x = 0; x < mask.cols(); x += 2)
      if (mask.block(y, x, 2, 2).count() != 1) return false;
  return true;
}

}  // namespace

TEST_CASE("generate_mask: one sample per LR pixel") {
  CHECK(generate_mask(1, 1, 42).count() == 1);

  const BoolRaster m = generate_mask(64, 64, 7);
  CHECK(m.rows() == 128);
  CHECK(m.cols() == 128);
  CHECK(m.count() == 4096);
  CHECK(one_per_cell(m));

  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(one_per_cell(generate_mask(13 + seed, 9, seed)));
}

TEST_CASE("generate_mask is a pure function of dimensions and seed") {
  CHECK((generate_mask(30, 20, 5) == generate_mask(30, 20, 5)).all());
  CHECK(!(generate_mask(30, 20, 5) == generate_mask(30, 20, 6)).all());
  CHECK_THROWS_AS(generate_mask(0, 5, 1), Error);
  CHECK_THROWS_AS(generate_mask(5, 0, 1), Error);
}

TEST_CASE("quadrant choice is uniform") {
  const BoolRaster m = generate_mask(100, 100, 11);
  std::array<int, 4> counts{};
  for (Eigen::Index y = 0; y < m.rows(); y += 2)
    for (Eigen::Index x = 0; x < m.cols(); x += 2)
      for (int q = 0; q < 4; ++q)
        if (m(y + q / 2, x + q % 2)) ++counts[static_cast<size_t>(q)];
  for (int c : counts) CHECK(std::abs(c / 10000.0 - 0.25) <= 0.03);
}

TEST_CASE("generate_mask supports larger cells") {
  const BoolRaster m = generate_mask(5, 4, 3, 3);
  CHECK(m.cols() == 15);
  CHECK(m.rows() == 12);
  for (Eigen::Index y = 0; y < 12; y += 3)
    for (Eigen::Index x = 0; x < 15; x += 3) CHECK(m.block(y, x, 3, 3).count() == 1);
}

TEST_CASE("apply_mask") {
  const RasterImage img = test::random_image(8, 6, 1);

  SUBCASE("full mask is the identity") {
    const SampledView v = apply_mask(img, BoolRaster::Constant(6, 8, true));
    CHECK((v.image == img).all());
    CHECK((v.classes == SampleClass::Original).all());
  }
  SUBCASE("constant image") {
    const SampledView v = apply_mask(RasterImage::Constant(6, 8, 128.0), generate_mask(4, 3, 2));
    CHECK((v.mask.select(v.image, 128.0) == 128.0).all());
  }
  SUBCASE("copy semantics and placeholders") {
    const BoolRaster m = generate_mask(4, 3, 9);
    const SampledView v = apply_mask(img, m);
    check_view(v);
    for (Eigen::Index i = 0; i < img.size(); ++i) {
      if (m.data()[i]) {
        CHECK(v.image.data()[i] == img.data()[i]);
        CHECK(v.classes.data()[i] == SampleClass::Original);
      } else {
        CHECK(v.image.data()[i] == 0.0);
        CHECK(v.classes.data()[i] == SampleClass::Absent);
      }
    }
    CHECK(v.density() == doctest::Approx(0.25));
  }
  CHECK_THROWS_AS(apply_mask(img, generate_mask(3, 3, 1)), Error);
}

TEST_CASE("simulate_lr averages 2x2 cells") {
  RasterImage cell(2, 2);
  cell << 10, 20, 30, 40;
  CHECK(simulate_lr(cell)(0, 0) == 25.0);

  CHECK((simulate_lr(RasterImage::Constant(6, 8, 77.0)) == 77.0).all());

  RasterImage halves(4, 4);
  halves << 0, 0, 255, 255, 0, 0, 255, 255, 0, 0, 255, 255, 0, 0, 255, 255;
  RasterImage expected(2, 2);
  expected << 0, 255, 0, 255;
  CHECK((simulate_lr(halves) == expected).all());

  CHECK_THROWS_AS(simulate_lr(RasterImage::Zero(3, 4)), Error);
}

TEST_CASE("mask export uses 255 for samples") {
  const auto dir = test::temp_dir("mask_export");
  const BoolRaster m = generate_mask(6, 5, 4);
  save_mask(m, dir / "m.pgm");
  const RasterImage back = load_image(dir / "m.pgm");
  CHECK(((back == 255.0) == m).all());
  CHECK(((back == 0.0) == !m).all());
}
