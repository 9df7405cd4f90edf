#include "nrs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nrs {
namespace {

RasterImage uniform_noise(Eigen::Index width, Eigen::Index height, std::mt19937_64& rng) {
  RasterImage n(height, width);
  for (Eigen::Index i = 0; i < n.size(); ++i) n.data()[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  return n;
}

// Gaussian blur with edge clamping.
RasterImage blur(const RasterImage& in, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  Eigen::VectorXd k(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) k(i + radius) = std::exp(-0.5 * i * i / (sigma * sigma));
  k /= k.sum();
  const Eigen::Index h = in.rows(), w = in.cols();
  RasterImage tmp = RasterImage::Zero(h, w), out = RasterImage::Zero(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      for (int i = -radius; i <= radius; ++i)
        tmp(y, x) += k(i + radius) * in(y, std::clamp<Eigen::Index>(x + i, 0, w - 1));
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      for (int i = -radius; i <= radius; ++i)
        out(y, x) += k(i + radius) * tmp(std::clamp<Eigen::Index>(y + i, 0, h - 1), x);
  return out;
}

}  // namespace

RasterImage textured_noise(Eigen::Index width, Eigen::Index height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const RasterImage fine = blur(uniform_noise(width, height, rng), 1.2);
  const RasterImage coarse = blur(uniform_noise(width, height, rng), 4.0);
  RasterImage t = fine / std::sqrt((fine * fine).mean()) + 0.8 * coarse / std::sqrt((coarse * coarse).mean());
  t = 128.0 + 40.0 * t / std::sqrt((t * t).mean());
  return quantized(t);
}

StereoPair shifted_pair(Eigen::Index width, Eigen::Index height, int shift, std::uint64_t seed) {
  if (shift < 0) throw Error(ErrorCode::InvalidArgument, "shifted_pair expects a non-negative shift");
  const RasterImage wide = textured_noise(width + shift, height, seed);
  return {wide.leftCols(width), wide.rightCols(width)};
}

StereoPair occlusion_pair(const OcclusionScene& s) {
  if (s.foregroundDisparity < s.backgroundDisparity || s.backgroundDisparity < 0)
    throw Error(ErrorCode::InvalidArgument, "occlusion scene needs 0 <= background <= foreground disparity");
  const Eigen::Index w = s.width, h = s.height;
  // Scene textures in left-view coordinates, wide enough for the shift.
  const RasterImage background = textured_noise(w + s.backgroundDisparity, h, s.seed);
  const RasterImage foreground = textured_noise(w + s.foregroundDisparity, h, s.seed + 1);
  auto inSquare = [&](Eigen::Index x, Eigen::Index y) {
    return x >= s.squareX && x < s.squareX + s.squareSize && y >= s.squareY && y < s.squareY + s.squareSize;
  };
  StereoPair p{RasterImage(h, w), RasterImage(h, w)};
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      p.left(y, x) = inSquare(x, y) ? foreground(y, x) : background(y, x);
      const Eigen::Index fx = x + s.foregroundDisparity;
      p.right(y, x) = inSquare(fx, y) ? foreground(y, fx) : background(y, x + s.backgroundDisparity);
    }
  }
  return p;
}

}  // namespace nrs
