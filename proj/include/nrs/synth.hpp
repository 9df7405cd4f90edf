#pragma once

#include <cstdint>

#include "nrs/raster.hpp"

namespace nrs {

struct StereoPair {
  RasterImage left;
  RasterImage right;
};

/// Two-octave band-limited noise quantized to 8 bits, mean near 128.
RasterImage textured_noise(Eigen::Index width, Eigen::Index height, std::uint64_t seed);

/// right[x, y] = left[x + shift, y]: content sits `shift` px further left in
/// the right view, so the left-to-right disparity is -shift everywhere.
StereoPair shifted_pair(Eigen::Index width, Eigen::Index height, int shift, std::uint64_t seed);

/// Fronto-parallel square in front of a fronto-parallel background.
struct OcclusionScene {
  Eigen::Index width = 128;
  Eigen::Index height = 96;
  int squareX = 56;  // left-view position of the square
  int squareY = 24;
  int squareSize = 48;
  int backgroundDisparity = 2;
  int foregroundDisparity = 10;
  std::uint64_t seed = 7;

  /// Left-view pixels visible only in the left view: a band of width
  /// (foreground - background) disparity immediately left of the square.
  Eigen::Index occluded_count() const {
    return static_cast<Eigen::Index>(foregroundDisparity - backgroundDisparity) * squareSize;
  }
};

StereoPair occlusion_pair(const OcclusionScene& scene);

}  // namespace nrs
