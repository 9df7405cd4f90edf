#pragma once

#include <utility>

#include "nrs/sampling.hpp"

namespace nrs {

/// Block-matching configuration. The search range is given for matching the
/// left view against the right one; mirrored() gives the reverse direction.
struct MatchParams {
  int windowRadius = 3;  // 7x7 window
  int dxMin = -64;
  int dxMax = 0;
  int dyMin = 0;
  int dyMax = 0;
  int ccTolerance = 0;  // negative: every pixel fails the check

  void validate() const;
  MatchParams mirrored() const;
};

/// Integer displacement per pixel: reference[x, y] matches target[x + dx, y + dy].
struct DisparityMap {
  IntRaster dx;
  IntRaster dy;
  BoolRaster valid;
  RasterImage cost;  // winning SAD; undefined where invalid

  Eigen::Index width() const { return valid.cols(); }
  Eigen::Index height() const { return valid.rows(); }
  Eigen::Index valid_count() const { return valid.count(); }

  static DisparityMap invalid(Eigen::Index width, Eigen::Index height);
};

/// Sum of absolute differences between the window around (x, y) in
/// `reference` and the window around (x + dx, y + dy) in `target`.
/// The caller guarantees both windows are in bounds.
double window_sad(const RasterImage& reference, const RasterImage& target, int x, int y, int dx, int dy,
                  int radius);

/// SAD block matching. Ties prefer the smallest |dx|, then the smaller dx,
/// then the smallest |dy|, then the smaller dy.
DisparityMap compute_disparity(const RasterImage& reference, const RasterImage& target, const MatchParams& params);

/// Left-right check; a pixel survives only if re-projecting through the
/// other map returns within `tolerance` on both axes.
std::pair<DisparityMap, DisparityMap> consistency_check(const DisparityMap& left, const DisparityMap& right,
                                                        int tolerance);

struct WarpStats {
  Eigen::Index eligible = 0;     // Original samples with a valid disparity
  Eigen::Index placed = 0;       // Warped samples in the result
  Eigen::Index dropped = 0;      // target out of bounds
  Eigen::Index overwritten = 0;  // lost a collision
};

/// Forward warp of the Original samples of `source` into the adjacent view.
/// On collisions the sample with larger |dx| (the nearer surface) wins.
SampledView warp_samples(const SampledView& source, const DisparityMap& disparity, WarpStats* stats = nullptr);

/// Fills Absent positions of `base` with samples of `warped`; base samples always win.
SampledView merge_views(const SampledView& base, const SampledView& warped);

/// |dx| * scale, clamped to 8 bits; invalid pixels are 0.
RasterImage disparity_visualization(const DisparityMap& map, double scale);

}  // namespace nrs
