#pragma once

#include <cstdint>

#include "nrs/raster.hpp"

namespace nrs {

/// Provenance of a pixel in a sampled view.
enum class SampleClass : std::uint8_t {
  Absent = 0,
  Original = 1,
  Warped = 2,
  Reconstructed = 3,
};

using ClassRaster = Raster<SampleClass>;

/// Sparse view of an HR image: values are meaningful only where `mask` is
/// set, and `mask` is set exactly where the class is Original or Warped.
struct SampledView {
  RasterImage image;
  BoolRaster mask;
  ClassRaster classes;

  Eigen::Index width() const { return image.cols(); }
  Eigen::Index height() const { return image.rows(); }
  Eigen::Index sample_count() const { return mask.count(); }
  double density() const { return static_cast<double>(mask.count()) / static_cast<double>(mask.size()); }

  /// Empty view (everything Absent) of the given size.
  static SampledView empty(Eigen::Index width, Eigen::Index height);
};

/// Throws InvariantError if mask and classes disagree or sizes differ.
void check_view(const SampledView& view);

/// Non-regular mask on a (cell*lr_width) x (cell*lr_height) HR grid with
/// exactly one sample per aligned cell x cell block. The quadrant of every
/// cell is a pure function of (seed, cell index).
BoolRaster generate_mask(Eigen::Index lr_width, Eigen::Index lr_height, std::uint64_t seed, int cell = 2);

/// Covers `hr_image` with `mask`. Covered pixels are Absent with value 0.
SampledView apply_mask(const RasterImage& hr_image, const BoolRaster& mask);

/// Box-filter 2x downsampling: what an unmasked LR sensor records.
RasterImage simulate_lr(const RasterImage& hr_image);

}  // namespace nrs
