#include "nrs/sampling.hpp"

namespace nrs {
namespace {

// splitmix64 finalizer; a counter-based generator needs no shared state.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

SampledView SampledView::empty(Eigen::Index width, Eigen::Index height) {
  SampledView v;
  v.image = RasterImage::Zero(height, width);
  v.mask = BoolRaster::Constant(height, width, false);
  v.classes = ClassRaster::Constant(height, width, SampleClass::Absent);
  return v;
}

void check_view(const SampledView& view) {
  NRS_ENSURE(view.mask.rows() == view.image.rows() && view.mask.cols() == view.image.cols(),
             "sampled view mask/image size mismatch");
  NRS_ENSURE(view.classes.rows() == view.image.rows() && view.classes.cols() == view.image.cols(),
             "sampled view class/image size mismatch");
  for (Eigen::Index i = 0; i < view.mask.size(); ++i) {
    const SampleClass c = view.classes.data()[i];
    const bool known = c == SampleClass::Original || c == SampleClass::Warped;
    NRS_ENSURE(known == view.mask.data()[i], "sampled view mask disagrees with sample classes");
  }
}

BoolRaster generate_mask(Eigen::Index lr_width, Eigen::Index lr_height, std::uint64_t seed, int cell) {
  if (lr_width < 1 || lr_height < 1)
    throw Error(ErrorCode::InvalidArgument, "mask needs a non-empty LR grid");
  if (cell < 2) throw Error(ErrorCode::InvalidArgument, "cell size must be at least 2");

  const std::uint64_t quadrants = static_cast<std::uint64_t>(cell) * static_cast<std::uint64_t>(cell);
  const std::uint64_t key = mix(seed);
  BoolRaster mask = BoolRaster::Constant(lr_height * cell, lr_width * cell, false);
  for (Eigen::Index v = 0; v < lr_height; ++v) {
    for (Eigen::Index u = 0; u < lr_width; ++u) {
      const auto index = static_cast<std::uint64_t>(v * lr_width + u);
      const std::uint64_t q = mix(key ^ mix(index)) % quadrants;
      mask(v * cell + static_cast<Eigen::Index>(q) / cell, u * cell + static_cast<Eigen::Index>(q) % cell) = true;
    }
  }
  return mask;
}

SampledView apply_mask(const RasterImage& hr_image, const BoolRaster& mask) {
  require_same_size(hr_image, mask, "apply_mask");
  SampledView view;
  view.mask = mask;
  view.image = mask.select(hr_image, 0.0);
  view.classes = mask.select(ClassRaster::Constant(mask.rows(), mask.cols(), SampleClass::Original),
                             ClassRaster::Constant(mask.rows(), mask.cols(), SampleClass::Absent));
  return view;
}

RasterImage simulate_lr(const RasterImage& hr_image) {
  if (hr_image.rows() % 2 != 0 || hr_image.cols() % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "simulate_lr needs even dimensions");
  const Eigen::Index h = hr_image.rows() / 2, w = hr_image.cols() / 2;
  RasterImage lr(h, w);
  for (Eigen::Index v = 0; v < h; ++v)
    for (Eigen::Index u = 0; u < w; ++u) lr(v, u) = hr_image.block(2 * v, 2 * u, 2, 2).mean();
  return lr;
}

}  // namespace nrs
