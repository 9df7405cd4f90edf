#include "nrs/stereo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

namespace nrs {

void MatchParams::validate() const {
  if (windowRadius < 1) throw Error(ErrorCode::InvalidArgument, "MatchParams: windowRadius must be >= 1");
  if (dxMin > dxMax || dyMin > dyMax) throw Error(ErrorCode::InvalidArgument, "MatchParams: empty search range");
}

MatchParams MatchParams::mirrored() const {
  MatchParams m = *this;
  m.dxMin = -dxMax;
  m.dxMax = -dxMin;
  m.dyMin = -dyMax;
  m.dyMax = -dyMin;
  return m;
}

DisparityMap DisparityMap::invalid(Eigen::Index width, Eigen::Index height) {
  DisparityMap m;
  m.dx = IntRaster::Zero(height, width);
  m.dy = IntRaster::Zero(height, width);
  m.valid = BoolRaster::Constant(height, width, false);
  m.cost = RasterImage::Constant(height, width, std::numeric_limits<double>::infinity());
  return m;
}

double window_sad(const RasterImage& reference, const RasterImage& target, int x, int y, int dx, int dy,
                  int radius) {
  const int size = 2 * radius + 1;
  return (reference.block(y - radius, x - radius, size, size) -
          target.block(y + dy - radius, x + dx - radius, size, size))
      .abs()
      .sum();
}

DisparityMap compute_disparity(const RasterImage& reference, const RasterImage& target, const MatchParams& params) {
  params.validate();
  require_same_size(reference, target, "compute_disparity");
  const int width = static_cast<int>(reference.cols()), height = static_cast<int>(reference.rows());
  const int r = params.windowRadius;

  struct Candidate {
    int dx, dy;
  };
  std::vector<Candidate> candidates;
  for (int dy = params.dyMin; dy <= params.dyMax; ++dy)
    for (int dx = params.dxMin; dx <= params.dxMax; ++dx) candidates.push_back({dx, dy});
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (std::abs(a.dx) != std::abs(b.dx)) return std::abs(a.dx) < std::abs(b.dx);
    if (a.dx != b.dx) return a.dx < b.dx;
    if (std::abs(a.dy) != std::abs(b.dy)) return std::abs(a.dy) < std::abs(b.dy);
    return a.dy < b.dy;
  });

  DisparityMap out = DisparityMap::invalid(width, height);
  RasterImage diff(height, width);
  RasterImage columnSums(height, width);
  for (const Candidate c : candidates) {
    // Window centers for which both windows fit.
    const int x0 = std::max(r, r - c.dx), x1 = std::min(width - r, width - r - c.dx);
    const int y0 = std::max(r, r - c.dy), y1 = std::min(height - r, height - r - c.dy);
    if (x0 >= x1 || y0 >= y1) continue;

    const int ox0 = x0 - r, ow = x1 - x0 + 2 * r;
    const int oy0 = y0 - r, oh = y1 - y0 + 2 * r;
    diff.block(oy0, ox0, oh, ow) =
        (reference.block(oy0, ox0, oh, ow) - target.block(oy0 + c.dy, ox0 + c.dx, oh, ow)).abs();
    for (int y = y0; y < y1; ++y) {
      columnSums.row(y).segment(ox0, ow) = diff.block(y - r, ox0, 2 * r + 1, ow).colwise().sum();
    }
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const double sad = columnSums.row(y).segment(x - r, 2 * r + 1).sum();
        if (sad < out.cost(y, x)) {
          out.cost(y, x) = sad;
          out.dx(y, x) = c.dx;
          out.dy(y, x) = c.dy;
          out.valid(y, x) = true;
        }
      }
    }
  }
  return out;
}

namespace {

DisparityMap check_one(const DisparityMap& from, const DisparityMap& to, int tolerance) {
  DisparityMap refined = from;
  const int width = static_cast<int>(from.width()), height = static_cast<int>(from.height());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!from.valid(y, x)) continue;
      const int dx = from.dx(y, x), dy = from.dy(y, x);
      const int qx = x + dx, qy = y + dy;
      const bool ok = qx >= 0 && qx < width && qy >= 0 && qy < height && to.valid(qy, qx) &&
                      std::abs(to.dx(qy, qx) + dx) <= tolerance && std::abs(to.dy(qy, qx) + dy) <= tolerance;
      if (!ok) refined.valid(y, x) = false;
    }
  }
  return refined;
}

}  // namespace

std::pair<DisparityMap, DisparityMap> consistency_check(const DisparityMap& left, const DisparityMap& right,
                                                        int tolerance) {
  require_same_size(left.valid, right.valid, "consistency_check");
  return {check_one(left, right, tolerance), check_one(right, left, tolerance)};
}

SampledView warp_samples(const SampledView& source, const DisparityMap& disparity, WarpStats* stats) {
  check_view(source);
  require_same_size(source.mask, disparity.valid, "warp_samples");
  const int width = static_cast<int>(source.width()), height = static_cast<int>(source.height());

  SampledView out = SampledView::empty(width, height);
  IntRaster winnerDepth = IntRaster::Constant(height, width, -1);
  WarpStats s;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (source.classes(y, x) != SampleClass::Original || !disparity.valid(y, x)) continue;
      ++s.eligible;
      const int dx = disparity.dx(y, x), dy = disparity.dy(y, x);
      const int tx = x + dx, ty = y + dy;
      if (tx < 0 || tx >= width || ty < 0 || ty >= height) {
        ++s.dropped;
        continue;
      }
      const int depth = std::abs(dx);
      if (winnerDepth(ty, tx) >= 0) {
        ++s.overwritten;
        if (depth <= winnerDepth(ty, tx)) continue;
      }
      winnerDepth(ty, tx) = depth;
      out.image(ty, tx) = source.image(y, x);
      out.mask(ty, tx) = true;
      out.classes(ty, tx) = SampleClass::Warped;
    }
  }
  s.placed = out.sample_count();
  NRS_ENSURE(s.placed + s.dropped + s.overwritten == s.eligible, "warp sample conservation violated");
  if (stats) *stats = s;
  return out;
}

SampledView merge_views(const SampledView& base, const SampledView& warped) {
  require_same_size(base.mask, warped.mask, "merge_views");
  SampledView out = base;
  const BoolRaster fill = (!base.mask) && warped.mask;
  out.image = fill.select(warped.image, base.image);
  out.mask = base.mask || warped.mask;
  out.classes = fill.select(ClassRaster::Constant(fill.rows(), fill.cols(), SampleClass::Warped), base.classes);
  return out;
}

RasterImage disparity_visualization(const DisparityMap& map, double scale) {
  RasterImage out(map.height(), map.width());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out.data()[i] = map.valid.data()[i] ? std::min(255.0, std::abs(map.dx.data()[i]) * scale) : 0.0;
  return out;
}

}  // namespace nrs
