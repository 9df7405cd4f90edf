#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nrs/raster.hpp"

namespace nrs {

/// PSNR in dB against an 8-bit reference; `test` is quantized to 8 bits
/// first. Identical images give +infinity.
template <typename A, typename B>
double psnr(const Eigen::DenseBase<A>& reference, const Eigen::DenseBase<B>& test) {
  require_same_size(reference, test, "psnr");
  const RasterImage diff = quantized(reference) - quantized(test);
  const double mse = diff.square().mean();
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

/// Mean structural similarity: 11x11 Gaussian window (sigma 1.5) over all
/// fully contained window positions, K1 = 0.01, K2 = 0.03, range 255.
double ssim(const RasterImage& reference, const RasterImage& test);

/// One evaluated (image, view) pair before aggregation.
struct EvaluatedPair {
  std::string name;
  std::string view;  // "left" / "right"
  double sensorDistanceMm = 0.0;
  double psnrSingleView = 0.0;
  double psnrProposed = 0.0;
  double ssimSingleView = 0.0;
  double ssimProposed = 0.0;
};

struct QualityRecord : EvaluatedPair {
  double deltaPsnr = 0.0;
  double deltaSsim = 0.0;
};

struct QualityReport {
  std::vector<QualityRecord> records;
  double meanPsnrSingleView = 0.0;
  double meanPsnrProposed = 0.0;
  double meanDeltaPsnr = 0.0;
  double meanSsimSingleView = 0.0;
  double meanSsimProposed = 0.0;
  double meanDeltaSsim = 0.0;
  int excludedInfinite = 0;           // rows with an infinite PSNR, left out of PSNR means
  std::vector<std::string> skipped;   // inputs that could not be evaluated

  std::string to_csv() const;
  std::string to_markdown() const;
};

/// Per-row deltas plus dataset means. Throws Error(EmptyInput) for no entries.
QualityReport build_report(const std::vector<EvaluatedPair>& entries);

/// Renders a PSNR value, "inf" for the infinite sentinel.
std::string format_db(double value, int decimals);

}  // namespace nrs
