#include "nrs/metrics.hpp"

#include <fmt/format.h>

namespace nrs {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

Eigen::VectorXd gaussian_kernel() {
  Eigen::VectorXd k(kWindow);
  const double c = (kWindow - 1) / 2.0;
  for (int i = 0; i < kWindow; ++i) k(i) = std::exp(-(i - c) * (i - c) / (2.0 * kSigma * kSigma));
  return k / k.sum();
}

// Separable filtering restricted to fully contained windows.
RasterImage filter_valid(const RasterImage& in, const Eigen::VectorXd& k) {
  const Eigen::Index outRows = in.rows() - kWindow + 1, outCols = in.cols() - kWindow + 1;
  RasterImage vertical = RasterImage::Zero(outRows, in.cols());
  for (int i = 0; i < kWindow; ++i) vertical += k(i) * in.middleRows(i, outRows);
  RasterImage out = RasterImage::Zero(outRows, outCols);
  for (int i = 0; i < kWindow; ++i) out += k(i) * vertical.middleCols(i, outCols);
  return out;
}

}  // namespace

double ssim(const RasterImage& reference, const RasterImage& test) {
  require_same_size(reference, test, "ssim");
  if (reference.rows() < kWindow || reference.cols() < kWindow)
    throw Error(ErrorCode::InvalidArgument, "ssim needs images of at least 11x11");

  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  const Eigen::VectorXd k = gaussian_kernel();

  const RasterImage mx = filter_valid(reference, k);
  const RasterImage my = filter_valid(test, k);
  const RasterImage sxx = filter_valid(reference * reference, k) - mx * mx;
  const RasterImage syy = filter_valid(test * test, k) - my * my;
  const RasterImage sxy = filter_valid(reference * test, k) - mx * my;

  // Written so that x == y yields exactly 1 per window and swapping the
  // arguments yields identical arithmetic.
  const RasterImage num = (2.0 * (mx * my) + c1) * (2.0 * sxy + c2);
  const RasterImage den = ((mx * mx + my * my) + c1) * ((sxx + syy) + c2);
  return (num / den).mean();
}

std::string format_db(double value, int decimals) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.{}f}", value, decimals);
}

QualityReport build_report(const std::vector<EvaluatedPair>& entries) {
  if (entries.empty()) throw Error(ErrorCode::EmptyInput, "build_report needs at least one entry");
  QualityReport report;
  int finite = 0;
  for (const auto& e : entries) {
    QualityRecord r;
    static_cast<EvaluatedPair&>(r) = e;
    r.deltaPsnr = e.psnrProposed - e.psnrSingleView;
    r.deltaSsim = e.ssimProposed - e.ssimSingleView;
    report.records.push_back(r);

    if (std::isfinite(e.psnrSingleView) && std::isfinite(e.psnrProposed)) {
      report.meanPsnrSingleView += e.psnrSingleView;
      report.meanPsnrProposed += e.psnrProposed;
      report.meanDeltaPsnr += r.deltaPsnr;
      ++finite;
    } else {
      ++report.excludedInfinite;
    }
    report.meanSsimSingleView += e.ssimSingleView;
    report.meanSsimProposed += e.ssimProposed;
    report.meanDeltaSsim += r.deltaSsim;
  }
  if (finite > 0) {
    report.meanPsnrSingleView /= finite;
    report.meanPsnrProposed /= finite;
    report.meanDeltaPsnr /= finite;
  } else {
    report.meanPsnrSingleView = report.meanPsnrProposed = std::numeric_limits<double>::quiet_NaN();
    report.meanDeltaPsnr = std::numeric_limits<double>::quiet_NaN();
  }
  const auto n = static_cast<double>(entries.size());
  report.meanSsimSingleView /= n;
  report.meanSsimProposed /= n;
  report.meanDeltaSsim /= n;
  return report;
}

std::string QualityReport::to_csv() const {
  std::string out = "name,view,sensor_distance_mm,psnr_sv,psnr_prop,delta_psnr,ssim_sv,ssim_prop,delta_ssim\n";
  for (const auto& r : records) {
    const bool finite = std::isfinite(r.deltaPsnr);
    out += fmt::format("{},{},{:.0f},{},{},{},{:.6f},{:.6f},{:.6f}\n", r.name, r.view, r.sensorDistanceMm,
                       format_db(r.psnrSingleView, 6), format_db(r.psnrProposed, 6),
                       finite ? fmt::format("{:.6f}", r.deltaPsnr) : std::string("nan"), r.ssimSingleView,
                       r.ssimProposed, r.deltaSsim);
  }
  return out;
}

std::string QualityReport::to_markdown() const {
  std::string out =
      "| Image | View | Distance (mm) | FSE-SV PSNR | Stereo PSNR | Delta PSNR | FSE-SV SSIM | Stereo SSIM | "
      "Delta SSIM |\n"
      "|---|---|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : records) {
    out += fmt::format("| {} | {} | {:.0f} | {} | {} | {} | {:.4f} | {:.4f} | {:.4f} |\n", r.name, r.view,
                       r.sensorDistanceMm, format_db(r.psnrSingleView, 2), format_db(r.psnrProposed, 2),
                       std::isfinite(r.deltaPsnr) ? fmt::format("{:.2f}", r.deltaPsnr) : std::string("n/a"),
                       r.ssimSingleView, r.ssimProposed, r.deltaSsim);
  }
  out += fmt::format("| **Mean** | | | {:.2f} | {:.2f} | {:.2f} | {:.4f} | {:.4f} | {:.4f} |\n",
                     meanPsnrSingleView, meanPsnrProposed, meanDeltaPsnr, meanSsimSingleView, meanSsimProposed,
                     meanDeltaSsim);
  if (excludedInfinite > 0)
    out += fmt::format("\n{} row(s) with infinite PSNR excluded from the PSNR means.\n", excludedInfinite);
  if (!skipped.empty()) {
    out += "\nSkipped inputs:\n";
    for (const auto& s : skipped) out += "- " + s + "\n";
  }
  return out;
}

}  // namespace nrs
