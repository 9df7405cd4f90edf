#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nrs/fse.hpp"
#include "nrs/metrics.hpp"
#include "nrs/stereo.hpp"

namespace nrs {

enum class FirstPass { Fse, Linear };

struct PipelineConfig {
  FseParams fse;
  MatchParams match;
  std::uint64_t maskSeedLeft = 1;
  std::uint64_t maskSeedRight = 1;  // same mask for both sensors by default
  FirstPass firstPass = FirstPass::Fse;
  double warpedSupportWeight = 1.0;
  std::filesystem::path outputDir = "out";
  int workers = 1;
  double viewSpacingMm = 40.0;  // baseline between adjacent dataset views

  void validate() const;
};

/// INI-style configuration with [fse], [match] and [pipeline] sections.
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& text);
std::string to_ini(const PipelineConfig& cfg);

struct StageTimes {
  double sampling = 0.0;
  double firstPass = 0.0;
  double matching = 0.0;
  double consistency = 0.0;
  double warping = 0.0;
  double finalPass = 0.0;
};

struct StereoStats {
  Eigen::Index pixels = 0;
  Eigen::Index originalLeft = 0;
  Eigen::Index originalRight = 0;
  Eigen::Index validLeftBeforeCheck = 0;
  Eigen::Index validRightBeforeCheck = 0;
  Eigen::Index validLeft = 0;
  Eigen::Index validRight = 0;
  WarpStats warpToLeft;   // right samples warped into the left view
  WarpStats warpToRight;  // left samples warped into the right view
  double mergedDensityLeft = 0.0;
  double mergedDensityRight = 0.0;
  StageTimes seconds;

  /// Deterministic fields only (no wall times), as JSON text.
  std::string to_json() const;
};

struct StereoResult {
  RasterImage lHat, rHat;
  RasterImage lPrime, rPrime;
  DisparityMap dLeft, dRight;
  SampledView lSampled, rSampled;
  SampledView lMerged, rMerged;
  StereoStats stats;
};

/// Mask, sample and reconstruct one view with FSE.
RasterImage run_single_view(const RasterImage& hr, std::uint64_t seed, const PipelineConfig& cfg);

/// Full cross-view chain on already sampled views; needs no ground truth.
StereoResult reconstruct_stereo(const SampledView& left, const SampledView& right, const PipelineConfig& cfg);

/// Simulated capture of both views followed by reconstruct_stereo().
StereoResult run_stereo(const RasterImage& hrLeft, const RasterImage& hrRight, const PipelineConfig& cfg);

/// A view pairing of a dataset scene, e.g. view1 (left) with view5 (right).
struct Pairing {
  int left = 1;
  int right = 5;
  friend bool operator==(const Pairing&, const Pairing&) = default;
};

/// Parses "1-2,1-5" style lists.
std::vector<Pairing> parse_pairings(const std::string& text);

/// Evaluates FSE-SV against the stereo pipeline on a single pair and writes
/// the reconstructions under `outDir` when it is non-empty.
std::vector<EvaluatedPair> evaluate_pair(const std::string& name, const RasterImage& hrLeft,
                                         const RasterImage& hrRight, double distanceMm, const PipelineConfig& cfg,
                                         const std::filesystem::path& outDir);

/// Runs every scene directory (containing viewN.png / viewN.pgm / viewN.ppm)
/// under `datasetDir` for every pairing. Unreadable scenes are listed in
/// QualityReport::skipped.
QualityReport run_batch(const std::filesystem::path& datasetDir, const std::vector<Pairing>& pairings,
                        const PipelineConfig& cfg);

}  // namespace nrs
