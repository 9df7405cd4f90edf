#include "nrs/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <nlohmann/json.hpp>
#include <regex>
#include <sstream>
#include <thread>

#include "nrs/image_io.hpp"

namespace nrs {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

void PipelineConfig::validate() const {
  fse.validate();
  match.validate();
  if (!(warpedSupportWeight > 0.0 && warpedSupportWeight <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "warped_support_weight must lie in (0,1]");
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
  if (!(viewSpacingMm >= 0.0)) throw Error(ErrorCode::InvalidArgument, "view_spacing_mm must be >= 0");
}

namespace {

template <typename T>
void read_key(const pt::ptree& section, const std::string& key, T& target) {
  if (auto v = section.get_optional<std::string>(key)) {
    std::istringstream in(*v);
    T parsed{};
    in >> parsed;
    if (in.fail() || !(in >> std::ws).eof())
      throw Error(ErrorCode::InvalidArgument, "config: bad value '" + *v + "' for " + key);
    target = parsed;
  }
}

void reject_unknown(const pt::ptree& section, const std::string& name, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : section) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw Error(ErrorCode::InvalidArgument, "config: unknown key '" + key + "' in [" + name + "]");
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
  PipelineConfig cfg;
  for (const auto& [name, section] : tree) {
    if (name == "fse") {
      reject_unknown(section, name, {"block_size", "area_size", "fft_size", "iterations", "spatial_decay",
                                     "recon_weight", "odc_factor", "freq_weight_decay"});
      read_key(section, "block_size", cfg.fse.blockSize);
      read_key(section, "area_size", cfg.fse.areaSize);
      read_key(section, "fft_size", cfg.fse.fftSize);
      read_key(section, "iterations", cfg.fse.iterations);
      read_key(section, "spatial_decay", cfg.fse.spatialDecay);
      read_key(section, "recon_weight", cfg.fse.reconWeight);
      read_key(section, "odc_factor", cfg.fse.odcFactor);
      read_key(section, "freq_weight_decay", cfg.fse.freqWeightDecay);
    } else if (name == "match") {
      reject_unknown(section, name, {"window_radius", "dx_min", "dx_max", "dy_min", "dy_max", "cc_tolerance"});
      read_key(section, "window_radius", cfg.match.windowRadius);
      read_key(section, "dx_min", cfg.match.dxMin);
      read_key(section, "dx_max", cfg.match.dxMax);
      read_key(section, "dy_min", cfg.match.dyMin);
      read_key(section, "dy_max", cfg.match.dyMax);
      read_key(section, "cc_tolerance", cfg.match.ccTolerance);
    } else if (name == "pipeline") {
      reject_unknown(section, name, {"mask_seed_left", "mask_seed_right", "first_pass", "warped_support_weight",
                                     "output_dir", "workers", "view_spacing_mm"});
      read_key(section, "mask_seed_left", cfg.maskSeedLeft);
      read_key(section, "mask_seed_right", cfg.maskSeedRight);
      if (auto fp = section.get_optional<std::string>("first_pass")) {
        if (*fp == "fse") cfg.firstPass = FirstPass::Fse;
        else if (*fp == "linear") cfg.firstPass = FirstPass::Linear;
        else throw Error(ErrorCode::InvalidArgument, "config: first_pass must be 'fse' or 'linear'");
      }
      read_key(section, "warped_support_weight", cfg.warpedSupportWeight);
      if (auto od = section.get_optional<std::string>("output_dir")) cfg.outputDir = *od;
      read_key(section, "workers", cfg.workers);
      read_key(section, "view_spacing_mm", cfg.viewSpacingMm);
    } else {
      throw Error(ErrorCode::InvalidArgument, "config: unknown section or key '" + name + "'");
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_ini(const PipelineConfig& cfg) {
  std::string out;
  out += "[fse]\n";
  out += fmt::format("block_size = {}\narea_size = {}\nfft_size = {}\niterations = {}\n", cfg.fse.blockSize,
                     cfg.fse.areaSize, cfg.fse.fftSize, cfg.fse.iterations);
  out += fmt::format("spatial_decay = {}\nrecon_weight = {}\nodc_factor = {}\nfreq_weight_decay = {}\n",
                     cfg.fse.spatialDecay, cfg.fse.reconWeight, cfg.fse.odcFactor, cfg.fse.freqWeightDecay);
  out += "\n[match]\n";
  out += fmt::format("window_radius = {}\ndx_min = {}\ndx_max = {}\ndy_min = {}\ndy_max = {}\ncc_tolerance = {}\n",
                     cfg.match.windowRadius, cfg.match.dxMin, cfg.match.dxMax, cfg.match.dyMin, cfg.match.dyMax,
                     cfg.match.ccTolerance);
  out += "\n[pipeline]\n";
  out += fmt::format("mask_seed_left = {}\nmask_seed_right = {}\nfirst_pass = {}\nwarped_support_weight = {}\n",
                     cfg.maskSeedLeft, cfg.maskSeedRight, cfg.firstPass == FirstPass::Fse ? "fse" : "linear",
                     cfg.warpedSupportWeight);
  out += fmt::format("output_dir = {}\nworkers = {}\nview_spacing_mm = {}\n", cfg.outputDir.string(), cfg.workers,
                     cfg.viewSpacingMm);
  return out;
}

std::string StereoStats::to_json() const {
  auto warp = [](const WarpStats& w) {
    return nlohmann::ordered_json{
        {"eligible", w.eligible}, {"placed", w.placed}, {"dropped", w.dropped}, {"overwritten", w.overwritten}};
  };
  nlohmann::ordered_json j{
      {"pixels", pixels},
      {"original_left", originalLeft},
      {"original_right", originalRight},
      {"valid_left_before_check", validLeftBeforeCheck},
      {"valid_right_before_check", validRightBeforeCheck},
      {"valid_left", validLeft},
      {"valid_right", validRight},
      {"warp_to_left", warp(warpToLeft)},
      {"warp_to_right", warp(warpToRight)},
      {"merged_density_left", mergedDensityLeft},
      {"merged_density_right", mergedDensityRight},
  };
  return j.dump(2) + "\n";
}

RasterImage run_single_view(const RasterImage& hr, std::uint64_t seed, const PipelineConfig& cfg) {
  cfg.validate();
  const BoolRaster mask = generate_mask(hr.cols() / 2, hr.rows() / 2, seed);
  return reconstruct_padded(apply_mask(hr, mask), cfg.fse);
}

namespace {

RasterImage first_pass(const SampledView& view, const PipelineConfig& cfg) {
  return cfg.firstPass == FirstPass::Fse ? reconstruct_padded(view, cfg.fse) : linear_reconstruct(view);
}

}  // namespace

StereoResult reconstruct_stereo(const SampledView& left, const SampledView& right, const PipelineConfig& cfg) {
  cfg.validate();
  require_same_size(left.image, right.image, "reconstruct_stereo");
  check_view(left);
  check_view(right);

  StereoResult res;
  auto& st = res.stats;
  st.pixels = left.image.size();
  st.originalLeft = left.sample_count();
  st.originalRight = right.sample_count();
  res.lSampled = left;
  res.rSampled = right;

  const bool parallel = cfg.workers > 1;
  auto both = [parallel](auto&& fl, auto&& fr) {
    if (!parallel) return std::pair{fl(), fr()};
    auto futureRight = std::async(std::launch::async, fr);
    auto l = fl();
    return std::pair{std::move(l), futureRight.get()};
  };

  auto t = std::chrono::steady_clock::now();
  std::tie(res.lPrime, res.rPrime) =
      both([&] { return first_pass(left, cfg); }, [&] { return first_pass(right, cfg); });
  st.seconds.firstPass = seconds_since(t);

  t = std::chrono::steady_clock::now();
  const MatchParams toRight = cfg.match;
  const MatchParams toLeft = cfg.match.mirrored();
  auto [rawLeft, rawRight] = both([&] { return compute_disparity(res.lPrime, res.rPrime, toRight); },
                                  [&] { return compute_disparity(res.rPrime, res.lPrime, toLeft); });
  st.seconds.matching = seconds_since(t);
  st.validLeftBeforeCheck = rawLeft.valid_count();
  st.validRightBeforeCheck = rawRight.valid_count();

  t = std::chrono::steady_clock::now();
  std::tie(res.dLeft, res.dRight) = consistency_check(rawLeft, rawRight, cfg.match.ccTolerance);
  st.seconds.consistency = seconds_since(t);
  st.validLeft = res.dLeft.valid_count();
  st.validRight = res.dRight.valid_count();

  t = std::chrono::steady_clock::now();
  const SampledView warpedIntoRight = warp_samples(left, res.dLeft, &st.warpToRight);
  const SampledView warpedIntoLeft = warp_samples(right, res.dRight, &st.warpToLeft);
  res.lMerged = merge_views(left, warpedIntoLeft);
  res.rMerged = merge_views(right, warpedIntoRight);
  st.seconds.warping = seconds_since(t);
  st.mergedDensityLeft = res.lMerged.density();
  st.mergedDensityRight = res.rMerged.density();

  t = std::chrono::steady_clock::now();
  std::tie(res.lHat, res.rHat) =
      both([&] { return reconstruct_padded(res.lMerged, cfg.fse, cfg.warpedSupportWeight); },
           [&] { return reconstruct_padded(res.rMerged, cfg.fse, cfg.warpedSupportWeight); });
  st.seconds.finalPass = seconds_since(t);
  return res;
}

StereoResult run_stereo(const RasterImage& hrLeft, const RasterImage& hrRight, const PipelineConfig& cfg) {
  cfg.validate();
  require_same_size(hrLeft, hrRight, "run_stereo");
  const auto t = std::chrono::steady_clock::now();
  const SampledView left = apply_mask(hrLeft, generate_mask(hrLeft.cols() / 2, hrLeft.rows() / 2, cfg.maskSeedLeft));
  const SampledView right =
      apply_mask(hrRight, generate_mask(hrRight.cols() / 2, hrRight.rows() / 2, cfg.maskSeedRight));
  const double sampling = seconds_since(t);
  StereoResult res = reconstruct_stereo(left, right, cfg);
  res.stats.seconds.sampling = sampling;
  return res;
}

std::vector<Pairing> parse_pairings(const std::string& text) {
  std::vector<Pairing> out;
  static const std::regex item(R"(\s*(\d+)\s*-\s*(\d+)\s*)");
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    std::smatch m;
    if (!std::regex_match(token, m, item))
      throw Error(ErrorCode::InvalidArgument, "pairing '" + token + "' is not of the form L-R");
    const Pairing p{std::stoi(m[1]), std::stoi(m[2])};
    if (p.left == p.right) throw Error(ErrorCode::InvalidArgument, "pairing '" + token + "' uses one view twice");
    out.push_back(p);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no pairings given");
  return out;
}

std::vector<EvaluatedPair> evaluate_pair(const std::string& name, const RasterImage& hrLeft,
                                         const RasterImage& hrRight, double distanceMm, const PipelineConfig& cfg,
                                         const fs::path& outDir) {
  const StereoResult res = run_stereo(hrLeft, hrRight, cfg);
  const bool reuse = cfg.firstPass == FirstPass::Fse;
  const RasterImage svLeft = reuse ? res.lPrime : run_single_view(hrLeft, cfg.maskSeedLeft, cfg);
  const RasterImage svRight = reuse ? res.rPrime : run_single_view(hrRight, cfg.maskSeedRight, cfg);

  auto row = [&](const char* view, const RasterImage& hr, const RasterImage& sv, const RasterImage& prop) {
    EvaluatedPair e;
    e.name = name;
    e.view = view;
    e.sensorDistanceMm = distanceMm;
    e.psnrSingleView = psnr(hr, sv);
    e.psnrProposed = psnr(hr, prop);
    const RasterImage ref = quantized(hr);
    e.ssimSingleView = ssim(ref, quantized(sv));
    e.ssimProposed = ssim(ref, quantized(prop));
    return e;
  };

  if (!outDir.empty()) {
    fs::create_directories(outDir);
    save_image(svLeft, outDir / "left_sv.pgm");
    save_image(svRight, outDir / "right_sv.pgm");
    save_image(res.lHat, outDir / "left_stereo.pgm");
    save_image(res.rHat, outDir / "right_stereo.pgm");
    save_image(disparity_visualization(res.dLeft, 4.0), outDir / "disparity_left.pgm");
    save_image(disparity_visualization(res.dRight, 4.0), outDir / "disparity_right.pgm");
    save_mask(res.lMerged.mask, outDir / "merged_mask_left.pgm");
    save_mask(res.rMerged.mask, outDir / "merged_mask_right.pgm");
    std::ofstream(outDir / "stats.json") << res.stats.to_json();
  }
  return {row("left", hrLeft, svLeft, res.lHat), row("right", hrRight, svRight, res.rHat)};
}

namespace {

std::optional<fs::path> find_view(const fs::path& scene, int view) {
  for (const char* ext : {".png", ".pgm", ".ppm"}) {
    const fs::path p = scene / fmt::format("view{}{}", view, ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

}  // namespace

QualityReport run_batch(const fs::path& datasetDir, const std::vector<Pairing>& pairings, const PipelineConfig& cfg) {
  cfg.validate();
  if (!fs::is_directory(datasetDir)) throw Error(ErrorCode::FileNotFound, datasetDir.string());
  std::vector<fs::path> scenes;
  for (const auto& entry : fs::directory_iterator(datasetDir))
    if (entry.is_directory()) scenes.push_back(entry.path());
  std::sort(scenes.begin(), scenes.end());

  struct Task {
    fs::path scene;
    Pairing pairing;
  };
  std::vector<Task> tasks;
  for (const auto& s : scenes)
    for (const auto& p : pairings) tasks.push_back({s, p});

  struct Outcome {
    std::vector<EvaluatedPair> rows;
    std::string skipped;
  };
  std::vector<Outcome> outcomes(tasks.size());
  std::atomic<size_t> next{0};
  // Views run sequentially inside each task; concurrency is across tasks.
  PipelineConfig taskCfg = cfg;
  taskCfg.workers = 1;
  auto worker = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      const Task& task = tasks[i];
      const std::string name = task.scene.filename().string();
      const std::string tag = fmt::format("view{}-view{}", task.pairing.left, task.pairing.right);
      try {
        const auto lp = find_view(task.scene, task.pairing.left);
        const auto rp = find_view(task.scene, task.pairing.right);
        if (!lp || !rp) throw Error(ErrorCode::FileNotFound, "missing view image for " + tag);
        const RasterImage left = load_image(*lp);
        const RasterImage right = load_image(*rp);
        const double distance = cfg.viewSpacingMm * std::abs(task.pairing.right - task.pairing.left);
        outcomes[i].rows = evaluate_pair(name, left, right, distance, taskCfg, cfg.outputDir / name / tag);
      } catch (const Error& e) {
        outcomes[i].skipped = name + " (" + tag + "): " + e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<EvaluatedPair> rows;
  std::vector<std::string> skipped;
  for (auto& o : outcomes) {
    if (!o.skipped.empty()) {
      std::cerr << "warning: skipped " << o.skipped << "\n";
      skipped.push_back(o.skipped);
    }
    rows.insert(rows.end(), o.rows.begin(), o.rows.end());
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no scene in " + datasetDir.string() + " could be evaluated");
  QualityReport report = build_report(rows);
  report.skipped = skipped;
  return report;
}

}  // namespace nrs
