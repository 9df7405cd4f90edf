// Command line front end: mask generation, simulated capture, single-view and
// stereo reconstruction, dataset evaluation and synthetic test scenes.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nrs/image_io.hpp"
#include "nrs/pipeline.hpp"
#include "nrs/synth.hpp"

namespace fs = std::filesystem;

namespace {

nrs::PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? nrs::PipelineConfig{} : nrs::load_config(path);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw nrs::Error(nrs::ErrorCode::Unwritable, path.string());
  out << text;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  return p.parent_path() / (p.stem().string() + suffix + p.extension().string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-regular sampling reconstruction for single views and stereo pairs"};
  app.require_subcommand(1);

  // mask
  auto* maskCmd = app.add_subcommand("mask", "Write a quarter-sampling mask as a graymap");
  int lrWidth = 0, lrHeight = 0;
  std::uint64_t seed = 1;
  std::string out;
  maskCmd->add_option("--lr-width", lrWidth, "LR sensor width")->required();
  maskCmd->add_option("--lr-height", lrHeight, "LR sensor height")->required();
  maskCmd->add_option("--seed", seed, "mask seed");
  maskCmd->add_option("--out", out, "output graymap")->required();

  // sample
  auto* sampleCmd = app.add_subcommand("sample", "Simulate a masked LR capture of an HR image");
  std::string image, maskOut;
  sampleCmd->add_option("--image", image, "HR input image")->required()->check(CLI::ExistingFile);
  sampleCmd->add_option("--seed", seed, "mask seed");
  sampleCmd->add_option("--out", out, "sampled view output")->required();
  sampleCmd->add_option("--mask-out", maskOut, "mask output (default: <out>_mask)");

  // reconstruct-sv
  auto* svCmd = app.add_subcommand("reconstruct-sv", "Single-view FSE reconstruction of a simulated capture");
  std::string config;
  svCmd->add_option("--image", image, "HR input image")->required()->check(CLI::ExistingFile);
  svCmd->add_option("--seed", seed, "mask seed");
  svCmd->add_option("--config", config, "pipeline config (INI)")->check(CLI::ExistingFile);
  svCmd->add_option("--out", out, "reconstruction output")->required();

  // reconstruct-stereo
  auto* stCmd = app.add_subcommand("reconstruct-stereo", "Stereo reconstruction with cross-view sample projection");
  std::string left, right, leftMask, rightMask, outdir;
  double dispScale = 4.0;
  stCmd->add_option("--left", left, "left image")->required()->check(CLI::ExistingFile);
  stCmd->add_option("--right", right, "right image")->required()->check(CLI::ExistingFile);
  stCmd->add_option("--left-mask", leftMask, "treat --left as already sampled with this mask")
      ->check(CLI::ExistingFile);
  stCmd->add_option("--right-mask", rightMask, "treat --right as already sampled with this mask")
      ->check(CLI::ExistingFile);
  stCmd->add_option("--config", config, "pipeline config (INI)")->check(CLI::ExistingFile);
  stCmd->add_option("--outdir", outdir, "output directory")->required();
  stCmd->add_option("--disp-scale", dispScale, "gray levels per pixel of disparity in visualizations");

  // evaluate
  auto* evCmd = app.add_subcommand("evaluate", "Compare FSE-SV and stereo reconstruction over a dataset");
  std::string dataset, pairings = "1-5", report;
  evCmd->add_option("--dataset", dataset, "directory of scene folders holding viewN images")
      ->required()
      ->check(CLI::ExistingDirectory);
  evCmd->add_option("--config", config, "pipeline config (INI)")->check(CLI::ExistingFile);
  evCmd->add_option("--pairings", pairings, "view pairings, e.g. 1-2,1-5");
  evCmd->add_option("--report", report, "CSV report path; a Markdown table is written next to it")->required();

  // synth-pair
  auto* synCmd = app.add_subcommand("synth-pair", "Write the synthetic shifted and occlusion test scenes");
  int synWidth = 256, synHeight = 256, shift = 5;
  synCmd->add_option("--out", out, "output dataset directory")->required();
  synCmd->add_option("--width", synWidth, "width of the shifted pair");
  synCmd->add_option("--height", synHeight, "height of the shifted pair");
  synCmd->add_option("--shift", shift, "uniform shift of the shifted pair");
  synCmd->add_option("--seed", seed, "texture seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*maskCmd) {
      nrs::save_mask(nrs::generate_mask(lrWidth, lrHeight, seed), out);
    } else if (*sampleCmd) {
      const nrs::RasterImage hr = nrs::load_image(image);
      const nrs::SampledView view = nrs::apply_mask(hr, nrs::generate_mask(hr.cols() / 2, hr.rows() / 2, seed));
      nrs::save_image(view.image, out);
      nrs::save_mask(view.mask, maskOut.empty() ? with_suffix(out, "_mask") : fs::path(maskOut));
    } else if (*svCmd) {
      const auto cfg = config_or_default(config);
      nrs::save_image(nrs::run_single_view(nrs::load_image(image), seed, cfg), out);
    } else if (*stCmd) {
      const auto cfg = config_or_default(config);
      const nrs::RasterImage l = nrs::load_image(left), r = nrs::load_image(right);
      nrs::StereoResult res;
      if (!leftMask.empty() || !rightMask.empty()) {
        if (leftMask.empty() || rightMask.empty())
          throw nrs::Error(nrs::ErrorCode::InvalidArgument, "--left-mask and --right-mask go together");
        auto view = [](const nrs::RasterImage& img, const std::string& maskPath) {
          return nrs::apply_mask(img, nrs::load_image(maskPath) > 127.0);
        };
        res = nrs::reconstruct_stereo(view(l, leftMask), view(r, rightMask), cfg);
      } else {
        res = nrs::run_stereo(l, r, cfg);
      }
      const fs::path dir = outdir;
      fs::create_directories(dir);
      nrs::save_image(res.lHat, dir / "left_hat.pgm");
      nrs::save_image(res.rHat, dir / "right_hat.pgm");
      nrs::save_image(res.lPrime, dir / "left_first_pass.pgm");
      nrs::save_image(res.rPrime, dir / "right_first_pass.pgm");
      nrs::save_image(nrs::disparity_visualization(res.dLeft, dispScale), dir / "disparity_left.pgm");
      nrs::save_image(nrs::disparity_visualization(res.dRight, dispScale), dir / "disparity_right.pgm");
      nrs::save_mask(res.lMerged.mask, dir / "merged_mask_left.pgm");
      nrs::save_mask(res.rMerged.mask, dir / "merged_mask_right.pgm");
      write_text(dir / "stats.json", res.stats.to_json());
      const auto& s = res.stats.seconds;
      std::cerr << "first pass " << s.firstPass << " s, matching " << s.matching << " s, warping " << s.warping
                << " s, final pass " << s.finalPass << " s\n";
    } else if (*evCmd) {
      auto cfg = config_or_default(config);
      const auto rep = nrs::run_batch(dataset, nrs::parse_pairings(pairings), cfg);
      const fs::path csv = report;
      write_text(csv, rep.to_csv());
      fs::path md = csv;
      md.replace_extension(".md");
      write_text(md, rep.to_markdown());
      std::cout << rep.to_markdown();
    } else if (*synCmd) {
      const fs::path dir = out;
      fs::create_directories(dir / "shifted");
      fs::create_directories(dir / "occlusion");
      const auto shifted = nrs::shifted_pair(synWidth, synHeight, shift, seed);
      nrs::save_image(shifted.left, dir / "shifted" / "view1.pgm");
      nrs::save_image(shifted.right, dir / "shifted" / "view2.pgm");
      const auto occ = nrs::occlusion_pair(nrs::OcclusionScene{});
      nrs::save_image(occ.left, dir / "occlusion" / "view1.pgm");
      nrs::save_image(occ.right, dir / "occlusion" / "view2.pgm");
    }
  } catch (const nrs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
