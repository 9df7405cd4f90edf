#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "nrs/image_io.hpp"
#include "nrs/pipeline.hpp"
#include "nrs/synth.hpp"
#include "test_support.hpp"

using namespace nrs;
namespace fs = std::filesystem;

TEST_CASE("config defaults and round trip") {
  const PipelineConfig d;
  CHECK(d.fse.blockSize == 4);
  CHECK(d.fse.areaSize == 28);
  CHECK(d.match.windowRadius == 3);
  CHECK(d.maskSeedLeft == d.maskSeedRight);
  CHECK(d.firstPass == FirstPass::Fse);
  CHECK(d.warpedSupportWeight == 1.0);

  PipelineConfig c;
  c.fse.iterations = 37;
  c.fse.freqWeightDecay = 0.625;
  c.match.dxMin = -20;
  c.match.ccTolerance = 1;
  c.maskSeedRight = 99;
  c.firstPass = FirstPass::Linear;
  c.warpedSupportWeight = 0.75;
  c.outputDir = "/tmp/somewhere";
  const PipelineConfig back = parse_config(to_ini(c));
  CHECK(back.fse.iterations == 37);
  CHECK(back.fse.freqWeightDecay == 0.625);
  CHECK(back.match.dxMin == -20);
  CHECK(back.match.ccTolerance == 1);
  CHECK(back.maskSeedRight == 99);
  CHECK(back.firstPass == FirstPass::Linear);
  CHECK(back.warpedSupportWeight == 0.75);
  CHECK(back.outputDir == "/tmp/somewhere");
  CHECK(to_ini(back) == to_ini(c));

  // The shipped config spells out the defaults.
  CHECK(to_ini(load_config(fs::path(NRS_SOURCE_DIR) / "configs" / "default.ini")) == to_ini(PipelineConfig{}));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[fse]\nblock_sz = 4\n"), Error);
  CHECK_THROWS_AS(parse_config("[fse]\nblock_size = four\n"), Error);
  CHECK_THROWS_AS(parse_config("[extra]\na = 1\n"), Error);
  CHECK_THROWS_AS(parse_config("[pipeline]\nfirst_pass = cubic\n"), Error);
  CHECK_THROWS_AS(parse_config("[pipeline]\nwarped_support_weight = 0\n"), Error);
  CHECK_THROWS_AS(parse_config("[fse]\narea_size = 64\n"), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), Error);
  CHECK(parse_config("").fse.iterations == 100);
}

TEST_CASE("pairings") {
  const auto p = parse_pairings("1-2, 1-5");
  REQUIRE(p.size() == 2);
  CHECK(p[0] == Pairing{1, 2});
  CHECK(p[1] == Pairing{1, 5});
  CHECK_THROWS_AS(parse_pairings("1"), Error);
  CHECK_THROWS_AS(parse_pairings("2-2"), Error);
  CHECK_THROWS_AS(parse_pairings(""), Error);
}

TEST_CASE("single view") {
  PipelineConfig cfg;
  SUBCASE("constant image") {
    const RasterImage flat = RasterImage::Constant(32, 40, 60.0);
    CHECK(std::isinf(psnr(flat, run_single_view(flat, 3, cfg))));
  }
  SUBCASE("deterministic") {
    const RasterImage img = textured_noise(48, 40, 2);
    CHECK((run_single_view(img, 5, cfg) == run_single_view(img, 5, cfg)).all());
  }
  SUBCASE("natural crop lands in the usual quality range") {
    const RasterImage crop = nrs::crop(load_image(test::data_dir() / "motorcycle" / "left.png"), 0, 0, 128, 128);
    const double v = psnr(crop, run_single_view(crop, 1, cfg));
    CHECK(v > 30.0);
    CHECK(v < 48.0);
  }
}

TEST_CASE("stereo on identical views with different masks") {
  PipelineConfig cfg;
  cfg.maskSeedLeft = 1;
  cfg.maskSeedRight = 2;
  cfg.match.dxMin = -8;
  const RasterImage img = textured_noise(96, 96, 4);
  const StereoResult res = run_stereo(img, img, cfg);

  CHECK(res.stats.originalLeft * 4 == res.stats.pixels);
  CHECK(res.stats.originalRight * 4 == res.stats.pixels);
  const auto& w = res.stats.warpToLeft;
  CHECK(w.placed + w.dropped + w.overwritten == w.eligible);

  // Independent masks: a quarter of the 3/4 holes receive a warped sample,
  // for every pixel whose disparity survived.
  const double validFraction = static_cast<double>(res.stats.validRight) / res.stats.pixels;
  CHECK(res.stats.mergedDensityLeft == doctest::Approx(0.25 + 0.1875 * validFraction).epsilon(0.04));
  CHECK(res.stats.mergedDensityLeft > 0.40);
  const auto zeroShift = (res.dLeft.valid && res.dLeft.dx == 0).count();
  CHECK(zeroShift >= 0.99 * res.dLeft.valid_count());

  const RasterImage sv = run_single_view(img, 1, cfg);
  CHECK((sv == res.lPrime).all());
  CHECK(psnr(img, res.lHat) >= psnr(img, sv));
}

TEST_CASE("stereo degrades to the single-view result when no disparity survives") {
  PipelineConfig cfg;
  cfg.match.ccTolerance = -1;
  cfg.match.dxMin = -8;
  const StereoPair pair = shifted_pair(48, 40, 3, 9);
  const StereoResult res = run_stereo(pair.left, pair.right, cfg);
  CHECK(res.stats.validLeft == 0);
  CHECK(res.stats.mergedDensityLeft == 0.25);
  CHECK((res.lHat == run_single_view(pair.left, cfg.maskSeedLeft, cfg)).all());

  cfg.firstPass = FirstPass::Linear;
  const StereoResult lin = run_stereo(pair.left, pair.right, cfg);
  CHECK((lin.lHat == res.lHat).all());
}

TEST_CASE("stereo with pre-sampled views and odd-sized input") {
  PipelineConfig cfg;
  cfg.match.dxMin = -8;
  const StereoPair pair = shifted_pair(50, 38, 2, 1);  // not a multiple of the block size
  const StereoResult a = run_stereo(pair.left, pair.right, cfg);
  const StereoResult b = reconstruct_stereo(a.lSampled, a.rSampled, cfg);
  CHECK(a.lHat.cols() == 50);
  CHECK(a.lHat.rows() == 38);
  CHECK((a.lHat == b.lHat).all());
  CHECK((a.rHat == b.rHat).all());
  CHECK(a.stats.to_json() == b.stats.to_json());
  CHECK_THROWS_AS(run_stereo(pair.left, RasterImage::Zero(38, 52), cfg), Error);
}

namespace {

fs::path make_dataset(const std::string& name) {
  const fs::path dir = test::temp_dir(name);
  const StereoPair near = shifted_pair(64, 48, 2, 11);
  const StereoPair far = shifted_pair(64, 48, 6, 11);
  fs::create_directories(dir / "scene");
  save_image(near.left, dir / "scene" / "view1.pgm");
  save_image(near.right, dir / "scene" / "view2.pgm");
  save_image(far.right, dir / "scene" / "view3.pgm");
  fs::create_directories(dir / "broken");
  test::write_file(dir / "broken" / "view1.pgm", "P5\n");
  test::write_file(dir / "broken" / "view2.pgm", "P5\n");
  return dir;
}

}  // namespace

TEST_CASE("batch evaluation") {
  const fs::path data = make_dataset("batch");
  PipelineConfig cfg;
  cfg.match.dxMin = -12;
  cfg.outputDir = test::temp_dir("batch_out");

  const QualityReport one = run_batch(data, {{1, 2}}, cfg);
  REQUIRE(one.records.size() == 2);
  CHECK(one.records[0].name == "scene");
  CHECK(one.records[0].view == "left");
  CHECK(one.records[1].view == "right");
  CHECK(one.records[0].sensorDistanceMm == 40.0);
  CHECK(one.records[0].deltaPsnr == one.records[0].psnrProposed - one.records[0].psnrSingleView);
  REQUIRE(one.skipped.size() == 1);
  CHECK(one.skipped[0].find("broken") != std::string::npos);
  CHECK(one.to_markdown().find("broken") != std::string::npos);
  CHECK(fs::exists(cfg.outputDir / "scene" / "view1-view2" / "left_stereo.pgm"));
  CHECK(fs::exists(cfg.outputDir / "scene" / "view1-view2" / "stats.json"));

  const QualityReport two = run_batch(data, {{1, 2}, {1, 3}}, cfg);
  REQUIRE(two.records.size() == 4);
  CHECK(two.records[2].sensorDistanceMm == 80.0);
  CHECK(two.skipped.size() == 2);

  // Same inputs, same bytes, also with several workers.
  cfg.workers = 3;
  const QualityReport again = run_batch(data, {{1, 2}, {1, 3}}, cfg);
  CHECK(again.to_csv() == two.to_csv());
  CHECK(again.to_markdown() == two.to_markdown());

  CHECK_THROWS_AS(run_batch(data / "missing", {{1, 2}}, cfg), Error);
  CHECK_THROWS_AS(run_batch(data, {{4, 5}}, cfg), Error);
}

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NRS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command line interface") {
  const fs::path dir = test::temp_dir("cli");
  CHECK(run_cli("mask --lr-width 8 --lr-height 6 --seed 3 --out " + (dir / "m.pgm").string()) == 0);
  const RasterImage m = load_image(dir / "m.pgm");
  CHECK(m.cols() == 16);
  CHECK((m == 255.0).count() == 48);

  CHECK(run_cli("synth-pair --width 64 --height 48 --out " + (dir / "syn").string()) == 0);
  CHECK(fs::exists(dir / "syn" / "shifted" / "view1.pgm"));
  CHECK(fs::exists(dir / "syn" / "occlusion" / "view2.pgm"));

  const std::string left = (dir / "syn" / "shifted" / "view1.pgm").string();
  const std::string right = (dir / "syn" / "shifted" / "view2.pgm").string();
  CHECK(run_cli("sample --image " + left + " --seed 2 --out " + (dir / "s.pgm").string()) == 0);
  CHECK(fs::exists(dir / "s_mask.pgm"));
  CHECK(run_cli("reconstruct-sv --image " + left + " --out " + (dir / "sv.pgm").string()) == 0);
  CHECK(run_cli("reconstruct-stereo --left " + left + " --right " + right + " --outdir " +
                (dir / "st").string()) == 0);
  CHECK(fs::exists(dir / "st" / "left_hat.pgm"));
  CHECK(fs::exists(dir / "st" / "disparity_left.pgm"));
  CHECK(fs::exists(dir / "st" / "merged_mask_right.pgm"));
  CHECK(fs::exists(dir / "st" / "stats.json"));

  // Sampled views plus masks reproduce the simulated run.
  CHECK(run_cli("sample --image " + right + " --seed 1 --out " + (dir / "rs.pgm").string()) == 0);
  CHECK(run_cli("sample --image " + left + " --seed 1 --out " + (dir / "ls.pgm").string()) == 0);
  CHECK(run_cli("reconstruct-stereo --left " + (dir / "ls.pgm").string() + " --right " + (dir / "rs.pgm").string() +
                " --left-mask " + (dir / "ls_mask.pgm").string() + " --right-mask " +
                (dir / "rs_mask.pgm").string() + " --outdir " + (dir / "st2").string()) == 0);
  CHECK(test::read_file(dir / "st" / "left_hat.pgm") == test::read_file(dir / "st2" / "left_hat.pgm"));

  CHECK(run_cli("evaluate --dataset " + (dir / "syn").string() + " --pairings 1-2 --report " +
                (dir / "rep.csv").string()) == 0);
  CHECK(fs::exists(dir / "rep.md"));

  CHECK(run_cli("reconstruct-sv --image " + (dir / "nope.pgm").string() + " --out x.pgm") == 1);
  CHECK(run_cli("mask --lr-width 0 --lr-height 2 --out " + (dir / "z.pgm").string()) == 1);
  CHECK(run_cli("bogus") == 1);
}
