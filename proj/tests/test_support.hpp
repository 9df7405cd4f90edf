#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "nrs/raster.hpp"

namespace nrs::test {

inline std::filesystem::path data_dir() { return NRS_TEST_DATA_DIR; }

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nrs_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

/// Uniform integer samples in [lo, hi].
inline RasterImage random_image(Eigen::Index w, Eigen::Index h, std::uint64_t seed, int lo = 0, int hi = 255) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(lo, hi);
  RasterImage img(h, w);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = dist(rng);
  return img;
}

}  // namespace nrs::test
