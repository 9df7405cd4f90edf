#include "nrs/image_io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

namespace nrs {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(ErrorCode code, const fs::path& path, const std::string& detail) {
  throw Error(code, path.string() + (detail.empty() ? "" : " (" + detail + ")"));
}

// Reads one whitespace-delimited header token, skipping '#' comments.
bool read_token(std::istream& in, std::string& token) {
  token.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) return false;
  token.push_back(static_cast<char>(c));
  while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') token.push_back(static_cast<char>(in.get()));
  return true;
}

int parse_positive(const std::string& token, const fs::path& path) {
  if (token.empty() || token.size() > 9) fail(ErrorCode::CorruptHeader, path, "bad number '" + token + "'");
  for (char ch : token)
    if (!std::isdigit(static_cast<unsigned char>(ch))) fail(ErrorCode::CorruptHeader, path, "bad number '" + token + "'");
  const int v = std::stoi(token);
  if (v < 1) fail(ErrorCode::CorruptHeader, path, "non-positive header value");
  return v;
}

RasterImage load_pnm(std::ifstream& in, const fs::path& path) {
  std::string magic, tw, th, tm;
  if (!read_token(in, magic) || (magic != "P5" && magic != "P6"))
    fail(ErrorCode::UnsupportedFormat, path, "expected P5 or P6");
  if (!read_token(in, tw) || !read_token(in, th) || !read_token(in, tm))
    fail(ErrorCode::CorruptHeader, path, "truncated header");
  const int w = parse_positive(tw, path);
  const int h = parse_positive(th, path);
  const int maxval = parse_positive(tm, path);
  if (maxval != 255) fail(ErrorCode::UnsupportedBitDepth, path, "maxval " + tm);
  in.get();  // single whitespace byte after maxval

  const int channels = magic == "P6" ? 3 : 1;
  std::vector<unsigned char> bytes(static_cast<size_t>(w) * h * channels);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    fail(ErrorCode::CorruptHeader, path, "pixel data shorter than header claims");

  RasterImage image(h, w);
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    const unsigned char* p = &bytes[static_cast<size_t>(i) * channels];
    image.data()[i] = channels == 1 ? p[0] : luma_bt601(p[0], p[1], p[2]);
  }
  return image;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

RasterImage load_png(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(ErrorCode::FileNotFound, path, "");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorCode::CorruptHeader, path, "libpng init");
  }
  std::vector<unsigned char> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 w = 0, h = 0;
  int depth = 0, color = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::CorruptHeader, path, "libpng decode error");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  png_get_IHDR(png, info, &w, &h, &depth, &color, nullptr, nullptr, nullptr);
  if (depth != 8 && !(color == PNG_COLOR_TYPE_PALETTE || (color == PNG_COLOR_TYPE_GRAY && depth < 8))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::UnsupportedBitDepth, path, std::to_string(depth) + " bits per channel");
  }
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const int channels = png_get_channels(png, info);
  const size_t stride = png_get_rowbytes(png, info);
  pixels.resize(stride * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  RasterImage image(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(w));
  for (png_uint_32 y = 0; y < h; ++y) {
    for (png_uint_32 x = 0; x < w; ++x) {
      const unsigned char* p = rows[y] + static_cast<size_t>(x) * channels;
      image(y, x) = channels >= 3 ? luma_bt601(p[0], p[1], p[2]) : p[0];
    }
  }
  return image;
}

bool has_png_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".png";
}

void save_bytes_png(const std::vector<unsigned char>& bytes, int w, int h, const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(ErrorCode::Unwritable, path, "");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorCode::Unwritable, path, "libpng init");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::Unwritable, path, "libpng encode error");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < h; ++y) png_write_row(png, bytes.data() + static_cast<size_t>(y) * w);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_bytes(const std::vector<unsigned char>& bytes, int w, int h, const fs::path& path) {
  if (has_png_extension(path)) {
    save_bytes_png(bytes, w, h, path);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Unwritable, path, "");
  out << "P5\n" << w << ' ' << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Unwritable, path, "write failed");
}

}  // namespace

RasterImage load_image(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::FileNotFound, path, "");
  std::array<unsigned char, 8> sig{};
  in.read(reinterpret_cast<char*>(sig.data()), sig.size());
  const auto got = in.gcount();
  if (got >= 8 && png_sig_cmp(sig.data(), 0, 8) == 0) {
    in.close();
    return load_png(path);
  }
  if (got < 2 || sig[0] != 'P') fail(ErrorCode::UnsupportedFormat, path, "not a PNM or PNG file");
  in.clear();
  in.seekg(0);
  return load_pnm(in, path);
}

void save_image(const RasterImage& image, const fs::path& path) {
  std::vector<unsigned char> bytes(static_cast<size_t>(image.size()));
  for (Eigen::Index i = 0; i < image.size(); ++i) bytes[static_cast<size_t>(i)] = quantize_sample(image.data()[i]);
  save_bytes(bytes, static_cast<int>(image.cols()), static_cast<int>(image.rows()), path);
}

void save_mask(const BoolRaster& mask, const fs::path& path) {
  std::vector<unsigned char> bytes(static_cast<size_t>(mask.size()));
  for (Eigen::Index i = 0; i < mask.size(); ++i) bytes[static_cast<size_t>(i)] = mask.data()[i] ? 255 : 0;
  save_bytes(bytes, static_cast<int>(mask.cols()), static_cast<int>(mask.rows()), path);
}

}  // namespace nrs
