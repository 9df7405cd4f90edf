#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

#include "nrs/error.hpp"

namespace nrs {

// Rows index y (the image row), columns index x. Storage is row-major so that
// data() walks the image the same way the files on disk do.
template <typename Scalar>
using Raster = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Grayscale luminance grid. Samples are real, nominally in [0, 255].
using RasterImage = Raster<double>;
using BoolRaster = Raster<bool>;
using IntRaster = Raster<int>;

inline Eigen::Index width(const auto& r) { return r.cols(); }
inline Eigen::Index height(const auto& r) { return r.rows(); }

/// Round half up and clamp to the 8-bit range.
inline std::uint8_t quantize_sample(double v) {
  const double r = std::floor(v + 0.5);
  if (!(r > 0.0)) return 0;  // also catches NaN
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

/// 8-bit quantization of a whole raster, kept in real storage.
template <typename Derived>
RasterImage quantized(const Eigen::DenseBase<Derived>& image) {
  return image.derived().unaryExpr([](double v) { return static_cast<double>(quantize_sample(v)); });
}

/// BT.601 luma with round-half-up.
inline std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return quantize_sample(0.299 * r + 0.587 * g + 0.114 * b);
}

/// Sub-image copy. Throws Error(OutOfBounds) if the rectangle leaves the image.
template <typename Derived>
Raster<typename Derived::Scalar> crop(const Eigen::DenseBase<Derived>& image, Eigen::Index x0,
                                      Eigen::Index y0, Eigen::Index w, Eigen::Index h) {
  if (w < 1 || h < 1 || x0 < 0 || y0 < 0 || x0 + w > image.cols() || y0 + h > image.rows()) {
    throw Error(ErrorCode::OutOfBounds,
                "crop (" + std::to_string(x0) + "," + std::to_string(y0) + "," + std::to_string(w) +
                    "," + std::to_string(h) + ") outside " + std::to_string(image.cols()) + "x" +
                    std::to_string(image.rows()));
  }
  return image.derived().block(y0, x0, h, w);
}

template <typename A, typename B>
void require_same_size(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a.cols()) + "x" + std::to_string(a.rows()) +
                    " vs " + std::to_string(b.cols()) + "x" + std::to_string(b.rows()));
  }
}

}  // namespace nrs
