#pragma once

#include <filesystem>

#include "nrs/raster.hpp"

namespace nrs {

/// Reads binary PGM (P5), binary PPM (P6) or 8-bit PNG. Color input is
/// converted to luma (BT.601, rounded). Bit depths other than 8 are rejected.
RasterImage load_image(const std::filesystem::path& path);

/// Writes an 8-bit grayscale file; the format follows the extension
/// (".png" -> PNG, anything else -> P5). Samples are rounded and clamped.
void save_image(const RasterImage& image, const std::filesystem::path& path);

/// 255 where the flag is set, 0 elsewhere.
void save_mask(const BoolRaster& mask, const std::filesystem::path& path);

}  // namespace nrs
