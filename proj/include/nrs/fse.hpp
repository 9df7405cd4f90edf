#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "nrs/sampling.hpp"

namespace nrs {

/// Tunables of block-wise frequency selective extrapolation. Defaults are the
/// reference configuration: 4x4 blocks inside 28x28 support areas, 32x32
/// Fourier basis, 100 iterations.
struct FseParams {
  int blockSize = 4;
  int areaSize = 28;
  int fftSize = 32;
  int iterations = 100;
  double spatialDecay = 0.7;     // rho of the isotropic spatial weighting
  double reconWeight = 0.5;      // multiplier for already reconstructed support
  double odcFactor = 0.5;        // orthogonality deficiency compensation
  double freqWeightDecay = 0.85;  // 1 disables the frequency weighting

  /// Throws Error(InvalidArgument) on violated invariants.
  void validate() const;
};

/// Frequency index: k counts cycles along x (columns), l along y (rows).
struct Frequency {
  int k = 0;
  int l = 0;
  friend bool operator==(const Frequency&, const Frequency&) = default;
};

/// Sparse Fourier model g[x,y] = sum c(k,l) exp(2 pi i (k x + l y) / N).
struct BlockModel {
  int fftSize = 0;
  /// Dense N x N coefficient array, row = l, column = k.
  Raster<std::complex<double>> coefficients;
  /// Distinct selected basis functions in order of first selection. A
  /// non-self-conjugate entry stands for itself and its conjugate partner.
  std::vector<Frequency> selected;

  std::complex<double> evaluate_complex(double x, double y) const;
  double evaluate(double x, double y) const { return evaluate_complex(x, y).real(); }

 private:
  friend class BlockModeler;
  std::vector<int> active_;  // flat indices with non-zero coefficients
};

Frequency conjugate(Frequency f, int fftSize);

/// rho_f ^ (radial distance from DC, measured with wrap-around).
double frequency_weight(Frequency f, int fftSize, double decay);

/// Weight of one support pixel at `distance` from the block center.
double support_weight(SampleClass cls, double distance, const FseParams& params, double warpedWeight = 1.0);

/// Weight window for an areaSize x areaSize neighbourhood whose block sits
/// centered. Pixels outside the image must be passed as Absent.
RasterImage support_weights(const ClassRaster& areaClasses, const FseParams& params, double warpedWeight = 1.0);

/// Signal samples and support weights on the zero-padded fftSize grid.
struct BlockArea {
  RasterImage values;
  RasterImage weights;
};

using IterationObserver = std::function<void(int iteration, const BlockModel& model)>;

/// Greedy sparse model generation on one support area. Returns nullopt when
/// the area carries no support at all.
std::optional<BlockModel> model_block(const BlockArea& area, const FseParams& params,
                                      const IterationObserver& observer = {});

struct BlockIndex {
  int bx = 0;
  int by = 0;
  friend bool operator==(const BlockIndex&, const BlockIndex&) = default;
};

/// Blocks sorted by descending number of mask samples inside their support
/// area; ties keep row-major order.
std::vector<BlockIndex> processing_order(const BoolRaster& mask, const FseParams& params);

/// Number of mask samples inside the (clipped) support area of `block`.
int support_count(const BoolRaster& mask, BlockIndex block, const FseParams& params);

/// Fills every Absent pixel of `view`. Original and Warped samples are
/// returned unchanged. Dimensions must be multiples of blockSize.
RasterImage reconstruct(const SampledView& view, const FseParams& params, double warpedWeight = 1.0);

/// Same as reconstruct(), but pads the right/bottom edge to a multiple of
/// blockSize first (the padding carries no support) and crops afterwards.
RasterImage reconstruct_padded(const SampledView& view, const FseParams& params, double warpedWeight = 1.0);

/// Inverse-distance interpolation over the four nearest known samples.
RasterImage linear_reconstruct(const SampledView& view);

}  // namespace nrs
