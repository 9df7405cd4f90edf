#include "nrs/fse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nrs {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void FseParams::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "FseParams: " + what); };
  if (blockSize < 1) bad("blockSize must be >= 1");
  if (!(blockSize <= areaSize && areaSize <= fftSize)) bad("need blockSize <= areaSize <= fftSize");
  if (iterations < 1) bad("iterations must be >= 1");
  auto unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!unit(spatialDecay) || spatialDecay >= 1.0) bad("spatialDecay must lie in (0,1)");
  if (!unit(reconWeight)) bad("reconWeight must lie in (0,1]");
  if (!unit(odcFactor)) bad("odcFactor must lie in (0,1]");
  if (!unit(freqWeightDecay)) bad("freqWeightDecay must lie in (0,1]");
}

Frequency conjugate(Frequency f, int fftSize) {
  return {(fftSize - f.k) % fftSize, (fftSize - f.l) % fftSize};
}

double frequency_weight(Frequency f, int fftSize, double decay) {
  const int k = std::min(f.k, fftSize - f.k);
  const int l = std::min(f.l, fftSize - f.l);
  return std::pow(decay, std::sqrt(static_cast<double>(k * k + l * l)));
}

double support_weight(SampleClass cls, double distance, const FseParams& params, double warpedWeight) {
  switch (cls) {
    case SampleClass::Original: return std::pow(params.spatialDecay, distance);
    case SampleClass::Warped: return warpedWeight * std::pow(params.spatialDecay, distance);
    case SampleClass::Reconstructed: return params.reconWeight * std::pow(params.spatialDecay, distance);
    case SampleClass::Absent: return 0.0;
  }
  return 0.0;
}

namespace {

double area_center(const FseParams& p) {
  return (p.areaSize - p.blockSize) / 2 + (p.blockSize - 1) / 2.0;
}

// e^{sign * 2 pi i t / N} for t in [0, N).
std::vector<Complex> twiddles(int n, double sign) {
  std::vector<Complex> t(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<size_t>(i)] = std::polar(1.0, sign * 2.0 * std::numbers::pi * i / n);
  return t;
}

}  // namespace

RasterImage support_weights(const ClassRaster& areaClasses, const FseParams& params, double warpedWeight) {
  if (areaClasses.rows() != params.areaSize || areaClasses.cols() != params.areaSize)
    throw Error(ErrorCode::DimensionMismatch, "support_weights expects an areaSize x areaSize window");
  const double c = area_center(params);
  RasterImage w(params.areaSize, params.areaSize);
  for (int j = 0; j < params.areaSize; ++j)
    for (int i = 0; i < params.areaSize; ++i)
      w(j, i) = support_weight(areaClasses(j, i), std::hypot(i - c, j - c), params, warpedWeight);
  return w;
}

std::complex<double> BlockModel::evaluate_complex(double x, double y) const {
  Complex sum = 0.0;
  const double scale = 2.0 * std::numbers::pi / fftSize;
  for (int idx : active_) {
    const int l = idx / fftSize, k = idx % fftSize;
    sum += coefficients.data()[idx] * std::polar(1.0, scale * (k * x + l * y));
  }
  return sum;
}

/// Holds the per-size tables shared by all blocks of one reconstruction.
class BlockModeler {
 public:
  explicit BlockModeler(const FseParams& params)
      : params_(params), n_(params.fftSize), cos_(n_, n_), sin_(n_, n_), freqWeight_(n_ * n_),
        inverseTwiddle_(twiddles(n_, 1.0)) {
    const auto fwd = twiddles(n_, 1.0);
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < n_; ++b) {
        cos_(a, b) = fwd[static_cast<size_t>((a * b) % n_)].real();
        sin_(a, b) = fwd[static_cast<size_t>((a * b) % n_)].imag();
      }
    }
    for (int l = 0; l < n_; ++l)
      for (int k = 0; k < n_; ++k)
        freqWeight_[static_cast<size_t>(l * n_ + k)] = frequency_weight({k, l}, n_, params.freqWeightDecay);
  }

  std::optional<BlockModel> model(const RealMatrix& values, const RealMatrix& weights,
                                  const IterationObserver& observer) {
    const double totalWeight = weights.sum();
    if (!(totalWeight > 0.0)) return std::nullopt;

    // Spectrum of the weighted residual (the model starts empty) and of the
    // weight window; the latter shifts the residual update in frequency.
    // Kept as split real/imaginary planes so the update loop vectorizes.
    const ComplexMatrix r = real_dft(weights.cwiseProduct(values));
    const ComplexMatrix w = real_dft(weights);
    const int total = n_ * n_;
    resRe_.resize(static_cast<size_t>(total));
    resIm_.resize(static_cast<size_t>(total));
    // The weight spectrum is stored twice along each row so that a cyclic
    // shift reads one contiguous run.
    wRe_.resize(static_cast<size_t>(2 * total));
    wIm_.resize(static_cast<size_t>(2 * total));
    for (int l = 0; l < n_; ++l) {
      for (int k = 0; k < n_; ++k) {
        const size_t i = static_cast<size_t>(l * n_ + k);
        resRe_[i] = r(l, k).real();
        resIm_[i] = r(l, k).imag();
        for (int rep = 0; rep < 2; ++rep) {
          const size_t j = static_cast<size_t>(l * 2 * n_ + k + rep * n_);
          wRe_[j] = w(l, k).real();
          wIm_[j] = w(l, k).imag();
        }
      }
    }

    BlockModel m;
    m.fftSize = n_;
    m.coefficients = Raster<Complex>::Zero(n_, n_);
    std::vector<char> seen(static_cast<size_t>(total), 0);
    active_.assign(static_cast<size_t>(total), 0);

    int best = 0;
    double bestScore = argmax(best);
    for (int it = 0; it < params_.iterations; ++it) {
      if (!(bestScore > 0.0)) {
        // Residual vanished; further iterations cannot change the model.
        if (observer) observer(it, m);
        continue;
      }

      const Frequency u{best % n_, best / n_};
      const Frequency p = conjugate(u, n_);
      const int partner = p.l * n_ + p.k;
      Complex delta = params_.odcFactor * Complex(resRe_[static_cast<size_t>(best)],
                                                  resIm_[static_cast<size_t>(best)]) / totalWeight;
      if (partner == best) {
        delta.imag(0.0);  // self-conjugate bins of a real signal are real
        add(m, best, delta);
      } else {
        add(m, best, delta);
        add(m, partner, std::conj(delta));
      }
      if (!seen[static_cast<size_t>(best)]) {
        seen[static_cast<size_t>(best)] = seen[static_cast<size_t>(partner)] = 1;
        m.selected.push_back(u);
      }
      bestScore = update(u, delta, partner != best, best);
      if (observer) observer(it, m);
    }
    return m;
  }

  /// g at integer grid position (x, y), via the twiddle table.
  double evaluate(const BlockModel& m, int x, int y) const {
    double sum = 0.0;
    for (int idx : m.active_) {
      const int l = idx / n_, k = idx % n_;
      const int phase = ((k * x + l * y) % n_ + n_) % n_;
      sum += (m.coefficients.data()[idx] * inverseTwiddle_[static_cast<size_t>(phase)]).real();
    }
    return sum;
  }

 private:
  void add(BlockModel& m, int idx, Complex delta) {
    if (!active_[static_cast<size_t>(idx)]) {
      active_[static_cast<size_t>(idx)] = 1;
      m.active_.push_back(idx);
    }
    m.coefficients.data()[idx] += delta;
  }

  // 2-D DFT of a real N x N array: (C - iS) A (C - iS).
  ComplexMatrix real_dft(const RealMatrix& a) const {
    const RealMatrix ca = cos_ * a, sa = sin_ * a;
    ComplexMatrix out(n_, n_);
    out.real() = ca * cos_ - sa * sin_;
    out.imag() = -(ca * sin_ + sa * cos_);
    return out;
  }

  double argmax(int& best) const {
    double bestScore = -1.0;
    for (int i = 0; i < n_ * n_; ++i) {
      const size_t j = static_cast<size_t>(i);
      const double score = freqWeight_[j] * (resRe_[j] * resRe_[j] + resIm_[j] * resIm_[j]);
      if (score > bestScore) {
        bestScore = score;
        best = i;
      }
    }
    return bestScore;
  }

  // residual(l, k) -= delta * W(l - u.l, k - u.k) [+ conj(delta) * W(l + u.l, k + u.k)],
  // indices modulo N. Returns the next selection score and index.
  double update(Frequency u, Complex delta, bool withPartner, int& best) {
    const double dr = delta.real(), di = delta.imag();
    const int n = n_;
    double bestScore = -1.0;
    for (int l = 0; l < n; ++l) {
      double* re = resRe_.data() + static_cast<ptrdiff_t>(l) * n;
      double* im = resIm_.data() + static_cast<ptrdiff_t>(l) * n;
      // Row (l - u.l) of W, starting at column -u.k (mod N).
      const size_t a = static_cast<size_t>(((l - u.l + n) % n) * 2 * n + (n - u.k) % n);
      const double* ar = wRe_.data() + a;
      const double* ai = wIm_.data() + a;
      if (withPartner) {
        const size_t b = static_cast<size_t>(((l + u.l) % n) * 2 * n + u.k);
        const double* br = wRe_.data() + b;
        const double* bi = wIm_.data() + b;
        for (int k = 0; k < n; ++k) {
          re[k] -= dr * ar[k] - di * ai[k] + dr * br[k] + di * bi[k];
          im[k] -= dr * ai[k] + di * ar[k] + dr * bi[k] - di * br[k];
        }
      } else {
        for (int k = 0; k < n; ++k) {
          re[k] -= dr * ar[k] - di * ai[k];
          im[k] -= dr * ai[k] + di * ar[k];
        }
      }
      const double* fw = freqWeight_.data() + static_cast<ptrdiff_t>(l) * n;
      for (int k = 0; k < n; ++k) {
        const double score = fw[k] * (re[k] * re[k] + im[k] * im[k]);
        if (score > bestScore) {
          bestScore = score;
          best = l * n + k;
        }
      }
    }
    return bestScore;
  }

  FseParams params_;
  int n_;
  RealMatrix cos_, sin_;
  std::vector<double> freqWeight_;
  std::vector<Complex> inverseTwiddle_;
  std::vector<double> resRe_, resIm_;
  std::vector<double> wRe_, wIm_;
  std::vector<char> active_;
};

std::optional<BlockModel> model_block(const BlockArea& area, const FseParams& params,
                                      const IterationObserver& observer) {
  params.validate();
  const int n = params.fftSize;
  if (area.values.rows() != n || area.values.cols() != n || area.weights.rows() != n || area.weights.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "model_block expects fftSize x fftSize windows");
  if ((area.weights < 0.0).any()) throw Error(ErrorCode::InvalidArgument, "negative support weight");
  BlockModeler modeler(params);
  return modeler.model(area.values.matrix(), area.weights.matrix(), observer);
}

int support_count(const BoolRaster& mask, BlockIndex block, const FseParams& params) {
  const int off = (params.areaSize - params.blockSize) / 2;
  const int x0 = std::max(0, block.bx * params.blockSize - off);
  const int y0 = std::max(0, block.by * params.blockSize - off);
  const int x1 = std::min(static_cast<int>(mask.cols()), block.bx * params.blockSize - off + params.areaSize);
  const int y1 = std::min(static_cast<int>(mask.rows()), block.by * params.blockSize - off + params.areaSize);
  if (x1 <= x0 || y1 <= y0) return 0;
  return static_cast<int>(mask.block(y0, x0, y1 - y0, x1 - x0).count());
}

std::vector<BlockIndex> processing_order(const BoolRaster& mask, const FseParams& params) {
  params.validate();
  const int bw = static_cast<int>((mask.cols() + params.blockSize - 1) / params.blockSize);
  const int bh = static_cast<int>((mask.rows() + params.blockSize - 1) / params.blockSize);
  std::vector<std::pair<int, BlockIndex>> counted;
  counted.reserve(static_cast<size_t>(bw) * bh);
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) counted.push_back({support_count(mask, {bx, by}, params), {bx, by}});
  std::stable_sort(counted.begin(), counted.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<BlockIndex> order;
  order.reserve(counted.size());
  for (const auto& c : counted) order.push_back(c.second);
  return order;
}

RasterImage reconstruct(const SampledView& view, const FseParams& params, double warpedWeight) {
  params.validate();
  check_view(view);
  if (view.sample_count() == 0) throw Error(ErrorCode::EmptyMask, "reconstruct: view has no samples");
  if (view.width() % params.blockSize != 0 || view.height() % params.blockSize != 0)
    throw Error(ErrorCode::InvalidArgument, "reconstruct: dimensions must be multiples of blockSize");

  const int width = static_cast<int>(view.width()), height = static_cast<int>(view.height());
  const int b = params.blockSize, a = params.areaSize, n = params.fftSize;
  const int off = (a - b) / 2;

  RasterImage values = view.image;
  ClassRaster classes = view.classes;
  const double globalMean = view.mask.select(view.image, 0.0).sum() / static_cast<double>(view.sample_count());

  // rho^d for every support position, computed once.
  const double c = area_center(params);
  RealMatrix decay(a, a);
  for (int j = 0; j < a; ++j)
    for (int i = 0; i < a; ++i) decay(j, i) = std::pow(params.spatialDecay, std::hypot(i - c, j - c));

  BlockModeler modeler(params);
  RealMatrix areaValues = RealMatrix::Zero(n, n);
  RealMatrix areaWeights = RealMatrix::Zero(n, n);

  for (const BlockIndex blk : processing_order(view.mask, params)) {
    const int bx0 = blk.bx * b, by0 = blk.by * b;
    if (!(classes.block(by0, bx0, b, b) == SampleClass::Absent).any()) continue;

    const int ax0 = bx0 - off, ay0 = by0 - off;
    areaValues.setZero();
    areaWeights.setZero();
    double supportSum = 0.0;
    int supportCount = 0;
    for (int j = 0; j < a; ++j) {
      const int y = ay0 + j;
      if (y < 0 || y >= height) continue;
      for (int i = 0; i < a; ++i) {
        const int x = ax0 + i;
        if (x < 0 || x >= width) continue;
        double w = 0.0;
        switch (classes(y, x)) {
          case SampleClass::Original: w = decay(j, i); break;
          case SampleClass::Warped: w = warpedWeight * decay(j, i); break;
          case SampleClass::Reconstructed: w = params.reconWeight * decay(j, i); break;
          case SampleClass::Absent: continue;
        }
        areaValues(j, i) = values(y, x);
        areaWeights(j, i) = w;
        supportSum += values(y, x);
        ++supportCount;
      }
    }

    const auto model = modeler.model(areaValues, areaWeights, {});
    const double fallback = supportCount > 0 ? supportSum / supportCount : globalMean;
    for (int j = 0; j < b; ++j) {
      for (int i = 0; i < b; ++i) {
        const int y = by0 + j, x = bx0 + i;
        if (classes(y, x) != SampleClass::Absent) continue;
        values(y, x) = model ? modeler.evaluate(*model, off + i, off + j) : fallback;
        classes(y, x) = SampleClass::Reconstructed;
      }
    }
  }
  return values;
}

RasterImage reconstruct_padded(const SampledView& view, const FseParams& params, double warpedWeight) {
  params.validate();
  const Eigen::Index b = params.blockSize;
  const Eigen::Index w = view.width(), h = view.height();
  const Eigen::Index pw = (w + b - 1) / b * b, ph = (h + b - 1) / b * b;
  if (pw == w && ph == h) return reconstruct(view, params, warpedWeight);

  SampledView padded = SampledView::empty(pw, ph);
  padded.image.topLeftCorner(h, w) = view.image;
  padded.mask.topLeftCorner(h, w) = view.mask;
  padded.classes.topLeftCorner(h, w) = view.classes;
  for (Eigen::Index x = w; x < pw; ++x) padded.image.col(x).head(h) = view.image.col(w - 1);
  for (Eigen::Index y = h; y < ph; ++y) padded.image.row(y) = padded.image.row(h - 1);
  return reconstruct(padded, params, warpedWeight).topLeftCorner(h, w);
}

RasterImage linear_reconstruct(const SampledView& view) {
  check_view(view);
  if (view.sample_count() == 0) throw Error(ErrorCode::EmptyMask, "linear_reconstruct: view has no samples");
  const int width = static_cast<int>(view.width()), height = static_cast<int>(view.height());
  const int maxRing = std::max(width, height);
  constexpr size_t kNeighbours = 4;

  RasterImage out = view.image;
  struct Candidate {
    int d2;
    double value;
  };
  std::vector<Candidate> found;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (view.mask(y, x)) continue;
      found.clear();
      for (int r = 1; r <= maxRing; ++r) {
        // Square shell at Chebyshev distance r, visited row by row.
        for (int yy = y - r; yy <= y + r; ++yy) {
          if (yy < 0 || yy >= height) continue;
          const bool edgeRow = yy == y - r || yy == y + r;
          const int step = edgeRow ? 1 : 2 * r;
          for (int xx = x - r; xx <= x + r; xx += step) {
            if (xx < 0 || xx >= width || !view.mask(yy, xx)) continue;
            found.push_back({(xx - x) * (xx - x) + (yy - y) * (yy - y), view.image(yy, xx)});
          }
        }
        if (found.size() >= kNeighbours) {
          std::stable_sort(found.begin(), found.end(), [](const Candidate& p, const Candidate& q) { return p.d2 < q.d2; });
          // Anything on later shells is at least (r+1) away.
          if (found[kNeighbours - 1].d2 <= (r + 1) * (r + 1)) break;
        }
      }
      std::stable_sort(found.begin(), found.end(), [](const Candidate& p, const Candidate& q) { return p.d2 < q.d2; });
      const size_t count = std::min(found.size(), kNeighbours);
      double num = 0.0, den = 0.0;
      for (size_t i = 0; i < count; ++i) {
        const double w = 1.0 / found[i].d2;
        num += w * found[i].value;
        den += w;
      }
      out(y, x) = num / den;
    }
  }
  return out;
}

}  // namespace nrs
