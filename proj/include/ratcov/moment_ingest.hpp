#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "ratcov/core_trig.hpp"
#include "ratcov/grid_transform.hpp"

namespace ratcov {

/// Grayscale image normalized to [0,1], row-major with `height` rows.
class ImageGrid {
 public:
  /// Normalizes raw values by their own min and max. A constant image maps
  /// to all zeros with norm_min = norm_max = the constant.
  static ImageGrid from_raw(std::size_t height, std::size_t width, std::vector<double> raw);
  /// Takes already normalized pixels and the range they came from.
  ImageGrid(std::size_t height, std::size_t width, std::vector<double> pixels, double norm_min, double norm_max);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  const std::vector<double>& pixels() const { return pixels_; }
  double pixel(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  double norm_min() const { return norm_min_; }
  double norm_max() const { return norm_max_; }
  bool constant() const { return norm_max_ == norm_min_; }
  /// Pixels mapped back to [norm_min, norm_max].
  std::vector<double> denormalized() const;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> pixels_;
  double norm_min_;
  double norm_max_;
};

/// Even extension onto a (2 height, 2 width) grid: x(2N - l) = x(l) for
/// 0 < l < N and x(N) = x(N - 1) in each dimension. The result satisfies
/// v(l) = v(-l mod 2N), so its moments are real.
DiscreteSpectrum mirror_extend(const ImageGrid& img);

/// exp of the mirror-extended normalized image.
DiscreteSpectrum exp_transform(const ImageGrid& img);

enum class IngestMode { mirror, fft };

struct IngestResult {
  HermitianSeq c;
  HermitianSeq gamma;  ///< gamma_0 replaced by 1
  Grid grid;           ///< grid the moments were computed on
};

/// Covariance and cepstral data of Phi = e^Psi. Mirror mode works on the
/// extended grid; fft mode uses the image grid directly.
IngestResult ingest(const ImageGrid& img, const IndexSet& lambda, IngestMode mode = IngestMode::mirror);

/// Binary PGM (P5), 8 or 16 bit. Reading normalizes by the data range.
ImageGrid read_pgm(std::istream& is);
/// Writes denormalized pixels rounded and clamped to [0, maxval].
void write_pgm(std::ostream& os, const ImageGrid& img, int maxval = 255);
/// Raw integer samples and maxval, without normalization.
std::pair<std::vector<double>, int> read_pgm_raw(std::istream& is, std::size_t& height, std::size_t& width);

}  // namespace ratcov
