#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ratcov/dual_solver.hpp"
#include "ratcov/moment_ingest.hpp"

namespace ratcov {

enum class CodecMode : std::uint8_t { cepstral = 0, me = 1 };

/// even_quadrant stores one value per k with all k_j >= 0 (mirror ingest);
/// hermitian_half stores the zero value and the canonical half-set.
enum class CoeffLayout : std::uint8_t { even_quadrant = 0, hermitian_half = 1 };

struct CompressedModel {
  static constexpr std::uint16_t kVersion = 1;

  std::uint16_t version = kVersion;
  CodecMode mode = CodecMode::cepstral;
  CoeffLayout layout = CoeffLayout::even_quadrant;
  std::vector<int> n;          ///< degree per dimension
  std::vector<int> grid_dims;  ///< grid the model was fitted on
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  double lambda = 0.0;
  double norm_min = 0.0;
  double norm_max = 0.0;
  /// Layout-ordered values; hermitian entries are (re, im) pairs with the
  /// zero value first. p is empty in me mode.
  std::vector<double> p;
  std::vector<double> q;

  /// Free real parameters (p_0 = 1 is not counted).
  std::size_t parameter_count() const;
  HermitianSeq p_seq() const;
  HermitianSeq q_seq() const;

  friend bool operator==(const CompressedModel&, const CompressedModel&) = default;
};

/// Fits a rational spectrum to e^Psi and keeps its coefficients.
/// `ingest_mode` picks mirrored (real) or plain FFT moments.
CompressedModel compress(const ImageGrid& img, std::span<const int> n, double lambda, CodecMode mode,
                         const SolverOptions& opts = {}, IngestMode ingest_mode = IngestMode::mirror);

/// log(P/Q) on the model grid, cropped to the image and denormalized.
/// Values are clamped to the normalized range [0,1] before denormalizing.
ImageGrid decompress(const CompressedModel& model);

/// "RCXM", u16 version, u8 mode, u8 layout, u16 d, u32 n[d], u32 N[d],
/// u32 height, u32 width, f64 lambda, f64 norm_min, f64 norm_max, u32 count,
/// then count coefficient records; everything little-endian.
void serialize(std::ostream& os, const CompressedModel& model);
CompressedModel deserialize(std::istream& is);

/// Mean SSIM over 8x8 Gaussian windows (sigma 1.5) fully inside the image,
/// K1 = 0.01, K2 = 0.03, with dynamic range `range`. Windows shrink for
/// images smaller than 8 pixels. Negative means are reported as 0.
double mssim(std::span<const double> a, std::span<const double> b, std::size_t height, std::size_t width,
             double range);
/// Compares denormalized pixels with range = max of the two data ranges.
double mssim(const ImageGrid& a, const ImageGrid& b);

/// Modified Shepp-Logan phantom (ten ellipses, high-contrast intensities).
ImageGrid shepp_logan(std::size_t size = 256);
/// Black and white squares of `block` pixels, top-left black.
ImageGrid checkerboard(std::size_t size = 256, std::size_t block = 128);

}  // namespace ratcov
