#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ratcov/core_trig.hpp"
#include "ratcov/grid.hpp"

namespace ratcov {

/// Real values over the grid points, row-major in l.
class DiscreteSpectrum {
 public:
  DiscreteSpectrum(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t offset) const { return values_[offset]; }
  double min() const;
  double max() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// P(zeta_l) at every grid point via a zero-padded multidimensional FFT.
/// Coefficient k lands in bin k mod N; no resolution condition is needed.
DiscreteSpectrum eval_on_grid(const TrigPoly& p, const Grid& grid);

/// c_k = (1/prod N) sum_l zeta_l^k S(zeta_l) for k in lambda.
/// Throws AliasingError unless 2 n_j < N_j.
HermitianSeq moments_on_grid(const DiscreteSpectrum& s, const IndexSet& lambda);

/// Same transform applied to log S. Throws DomainError naming the first
/// grid point where S <= 0. gamma_0 is returned as computed.
HermitianSeq log_moments_on_grid(const DiscreteSpectrum& s, const IndexSet& lambda);

/// All grid moments M_m = (1/prod N) sum_l zeta_l^m S(zeta_l), indexed by
/// frequency bin; used for Hessians, whose entries need indices up to 2n.
class GridMoments {
 public:
  GridMoments(Grid grid, std::vector<Complex> bins) : grid_(std::move(grid)), bins_(std::move(bins)) {}
  const Grid& grid() const { return grid_; }
  Complex at(std::span<const int> m) const { return bins_[grid_.bin(m)]; }
  Complex at_bin(std::size_t offset) const { return bins_[offset]; }

 private:
  Grid grid_;
  std::vector<Complex> bins_;
};

GridMoments full_moments(std::span<const double> values, const Grid& grid);

/// Sampled test of c in the interior of the grid dual cone: <c, q> > 0 for
/// the constant polynomial and for `samples` random q shifted so that
/// min_grid Q = 0. Returns false on the first failing sample.
bool sampled_dual_cone_check(const HermitianSeq& c, const Grid& grid, int samples = 32,
                             std::uint64_t seed = 0x5eedULL);

/// .dspec: JSON header {"dims": [...]} on line 1, then little-endian f64, row-major.
void write_dspec(std::ostream& os, const DiscreteSpectrum& s);
DiscreteSpectrum read_dspec(std::istream& is);

namespace detail {

/// Raw grid values of sum_k s_k zeta^{-k}.
std::vector<double> evaluate(const HermitianSeq& s, const Grid& grid);
/// Moments of raw grid values; checks resolution and symmetry.
HermitianSeq moments(std::span<const double> values, const Grid& grid, const IndexSet& lambda);
/// In-place unnormalized multidimensional DFT with exponent sign `sign`.
void dft(std::vector<Complex>& data, const Grid& grid, int sign);

}  // namespace detail

}  // namespace ratcov
