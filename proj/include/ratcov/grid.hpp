#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ratcov {

/// Circulant discretization of the d-torus with N_j points per dimension.
///
/// Grid point l has angles theta_j = 2 pi l_j / N_j reduced into (-pi, pi];
/// for even N_j the point l_j = N_j / 2 sits exactly at pi. Flat offsets are
/// row-major with the last dimension fastest.
class Grid {
 public:
  explicit Grid(std::vector<int> dims);

  std::size_t dim() const { return dims_.size(); }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t total() const { return total_; }

  double theta(std::size_t j, int l) const;
  std::vector<int> point(std::size_t offset) const;
  std::vector<double> angles(std::size_t offset) const;
  std::size_t offset(std::span<const int> l) const;
  /// Offset of the frequency bin holding multi-index k (k_j mod N_j).
  std::size_t bin(std::span<const int> k) const;

  /// True when 2 n_j < N_j for every j.
  bool resolves(std::span<const int> degree) const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<int> dims_;
  std::size_t total_ = 1;
};

}  // namespace ratcov
