#include "ratcov/grid.hpp"

#include <cmath>

#include "ratcov/error.hpp"

namespace ratcov {

Grid::Grid(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DomainError("grid needs at least one dimension");
  for (int n : dims_) {
    if (n < 1) throw DomainError("grid dimensions must be positive");
    total_ *= static_cast<std::size_t>(n);
  }
}

double Grid::theta(std::size_t j, int l) const {
  const int n = dims_[j];
  // (-pi, pi]: l <= n/2 stays, larger l wraps to l - n
  const int wrapped = (2 * l <= n) ? l : l - n;
  return 2.0 * M_PI * wrapped / n;
}

std::vector<int> Grid::point(std::size_t offset) const {
  std::vector<int> l(dims_.size());
  for (std::size_t j = dims_.size(); j-- > 0;) {
    l[j] = static_cast<int>(offset % static_cast<std::size_t>(dims_[j]));
    offset /= static_cast<std::size_t>(dims_[j]);
  }
  return l;
}

std::vector<double> Grid::angles(std::size_t offset) const {
  const auto l = point(offset);
  std::vector<double> t(l.size());
  for (std::size_t j = 0; j < l.size(); ++j) t[j] = theta(j, l[j]);
  return t;
}

std::size_t Grid::offset(std::span<const int> l) const {
  std::size_t off = 0;
  for (std::size_t j = 0; j < dims_.size(); ++j) off = off * dims_[j] + static_cast<std::size_t>(l[j]);
  return off;
}

std::size_t Grid::bin(std::span<const int> k) const {
  if (k.size() != dims_.size()) throw DomainError("index dimension does not match grid");
  std::size_t off = 0;
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    const int n = dims_[j];
    const int r = ((k[j] % n) + n) % n;
    off = off * n + static_cast<std::size_t>(r);
  }
  return off;
}

bool Grid::resolves(std::span<const int> degree) const {
  if (degree.size() != dims_.size()) return false;
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    if (2 * degree[j] >= dims_[j]) return false;
  }
  return true;
}

}  // namespace ratcov
