#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ratcov/grid.hpp"

namespace ratcov {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;

/// True when the first nonzero entry of k is positive.
bool lex_positive(const MultiIndex& k);
MultiIndex negated(const MultiIndex& k);

/// Finite symmetric lattice set: contains 0 and is closed under k -> -k.
///
/// Indices are kept in lexicographic order. The canonical half-set holds the
/// lexicographically positive indices; together with 0 it parameterizes every
/// Hermitian sequence on the set. Copies share the same immutable storage.
class IndexSet {
 public:
  /// Validates symmetry, presence of 0 and the absence of duplicates.
  IndexSet(std::size_t dim, std::vector<MultiIndex> indices);

  std::size_t dim() const { return impl_->dim; }
  std::size_t size() const { return impl_->all.size(); }
  const std::vector<MultiIndex>& indices() const { return impl_->all; }
  const std::vector<MultiIndex>& half() const { return impl_->half; }
  /// n_j = max{k_j : k in the set}.
  const std::vector<int>& degree() const { return impl_->degree; }

  bool contains(const MultiIndex& k) const;
  /// Position of k in half(); nullopt for 0, for non-members and for
  /// lexicographically negative k.
  std::optional<std::size_t> half_position(const MultiIndex& k) const;

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.impl_ == b.impl_ || (a.impl_->dim == b.impl_->dim && a.impl_->all == b.impl_->all);
  }

 private:
  struct Impl {
    std::size_t dim = 0;
    std::vector<MultiIndex> all;
    std::vector<MultiIndex> half;
    std::vector<int> degree;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Full box {k : |k_j| <= n_j}.
IndexSet make_box_index_set(std::span<const int> degree);
inline IndexSet make_box_index_set(std::initializer_list<int> degree) {
  return make_box_index_set(std::span<const int>(degree.begin(), degree.size()));
}

/// Complex sequence on an IndexSet with value(-k) = conj(value(k)).
///
/// Stored as the real value at 0 plus the values on the canonical half-set;
/// the mirrored half is synthesized on access.
class HermitianSeq {
 public:
  explicit HermitianSeq(IndexSet set);
  HermitianSeq(IndexSet set, double zero, std::vector<Complex> half);

  /// Builds from a full map k -> value. Rejects inputs whose asymmetry
  /// |f(-k) - conj f(k)| or |Im f(0)| exceeds tol * (1 + max|f|).
  static HermitianSeq from_function(IndexSet set, const std::function<Complex(const MultiIndex&)>& f,
                                    double tol = 1e-12);
  static HermitianSeq delta(IndexSet set, double value = 1.0);

  const IndexSet& index_set() const { return set_; }
  double zero() const { return zero_; }
  std::span<const Complex> half() const { return half_; }

  /// Value at any member k (either half). Throws DomainError for non-members.
  Complex operator[](const MultiIndex& k) const;

  double max_abs() const;
  double abs_sum() const;  ///< sum over the full set of |value(k)|

  HermitianSeq& operator+=(const HermitianSeq& o);
  HermitianSeq& operator-=(const HermitianSeq& o);
  HermitianSeq& operator*=(double s);
  friend HermitianSeq operator+(HermitianSeq a, const HermitianSeq& b) { return a += b; }
  friend HermitianSeq operator-(HermitianSeq a, const HermitianSeq& b) { return a -= b; }
  friend HermitianSeq operator*(HermitianSeq a, double s) { return a *= s; }
  friend HermitianSeq operator*(double s, HermitianSeq a) { return a *= s; }

  friend bool operator==(const HermitianSeq& a, const HermitianSeq& b) {
    return a.set_ == b.set_ && a.zero_ == b.zero_ && a.half_ == b.half_;
  }

 private:
  IndexSet set_;
  double zero_ = 0.0;
  std::vector<Complex> half_;
};

/// Real coordinates [value(0), Re h_0, Im h_0, Re h_1, Im h_1, ...] over the half-set.
std::vector<double> to_real_vector(const HermitianSeq& s);
HermitianSeq from_real_vector(const IndexSet& set, std::span<const double> x);

/// A Hermitian sequence read as P(e^{i theta}) = sum_k p_k e^{-i (k, theta)}.
class TrigPoly {
 public:
  explicit TrigPoly(HermitianSeq coeffs) : coeffs_(std::move(coeffs)) {}
  const HermitianSeq& coeffs() const { return coeffs_; }
  const IndexSet& index_set() const { return coeffs_.index_set(); }
  std::size_t dim() const { return coeffs_.index_set().dim(); }

 private:
  HermitianSeq coeffs_;
};

/// Direct O(|Lambda|) evaluation at theta in (-pi, pi]^d.
double eval_direct(const TrigPoly& p, std::span<const double> theta);

/// <c, p> = sum_k c_k conj(p_k); real by Hermitian symmetry.
double inner_product(const HermitianSeq& c, const HermitianSeq& p);

/// Checks |p_k| <= p_0 and max_grid |P| <= |Lambda| * max_k |p_k| for a P that
/// is nonnegative on the grid. Returns false if P is not nonnegative there.
bool coeff_bounds_check(const TrigPoly& p, const Grid& grid, double tol = 1e-9);

/// CSV with header k_1,...,k_d,re,im; rows are 0 then the canonical half-set.
void write_hermitian_csv(std::ostream& os, const HermitianSeq& s);
/// Reads the CSV above and rebuilds the mirrored half. The index set is the
/// symmetric closure of the rows.
HermitianSeq read_hermitian_csv(std::istream& is);

}  // namespace ratcov
