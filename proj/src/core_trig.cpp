#include "ratcov/core_trig.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "ratcov/error.hpp"
#include "ratcov/grid_transform.hpp"

namespace ratcov {

bool lex_positive(const MultiIndex& k) {
  for (int v : k) {
    if (v != 0) return v > 0;
  }
  return false;
}

MultiIndex negated(const MultiIndex& k) {
  MultiIndex out(k.size());
  std::transform(k.begin(), k.end(), out.begin(), [](int v) { return -v; });
  return out;
}

IndexSet::IndexSet(std::size_t dim, std::vector<MultiIndex> indices) {
  if (dim == 0) throw DomainError("index set dimension must be positive");
  for (const auto& k : indices) {
    if (k.size() != dim) throw DomainError("index of wrong dimension in index set");
  }
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw DomainError("duplicate index in index set");
  }
  const MultiIndex origin(dim, 0);
  if (!std::binary_search(indices.begin(), indices.end(), origin)) {
    throw DomainError("index set must contain the zero index");
  }
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->degree.assign(dim, 0);
  for (const auto& k : indices) {
    if (!std::binary_search(indices.begin(), indices.end(), negated(k))) {
      throw DomainError("index set is not symmetric under k -> -k");
    }
    if (lex_positive(k)) impl->half.push_back(k);
    for (std::size_t j = 0; j < dim; ++j) impl->degree[j] = std::max(impl->degree[j], k[j]);
  }
  impl->all = std::move(indices);
  impl_ = std::move(impl);
}

bool IndexSet::contains(const MultiIndex& k) const {
  return std::binary_search(impl_->all.begin(), impl_->all.end(), k);
}

std::optional<std::size_t> IndexSet::half_position(const MultiIndex& k) const {
  const auto& h = impl_->half;
  auto it = std::lower_bound(h.begin(), h.end(), k);
  if (it == h.end() || *it != k) return std::nullopt;
  return static_cast<std::size_t>(it - h.begin());
}

IndexSet make_box_index_set(std::span<const int> degree) {
  if (degree.empty()) throw DomainError("degree vector must be nonempty");
  for (int n : degree) {
    if (n < 0) throw DomainError("negative degree entry");
  }
  const std::size_t d = degree.size();
  std::vector<MultiIndex> all;
  MultiIndex k(d);
  for (std::size_t j = 0; j < d; ++j) k[j] = -degree[j];
  while (true) {
    all.push_back(k);
    std::size_t j = d;
    while (j > 0) {
      --j;
      if (k[j] < degree[j]) {
        ++k[j];
        break;
      }
      k[j] = -degree[j];
      if (j == 0) return IndexSet(d, std::move(all));
    }
  }
}

HermitianSeq::HermitianSeq(IndexSet set)
    : set_(std::move(set)), half_(set_.half().size(), Complex(0.0, 0.0)) {}

HermitianSeq::HermitianSeq(IndexSet set, double zero, std::vector<Complex> half)
    : set_(std::move(set)), zero_(zero), half_(std::move(half)) {
  if (half_.size() != set_.half().size()) {
    throw DomainError("half-set value count does not match the index set");
  }
}

HermitianSeq HermitianSeq::from_function(IndexSet set,
                                         const std::function<Complex(const MultiIndex&)>& f,
                                         double tol) {
  double scale = 0.0;
  for (const auto& k : set.indices()) scale = std::max(scale, std::abs(f(k)));
  const double bound = tol * (1.0 + scale);
  const Complex v0 = f(MultiIndex(set.dim(), 0));
  if (std::abs(v0.imag()) > bound) throw DomainError("value at 0 is not real");
  std::vector<Complex> half;
  half.reserve(set.half().size());
  for (const auto& k : set.half()) {
    const Complex v = f(k);
    if (std::abs(f(negated(k)) - std::conj(v)) > bound) {
      throw DomainError("sequence violates Hermitian symmetry");
    }
    half.push_back(v);
  }
  return HermitianSeq(std::move(set), v0.real(), std::move(half));
}

HermitianSeq HermitianSeq::delta(IndexSet set, double value) {
  HermitianSeq s(std::move(set));
  s.zero_ = value;
  return s;
}

Complex HermitianSeq::operator[](const MultiIndex& k) const {
  if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) return {zero_, 0.0};
  if (lex_positive(k)) {
    if (auto pos = set_.half_position(k)) return half_[*pos];
  } else if (auto pos = set_.half_position(negated(k))) {
    return std::conj(half_[*pos]);
  }
  throw DomainError("index not in index set");
}

double HermitianSeq::max_abs() const {
  double m = std::abs(zero_);
  for (const auto& v : half_) m = std::max(m, std::abs(v));
  return m;
}

double HermitianSeq::abs_sum() const {
  double s = std::abs(zero_);
  for (const auto& v : half_) s += 2.0 * std::abs(v);
  return s;
}

HermitianSeq& HermitianSeq::operator+=(const HermitianSeq& o) {
  if (!(set_ == o.set_)) throw DomainError("index-set mismatch");
  zero_ += o.zero_;
  for (std::size_t i = 0; i < half_.size(); ++i) half_[i] += o.half_[i];
  return *this;
}

HermitianSeq& HermitianSeq::operator-=(const HermitianSeq& o) {
  if (!(set_ == o.set_)) throw DomainError("index-set mismatch");
  zero_ -= o.zero_;
  for (std::size_t i = 0; i < half_.size(); ++i) half_[i] -= o.half_[i];
  return *this;
}

HermitianSeq& HermitianSeq::operator*=(double s) {
  zero_ *= s;
  for (auto& v : half_) v *= s;
  return *this;
}

std::vector<double> to_real_vector(const HermitianSeq& s) {
  std::vector<double> x;
  x.reserve(1 + 2 * s.half().size());
  x.push_back(s.zero());
  for (const auto& v : s.half()) {
    x.push_back(v.real());
    x.push_back(v.imag());
  }
  return x;
}

HermitianSeq from_real_vector(const IndexSet& set, std::span<const double> x) {
  if (x.size() != 1 + 2 * set.half().size()) throw DomainError("real vector has wrong length");
  std::vector<Complex> half(set.half().size());
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = {x[1 + 2 * i], x[2 + 2 * i]};
  return HermitianSeq(set, x[0], std::move(half));
}

double eval_direct(const TrigPoly& p, std::span<const double> theta) {
  const auto& set = p.index_set();
  if (theta.size() != set.dim()) throw DomainError("angle vector has wrong dimension");
  for (double t : theta) {
    if (!(t > -M_PI - 1e-12 && t <= M_PI + 1e-12)) throw DomainError("angle outside (-pi, pi]");
  }
  const auto& c = p.coeffs();
  Complex acc(c.zero(), 0.0);
  for (const auto& k : set.indices()) {
    if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) continue;
    double phase = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) phase += k[j] * theta[j];
    acc += c[k] * std::polar(1.0, -phase);
  }
  if (std::abs(acc.imag()) > 1e-12 * std::max(1.0, c.abs_sum())) {
    throw DomainError("trigonometric polynomial evaluated to a complex value");
  }
  return acc.real();
}

double inner_product(const HermitianSeq& c, const HermitianSeq& p) {
  if (!(c.index_set() == p.index_set())) throw DomainError("index-set mismatch in inner product");
  // c_0 p_0 + sum over both halves of c_k conj(p_k) = c_0 p_0 + 2 Re sum_half
  double acc = c.zero() * p.zero();
  const auto ch = c.half();
  const auto ph = p.half();
  for (std::size_t i = 0; i < ch.size(); ++i) acc += 2.0 * (ch[i] * std::conj(ph[i])).real();
  return acc;
}

bool coeff_bounds_check(const TrigPoly& p, const Grid& grid, double tol) {
  const auto spectrum = eval_on_grid(p, grid);
  const auto values = spectrum.values();
  double sup = 0.0;
  for (double v : values) {
    if (v < -tol) return false;
    sup = std::max(sup, std::abs(v));
  }
  const auto& c = p.coeffs();
  const double p0 = c.zero();
  for (const auto& v : c.half()) {
    if (std::abs(v) > p0 + tol) return false;
  }
  return sup <= static_cast<double>(c.index_set().size()) * c.max_abs() + tol;
}

void write_hermitian_csv(std::ostream& os, const HermitianSeq& s) {
  const auto& set = s.index_set();
  const std::size_t d = set.dim();
  for (std::size_t j = 0; j < d; ++j) os << "k_" << (j + 1) << ',';
  os << "re,im\n";
  os << std::setprecision(17);
  auto row = [&](const MultiIndex& k, Complex v) {
    for (int kj : k) os << kj << ',';
    os << v.real() << ',' << v.imag() << '\n';
  };
  row(MultiIndex(d, 0), {s.zero(), 0.0});
  for (std::size_t i = 0; i < set.half().size(); ++i) row(set.half()[i], s.half()[i]);
}

HermitianSeq read_hermitian_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty Hermitian CSV");
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 3 || line.rfind("k_1", 0) != 0) throw FormatError("bad Hermitian CSV header");
  const std::size_t d = columns - 2;
  std::vector<std::pair<MultiIndex, Complex>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    MultiIndex k(d);
    double re = 0.0;
    double im = 0.0;
    try {
      for (std::size_t j = 0; j < d; ++j) {
        if (!std::getline(ss, cell, ',')) throw FormatError("short CSV row");
        k[j] = std::stoi(cell);
      }
      if (!std::getline(ss, cell, ',')) throw FormatError("short CSV row");
      re = std::stod(cell);
      if (!std::getline(ss, cell, ',')) throw FormatError("short CSV row");
      im = std::stod(cell);
    } catch (const std::logic_error&) {
      throw FormatError("unparsable CSV row: " + line);
    }
    rows.emplace_back(std::move(k), Complex(re, im));
  }
  std::vector<MultiIndex> indices;
  bool has_zero = false;
  for (const auto& [k, v] : rows) {
    const bool is_zero = std::all_of(k.begin(), k.end(), [](int x) { return x == 0; });
    if (is_zero) {
      has_zero = true;
      indices.push_back(k);
    } else {
      if (!lex_positive(k)) throw FormatError("CSV row outside the canonical half-set");
      indices.push_back(k);
      indices.push_back(negated(k));
    }
  }
  if (!has_zero) throw FormatError("CSV lacks the zero index");
  IndexSet set(d, std::move(indices));
  double zero = 0.0;
  std::vector<Complex> half(set.half().size());
  for (const auto& [k, v] : rows) {
    if (auto pos = set.half_position(k)) {
      half[*pos] = v;
    } else {
      if (std::abs(v.imag()) > 0.0) throw FormatError("value at 0 must be real");
      zero = v.real();
    }
  }
  return HermitianSeq(std::move(set), zero, std::move(half));
}

}  // namespace ratcov
