#include "coords.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ratcov/error.hpp"

namespace ratcov::detail {

namespace {

bool is_zero(const MultiIndex& k) {
  return std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
}

// All distinct sign-flip images of k.
std::vector<MultiIndex> flips(const MultiIndex& k) {
  std::set<MultiIndex> out{k};
  for (std::size_t j = 0; j < k.size(); ++j) {
    std::set<MultiIndex> next;
    for (auto m : out) {
      next.insert(m);
      m[j] = -m[j];
      next.insert(m);
    }
    out = std::move(next);
  }
  return {out.begin(), out.end()};
}

}  // namespace

bool flip_closed(const IndexSet& set) {
  for (const auto& k : set.indices()) {
    for (std::size_t j = 0; j < k.size(); ++j) {
      MultiIndex m = k;
      m[j] = -m[j];
      if (!set.contains(m)) return false;
    }
  }
  return true;
}

bool even_symmetric(const HermitianSeq& s, double tol) {
  if (!flip_closed(s.index_set())) return false;
  const double bound = tol * std::max(1.0, s.max_abs());
  for (const auto& k : s.index_set().half()) {
    const Complex v = s[k];
    if (std::abs(v.imag()) > bound) return false;
    for (const auto& m : flips(k)) {
      if (std::abs(s[m] - v) > bound) return false;
    }
  }
  return true;
}

Coords::Coords(IndexSet set, Grid grid, bool even, bool with_zero)
    : set_(std::move(set)), grid_(std::move(grid)), even_(even), with_zero_(with_zero) {
  if (set_.dim() != grid_.dim()) throw DomainError("index set and grid dimensions differ");
  if (even_ && !flip_closed(set_)) throw DomainError("even layout needs a flip-closed index set");
  strides_.assign(grid_.dim(), 1);
  for (std::size_t j = grid_.dim() - 1; j-- > 0;) strides_[j] = strides_[j + 1] * grid_.dims()[j + 1];

  const MultiIndex origin(set_.dim(), 0);
  if (with_zero_) {
    elems_.emplace_back();
    keys_.push_back(origin);
    part_.push_back(0);
    add_term(0, origin, 1.0);
  }
  if (even_) {
    for (const auto& k : set_.indices()) {
      if (is_zero(k) || std::any_of(k.begin(), k.end(), [](int v) { return v < 0; })) continue;
      const std::size_t e = elems_.size();
      elems_.emplace_back();
      keys_.push_back(k);
      part_.push_back(0);
      for (const auto& m : flips(k)) add_term(e, m, 1.0);
    }
  } else {
    for (const auto& k : set_.half()) {
      const MultiIndex nk = negated(k);
      std::size_t e = elems_.size();
      elems_.emplace_back();
      keys_.push_back(k);
      part_.push_back(1);
      add_term(e, k, 1.0);
      add_term(e, nk, 1.0);
      e = elems_.size();
      elems_.emplace_back();
      keys_.push_back(k);
      part_.push_back(2);
      add_term(e, k, Complex(0.0, 1.0));
      add_term(e, nk, Complex(0.0, -1.0));
    }
  }
}

void Coords::add_term(std::size_t elem, const MultiIndex& k, Complex coeff) {
  Term t;
  t.bin = grid_.bin(k);
  t.elem = elem;
  t.coeff = coeff;
  t.residue.resize(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    const int n = grid_.dims()[j];
    t.residue[j] = ((k[j] % n) + n) % n;
  }
  elems_[elem].terms.push_back(terms_.size());
  terms_.push_back(std::move(t));
}

std::size_t Coords::neg_sum_bin(const Term& a, const Term& b) const {
  std::size_t off = 0;
  for (std::size_t j = 0; j < strides_.size(); ++j) {
    const int n = grid_.dims()[j];
    int r = a.residue[j] + b.residue[j];
    if (r >= n) r -= n;
    r = r == 0 ? 0 : n - r;
    off += static_cast<std::size_t>(r) * strides_[j];
  }
  return off;
}

HermitianSeq Coords::expand(const Eigen::VectorXd& x, double offset) const {
  if (static_cast<std::size_t>(x.size()) != size()) throw DomainError("coordinate vector has wrong length");
  double zero = offset;
  std::vector<Complex> half(set_.half().size(), Complex(0.0, 0.0));
  for (std::size_t e = 0; e < size(); ++e) {
    const auto& k = keys_[e];
    if (is_zero(k)) {
      zero += x[e];
      continue;
    }
    if (even_) {
      for (const auto& m : flips(k)) {
        if (auto pos = set_.half_position(m)) half[*pos] += x[e];
      }
    } else {
      const auto pos = *set_.half_position(k);
      half[pos] += part_[e] == 1 ? Complex(x[e], 0.0) : Complex(0.0, x[e]);
    }
  }
  return HermitianSeq(set_, zero, std::move(half));
}

Eigen::VectorXd Coords::coordinates(const HermitianSeq& s) const {
  Eigen::VectorXd x(size());
  for (std::size_t e = 0; e < size(); ++e) {
    const Complex v = s[keys_[e]];
    x[e] = part_[e] == 2 ? v.imag() : v.real();
  }
  return x;
}

Eigen::VectorXd Coords::project(const HermitianSeq& s) const {
  Eigen::VectorXd out(size());
  for (std::size_t e = 0; e < size(); ++e) {
    double acc = 0.0;
    const auto& k = keys_[e];
    if (is_zero(k)) {
      acc = s.zero();
    } else if (even_) {
      for (const auto& m : flips(k)) acc += s[m].real();
    } else {
      const Complex v = s[k];
      acc = part_[e] == 1 ? 2.0 * v.real() : 2.0 * v.imag();
    }
    out[e] = acc;
  }
  return out;
}

std::vector<double> Coords::evaluate(const Eigen::VectorXd& x, double offset) const {
  if (static_cast<std::size_t>(x.size()) != size()) throw DomainError("coordinate vector has wrong length");
  std::vector<Complex> buf(grid_.total(), Complex(0.0, 0.0));
  buf[0] += offset;
  for (const auto& t : terms_) buf[t.bin] += t.coeff * x[t.elem];
  dft(buf, grid_, -1);
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real();
  return out;
}

Eigen::VectorXd Coords::project_values(std::span<const double> values) const {
  std::vector<Complex> buf(values.begin(), values.end());
  dft(buf, grid_, +1);
  const double inv = 1.0 / static_cast<double>(grid_.total());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  // <m, b_i> = Re sum_k m_k conj(b_i(k))
  for (const auto& t : terms_) out[t.elem] += (buf[t.bin] * std::conj(t.coeff)).real() * inv;
  return out;
}

Eigen::VectorXd Coords::apply(std::span<const double> s, const Eigen::VectorXd& v) const {
  auto values = evaluate(v);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= s[i];
  return project_values(values);
}

Eigen::MatrixXd Coords::gram(const GridMoments& m, const Coords& cols) const {
  if (!(m.grid() == grid_) || !(cols.grid_ == grid_)) throw DomainError("grid mismatch in Hessian assembly");
  const bool same = &cols == this;
  Eigen::MatrixXd h(size(), cols.size());
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = same ? i : 0; j < cols.size(); ++j) {
      double acc = 0.0;
      for (std::size_t a : elems_[i].terms) {
        const auto& ta = terms_[a];
        for (std::size_t b : cols.elems_[j].terms) {
          const auto& tb = cols.terms_[b];
          acc += (ta.coeff * tb.coeff * m.at_bin(neg_sum_bin(ta, tb))).real();
        }
      }
      h(i, j) = acc;
      if (same) h(j, i) = acc;
    }
  }
  return h;
}

Eigen::VectorXd Coords::gram_diagonal(const GridMoments& m) const {
  Eigen::VectorXd d(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double acc = 0.0;
    for (std::size_t a : elems_[i].terms) {
      for (std::size_t b : elems_[i].terms) {
        acc += (terms_[a].coeff * terms_[b].coeff * m.at_bin(neg_sum_bin(terms_[a], terms_[b]))).real();
      }
    }
    d[i] = acc;
  }
  return d;
}

Eigen::RowVectorXd Coords::point_row(std::size_t offset) const {
  const auto l = grid_.point(offset);
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(size());
  for (const auto& t : terms_) {
    double phase = 0.0;
    for (std::size_t j = 0; j < l.size(); ++j) {
      const int n = grid_.dims()[j];
      // reduce r*l mod n first so large grids keep full phase accuracy
      const long long rl = (static_cast<long long>(t.residue[j]) * l[j]) % n;
      phase += 2.0 * M_PI * static_cast<double>(rl) / n;
    }
    row[t.elem] += (t.coeff * std::polar(1.0, -phase)).real();
  }
  return row;
}

}  // namespace ratcov::detail
