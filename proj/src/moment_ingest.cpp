#include "ratcov/moment_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "ratcov/error.hpp"

namespace ratcov {

ImageGrid ImageGrid::from_raw(std::size_t height, std::size_t width, std::vector<double> raw) {
  if (height == 0 || width == 0 || raw.size() != height * width) throw DomainError("image dimensions do not match data");
  for (double v : raw) {
    if (!std::isfinite(v)) throw DomainError("image holds a non-finite pixel");
  }
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double mn = *lo;
  const double mx = *hi;
  std::vector<double> px(raw.size(), 0.0);
  if (mx > mn) {
    for (std::size_t i = 0; i < raw.size(); ++i) px[i] = (raw[i] - mn) / (mx - mn);
  }
  return ImageGrid(height, width, std::move(px), mn, mx);
}

ImageGrid::ImageGrid(std::size_t height, std::size_t width, std::vector<double> pixels, double norm_min,
                     double norm_max)
    : height_(height), width_(width), pixels_(std::move(pixels)), norm_min_(norm_min), norm_max_(norm_max) {
  if (height_ == 0 || width_ == 0 || pixels_.size() != height_ * width_) {
    throw DomainError("image dimensions do not match data");
  }
  if (!(norm_max_ >= norm_min_)) throw DomainError("norm_max must not be below norm_min");
  for (double v : pixels_) {
    if (!std::isfinite(v)) throw DomainError("image holds a non-finite pixel");
  }
}

std::vector<double> ImageGrid::denormalized() const {
  std::vector<double> out(pixels_.size());
  const double span = norm_max_ - norm_min_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = norm_min_ + span * pixels_[i];
  return out;
}

namespace {

std::size_t fold(std::size_t l, std::size_t n) {
  if (l < n) return l;
  if (l == n) return n - 1;
  return 2 * n - l;
}

}  // namespace

DiscreteSpectrum mirror_extend(const ImageGrid& img) {
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  Grid grid({static_cast<int>(2 * h), static_cast<int>(2 * w)});
  std::vector<double> v(grid.total());
  for (std::size_t r = 0; r < 2 * h; ++r) {
    for (std::size_t c = 0; c < 2 * w; ++c) v[r * 2 * w + c] = img.pixel(fold(r, h), fold(c, w));
  }
  return DiscreteSpectrum(std::move(grid), std::move(v));
}

DiscreteSpectrum exp_transform(const ImageGrid& img) {
  const auto m = mirror_extend(img);
  std::vector<double> v(m.values().begin(), m.values().end());
  for (double& x : v) x = std::exp(x);
  return DiscreteSpectrum(m.grid(), std::move(v));
}

IngestResult ingest(const ImageGrid& img, const IndexSet& lambda, IngestMode mode) {
  if (lambda.dim() != 2) throw DomainError("images need a two-dimensional index set");
  DiscreteSpectrum phi = [&] {
    if (mode == IngestMode::mirror) return exp_transform(img);
    std::vector<double> v = img.pixels();
    for (double& x : v) x = std::exp(x);
    return DiscreteSpectrum(Grid({static_cast<int>(img.height()), static_cast<int>(img.width())}), std::move(v));
  }();
  HermitianSeq c = moments_on_grid(phi, lambda);
  HermitianSeq gamma = log_moments_on_grid(phi, lambda);
  gamma = gamma - HermitianSeq::delta(lambda, gamma.zero() - 1.0);
  if (mode == IngestMode::mirror) {
    const double tol = 1e-12 * std::max(1.0, c.max_abs());
    for (const auto& v : c.half()) {
      if (std::abs(v.imag()) > tol) throw DomainError("mirrored moments are not real");
    }
    for (const auto& v : gamma.half()) {
      if (std::abs(v.imag()) > tol) throw DomainError("mirrored cepstrum is not real");
    }
  }
  return {std::move(c), std::move(gamma), phi.grid()};
}

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& is) {
  std::string tok;
  int ch;
  while ((ch = is.get()) != EOF) {
    if (ch == '#') {
      while ((ch = is.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

std::size_t pgm_number(std::istream& is) {
  const std::string tok = pgm_token(is);
  try {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(tok, &pos);
    if (pos != tok.size()) throw FormatError("bad PGM header field: " + tok);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad PGM header field: " + tok);
  }
}

}  // namespace

std::pair<std::vector<double>, int> read_pgm_raw(std::istream& is, std::size_t& height, std::size_t& width) {
  if (pgm_token(is) != "P5") throw FormatError("not a binary PGM (P5) file");
  width = pgm_number(is);
  height = pgm_number(is);
  const std::size_t maxval = pgm_number(is);
  if (width == 0 || height == 0) throw FormatError("PGM has zero size");
  if (maxval == 0 || maxval > 65535) throw FormatError("PGM maxval out of range");
  const std::size_t bytes = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(width * height * bytes);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (is.gcount() != static_cast<std::streamsize>(raw.size())) throw FormatError("truncated PGM payload");
  std::vector<double> v(width * height);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = bytes == 1 ? raw[i] : static_cast<double>((raw[2 * i] << 8) | raw[2 * i + 1]);  // big-endian
  }
  return {std::move(v), static_cast<int>(maxval)};
}

ImageGrid read_pgm(std::istream& is) {
  std::size_t h = 0;
  std::size_t w = 0;
  auto [v, maxval] = read_pgm_raw(is, h, w);
  (void)maxval;
  return ImageGrid::from_raw(h, w, std::move(v));
}

void write_pgm(std::ostream& os, const ImageGrid& img, int maxval) {
  if (maxval < 1 || maxval > 65535) throw DomainError("PGM maxval out of range");
  os << "P5\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
  const auto v = img.denormalized();
  for (double x : v) {
    const auto q = static_cast<unsigned>(std::clamp(std::lround(x), 0L, static_cast<long>(maxval)));
    if (maxval < 256) {
      os.put(static_cast<char>(q));
    } else {
      os.put(static_cast<char>(q >> 8));
      os.put(static_cast<char>(q & 0xff));
    }
  }
  if (!os) throw FormatError("failed writing PGM");
}

}  // namespace ratcov
