#include "ratcov/compression.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "ratcov/error.hpp"
#include "ratcov/grid_transform.hpp"
#include "ratcov/joint_solver.hpp"

namespace ratcov {

namespace {

constexpr std::size_t kWindow = 8;

static_assert(std::endian::native == std::endian::little, "model codec assumes a little-endian host");

std::vector<MultiIndex> quadrant(const IndexSet& set) {
  std::vector<MultiIndex> out;
  for (const auto& k : set.indices()) {
    if (std::all_of(k.begin(), k.end(), [](int v) { return v >= 0; })) out.push_back(k);
  }
  return out;
}

std::vector<double> pack(const HermitianSeq& s, CoeffLayout layout) {
  if (layout == CoeffLayout::hermitian_half) {
    auto v = to_real_vector(s);
    v.insert(v.begin() + 1, 0.0);  // the zero value gets an (re, im) pair too
    return v;
  }
  std::vector<double> out;
  for (const auto& k : quadrant(s.index_set())) out.push_back(s[k].real());
  return out;
}

HermitianSeq unpack(const IndexSet& set, std::span<const double> v, CoeffLayout layout) {
  if (layout == CoeffLayout::hermitian_half) {
    if (v.size() != 2 + 2 * set.half().size()) throw FormatError("coefficient count does not match the degree");
    if (v[1] != 0.0) throw FormatError("zero coefficient must be real");
    std::vector<double> r(v.begin(), v.end());
    r.erase(r.begin() + 1);
    return from_real_vector(set, r);
  }
  const auto keys = quadrant(set);
  if (v.size() != keys.size()) throw FormatError("coefficient count does not match the degree");
  std::vector<Complex> half(set.half().size());
  double zero = 0.0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& k = keys[i];
    if (std::all_of(k.begin(), k.end(), [](int x) { return x == 0; })) {
      zero = v[i];
      continue;
    }
    // spread the value over every sign flip of k
    for (unsigned mask = 0; mask < (1u << k.size()); ++mask) {
      MultiIndex m = k;
      for (std::size_t j = 0; j < k.size(); ++j) {
        if (mask & (1u << j)) m[j] = -m[j];
      }
      if (auto pos = set.half_position(m)) half[*pos] = v[i];
    }
  }
  return HermitianSeq(set, zero, std::move(half));
}

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (is.gcount() != static_cast<std::streamsize>(sizeof v)) throw FormatError("truncated model file");
  return v;
}

}  // namespace

std::size_t CompressedModel::parameter_count() const {
  // the imaginary slot of the zero pair is always 0
  const std::size_t fixed = layout == CoeffLayout::hermitian_half ? 1 : 0;
  const std::size_t nq = q.size() - fixed;
  return mode == CodecMode::me ? nq : nq + p.size() - fixed - 1;
}

HermitianSeq CompressedModel::p_seq() const {
  const IndexSet set = make_box_index_set(n);
  if (mode == CodecMode::me) return HermitianSeq::delta(set);
  return unpack(set, p, layout);
}

HermitianSeq CompressedModel::q_seq() const { return unpack(make_box_index_set(n), q, layout); }

CompressedModel compress(const ImageGrid& img, std::span<const int> n, double lambda, CodecMode mode,
                         const SolverOptions& opts, IngestMode ingest_mode) {
  if (n.size() != 2) throw DomainError("image models need a two-component degree");
  if (mode == CodecMode::cepstral && !(lambda > 0.0)) throw DomainError("cepstral compression needs lambda > 0");
  const IndexSet set = make_box_index_set(n);
  const auto data = ingest(img, set, ingest_mode);
  CompressedModel m;
  m.mode = mode;
  m.layout = ingest_mode == IngestMode::mirror ? CoeffLayout::even_quadrant : CoeffLayout::hermitian_half;
  m.n.assign(n.begin(), n.end());
  m.grid_dims = data.grid.dims();
  m.height = static_cast<std::uint32_t>(img.height());
  m.width = static_cast<std::uint32_t>(img.width());
  m.norm_min = img.norm_min();
  m.norm_max = img.norm_max();
  try {
    if (mode == CodecMode::cepstral) {
      m.lambda = lambda;
      const auto r = solve_joint(data.c, data.gamma, lambda, data.grid, opts);
      m.p = pack(r.p_hat, m.layout);
      m.q = pack(r.q_hat, m.layout);
    } else {
      const auto r = me_solve(data.c, data.grid, opts);
      m.q = pack(r.q_hat, m.layout);
    }
  } catch (const Error& e) {
    throw ConvergenceError("compressing " + std::to_string(img.height()) + "x" + std::to_string(img.width()) +
                           " image failed: " + e.what());
  }
  return m;
}

ImageGrid decompress(const CompressedModel& model) {
  const Grid grid(model.grid_dims);
  const auto pv = eval_on_grid(TrigPoly(model.p_seq()), grid);
  const auto qv = eval_on_grid(TrigPoly(model.q_seq()), grid);
  for (std::size_t o = 0; o < grid.total(); ++o) {
    if (!(qv[o] > 0.0) || !(pv[o] > 0.0)) throw FormatError("corrupt model: P/Q not positive on the grid");
  }
  const auto cols = static_cast<std::size_t>(grid.dims()[1]);
  std::vector<double> px(static_cast<std::size_t>(model.height) * model.width);
  for (std::size_t r = 0; r < model.height; ++r) {
    for (std::size_t c = 0; c < model.width; ++c) {
      const std::size_t o = r * cols + c;
      px[r * model.width + c] = std::clamp(std::log(pv[o] / qv[o]), 0.0, 1.0);
    }
  }
  return ImageGrid(model.height, model.width, std::move(px), model.norm_min, model.norm_max);
}

void serialize(std::ostream& os, const CompressedModel& m) {
  os.write("RCXM", 4);
  put<std::uint16_t>(os, m.version);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(m.mode));
  put<std::uint8_t>(os, static_cast<std::uint8_t>(m.layout));
  put<std::uint16_t>(os, static_cast<std::uint16_t>(m.n.size()));
  for (int v : m.n) put<std::uint32_t>(os, static_cast<std::uint32_t>(v));
  for (int v : m.grid_dims) put<std::uint32_t>(os, static_cast<std::uint32_t>(v));
  put<std::uint32_t>(os, m.height);
  put<std::uint32_t>(os, m.width);
  put<double>(os, m.lambda);
  put<double>(os, m.norm_min);
  put<double>(os, m.norm_max);
  const std::size_t width = m.layout == CoeffLayout::hermitian_half ? 2 : 1;
  const std::size_t count = m.q.size() / width;
  put<std::uint32_t>(os, static_cast<std::uint32_t>(count));
  for (std::size_t i = 0; i < count; ++i) {
    if (m.mode == CodecMode::cepstral) {
      for (std::size_t w = 0; w < width; ++w) put<double>(os, m.p[i * width + w]);
    }
    for (std::size_t w = 0; w < width; ++w) put<double>(os, m.q[i * width + w]);
  }
  if (!os) throw FormatError("failed writing model");
}

CompressedModel deserialize(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::memcmp(magic, "RCXM", 4) != 0) throw FormatError("not an RCXM model");
  CompressedModel m;
  m.version = get<std::uint16_t>(is);
  if (m.version != CompressedModel::kVersion) throw FormatError("unsupported model version " + std::to_string(m.version));
  const auto mode = get<std::uint8_t>(is);
  const auto layout = get<std::uint8_t>(is);
  if (mode > 1 || layout > 1) throw FormatError("bad model mode or layout");
  m.mode = static_cast<CodecMode>(mode);
  m.layout = static_cast<CoeffLayout>(layout);
  const auto d = get<std::uint16_t>(is);
  if (d == 0 || d > 8) throw FormatError("bad model dimension");
  for (int i = 0; i < d; ++i) m.n.push_back(static_cast<int>(get<std::uint32_t>(is)));
  for (int i = 0; i < d; ++i) m.grid_dims.push_back(static_cast<int>(get<std::uint32_t>(is)));
  m.height = get<std::uint32_t>(is);
  m.width = get<std::uint32_t>(is);
  m.lambda = get<double>(is);
  m.norm_min = get<double>(is);
  m.norm_max = get<double>(is);
  const auto count = get<std::uint32_t>(is);
  const IndexSet set = make_box_index_set(m.n);
  const std::size_t expected = m.layout == CoeffLayout::hermitian_half ? 1 + set.half().size() : quadrant(set).size();
  if (count != expected) throw FormatError("coefficient count does not match the degree");
  const std::size_t width = m.layout == CoeffLayout::hermitian_half ? 2 : 1;
  for (std::size_t i = 0; i < count; ++i) {
    if (m.mode == CodecMode::cepstral) {
      for (std::size_t w = 0; w < width; ++w) m.p.push_back(get<double>(is));
    }
    for (std::size_t w = 0; w < width; ++w) m.q.push_back(get<double>(is));
  }
  return m;
}

double mssim(std::span<const double> a, std::span<const double> b, std::size_t height, std::size_t width,
             double range) {
  if (a.size() != height * width || b.size() != a.size()) throw DomainError("MSSIM needs images of equal size");
  if (!(range > 0.0)) range = 1.0;
  const double c1 = std::pow(0.01 * range, 2);
  const double c2 = std::pow(0.03 * range, 2);
  const std::size_t wh = std::min<std::size_t>(kWindow, height);
  const std::size_t ww = std::min<std::size_t>(kWindow, width);
  // separable Gaussian, normalized over the (possibly shrunk) window
  auto kernel = [](std::size_t n) {
    std::vector<double> k(n);
    const double mid = (static_cast<double>(n) - 1.0) / 2.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      k[i] = std::exp(-std::pow(static_cast<double>(i) - mid, 2) / (2.0 * 1.5 * 1.5));
      s += k[i];
    }
    for (double& v : k) v /= s;
    return k;
  };
  const auto kr = kernel(wh);
  const auto kc = kernel(ww);
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t r0 = 0; r0 + wh <= height; ++r0) {
    for (std::size_t c0 = 0; c0 + ww <= width; ++c0) {
      double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
      for (std::size_t i = 0; i < wh; ++i) {
        for (std::size_t j = 0; j < ww; ++j) {
          const double g = kr[i] * kc[j];
          const double x = a[(r0 + i) * width + c0 + j];
          const double y = b[(r0 + i) * width + c0 + j];
          ma += g * x;
          mb += g * y;
          saa += g * x * x;
          sbb += g * y * y;
          sab += g * x * y;
        }
      }
      const double va = saa - ma * ma;
      const double vb = sbb - mb * mb;
      const double cov = sab - ma * mb;
      total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  }
  return std::clamp(total / static_cast<double>(windows), 0.0, 1.0);
}

double mssim(const ImageGrid& a, const ImageGrid& b) {
  if (a.height() != b.height() || a.width() != b.width()) throw DomainError("MSSIM needs images of equal size");
  const auto da = a.denormalized();
  const auto db = b.denormalized();
  auto span_of = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  return mssim(da, db, a.height(), a.width(), std::max(span_of(da), span_of(db)));
}

ImageGrid shepp_logan(std::size_t size) {
  if (size < 2) throw DomainError("phantom size must be at least 2");
  // intensity, semi-axes a b, center x0 y0, rotation in degrees
  static constexpr std::array<std::array<double, 6>, 10> kEllipses{{
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
      {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
      {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
      {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  }};
  const double half = (static_cast<double>(size) - 1.0) / 2.0;
  std::vector<double> raw(size * size, 0.0);
  for (std::size_t r = 0; r < size; ++r) {
    const double y = (half - static_cast<double>(r)) / half;
    for (std::size_t c = 0; c < size; ++c) {
      const double x = (static_cast<double>(c) - half) / half;
      double v = 0.0;
      for (const auto& e : kEllipses) {
        const double phi = e[5] * M_PI / 180.0;
        const double dx = x - e[3];
        const double dy = y - e[4];
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double w = dy * std::cos(phi) - dx * std::sin(phi);
        if (u * u / (e[1] * e[1]) + w * w / (e[2] * e[2]) <= 1.0) v += e[0];
      }
      raw[r * size + c] = v;
    }
  }
  return ImageGrid::from_raw(size, size, std::move(raw));
}

ImageGrid checkerboard(std::size_t size, std::size_t block) {
  if (size == 0 || block == 0) throw DomainError("checkerboard needs positive size and block");
  std::vector<double> raw(size * size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) raw[r * size + c] = ((r / block + c / block) % 2 == 0) ? 0.0 : 1.0;
  }
  return ImageGrid::from_raw(size, size, std::move(raw));
}

}  // namespace ratcov
