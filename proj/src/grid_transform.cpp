#include "ratcov/grid_transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ratcov/error.hpp"

namespace ratcov {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int thread_cap() {
  if (const char* env = std::getenv("RATCOV_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

void ensure_fftw_threads() {
  static std::once_flag once;
  std::call_once(once, [] { fftw_init_threads(); });
}

std::string describe_point(const Grid& grid, std::size_t offset) {
  std::ostringstream os;
  const auto l = grid.point(offset);
  os << '(';
  for (std::size_t j = 0; j < l.size(); ++j) os << (j ? "," : "") << l[j];
  os << ')';
  return os.str();
}

}  // namespace

namespace detail {

void dft(std::vector<Complex>& data, const Grid& grid, int sign) {
  if (data.size() != grid.total()) throw DomainError("DFT buffer does not match grid");
  ensure_fftw_threads();
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    // the planner is not re-entrant; execution is
    std::lock_guard lock(planner_mutex());
    fftw_plan_with_nthreads(thread_cap());
    plan = fftw_plan_dft(static_cast<int>(grid.dim()), grid.dims().data(), buf, buf,
                         sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("FFTW failed to create a plan");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

std::vector<double> evaluate(const HermitianSeq& s, const Grid& grid) {
  const auto& set = s.index_set();
  if (set.dim() != grid.dim()) throw DomainError("polynomial and grid dimensions differ");
  std::vector<Complex> buf(grid.total(), Complex(0.0, 0.0));
  buf[0] += s.zero();
  for (std::size_t i = 0; i < set.half().size(); ++i) {
    const auto& k = set.half()[i];
    buf[grid.bin(k)] += s.half()[i];
    buf[grid.bin(negated(k))] += std::conj(s.half()[i]);
  }
  dft(buf, grid, -1);
  std::vector<double> out(grid.total());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real();
  return out;
}

HermitianSeq moments(std::span<const double> values, const Grid& grid, const IndexSet& lambda) {
  if (lambda.dim() != grid.dim()) throw DomainError("index set and grid dimensions differ");
  if (!grid.resolves(lambda.degree())) {
    throw AliasingError("grid does not resolve the index set (need 2 n_j < N_j)");
  }
  if (values.size() != grid.total()) throw DomainError("value count does not match grid");
  std::vector<Complex> buf(values.begin(), values.end());
  dft(buf, grid, +1);
  const double inv = 1.0 / static_cast<double>(grid.total());
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double tol = 1e-11 * std::max(scale, 1e-300);
  std::vector<Complex> half(lambda.half().size());
  for (std::size_t i = 0; i < half.size(); ++i) {
    const auto& k = lambda.half()[i];
    const Complex a = buf[grid.bin(k)] * inv;
    const Complex b = std::conj(buf[grid.bin(negated(k))] * inv);
    if (std::abs(a - b) > tol) throw DomainError("grid moments are not Hermitian");
    half[i] = 0.5 * (a + b);
  }
  return HermitianSeq(lambda, buf[0].real() * inv, std::move(half));
}

}  // namespace detail

DiscreteSpectrum::DiscreteSpectrum(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.total()) throw DomainError("value count does not match grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("discrete spectrum holds a non-finite value");
  }
}

double DiscreteSpectrum::min() const { return *std::min_element(values_.begin(), values_.end()); }
double DiscreteSpectrum::max() const { return *std::max_element(values_.begin(), values_.end()); }

DiscreteSpectrum eval_on_grid(const TrigPoly& p, const Grid& grid) {
  return DiscreteSpectrum(grid, detail::evaluate(p.coeffs(), grid));
}

HermitianSeq moments_on_grid(const DiscreteSpectrum& s, const IndexSet& lambda) {
  return detail::moments(s.values(), s.grid(), lambda);
}

HermitianSeq log_moments_on_grid(const DiscreteSpectrum& s, const IndexSet& lambda) {
  std::vector<double> logs(s.values().size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double v = s[i];
    if (!(v > 0.0)) {
      throw DomainError("log moments need a positive spectrum; value " + std::to_string(v) +
                        " at grid point " + describe_point(s.grid(), i));
    }
    logs[i] = std::log(v);
  }
  return detail::moments(logs, s.grid(), lambda);
}

GridMoments full_moments(std::span<const double> values, const Grid& grid) {
  if (values.size() != grid.total()) throw DomainError("value count does not match grid");
  std::vector<Complex> buf(values.begin(), values.end());
  detail::dft(buf, grid, +1);
  const double inv = 1.0 / static_cast<double>(grid.total());
  for (auto& v : buf) v *= inv;
  return GridMoments(grid, std::move(buf));
}

bool sampled_dual_cone_check(const HermitianSeq& c, const Grid& grid, int samples, std::uint64_t seed) {
  if (!(c.zero() > 0.0)) return false;
  const auto& set = c.index_set();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int s = 0; s < samples; ++s) {
    std::vector<Complex> half(set.half().size());
    for (auto& v : half) v = {normal(rng), normal(rng)};
    HermitianSeq q(set, normal(rng), std::move(half));
    const auto values = detail::evaluate(q, grid);
    const double lo = *std::min_element(values.begin(), values.end());
    q = q - HermitianSeq::delta(set, lo);
    if (!(inner_product(c, q) > 0.0)) return false;
  }
  return true;
}

void write_dspec(std::ostream& os, const DiscreteSpectrum& s) {
  nlohmann::json header;
  header["dims"] = s.grid().dims();
  os << header.dump() << '\n';
  static_assert(std::endian::native == std::endian::little, "dspec writer assumes little-endian host");
  os.write(reinterpret_cast<const char*>(s.values().data()),
           static_cast<std::streamsize>(s.values().size() * sizeof(double)));
  if (!os) throw FormatError("failed writing dspec payload");
}

DiscreteSpectrum read_dspec(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("missing dspec header");
  std::vector<int> dims;
  try {
    dims = nlohmann::json::parse(line).at("dims").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad dspec header: ") + e.what());
  }
  Grid grid(dims);
  std::vector<double> values(grid.total());
  is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (is.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double))) {
    throw FormatError("truncated dspec payload");
  }
  return DiscreteSpectrum(std::move(grid), std::move(values));
}

}  // namespace ratcov
