#include <doctest.h>

#include <sstream>

#include "ratcov/compression.hpp"
#include "ratcov/error.hpp"
#include "ratcov/joint_solver.hpp"
#include "support.hpp"

using namespace ratcov;
using namespace testing;

namespace {

std::string bytes_of(const CompressedModel& m) {
  std::ostringstream os(std::ios::binary);
  serialize(os, m);
  return os.str();
}

ImageGrid smooth_image(std::size_t n) {
  std::vector<double> raw(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) raw[r * n + c] = std::sin(0.3 * r) + std::cos(0.2 * c) + 0.01 * r * c;
  }
  return ImageGrid::from_raw(n, n, std::move(raw));
}

}  // namespace

TEST_CASE("constant images survive compression") {
  const auto img = ImageGrid::from_raw(8, 8, std::vector<double>(64, 42.0));
  const int n[2] = {2, 2};
  for (auto mode : {CodecMode::cepstral, CodecMode::me}) {
    const auto back = decompress(compress(img, n, 1e-2, mode));
    for (double v : back.denormalized()) CHECK(v == doctest::Approx(42.0));
  }
}

TEST_CASE("equal P and Q decode to norm_min") {
  CompressedModel m;
  m.n = {1, 1};
  m.grid_dims = {4, 4};
  m.height = 2;
  m.width = 2;
  m.norm_min = 3.0;
  m.norm_max = 9.0;
  m.p = {1.0, 0.2, 0.1, 0.05};
  m.q = m.p;
  for (double v : decompress(m).denormalized()) CHECK(v == doctest::Approx(3.0));
  m.q = {1.0, 0.9, 0.9, 0.9};  // negative somewhere on the grid
  CHECK_THROWS_AS(decompress(m), FormatError);
}

TEST_CASE("model serialization") {
  const auto img = smooth_image(12);
  const int n[2] = {3, 3};
  for (auto ingest_mode : {IngestMode::mirror, IngestMode::fft}) {
    for (auto mode : {CodecMode::cepstral, CodecMode::me}) {
      const auto m = compress(img, n, 1e-2, mode, {}, ingest_mode);
      const auto bytes = bytes_of(m);
      CHECK(bytes.substr(0, 4) == "RCXM");
      std::istringstream is(bytes, std::ios::binary);
      const auto back = deserialize(is);
      CHECK(back == m);
      CHECK(bytes_of(back) == bytes);
      // determinism
      CHECK(bytes_of(compress(img, n, 1e-2, mode, {}, ingest_mode)) == bytes);
      CHECK(decompress(back).height() == 12);
      CHECK(decompress(back).width() == 12);
      if (mode == CodecMode::me) CHECK(m.p.empty());
    }
  }

  auto bytes = bytes_of(compress(img, n, 1e-2, CodecMode::cepstral));
  bytes[4] = 7;
  std::istringstream wrong_version(bytes, std::ios::binary);
  CHECK_THROWS_AS(deserialize(wrong_version), FormatError);
  std::istringstream truncated(bytes_of(compress(img, n, 1e-2, CodecMode::cepstral)).substr(0, 60), std::ios::binary);
  CHECK_THROWS_AS(deserialize(truncated), FormatError);
  std::istringstream junk("JUNKJUNK", std::ios::binary);
  CHECK_THROWS_AS(deserialize(junk), FormatError);
}

TEST_CASE("compression preconditions") {
  const auto img = smooth_image(6);
  const int n[2] = {2, 2};
  CHECK_THROWS_AS(compress(img, n, 0.0, CodecMode::cepstral), DomainError);
  const int big[2] = {6, 6};
  CHECK_THROWS_AS(compress(img, big, 1e-2, CodecMode::cepstral), AliasingError);
  const int one[1] = {2};
  CHECK_THROWS_AS(compress(img, one, 1e-2, CodecMode::me), DomainError);
}

TEST_CASE("reconstruction improves with degree") {
  const auto img = smooth_image(32);
  double prev = -1.0;
  for (int deg : {2, 6, 12}) {
    const int n[2] = {deg, deg};
    const double s = mssim(img, decompress(compress(img, n, 1e-2, CodecMode::cepstral)));
    CHECK(s > prev);
    prev = s;
  }
  CHECK(prev > 0.9);
}

TEST_CASE("parameter accounting") {
  for (int n : {4, 10, 30}) {
    CompressedModel ceps;
    ceps.n = {n, n};
    ceps.p.assign(static_cast<std::size_t>((n + 1) * (n + 1)), 0.0);
    ceps.q = ceps.p;
    CHECK(ceps.parameter_count() == static_cast<std::size_t>(2 * (n + 1) * (n + 1) - 1));
    const int nm = me_degree(std::vector<int>{n})[0];
    CompressedModel me;
    me.mode = CodecMode::me;
    me.n = {nm, nm};
    me.q.assign(static_cast<std::size_t>((nm + 1) * (nm + 1)), 0.0);
    const double diff = std::abs(static_cast<double>(me.parameter_count()) - static_cast<double>(ceps.parameter_count()));
    CHECK(diff <= nm + 1);
  }
}

TEST_CASE("mssim") {
  const auto board = checkerboard(64, 16);
  CHECK(mssim(board, board) == 1.0);
  std::vector<double> inv(board.pixels());
  for (double& v : inv) v = 1.0 - v;
  const ImageGrid flipped(64, 64, inv, 0.0, 1.0);
  CHECK(mssim(board, flipped) < 0.2);

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = 8 + static_cast<std::size_t>(uniform(0, 10));
    const std::size_t w = 8 + static_cast<std::size_t>(uniform(0, 10));
    std::vector<double> a(h * w), b(h * w);
    for (auto& v : a) v = uniform(0, 1);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 0.5 * a[i] + 0.5 * uniform(0, 1);
    const double ab = mssim(a, b, h, w, 1.0);
    CHECK(std::abs(ab - mssim(b, a, h, w, 1.0)) <= 1e-12);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
  // tiny images shrink the window instead of failing
  CHECK(mssim(std::vector<double>{0.1, 0.2, 0.3, 0.4}, std::vector<double>{0.1, 0.2, 0.3, 0.4}, 2, 2, 1.0) == 1.0);
  CHECK_THROWS_AS(mssim(board, checkerboard(32, 16)), DomainError);
}

TEST_CASE("test images") {
  const auto board = checkerboard(256, 128);
  CHECK(board.pixel(0, 0) == 0.0);
  CHECK(board.pixel(0, 128) == 1.0);
  CHECK(board.pixel(128, 128) == 0.0);
  const auto phantom = shepp_logan(128);
  CHECK(phantom.height() == 128);
  CHECK(phantom.pixel(0, 0) < 1e-12);  // outside the head
  CHECK(phantom.pixel(64, 64) > 0.0);
  CHECK(*std::max_element(phantom.pixels().begin(), phantom.pixels().end()) == 1.0);
}

TEST_CASE("low degree cannot represent a coarse checkerboard") {
  const auto board = checkerboard(32, 16);
  const int n[2] = {4, 4};
  const auto back = decompress(compress(board, n, 1e-2, CodecMode::cepstral));
  // the edges get blurred
  double worst = 0.0;
  for (std::size_t i = 0; i < board.pixels().size(); ++i) worst = std::max(worst, std::abs(back.pixels()[i] - board.pixels()[i]));
  CHECK(worst > 0.3);
  CHECK(mssim(board, back) < 0.9);
}
