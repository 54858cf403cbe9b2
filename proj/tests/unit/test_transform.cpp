#include <cmath>
#include <vector>

#include "doctest.h"
#include "wavecast/errors.hpp"
#include "wavecast/rng.hpp"
#include "wavecast/transform.hpp"

using namespace wavecast;

namespace {

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(n);
  for (double& v : s) v = rng.uniform(-10.0, 10.0);
  return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_CASE("signal length validation") {
  CHECK(is_valid_signal_length(16));
  CHECK(is_valid_signal_length(64));
  CHECK(is_valid_signal_length(256));
  CHECK(is_valid_signal_length(1024));
  CHECK_FALSE(is_valid_signal_length(8));
  CHECK_FALSE(is_valid_signal_length(32));
  CHECK_FALSE(is_valid_signal_length(0));
  CHECK_FALSE(is_valid_signal_length(4));
}

TEST_CASE("transform matrix row layout follows the wrapped placements") {
  const FilterBank fb = default_filter_bank();
  const Matrix t = build_transform_matrix(fb, 16);

  // first row: alpha at columns 0..7
  for (std::size_t i = 0; i < 8; ++i) CHECK(t(0, i) == fb.alpha[i]);
  for (std::size_t i = 8; i < 16; ++i) CHECK(t(0, i) == 0.0);

  // fourth alpha row wraps: (a5..a8, 0 x8, a1..a4)
  for (std::size_t i = 0; i < 4; ++i) CHECK(t(3, i) == fb.alpha[i + 4]);
  for (std::size_t i = 4; i < 12; ++i) CHECK(t(3, i) == 0.0);
  for (std::size_t i = 12; i < 16; ++i) CHECK(t(3, i) == fb.alpha[i - 12]);

  // block order: beta rows start at n/4, gamma at n/2, delta at 3n/4
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(t(4, i) == fb.beta[i]);
    CHECK(t(8, i) == fb.gamma[i]);
    CHECK(t(12, i) == fb.delta[i]);
  }
}

TEST_CASE("transform matrix is orthonormal for k = 2, 3, 4") {
  const FilterBank fb = default_filter_bank();
  for (std::size_t n : {16u, 64u, 256u}) {
    const Matrix t = build_transform_matrix(fb, n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += t(i, k) * t(j, k);
        worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
      }
    CAPTURE(n);
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("invalid sizes are rejected") {
  const FilterBank fb = default_filter_bank();
  CHECK_THROWS_AS(build_transform_matrix(fb, 8), ShapeError);
  CHECK_THROWS_AS(forward_transform(fb, std::vector<double>(8, 1.0)), ShapeError);
  CHECK_THROWS_AS(forward_transform(fb, std::vector<double>(20, 1.0)), ShapeError);
}

TEST_CASE("constant signal concentrates in the approximation band") {
  const FilterBank fb = default_filter_bank();
  const std::vector<double> ones(16, 1.0);
  const WaveletCoefficients c = forward_transform(fb, ones);
  for (double a : c.approx) CHECK(a == doctest::Approx(2.0).epsilon(1e-12));
  for (const auto* band : {&c.d1, &c.d2, &c.d3})
    for (double d : *band) CHECK(std::abs(d) <= 1e-12);
}

TEST_CASE("streaming transform equals the explicit matrix product") {
  const FilterBank fb = default_filter_bank();
  const std::vector<double> s = random_signal(64, 7);
  const WaveletCoefficients c = forward_transform(fb, s);
  const std::vector<double> via_matrix = build_transform_matrix(fb, 64).multiply(s);

  std::vector<double> flat;
  flat.insert(flat.end(), c.approx.begin(), c.approx.end());
  flat.insert(flat.end(), c.d1.begin(), c.d1.end());
  flat.insert(flat.end(), c.d2.begin(), c.d2.end());
  flat.insert(flat.end(), c.d3.begin(), c.d3.end());
  CHECK(max_abs_diff(flat, via_matrix) <= 1e-10);
}

TEST_CASE("Parseval: coefficient energy equals signal energy") {
  const FilterBank fb = default_filter_bank();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::vector<double> s = random_signal(256, seed);
    const WaveletCoefficients c = forward_transform(fb, s);
    const double in = squared_norm(s);
    const double out = squared_norm(c.approx) + squared_norm(c.d1) +
                       squared_norm(c.d2) + squared_norm(c.d3);
    CHECK(std::abs(in - out) <= 1e-9 * in);
  }
}

TEST_CASE("round trip: inverse(forward(s)) = s") {
  const FilterBank fb = default_filter_bank();
  for (std::size_t n : {16u, 64u, 256u}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const std::vector<double> s = random_signal(n, seed * 1000 + n);
      const std::vector<double> back = inverse_transform(fb, forward_transform(fb, s));
      CAPTURE(n);
      CHECK(max_abs_diff(s, back) <= 1e-9);
    }
  }
}

TEST_CASE("inverse of zero coefficients is the zero signal") {
  WaveletCoefficients c;
  c.approx.assign(4, 0.0);
  c.d1.assign(4, 0.0);
  c.d2.assign(4, 0.0);
  c.d3.assign(4, 0.0);
  for (double v : inverse_transform(default_filter_bank(), c)) CHECK(v == 0.0);
}

TEST_CASE("inverse of (2,2,2,2 | 0 | 0 | 0) is the constant 1 signal") {
  WaveletCoefficients c;
  c.approx.assign(4, 2.0);
  c.d1.assign(4, 0.0);
  c.d2.assign(4, 0.0);
  c.d3.assign(4, 0.0);
  for (double v : inverse_transform(default_filter_bank(), c))
    CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inconsistent band lengths are a structural error") {
  WaveletCoefficients c;
  c.approx.assign(4, 1.0);
  c.d1.assign(4, 0.0);
  c.d2.assign(3, 0.0);
  c.d3.assign(4, 0.0);
  CHECK_THROWS_AS(inverse_transform(default_filter_bank(), c), ShapeError);
}

TEST_CASE("multilevel: depth 1 equals the single-level transform") {
  const FilterBank fb = default_filter_bank();
  const std::vector<double> s = random_signal(64, 11);
  const WaveletCoefficients single = forward_transform(fb, s);
  const MultilevelCoefficients multi = multilevel_transform(fb, s, 1);
  CHECK(multi.levels() == 1);
  CHECK(max_abs_diff(multi.approx, single.approx) == 0.0);
  CHECK(max_abs_diff(multi.details[0].d1, single.d1) == 0.0);
}

TEST_CASE("multilevel: band lengths and flattened order at depth 2") {
  const FilterBank fb = default_filter_bank();
  const std::vector<double> s = random_signal(256, 12);
  const MultilevelCoefficients multi = multilevel_transform(fb, s, 2);
  CHECK(multi.approx.size() == 16);
  CHECK(multi.details[1].d1.size() == 16);
  CHECK(multi.details[0].d1.size() == 64);

  // [a^2, d1^2, d2^2, d3^2, d1^1, d2^1, d3^1] = 16*4 + 64*3
  const std::vector<double> flat = multi.flatten();
  REQUIRE(flat.size() == 256);
  CHECK(flat[0] == multi.approx[0]);
  CHECK(flat[16] == multi.details[1].d1[0]);
  CHECK(flat[64] == multi.details[0].d1[0]);

  // level 2 equals transforming the level-1 approximation
  const WaveletCoefficients level1 = forward_transform(fb, s);
  const WaveletCoefficients level2 = forward_transform(fb, level1.approx);
  CHECK(max_abs_diff(multi.approx, level2.approx) == 0.0);
  CHECK(max_abs_diff(multi.details[1].d2, level2.d2) == 0.0);
  CHECK(max_abs_diff(multi.details[0].d3, level1.d3) == 0.0);
}

TEST_CASE("multilevel round trip and flatten/from_flat") {
  const FilterBank fb = default_filter_bank();
  const std::vector<double> s = random_signal(256, 13);
  const MultilevelCoefficients multi = multilevel_transform(fb, s, 3);
  CHECK(max_abs_diff(inverse_multilevel(fb, multi), s) <= 1e-9);

  const MultilevelCoefficients parsed =
      MultilevelCoefficients::from_flat(multi.flatten(), 3);
  CHECK(max_abs_diff(inverse_multilevel(fb, parsed), s) <= 1e-9);
}

TEST_CASE("too many levels is an invalid-depth error") {
  const FilterBank fb = default_filter_bank();
  const std::vector<double> s(16, 1.0);
  CHECK_THROWS_AS(multilevel_transform(fb, s, 2), ShapeError);
  CHECK(max_levels(16) == 1);
  CHECK(max_levels(256) == 3);
}

TEST_CASE("projections: constant signal is pure approximation") {
  const std::vector<double> s(16, 3.5);
  const SignalComponents c = project_components(default_filter_bank(), s);
  CHECK(max_abs_diff(c.approx, s) <= 1e-12);
  for (const auto* band : {&c.d1, &c.d2, &c.d3})
    for (double v : *band) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("projections sum to the signal and are mutually orthogonal") {
  const FilterBank fb = default_filter_bank();
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const std::vector<double> s = random_signal(64, seed);
    const SignalComponents c = project_components(fb, s);
    std::vector<double> sum(64, 0.0);
    for (std::size_t i = 0; i < 64; ++i)
      sum[i] = c.approx[i] + c.d1[i] + c.d2[i] + c.d3[i];
    CHECK(max_abs_diff(sum, s) <= 1e-9);

    const std::vector<double>* parts[4] = {&c.approx, &c.d1, &c.d2, &c.d3};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        CHECK(std::abs(dot(*parts[i], *parts[j])) <= 1e-8);
  }
}
