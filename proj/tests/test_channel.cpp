// Array-response, subcarrier-grid, and link-budget math checked against
// hand-worked values and structural properties (unit norm, Kronecker
// factorization, frequency drift of the response).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "isac/channel.hpp"
#include "isac/rng.hpp"

using namespace isac;

TEST_CASE("subcarrier grid: 40 carriers over 800 MHz") {
  SubcarrierPlan plan{800.0e6, 40};
  const auto f = subcarrier_frequencies(plan);
  REQUIRE(f.size() == 40);
  CHECK(f.front() == doctest::Approx(-390.0e6).epsilon(1e-12));
  CHECK(f.back() == doctest::Approx(390.0e6).epsilon(1e-12));
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    CHECK(f[i + 1] - f[i] == doctest::Approx(20.0e6).epsilon(1e-12));
    sum += f[i];
  }
  CHECK(std::abs(sum + f.back()) < 1.0);  // symmetric around DC
}

TEST_CASE("subcarrier grid: odd count has an exact DC carrier") {
  SubcarrierPlan plan{100.0e6, 5};
  const auto f = subcarrier_frequencies(plan);
  CHECK(f[2] == 0.0);
  CHECK(f[0] == doctest::Approx(-40.0e6));
  CHECK(f[4] == doctest::Approx(40.0e6));
}

TEST_CASE("element delay: hand-computed endfire value") {
  ArrayGeometry geom{4, 4, 0.0075, 20.0e9};
  // One element step along x toward a direction with cosine 1:
  // 7.5 mm / c = 25 ps.
  CHECK(element_delay(2, 1, {1.0, 0.0}, geom) ==
        doctest::Approx(25.0e-12).epsilon(1e-12));
  CHECK(element_delay(1, 1, {0.3, -0.4}, geom) == 0.0);
  CHECK(element_delay(1, 3, {0.0, 0.5}, geom) ==
        doctest::Approx(25.0e-12).epsilon(1e-12));
  CHECK(element_delay(4, 1, {-1.0, 0.0}, geom) ==
        doctest::Approx(-75.0e-12).epsilon(1e-12));
  CHECK_THROWS_AS(element_delay(0, 1, {0.0, 0.0}, geom), std::out_of_range);
  CHECK_THROWS_AS(element_delay(1, 5, {0.0, 0.0}, geom), std::out_of_range);
}

TEST_CASE("2x2 response at a half-wavelength-resonant direction") {
  // f_c * spacing / c = 0.5, so each x step contributes a phase of -pi:
  // response = (1/2) * [1, 1, -1, -1] for direction (1, 0).
  ArrayGeometry geom{2, 2, 0.0075, 20.0e9};
  const CVec v = array_response(0.0, {1.0, 0.0}, geom);
  REQUIRE(v.size() == 4);
  CHECK(std::abs(v[0] - cplx{0.5, 0.0}) < 1e-12);
  CHECK(std::abs(v[1] - cplx{0.5, 0.0}) < 1e-12);
  CHECK(std::abs(v[2] + cplx{0.5, 0.0}) < 1e-12);
  CHECK(std::abs(v[3] + cplx{0.5, 0.0}) < 1e-12);
}

TEST_CASE("response is unit norm and Kronecker-factored") {
  ArrayGeometry geom{5, 3, 0.0075, 20.0e9};
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const SpaceAngle ang{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double freq = rng.uniform(-400.0e6, 400.0e6);
    const CVec v = array_response(freq, ang, geom);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));

    // Kronecker structure: v[(i,j)] * v[(0,0)] == v[(i,0)] * v[(0,j)].
    for (int i = 0; i < geom.n_x; ++i) {
      for (int j = 0; j < geom.n_y; ++j) {
        const cplx lhs = v[i * geom.n_y + j] * v[0];
        const cplx rhs = v[i * geom.n_y] * v[j];
        CHECK(std::abs(lhs - rhs) < 1e-12);
      }
    }

    // Constant phase step along each axis.
    const double freq_total = geom.carrier_hz + freq;
    const double step_x = -2.0 * M_PI * freq_total * geom.spacing_m * ang.x /
                          speed_of_light;
    const cplx expected_ratio = std::polar(1.0, step_x);
    for (int i = 0; i + 1 < geom.n_x; ++i) {
      const cplx ratio = v[(i + 1) * geom.n_y] / v[i * geom.n_y];
      CHECK(std::abs(ratio - expected_ratio) < 1e-10);
    }
  }
}

TEST_CASE("response drifts with frequency offset (squint)") {
  ArrayGeometry geom{16, 16, 0.0075, 20.0e9};
  const SpaceAngle ang{0.5, -0.3};
  const CVec v0 = array_response(0.0, ang, geom);
  const CVec v1 = array_response(390.0e6, ang, geom);
  const double align = std::abs(v0.dot(v1));
  CHECK(align < 0.999);  // a 256-element array decorrelates measurably
  CHECK(align > 0.1);    // but not to noise level at 390 MHz offset
  // Boresight never squints: the response is frequency independent at 0.
  const CVec b0 = array_response(0.0, {0.0, 0.0}, geom);
  const CVec b1 = array_response(390.0e6, {0.0, 0.0}, geom);
  CHECK((b0 - b1).norm() < 1e-12);
}

TEST_CASE("response_set honors the squint flag") {
  ArrayGeometry geom{4, 4, 0.0075, 20.0e9};
  SubcarrierPlan plan{800.0e6, 4};
  const std::vector<SpaceAngle> angles = {{0.4, 0.1}, {-0.2, 0.7}};
  const auto aware = response_set(geom, plan, angles, true);
  const auto unaware = response_set(geom, plan, angles, false);
  REQUIRE(aware.size() == 4);
  REQUIRE(unaware.size() == 4);
  for (int m = 1; m < 4; ++m) {
    CHECK((unaware[std::size_t(m)] - unaware[0]).norm() == 0.0);
    CHECK((aware[std::size_t(m)] - aware[0]).norm() > 1e-6);
  }
  // The center of a symmetric even grid never coincides with offset 0, so
  // even the "aware" set differs from the unaware one on every subcarrier.
  for (int m = 0; m < 4; ++m) {
    CHECK((aware[std::size_t(m)] - unaware[std::size_t(m)]).norm() > 1e-9);
  }
}

TEST_CASE("Rician gain sampling: moments and degenerate cases") {
  Rng rng(5);
  // kappa -> infinity collapses to the deterministic magnitude.
  for (int i = 0; i < 10; ++i) {
    const cplx g = sample_channel_gain(4.0, 1e12, rng);
    CHECK(std::abs(g) == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK(sample_channel_gain(0.0, 3.0, rng) == cplx{0.0, 0.0});

  // Empirical second moment matches the configured power.
  const double gain_pow = 2.5, kappa = 4.0;
  double acc = 0.0;
  const int trials = 200000;
  for (int i = 0; i < trials; ++i) {
    acc += std::norm(sample_channel_gain(gain_pow, kappa, rng));
  }
  CHECK(acc / trials == doctest::Approx(gain_pow).epsilon(0.02));

  CHECK_THROWS_AS(sample_channel_gain(-1.0, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_channel_gain(1.0, -1.0, rng), std::invalid_argument);
}

TEST_CASE("link budget: frozen hand-computed values") {
  // 20x20 array, 3 dB gains on both ends, 1000 km, 20 GHz.
  ArrayGeometry geom{20, 20, 0.0075, 20.0e9};
  CHECK(link_budget_power(geom, 3.0, 3.0, 1.0e6) ==
        doctest::Approx(2.268938797705259e-15).epsilon(1e-12));
  // 8x8 array, 20 dB gains, same range.
  ArrayGeometry desk{8, 8, 0.0075, 20.0e9};
  CHECK(link_budget_power(desk, 20.0, 20.0, 1.0e6) ==
        doctest::Approx(9.1189065278104e-13).epsilon(1e-12));
  CHECK_THROWS_AS(link_budget_power(desk, 3.0, 3.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("validation rejects malformed inputs") {
  CHECK_THROWS_AS(validate(ArrayGeometry{0, 4, 0.0075, 20.0e9}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(ArrayGeometry{4, 4, 0.0, 20.0e9}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(SubcarrierPlan{800.0e6, 0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SpaceAngle{1.5, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(validate(SpaceAngle{1.0, -1.0}));
}
