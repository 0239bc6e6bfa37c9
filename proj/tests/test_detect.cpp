#include <doctest.h>

#include <cmath>
#include <limits>

#include "geops/detect.hpp"
#include "geops/raster.hpp"
#include "test_helpers.hpp"

using namespace geops;
using namespace geops::testing;

namespace {

// Posterior "samples" whose latent field interpolates a known function at
// the knots (degree-1 basis reproduces knot values exactly).
PosteriorSamples interpolant_samples(const GeodesicGrid& grid,
                                     const SynthSpec& truth, int draws) {
  PosteriorSamples s;
  const Eigen::Index K = grid.knot_count();
  s.alpha = Eigen::VectorXd::Zero(draws);
  s.tau_beta = Eigen::VectorXd::Constant(draws, 1.0);
  s.tau_eps = Eigen::VectorXd::Constant(draws, 1.0);
  s.beta.resize(draws, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const Eigen::Vector2d ll = grid.knot_lat_lon(static_cast<int>(k));
    const double v = truth.truth(ll[0], ll[1]);
    for (int g = 0; g < draws; ++g) s.beta(g, k) = v;
  }
  s.meta.nu = grid.level();
  s.meta.degree = 1;
  s.meta.normalize_rows = true;
  return s;
}

PosteriorSamples random_samples(const GeodesicGrid& grid, int draws, Rng& rng) {
  PosteriorSamples s;
  const Eigen::Index K = grid.knot_count();
  s.alpha.resize(draws);
  s.tau_beta = Eigen::VectorXd::Constant(draws, 1.0);
  s.tau_eps = Eigen::VectorXd::Constant(draws, 1.0);
  s.beta.resize(draws, K);
  for (int g = 0; g < draws; ++g) {
    s.alpha[g] = rng.normal();
    for (Eigen::Index k = 0; k < K; ++k) s.beta(g, k) = rng.normal();
  }
  s.meta.nu = grid.level();
  s.meta.degree = 1;
  s.meta.normalize_rows = true;
  return s;
}

double band_centroid(const BandProbabilityMap& map, int meridian) {
  double mass = 0.0, weighted = 0.0;
  for (Eigen::Index l = 0; l < map.counts.cols(); ++l) {
    const double p = map.probability(meridian, l);
    mass += p;
    weighted += p * map.latitudes[l];
  }
  return weighted / mass;
}

}  // namespace

TEST_CASE("ranks run from 1 at the minimum to L at the maximum") {
  Eigen::VectorXd increasing = Eigen::VectorXd::LinSpaced(8, -3.0, 4.0);
  const std::vector<int> r1 = rank_vector(increasing);
  for (int i = 0; i < 8; ++i) CHECK(r1[i] == i + 1);

  // All-equal input falls back to the documented index tie-break.
  const std::vector<int> r2 = rank_vector(Eigen::VectorXd::Zero(5));
  for (int i = 0; i < 5; ++i) CHECK(r2[i] == i + 1);

  Eigen::VectorXd bad(3);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
  CHECK_THROWS_AS(rank_vector(bad), std::invalid_argument);
}

TEST_CASE("ranks agree with the counting definition") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd v(37);
    for (int i = 0; i < 37; ++i) {
      // Coarse values provoke ties.
      v[i] = std::floor(rng.uniform() * 8.0);
    }
    const std::vector<int> ranks = rank_vector(v);
    for (int i = 0; i < 37; ++i) {
      int below = 0;
      for (int j = 0; j < 37; ++j) {
        if (v[j] < v[i] || (v[j] == v[i] && j <= i)) ++below;
      }
      CHECK(ranks[i] == below);
    }
  }
}

TEST_CASE("config validation and the exact cutoff rule") {
  DetectConfig cfg;
  CHECK(cfg.w() == doctest::Approx(0.05));
  CHECK_NOTHROW(cfg.validate());

  // L = 1000, W = 1000 km: ranks 951..1000 are in the band, 950 is not.
  CHECK(cfg.rank_in_band(1000));
  CHECK(cfg.rank_in_band(951));
  CHECK_FALSE(cfg.rank_in_band(950));

  DetectConfig wide;
  wide.width_km = 20000;
  CHECK_THROWS_AS(wide.validate(), std::invalid_argument);
  DetectConfig degenerate;
  degenerate.latitude_points = 1;
  CHECK_THROWS_AS(degenerate.validate(), std::invalid_argument);
  DetectConfig no_meridians;
  no_meridians.meridian_count = 0;
  CHECK_THROWS_AS(no_meridians.validate(), std::invalid_argument);
}

TEST_CASE("per-meridian probability mass is exactly the band size") {
  const GeodesicGrid grid(1);
  Rng rng(11);
  const PosteriorSamples s = random_samples(grid, 7, rng);
  const BasisConfig cfg{1, true, 1};

  DetectConfig detect;
  detect.latitude_points = 40;
  detect.meridian_count = 6;
  detect.width_km = 1000;  // 20000*(40-phi) < 1000*40  <=>  phi > 38
  const BandProbabilityMap map = band_probability(s, grid, cfg, detect);
  REQUIRE(map.counts.rows() == 6);
  REQUIRE(map.counts.cols() == 40);
  CHECK(map.latitudes.front() == 90.0);
  CHECK(map.latitudes.back() == -90.0);
  for (int m = 0; m < 6; ++m) {
    long long mass = 0;
    for (int l = 0; l < 40; ++l) mass += map.counts(m, l);
    CHECK(mass == 2 * 7);  // band size 2 ranks, 7 draws
  }

  SUBCASE("a single draw yields indicator probabilities") {
    const PosteriorSamples one = random_samples(grid, 1, rng);
    const BandProbabilityMap m1 = band_probability(one, grid, cfg, detect);
    for (int m = 0; m < 6; ++m) {
      for (int l = 0; l < 40; ++l) {
        const double p = m1.probability(m, l);
        CHECK((p == 0.0 || p == 1.0));
      }
    }
  }
}

TEST_CASE("band probabilities grow monotonically with the width") {
  const GeodesicGrid grid(1);
  Rng rng(13);
  const PosteriorSamples s = random_samples(grid, 9, rng);
  const BasisConfig cfg{1, true, 1};

  DetectConfig narrow, wide;
  narrow.latitude_points = wide.latitude_points = 50;
  narrow.meridian_count = wide.meridian_count = 8;
  narrow.width_km = 600;
  wide.width_km = 1200;
  const BandProbabilityMap pn = band_probability(s, grid, cfg, narrow);
  const BandProbabilityMap pw = band_probability(s, grid, cfg, wide);
  for (int m = 0; m < 8; ++m) {
    for (int l = 0; l < 50; ++l) {
      CHECK(pn.counts(m, l) <= pw.counts(m, l));
    }
  }
}

TEST_CASE("a high bump concentrates the probability mass in the true band") {
  const GeodesicGrid grid(3);
  SynthSpec truth;
  truth.band_center_lat = -10.0;
  truth.band_wobble_deg = 0.0;
  truth.band_width_deg = 18.0;
  truth.amplitude = 30.0;
  const PosteriorSamples s = interpolant_samples(grid, truth, 3);
  const BasisConfig cfg{1, true, 3};

  DetectConfig detect;
  detect.latitude_points = 200;
  detect.meridian_count = 12;
  detect.width_km = 2000;
  const BandProbabilityMap map = band_probability(s, grid, cfg, detect);

  // Analytically known band: rank the true field on the latitude grid.
  double inside = 0.0, total = 0.0;
  for (int m = 0; m < detect.meridian_count; ++m) {
    Eigen::VectorXd truth_values(detect.latitude_points);
    for (int l = 0; l < detect.latitude_points; ++l) {
      truth_values[l] = truth.truth(map.latitudes[l], map.longitudes[m]);
    }
    const std::vector<int> truth_ranks = rank_vector(truth_values);
    for (int l = 0; l < detect.latitude_points; ++l) {
      const auto count = static_cast<double>(map.counts(m, l));
      total += count;
      if (detect.rank_in_band(truth_ranks[l])) inside += count;
    }
  }
  CHECK(inside / total > 0.95);
}

TEST_CASE("rotating the field rotates the probability map") {
  const GeodesicGrid grid(3);
  SynthSpec truth;
  truth.band_center_lat = 5.0;
  truth.band_wobble_deg = 12.0;
  truth.band_width_deg = 15.0;
  SynthSpec rotated = truth;
  rotated.band_phase_deg = 30.0;  // shift the pattern east by one meridian step

  const PosteriorSamples s1 = interpolant_samples(grid, truth, 2);
  const PosteriorSamples s2 = interpolant_samples(grid, rotated, 2);
  const BasisConfig cfg{1, true, 3};

  DetectConfig detect;
  detect.latitude_points = 181;
  detect.meridian_count = 12;
  detect.width_km = 2000;
  const BandProbabilityMap m1 = band_probability(s1, grid, cfg, detect);
  const BandProbabilityMap m2 = band_probability(s2, grid, cfg, detect);

  for (int m = 0; m < 12; ++m) {
    const int shifted = (m + 11) % 12;  // lon_m - 30 degrees
    CHECK(std::fabs(band_centroid(m2, m) - band_centroid(m1, shifted)) < 2.0);
  }
}
