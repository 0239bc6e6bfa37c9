#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geops/raster.hpp"

using namespace geops;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  os << content;
}

const char* kTmp = "/tmp/geops_test_raster.csv";

}  // namespace

TEST_CASE("canonical raster files round trip byte for byte") {
  SynthSpec spec;
  spec.rows = 9;
  spec.cols = 18;
  spec.noise_sd = 0.7;
  spec.mask_fraction = 0.25;
  const SynthResult synth = synth_generate(spec, 99);

  write_raster(kTmp, synth.observed);
  const std::string first = slurp(kTmp);
  const RasterData loaded = read_raster(kTmp);
  CHECK(loaded.rows == 9);
  CHECK(loaded.cols == 18);
  CHECK(loaded.missing_fraction() == synth.observed.missing_fraction());

  write_raster(kTmp, loaded);
  CHECK(slurp(kTmp) == first);
  std::filesystem::remove(kTmp);
}

TEST_CASE("a 1x1 raster is a single observation") {
  RasterData tiny = make_global_raster(1, 1);
  tiny.values = {3.25};
  tiny.missing = {0};
  const Observations obs = to_observations(tiny);
  REQUIRE(obs.size() == 1);
  CHECK(obs.value[0] == 3.25);
  CHECK(obs.lat[0] == 0.0);
  CHECK(obs.lon[0] == 0.0);
}

TEST_CASE("missing cells are flagged, dropped, and never imputed") {
  SynthSpec spec;
  spec.rows = 36;
  spec.cols = 72;
  spec.mask_fraction = 0.4;
  const SynthResult synth = synth_generate(spec, 5);
  const double fraction = synth.observed.missing_fraction();
  CHECK(fraction == doctest::Approx(0.4).epsilon(0.1));

  const Observations obs = to_observations(synth.observed);
  CHECK(obs.size() ==
        static_cast<Eigen::Index>(std::lround((1.0 - fraction) * 36 * 72)));
  for (Eigen::Index i = 0; i < obs.size(); ++i) {
    CHECK(std::isfinite(obs.value[i]));
  }
}

TEST_CASE("malformed files are rejected with a useful message") {
  SUBCASE("bad header") {
    spit(kTmp, "rows=2 cols=2\n1,2\n3,4\n");
    CHECK_THROWS_WITH_AS(read_raster(kTmp),
                         doctest::Contains("malformed header"),
                         std::runtime_error);
  }
  SUBCASE("missing rows") {
    spit(kTmp,
         "{\"rows\":3,\"cols\":2,\"lat0\":10,\"lon0\":0,\"dlat\":-1,"
         "\"dlon\":1,\"missing\":\"NA\",\"units\":\"\"}\n1,2\n3,4\n");
    CHECK_THROWS_WITH_AS(read_raster(kTmp), doctest::Contains("row 2"),
                         std::runtime_error);
  }
  SUBCASE("short row") {
    spit(kTmp,
         "{\"rows\":2,\"cols\":3,\"lat0\":10,\"lon0\":0,\"dlat\":-1,"
         "\"dlon\":1,\"missing\":\"NA\",\"units\":\"\"}\n1,2,3\n4,5\n");
    CHECK_THROWS_WITH_AS(read_raster(kTmp), doctest::Contains("row 1"),
                         std::runtime_error);
  }
  SUBCASE("unparseable value") {
    spit(kTmp,
         "{\"rows\":1,\"cols\":2,\"lat0\":10,\"lon0\":0,\"dlat\":-1,"
         "\"dlon\":1,\"missing\":\"NA\",\"units\":\"\"}\nfoo,2\n");
    CHECK_THROWS_WITH_AS(read_raster(kTmp), doctest::Contains("bad value"),
                         std::runtime_error);
  }
  SUBCASE("centroid out of range") {
    spit(kTmp,
         "{\"rows\":2,\"cols\":2,\"lat0\":95,\"lon0\":0,\"dlat\":-1,"
         "\"dlon\":1,\"missing\":\"NA\",\"units\":\"\"}\n1,2\n3,4\n");
    CHECK_THROWS_WITH_AS(read_raster(kTmp), doctest::Contains("out of range"),
                         std::runtime_error);
  }
  std::filesystem::remove(kTmp);
}

TEST_CASE("synthetic truth behaves as configured") {
  SynthSpec spec;
  spec.rows = 60;
  spec.cols = 120;
  spec.band_center_lat = -8.0;
  spec.band_wobble_deg = 12.0;
  spec.band_width_deg = 10.0;

  SUBCASE("zero noise and no mask reproduce the truth exactly") {
    SynthSpec clean = spec;
    clean.noise_sd = 0.0;
    clean.mask_fraction = 0.0;
    const SynthResult synth = synth_generate(clean, 7);
    CHECK(synth.observed.values == synth.truth.values);
    CHECK(synth.observed.missing_fraction() == 0.0);
  }

  SUBCASE("fixed seeds reproduce the output") {
    const SynthResult a = synth_generate(spec, 21);
    const SynthResult b = synth_generate(spec, 21);
    REQUIRE(a.observed.missing == b.observed.missing);
    for (std::size_t i = 0; i < a.observed.values.size(); ++i) {
      if (!a.observed.missing[i]) {
        CHECK(a.observed.values[i] == b.observed.values[i]);
      }
    }
  }

  SUBCASE("per-meridian argmax tracks the specified band center") {
    const SynthResult synth = synth_generate(spec, 3);
    const RasterData& truth = synth.truth;
    for (int c = 0; c < truth.cols; ++c) {
      int best_row = 0;
      for (int r = 1; r < truth.rows; ++r) {
        if (truth.values[truth.index(r, c)] >
            truth.values[truth.index(best_row, c)]) {
          best_row = r;
        }
      }
      const double expected =
          spec.band_center_lat +
          spec.band_wobble_deg *
              std::sin(truth.lon_of_col(c) * M_PI / 180.0);
      // Within one cell (3 degrees of latitude).
      CHECK(std::fabs(truth.lat_of_row(best_row) - expected) <=
            std::fabs(truth.dlat));
    }
  }

  SUBCASE("invalid configurations are rejected") {
    SynthSpec bad = spec;
    bad.mask_fraction = 1.0;
    CHECK_THROWS_AS(synth_generate(bad, 1), std::invalid_argument);
    bad = spec;
    bad.noise_sd = -1.0;
    CHECK_THROWS_AS(synth_generate(bad, 1), std::invalid_argument);
  }
}
