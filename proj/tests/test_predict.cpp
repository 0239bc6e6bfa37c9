#include <doctest.h>

#include <cmath>

#include "geops/predict.hpp"
#include "test_helpers.hpp"

using namespace geops;
using namespace geops::testing;

namespace {

PosteriorSamples synthetic_samples(const GeodesicGrid& grid, int degree,
                                   int draws, Rng& rng) {
  PosteriorSamples s;
  const Eigen::Index K = grid.knot_count();
  s.alpha.resize(draws);
  s.tau_beta = Eigen::VectorXd::Constant(draws, 1.0);
  s.tau_eps = Eigen::VectorXd::Constant(draws, 4.0);
  s.beta.resize(draws, K);
  for (int g = 0; g < draws; ++g) {
    s.alpha[g] = rng.normal();
    for (Eigen::Index k = 0; k < K; ++k) s.beta(g, k) = rng.normal();
  }
  s.meta.nu = grid.level();
  s.meta.degree = degree;
  s.meta.normalize_rows = true;
  return s;
}

}  // namespace

TEST_CASE("metadata validation guards every prediction path") {
  const GeodesicGrid grid(2);
  Rng rng(11);
  const PosteriorSamples s = synthetic_samples(grid, 3, 4, rng);
  const BasisConfig good{3, true, 2};
  CHECK_NOTHROW(validate_metadata(s, grid, good));

  const BasisConfig wrong_degree{2, true, 2};
  CHECK_THROWS_AS(validate_metadata(s, grid, wrong_degree), MetadataMismatch);
  const BasisConfig wrong_norm{3, false, 2};
  CHECK_THROWS_AS(validate_metadata(s, grid, wrong_norm), MetadataMismatch);

  const GeodesicGrid other(1);
  const BasisConfig other_cfg{3, true, 1};
  CHECK_THROWS_AS(validate_metadata(s, other, other_cfg), MetadataMismatch);

  PredictionRequest req;
  req.lat = {0.0};
  req.lon = {0.0};
  req.samples = &s;
  req.grid = &grid;
  req.cfg = wrong_degree;
  CHECK_THROWS_AS(posterior_predictive(req), MetadataMismatch);
  CHECK_THROWS_AS(mean_sd_raster(s, grid, wrong_degree, 4, 8), MetadataMismatch);
}

TEST_CASE("prediction at a fitted location reproduces the fitted field") {
  const GeodesicGrid grid(2);
  const BasisConfig cfg{3, true, 2};
  Rng rng(13);
  const PosteriorSamples s = synthetic_samples(grid, 3, 8, rng);

  const std::vector<double> lat = {12.0, -48.5, 71.0};
  const std::vector<double> lon = {30.0, -120.0, 4.0};
  const SparseMat basis = assemble_basis(lat, lon, grid, cfg);

  PredictionRequest req;
  req.lat = lat;
  req.lon = lon;
  req.samples = &s;
  req.grid = &grid;
  req.cfg = cfg;
  const Eigen::MatrixXd draws = posterior_predictive(req);
  REQUIRE(draws.rows() == s.draw_count());
  REQUIRE(draws.cols() == 3);

  for (Eigen::Index g = 0; g < s.draw_count(); ++g) {
    const Eigen::VectorXd fitted =
        Eigen::VectorXd::Constant(3, s.alpha[g]) +
        basis * s.beta.row(g).transpose();
    CHECK((draws.row(g).transpose() - fitted).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("constant coefficients predict a constant surface") {
  const GeodesicGrid grid(1);
  Rng rng(17);
  PosteriorSamples s = synthetic_samples(grid, 1, 3, rng);
  s.meta.degree = 1;
  for (Eigen::Index g = 0; g < 3; ++g) {
    s.alpha[g] = 1.5;
    s.beta.row(g).setConstant(-0.25);
  }
  PredictionRequest req;
  Rng where(19);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector2d ll = unit_to_lat_lon(random_unit(where));
    req.lat.push_back(ll[0]);
    req.lon.push_back(ll[1]);
  }
  req.samples = &s;
  req.grid = &grid;
  req.cfg = BasisConfig{1, true, 1};
  const Eigen::MatrixXd draws = posterior_predictive(req);
  CHECK((draws.array() - 1.25).abs().maxCoeff() < 1e-12);
}

TEST_CASE("predictive mean at one location matches the dense product") {
  const GeodesicGrid grid(1);
  const BasisConfig cfg{2, true, 1};
  Rng rng(23);
  const PosteriorSamples s = synthetic_samples(grid, 2, 40, rng);

  PredictionRequest req;
  req.lat = {33.0};
  req.lon = {-97.0};
  req.samples = &s;
  req.grid = &grid;
  req.cfg = cfg;

  const SparseMat basis = assemble_basis(req.lat, req.lon, grid, cfg);
  const Eigen::VectorXd row = Eigen::VectorXd(basis.transpose() * Eigen::VectorXd::Ones(1));
  double oracle = 0.0;
  for (Eigen::Index g = 0; g < s.draw_count(); ++g) {
    oracle += s.alpha[g] + row.dot(s.beta.row(g));
  }
  oracle /= static_cast<double>(s.draw_count());

  const Eigen::MatrixX2d stats = mean_sd_at(req);
  CHECK(stats(0, 0) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("streaming moments match the two-pass computation") {
  const GeodesicGrid grid(1);
  const BasisConfig cfg{3, true, 1};
  Rng rng(29);
  const PosteriorSamples s = synthetic_samples(grid, 3, 64, rng);

  PredictionRequest req;
  Rng where(31);
  for (int i = 0; i < 40; ++i) {
    const Eigen::Vector2d ll = unit_to_lat_lon(random_unit(where));
    req.lat.push_back(ll[0]);
    req.lon.push_back(ll[1]);
  }
  req.samples = &s;
  req.grid = &grid;
  req.cfg = cfg;

  const Eigen::MatrixXd draws = posterior_predictive(req);
  const Eigen::MatrixX2d streamed = mean_sd_at(req);
  for (Eigen::Index i = 0; i < draws.cols(); ++i) {
    const double mean = draws.col(i).mean();
    const double var =
        (draws.col(i).array() - mean).square().sum() / (draws.rows() - 1);
    CHECK(streamed(i, 0) == doctest::Approx(mean).epsilon(1e-8));
    CHECK(streamed(i, 1) == doctest::Approx(std::sqrt(var)).epsilon(1e-8));
  }
}

TEST_CASE("observation noise inflates the predictive spread") {
  const GeodesicGrid grid(1);
  Rng rng(37);
  const PosteriorSamples s = synthetic_samples(grid, 1, 400, rng);
  PredictionRequest req;
  req.lat = {10.0};
  req.lon = {10.0};
  req.samples = &s;
  req.grid = &grid;
  req.cfg = BasisConfig{1, true, 1};

  const Eigen::MatrixXd latent = posterior_predictive(req);
  Rng noise(41);
  const Eigen::MatrixXd noisy = posterior_predictive(req, &noise);
  auto spread = [](const Eigen::MatrixXd& d) {
    return (d.col(0).array() - d.col(0).mean()).square().sum() /
           (d.rows() - 1);
  };
  // tau_eps = 4 adds variance 0.25 on top of the latent spread.
  CHECK(spread(noisy) > spread(latent) + 0.1);
}

TEST_CASE("posterior sd is higher over an unobserved region") {
  // Contiguous "land" void over a quarter of the longitudes.
  const GeodesicGrid grid(2);
  const BasisConfig cfg{3, true, 2};
  Rng rng(43);
  Observations obs;
  std::vector<double> values;
  for (int r = 0; r < 18; ++r) {
    for (int c = 0; c < 36; ++c) {
      const double lat = 85.0 - 10.0 * r;
      const double lon = -175.0 + 10.0 * c;
      if (lon >= 0.0 && lon < 90.0) continue;  // masked band
      obs.lat.push_back(lat);
      obs.lon.push_back(lon);
      values.push_back(10.0 + 3.0 * std::sin(lat * M_PI / 45.0) + rng.normal());
    }
  }
  obs.value = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());

  ModelSpec spec;
  spec.basis_config = cfg;
  spec.basis = assemble_basis(obs.lat, obs.lon, grid, cfg);
  spec.structure = scale_structure(icar_structure(grid));
  FitOptions options;
  options.draws = 200;
  options.burnin = 100;
  options.seed = 4711;
  const PosteriorSamples fitted = gibbs_fit(obs, spec, options);

  const MeanSdRasters maps = mean_sd_raster(fitted, grid, cfg, 18, 36);
  double masked = 0.0, observed = 0.0;
  int masked_n = 0, observed_n = 0;
  for (int r = 0; r < 18; ++r) {
    for (int c = 0; c < 36; ++c) {
      const double lon = maps.sd.lon_of_col(c);
      const double sd = maps.sd.values[maps.sd.index(r, c)];
      if (lon >= 0.0 && lon < 90.0) {
        masked += sd;
        ++masked_n;
      } else {
        observed += sd;
        ++observed_n;
      }
    }
  }
  CHECK(masked / masked_n > observed / observed_n);
}
