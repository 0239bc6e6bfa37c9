#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "geops/model_fit.hpp"
#include "geops/raster.hpp"
#include "geops/rng.hpp"

namespace geops {

/// Samples were produced under a different grid or basis configuration than
/// the one supplied for prediction. Never resolved by silent recomputation.
class MetadataMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws MetadataMismatch unless (grid, cfg) agree with the nu, degree and
/// normalization recorded in the samples.
void validate_metadata(const PosteriorSamples& samples,
                       const GeodesicGrid& grid, const BasisConfig& cfg);

struct PredictionRequest {
  std::vector<double> lat;
  std::vector<double> lon;
  const PosteriorSamples* samples = nullptr;
  const GeodesicGrid* grid = nullptr;
  BasisConfig cfg;

  void validate() const;
};

/**
 * Composite sampling from the posterior predictive of the latent field:
 * row g is alpha^g + B~ beta^g with B~ the basis at the requested
 * locations. Latent field only by default; with `noise_rng` non-null each
 * entry additionally receives observation noise N(0, 1/tau_eps^g).
 */
Eigen::MatrixXd posterior_predictive(const PredictionRequest& req,
                                     Rng* noise_rng = nullptr);

/**
 * Pointwise posterior mean and standard deviation of the latent field over
 * a raster grid, streaming over draws (Welford accumulation) so that no
 * G x cells matrix is ever materialized.
 */
struct MeanSdRasters {
  RasterData mean;
  RasterData sd;
};

MeanSdRasters mean_sd_raster(const PosteriorSamples& samples,
                             const GeodesicGrid& grid, const BasisConfig& cfg,
                             int rows, int cols);

/// Streaming mean/sd at arbitrary locations; columns of the result are
/// (mean, sd) per location.
Eigen::MatrixX2d mean_sd_at(const PredictionRequest& req);

}  // namespace geops
