#pragma once

#include <Eigen/Core>
#include <vector>

#include "geops/predict.hpp"

namespace geops {

/**
 * Configuration of the rank-based band search. The band width is held as
 * integer kilometres so the rank cutoff 1 - phi/L < w, with
 * w = width/meridian_length, can be evaluated exactly in integer
 * arithmetic: rank phi is inside the band iff
 * meridian_length_km * (L - phi) < width_km * L.
 */
struct DetectConfig {
  int width_km = 1000;
  int meridian_length_km = 20000;
  int latitude_points = 1000;  // L, regular from 90 to -90, poles included
  int meridian_count = 360;    // M, equally spaced longitudes

  double w() const {
    return static_cast<double>(width_km) / meridian_length_km;
  }
  bool rank_in_band(int rank) const {
    return static_cast<long long>(meridian_length_km) *
               (latitude_points - rank) <
           static_cast<long long>(width_km) * latitude_points;
  }
  void validate() const;
};

/**
 * Per-meridian posterior probability that each latitude falls in the band
 * where the latent field is highest. Counts are kept as integers so the
 * per-meridian mass law (sum of counts = G * band size, absent ties) holds
 * exactly.
 */
struct BandProbabilityMap {
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;  // M x L
  Eigen::Index draw_count = 0;
  std::vector<double> latitudes;   // length L, 90 .. -90
  std::vector<double> longitudes;  // length M

  double probability(Eigen::Index meridian, Eigen::Index lat_index) const {
    return static_cast<double>(counts(meridian, lat_index)) /
           static_cast<double>(draw_count);
  }

  /// M x L matrix of probabilities in [0,1].
  Eigen::MatrixXd probabilities() const {
    return counts.cast<double>() / static_cast<double>(draw_count);
  }
};

/**
 * Dense ranks 1..L: rank L at the argmax, rank 1 at the argmin; equal
 * values tie-break by the lower index receiving the lower rank.
 * Throws std::invalid_argument on non-finite input.
 */
std::vector<int> rank_vector(const Eigen::VectorXd& values);

/// Run the band search over all meridians for a posterior sample set.
BandProbabilityMap band_probability(const PosteriorSamples& samples,
                                    const GeodesicGrid& grid,
                                    const BasisConfig& cfg,
                                    const DetectConfig& detect);

}  // namespace geops
