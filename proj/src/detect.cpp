#include "geops/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace geops {

void DetectConfig::validate() const {
  if (width_km <= 0 || meridian_length_km <= 0 ||
      width_km >= meridian_length_km) {
    throw std::invalid_argument(
        "DetectConfig: band width must lie in (0, meridian length)");
  }
  if (latitude_points < 2) {
    throw std::invalid_argument("DetectConfig: need at least two latitude points");
  }
  if (meridian_count < 1) {
    throw std::invalid_argument("DetectConfig: need at least one meridian");
  }
}

std::vector<int> rank_vector(const Eigen::VectorXd& values) {
  if (!values.allFinite()) {
    throw std::invalid_argument("rank_vector: non-finite input");
  }
  const auto n = static_cast<int>(values.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  std::vector<int> ranks(n);
  for (int pos = 0; pos < n; ++pos) {
    ranks[order[pos]] = pos + 1;
  }
  return ranks;
}

BandProbabilityMap band_probability(const PosteriorSamples& samples,
                                    const GeodesicGrid& grid,
                                    const BasisConfig& cfg,
                                    const DetectConfig& detect) {
  detect.validate();
  validate_metadata(samples, grid, cfg);

  const int L = detect.latitude_points;
  const int M = detect.meridian_count;
  const Eigen::Index G = samples.draw_count();

  BandProbabilityMap map;
  map.counts.setZero(M, L);
  map.draw_count = G;
  map.latitudes.resize(L);
  for (int l = 0; l < L; ++l) {
    map.latitudes[l] = 90.0 - 180.0 * static_cast<double>(l) / (L - 1);
  }
  map.longitudes.resize(M);
  for (int m = 0; m < M; ++m) {
    map.longitudes[m] = -180.0 + 360.0 * static_cast<double>(m) / M;
  }

  // Meridians are independent; each reuses its own L x K basis across draws.
  std::vector<std::array<int, 3>> cols(L);
  std::vector<std::array<double, 3>> weights(L);
  Eigen::VectorXd field(L);
  for (int m = 0; m < M; ++m) {
    for (int l = 0; l < L; ++l) {
      const BasisRow row = basis_row(
          lat_lon_to_unit(map.latitudes[l], map.longitudes[m]), grid, cfg);
      cols[l] = row.cols;
      weights[l] = row.values;
    }
    for (Eigen::Index g = 0; g < G; ++g) {
      const double alpha = samples.alpha[g];
      for (int l = 0; l < L; ++l) {
        const auto& c = cols[l];
        const auto& v = weights[l];
        field[l] = alpha + v[0] * samples.beta(g, c[0]) +
                   v[1] * samples.beta(g, c[1]) + v[2] * samples.beta(g, c[2]);
      }
      const std::vector<int> ranks = rank_vector(field);
      for (int l = 0; l < L; ++l) {
        if (detect.rank_in_band(ranks[l])) {
          map.counts(m, l) += 1;
        }
      }
    }
  }
  return map;
}

}  // namespace geops
