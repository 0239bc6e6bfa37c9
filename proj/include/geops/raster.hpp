#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geops/observations.hpp"

namespace geops {

/**
 * Regular latitude-longitude raster of point values observed at cell
 * centroids. Serialized as a self-describing CSV: a one-line JSON header
 * carrying rows, cols, the (0,0) centroid, steps, missing token and units,
 * followed by `rows` lines of `cols` comma-separated values, row-major.
 * Missing cells carry the missing token and are never imputed.
 */
struct RasterData {
  int rows = 0;
  int cols = 0;
  double lat0 = 0.0;  // centroid latitude of row 0
  double lon0 = 0.0;  // centroid longitude of column 0
  double dlat = 0.0;  // latitude step between consecutive rows
  double dlon = 0.0;  // longitude step between consecutive columns
  std::string missing_token = "NA";
  std::string units;
  std::vector<double> values;       // row-major, NaN where missing
  std::vector<std::uint8_t> missing;  // row-major mask, 1 = missing

  double lat_of_row(int r) const { return lat0 + r * dlat; }
  double lon_of_col(int c) const { return lon0 + c * dlon; }
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * cols + c;
  }
  double missing_fraction() const;
  void validate() const;
};

RasterData read_raster(const std::string& path);
void write_raster(const std::string& path, const RasterData& raster);

/// Non-missing cells as point observations at the centroids.
Observations to_observations(const RasterData& raster);

/**
 * Synthetic truth for end-to-end runs: a Gaussian ridge in latitude whose
 * centre meanders sinusoidally with longitude,
 *   f(lat,lon) = base + amplitude exp(-((lat - c(lon))^2) / (2 width^2)),
 *   c(lon) = band_center_lat + band_wobble * sin(lon - band_phase).
 * Observations add iid Gaussian noise and an iid missingness mask drawn
 * from a separate pattern seed.
 */
struct SynthSpec {
  int rows = 36;
  int cols = 72;
  double base = 20.0;
  double amplitude = 30.0;
  double band_center_lat = 0.0;
  double band_wobble_deg = 10.0;
  double band_phase_deg = 0.0;
  double band_width_deg = 12.0;
  double noise_sd = 1.0;
  double mask_fraction = 0.3;
  std::uint64_t mask_seed = 1;

  double truth(double lat_deg, double lon_deg) const;
  void validate() const;
};

struct SynthResult {
  RasterData observed;
  RasterData truth;
};

SynthResult synth_generate(const SynthSpec& spec, std::uint64_t noise_seed);

/// Centroid grid covering the globe, row 0 at the northernmost centroid.
RasterData make_global_raster(int rows, int cols);

}  // namespace geops
