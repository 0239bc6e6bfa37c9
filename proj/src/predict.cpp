#include "geops/predict.hpp"

#include <cmath>
#include <string>

namespace geops {

void validate_metadata(const PosteriorSamples& samples,
                       const GeodesicGrid& grid, const BasisConfig& cfg) {
  const SamplerMeta& meta = samples.meta;
  if (grid.level() != meta.nu || cfg.grid_level != meta.nu) {
    throw MetadataMismatch("metadata mismatch: samples were fitted at nu=" +
                           std::to_string(meta.nu) + ", prediction grid has nu=" +
                           std::to_string(grid.level()) + "/" +
                           std::to_string(cfg.grid_level));
  }
  if (cfg.degree != meta.degree) {
    throw MetadataMismatch("metadata mismatch: samples were fitted with degree " +
                           std::to_string(meta.degree) + ", requested " +
                           std::to_string(cfg.degree));
  }
  if (cfg.normalize_rows != meta.normalize_rows) {
    throw MetadataMismatch(
        "metadata mismatch: row normalization differs between fit and request");
  }
  if (samples.coefficient_count() != grid.knot_count()) {
    throw MetadataMismatch("metadata mismatch: samples carry " +
                           std::to_string(samples.coefficient_count()) +
                           " coefficients, grid has " +
                           std::to_string(grid.knot_count()) + " knots");
  }
}

void PredictionRequest::validate() const {
  if (samples == nullptr || grid == nullptr) {
    throw std::invalid_argument("PredictionRequest: samples and grid required");
  }
  if (lat.size() != lon.size()) {
    throw std::invalid_argument("PredictionRequest: lat/lon length mismatch");
  }
  validate_metadata(*samples, *grid, cfg);
}

namespace {

// Compact per-location basis support: three knots and weights per row.
struct BasisRows {
  std::vector<std::array<int, 3>> cols;
  std::vector<std::array<double, 3>> values;
};

BasisRows evaluate_rows(const std::vector<double>& lat,
                        const std::vector<double>& lon,
                        const GeodesicGrid& grid, const BasisConfig& cfg) {
  BasisRows rows;
  rows.cols.reserve(lat.size());
  rows.values.reserve(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    if (!(lat[i] >= -90.0 && lat[i] <= 90.0) ||
        !(lon[i] >= -180.0 && lon[i] <= 180.0)) {
      throw std::invalid_argument("predict: coordinates out of range at row " +
                                  std::to_string(i));
    }
    const BasisRow row = basis_row(lat_lon_to_unit(lat[i], lon[i]), grid, cfg);
    rows.cols.push_back(row.cols);
    rows.values.push_back(row.values);
  }
  return rows;
}

inline double field_at(const BasisRows& rows, std::size_t i, double alpha,
                       const Eigen::Matrix<double, Eigen::Dynamic,
                                           Eigen::Dynamic, Eigen::RowMajor>& beta,
                       Eigen::Index g) {
  const auto& c = rows.cols[i];
  const auto& v = rows.values[i];
  return alpha + v[0] * beta(g, c[0]) + v[1] * beta(g, c[1]) +
         v[2] * beta(g, c[2]);
}

}  // namespace

Eigen::MatrixXd posterior_predictive(const PredictionRequest& req,
                                     Rng* noise_rng) {
  req.validate();
  const PosteriorSamples& s = *req.samples;
  const BasisRows rows = evaluate_rows(req.lat, req.lon, *req.grid, req.cfg);
  const Eigen::Index G = s.draw_count();
  const auto m = static_cast<Eigen::Index>(req.lat.size());

  Eigen::MatrixXd draws(G, m);
  for (Eigen::Index g = 0; g < G; ++g) {
    const double noise_sd =
        noise_rng != nullptr ? 1.0 / std::sqrt(s.tau_eps[g]) : 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      double value = field_at(rows, static_cast<std::size_t>(i), s.alpha[g],
                              s.beta, g);
      if (noise_rng != nullptr) value += noise_sd * noise_rng->normal();
      draws(g, i) = value;
    }
  }
  return draws;
}

namespace {

// Welford accumulation over draws for a fixed set of locations.
void accumulate_mean_sd(const PosteriorSamples& s, const BasisRows& rows,
                        Eigen::VectorXd& mean, Eigen::VectorXd& sd) {
  const Eigen::Index G = s.draw_count();
  const auto m = static_cast<Eigen::Index>(rows.cols.size());
  mean.setZero(m);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(m);
  for (Eigen::Index g = 0; g < G; ++g) {
    const double alpha = s.alpha[g];
    for (Eigen::Index i = 0; i < m; ++i) {
      const double value = field_at(rows, static_cast<std::size_t>(i), alpha,
                                    s.beta, g);
      const double delta = value - mean[i];
      mean[i] += delta / static_cast<double>(g + 1);
      m2[i] += delta * (value - mean[i]);
    }
  }
  if (G > 1) {
    sd = (m2 / static_cast<double>(G - 1)).cwiseSqrt();
  } else {
    sd = Eigen::VectorXd::Zero(m);
  }
}

}  // namespace

Eigen::MatrixX2d mean_sd_at(const PredictionRequest& req) {
  req.validate();
  const BasisRows rows = evaluate_rows(req.lat, req.lon, *req.grid, req.cfg);
  Eigen::VectorXd mean, sd;
  accumulate_mean_sd(*req.samples, rows, mean, sd);
  Eigen::MatrixX2d out(mean.size(), 2);
  out.col(0) = mean;
  out.col(1) = sd;
  return out;
}

MeanSdRasters mean_sd_raster(const PosteriorSamples& samples,
                             const GeodesicGrid& grid, const BasisConfig& cfg,
                             int rows, int cols) {
  validate_metadata(samples, grid, cfg);
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("mean_sd_raster: raster dimensions must be positive");
  }
  MeanSdRasters out;
  out.mean = make_global_raster(rows, cols);
  out.sd = make_global_raster(rows, cols);

  std::vector<double> lat, lon;
  lat.reserve(static_cast<std::size_t>(rows) * cols);
  lon.reserve(lat.capacity());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      lat.push_back(out.mean.lat_of_row(r));
      lon.push_back(out.mean.lon_of_col(c));
    }
  }
  const BasisRows basis = evaluate_rows(lat, lon, grid, cfg);
  Eigen::VectorXd mean, sd;
  accumulate_mean_sd(samples, basis, mean, sd);
  for (std::size_t i = 0; i < out.mean.values.size(); ++i) {
    out.mean.values[i] = mean[static_cast<Eigen::Index>(i)];
    out.sd.values[i] = sd[static_cast<Eigen::Index>(i)];
  }
  return out;
}

}  // namespace geops
