#include "geops/raster.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "geops/rng.hpp"

namespace geops {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double RasterData::missing_fraction() const {
  if (values.empty()) return 0.0;
  std::size_t count = 0;
  for (auto m : missing) count += m;
  return static_cast<double>(count) / static_cast<double>(values.size());
}

void RasterData::validate() const {
  if (rows < 1 || cols < 1) {
    throw std::runtime_error("raster: rows and cols must be positive");
  }
  if (values.size() != static_cast<std::size_t>(rows) * cols ||
      missing.size() != values.size()) {
    throw std::runtime_error("raster: value count does not match rows*cols");
  }
  for (int r = 0; r < rows; ++r) {
    const double lat = lat_of_row(r);
    if (!(lat >= -90.0 && lat <= 90.0)) {
      throw std::runtime_error("raster: row " + std::to_string(r) +
                               " centroid latitude " + std::to_string(lat) +
                               " out of range");
    }
  }
  for (int c = 0; c < cols; ++c) {
    const double lon = lon_of_col(c);
    if (!(lon >= -180.0 && lon < 180.0)) {
      throw std::runtime_error("raster: column " + std::to_string(c) +
                               " centroid longitude " + std::to_string(lon) +
                               " out of range");
    }
  }
}

RasterData read_raster(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_raster: cannot open " + path);

  std::string header;
  if (!std::getline(is, header)) {
    throw std::runtime_error("read_raster: empty file " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("read_raster: malformed header: " +
                             std::string(e.what()));
  }
  RasterData raster;
  try {
    raster.rows = j.at("rows").get<int>();
    raster.cols = j.at("cols").get<int>();
    raster.lat0 = j.at("lat0").get<double>();
    raster.lon0 = j.at("lon0").get<double>();
    raster.dlat = j.at("dlat").get<double>();
    raster.dlon = j.at("dlon").get<double>();
    raster.missing_token = j.at("missing").get<std::string>();
    raster.units = j.value("units", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("read_raster: malformed header: " +
                             std::string(e.what()));
  }
  if (raster.rows < 1 || raster.cols < 1) {
    throw std::runtime_error("read_raster: malformed header: non-positive dimensions");
  }

  raster.values.reserve(static_cast<std::size_t>(raster.rows) * raster.cols);
  raster.missing.reserve(raster.values.capacity());
  std::string line;
  for (int r = 0; r < raster.rows; ++r) {
    if (!std::getline(is, line)) {
      throw std::runtime_error("read_raster: file ends before row " +
                               std::to_string(r));
    }
    std::stringstream ss(line);
    std::string field;
    int c = 0;
    while (std::getline(ss, field, ',')) {
      if (c < raster.cols) {
        if (field.empty() || field == raster.missing_token || field == "NaN" ||
            field == "nan") {
          raster.values.push_back(std::numeric_limits<double>::quiet_NaN());
          raster.missing.push_back(1);
        } else {
          double v = 0.0;
          try {
            v = std::stod(field);
          } catch (const std::exception&) {
            throw std::runtime_error("read_raster: bad value '" + field +
                                     "' at row " + std::to_string(r) +
                                     ", column " + std::to_string(c));
          }
          raster.values.push_back(v);
          raster.missing.push_back(0);
        }
      }
      ++c;
    }
    if (c != raster.cols) {
      throw std::runtime_error("read_raster: row " + std::to_string(r) +
                               " has " + std::to_string(c) + " values, expected " +
                               std::to_string(raster.cols));
    }
  }
  raster.validate();
  return raster;
}

void write_raster(const std::string& path, const RasterData& raster) {
  raster.validate();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_raster: cannot open " + path);
  // Fixed key order so that write(read(f)) reproduces canonical files
  // byte for byte.
  os << "{\"rows\":" << raster.rows << ",\"cols\":" << raster.cols
     << ",\"lat0\":" << format_double(raster.lat0)
     << ",\"lon0\":" << format_double(raster.lon0)
     << ",\"dlat\":" << format_double(raster.dlat)
     << ",\"dlon\":" << format_double(raster.dlon) << ",\"missing\":\""
     << raster.missing_token << "\",\"units\":\"" << raster.units << "\"}\n";
  for (int r = 0; r < raster.rows; ++r) {
    for (int c = 0; c < raster.cols; ++c) {
      if (c > 0) os << ',';
      const std::size_t i = raster.index(r, c);
      if (raster.missing[i]) {
        os << raster.missing_token;
      } else {
        os << format_double(raster.values[i]);
      }
    }
    os << '\n';
  }
}

Observations to_observations(const RasterData& raster) {
  raster.validate();
  Observations obs;
  std::vector<double> values;
  for (int r = 0; r < raster.rows; ++r) {
    for (int c = 0; c < raster.cols; ++c) {
      const std::size_t i = raster.index(r, c);
      if (raster.missing[i]) continue;
      obs.lat.push_back(raster.lat_of_row(r));
      obs.lon.push_back(raster.lon_of_col(c));
      values.push_back(raster.values[i]);
    }
  }
  obs.value = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  return obs;
}

void SynthSpec::validate() const {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("SynthSpec: rows and cols must be positive");
  }
  if (!(noise_sd >= 0.0)) {
    throw std::invalid_argument("SynthSpec: noise sd must be >= 0");
  }
  if (!(mask_fraction >= 0.0 && mask_fraction < 1.0)) {
    throw std::invalid_argument("SynthSpec: mask fraction must lie in [0,1)");
  }
}

double SynthSpec::truth(double lat_deg, double lon_deg) const {
  const double center =
      band_center_lat +
      band_wobble_deg * std::sin((lon_deg - band_phase_deg) * M_PI / 180.0);
  const double d = (lat_deg - center) / band_width_deg;
  return base + amplitude * std::exp(-0.5 * d * d);
}

RasterData make_global_raster(int rows, int cols) {
  RasterData raster;
  raster.rows = rows;
  raster.cols = cols;
  raster.dlat = -180.0 / rows;
  raster.dlon = 360.0 / cols;
  raster.lat0 = 90.0 + 0.5 * raster.dlat;
  raster.lon0 = -180.0 + 0.5 * raster.dlon;
  raster.values.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  raster.missing.assign(raster.values.size(), 0);
  return raster;
}

SynthResult synth_generate(const SynthSpec& spec, std::uint64_t noise_seed) {
  spec.validate();
  SynthResult result;
  result.truth = make_global_raster(spec.rows, spec.cols);
  result.truth.units = "synthetic";
  result.observed = result.truth;

  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const std::size_t i = result.truth.index(r, c);
      result.truth.values[i] =
          spec.truth(result.truth.lat_of_row(r), result.truth.lon_of_col(c));
    }
  }

  Rng noise(noise_seed);
  Rng mask(spec.mask_seed);
  for (std::size_t i = 0; i < result.observed.values.size(); ++i) {
    result.observed.values[i] =
        result.truth.values[i] + spec.noise_sd * noise.normal();
    if (mask.uniform() < spec.mask_fraction) {
      result.observed.values[i] = std::numeric_limits<double>::quiet_NaN();
      result.observed.missing[i] = 1;
    }
  }
  return result;
}

}  // namespace geops
