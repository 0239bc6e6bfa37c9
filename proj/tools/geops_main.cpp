#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Geometry>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "geops/detect.hpp"
#include "geops/model_fit.hpp"
#include "geops/penalty.hpp"
#include "geops/predict.hpp"
#include "geops/raster.hpp"
#include "geops/samples_io.hpp"
#include "geops/spline_basis.hpp"

using namespace geops;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Relative output paths land under GEOPS_OUTPUT_DIR when that is set; no
// other behavior is driven by the environment.
std::string resolve_output(const std::string& path) {
  const char* dir = std::getenv("GEOPS_OUTPUT_DIR");
  if (dir == nullptr || path.empty() || path.front() == '/') return path;
  return std::string(dir) + "/" + path;
}

std::ofstream open_output(const std::string& raw_path) {
  const std::string path = resolve_output(raw_path);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file " + path);
  return os;
}

struct EdgeStats {
  int edges = 0;
  double min_deg = 0.0, max_deg = 0.0, mean_deg = 0.0;
};

EdgeStats knot_spacing(const TriangleMesh& sphere) {
  std::unordered_map<std::uint64_t, bool> seen;
  EdgeStats stats;
  stats.min_deg = 1e300;
  stats.max_deg = -1e300;
  double sum = 0.0;
  for (const Face& f : sphere.faces) {
    for (int e = 0; e < 3; ++e) {
      const int a = f[e], b = f[(e + 1) % 3];
      if (!seen.emplace(edge_key(a, b), true).second) continue;
      const Vec3& va = sphere.vertices[a];
      const Vec3& vb = sphere.vertices[b];
      const double arc =
          std::atan2(va.cross(vb).norm(), va.dot(vb)) * 180.0 / M_PI;
      stats.min_deg = std::min(stats.min_deg, arc);
      stats.max_deg = std::max(stats.max_deg, arc);
      sum += arc;
      ++stats.edges;
    }
  }
  stats.mean_deg = sum / stats.edges;
  return stats;
}

int run_grid_info(int nu, bool as_json) {
  const GeodesicGrid grid(nu);
  const TriangleMesh& sphere = grid.icosphere();
  const auto hist = degree_histogram(sphere);
  const EdgeStats spacing = knot_spacing(sphere);
  const double deg_to_km = 2.0 * M_PI * 6371.0 / 360.0;

  if (as_json) {
    nlohmann::json j;
    j["nu"] = nu;
    j["vertices"] = sphere.vertex_count();
    j["edges"] = spacing.edges;
    j["faces"] = sphere.face_count();
    nlohmann::json h;
    for (const auto& [degree, count] : hist) {
      h[std::to_string(degree)] = count;
    }
    j["degree_histogram"] = h;
    j["knot_spacing_deg"] = {{"min", spacing.min_deg},
                             {"max", spacing.max_deg},
                             {"mean", spacing.mean_deg}};
    j["knot_spacing_km"] = {{"min", spacing.min_deg * deg_to_km},
                            {"max", spacing.max_deg * deg_to_km},
                            {"mean", spacing.mean_deg * deg_to_km}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "nu:       " << nu << "\n"
            << "vertices: " << sphere.vertex_count() << "\n"
            << "edges:    " << spacing.edges << "\n"
            << "faces:    " << sphere.face_count() << "\n"
            << "degree histogram:";
  for (const auto& [degree, count] : hist) {
    std::cout << " " << degree << ":" << count;
  }
  std::cout << "\n"
            << "knot spacing (deg): min " << fmt(spacing.min_deg) << "  max "
            << fmt(spacing.max_deg) << "  mean " << fmt(spacing.mean_deg) << "\n"
            << "knot spacing (km):  min " << fmt(spacing.min_deg * deg_to_km)
            << "  max " << fmt(spacing.max_deg * deg_to_km) << "  mean "
            << fmt(spacing.mean_deg * deg_to_km) << "\n";
  return 0;
}

int run_build_basis(int nu, int degree, bool raw_rows,
                    const std::string& input, const std::string& output) {
  const RasterData raster = read_raster(input);
  std::vector<double> lat, lon;
  lat.reserve(raster.values.size());
  lon.reserve(raster.values.size());
  for (int r = 0; r < raster.rows; ++r) {
    for (int c = 0; c < raster.cols; ++c) {
      lat.push_back(raster.lat_of_row(r));
      lon.push_back(raster.lon_of_col(c));
    }
  }
  const GeodesicGrid grid(nu);
  const BasisConfig cfg{degree, !raw_rows, nu};
  const SparseMat basis = assemble_basis(lat, lon, grid, cfg);
  write_sparse_file(resolve_output(output), basis);
  std::cout << "basis " << basis.rows() << " x " << basis.cols() << " with "
            << basis.nonZeros() << " non-zeros written to " << output << "\n";
  return 0;
}

int run_penalty_variances(const std::string& kind, int nu, int lat_knots,
                          int lon_knots, bool no_scale,
                          const std::string& output) {
  StructureMatrix structure;
  std::vector<double> lat, lon;
  if (kind == "geodesic") {
    const GeodesicGrid grid(nu);
    structure = icar_structure(grid);
    for (int k = 0; k < grid.knot_count(); ++k) {
      const Eigen::Vector2d ll = grid.knot_lat_lon(k);
      lat.push_back(ll[0]);
      lon.push_back(ll[1]);
    }
  } else {
    const bool circular = (kind == "circular");
    structure = planar_structure(lat_knots, lon_knots, circular);
    for (int l = 0; l < lat_knots; ++l) {
      for (int q = 0; q < lon_knots; ++q) {
        lat.push_back(90.0 - 180.0 * (l + 0.5) / lat_knots);
        lon.push_back(-180.0 + 360.0 * (q + 0.5) / lon_knots);
      }
    }
  }
  if (!no_scale) {
    structure = scale_structure(structure);
  }
  const Eigen::VectorXd diag = marginal_variance_diag(structure);

  std::ofstream os = open_output(output);
  os << "lat,lon,marginal_variance\n";
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    os << fmt(lat[i]) << ',' << fmt(lon[i]) << ',' << fmt(diag[i]) << '\n';
  }
  const double mean = diag.mean();
  const double sd = std::sqrt((diag.array() - mean).square().sum() /
                              static_cast<double>(diag.size() - 1));
  std::cout << "kind " << to_string(structure.kind) << "  K " << diag.size()
            << "  kappa " << fmt(structure.kappa) << "  CV " << fmt(sd / mean)
            << "\n";
  return 0;
}

int run_fit(const std::string& input, int nu, int degree, bool raw_rows,
            int draws, int burnin, int thin, std::uint64_t seed, double hyper_a,
            double hyper_b, double tau_alpha, const std::string& output) {
  const RasterData raster = read_raster(input);
  const Observations obs = to_observations(raster);
  std::cerr << "read " << raster.rows << "x" << raster.cols << " raster, "
            << obs.size() << " observed cells (missing fraction "
            << fmt(raster.missing_fraction()) << ")\n";

  const GeodesicGrid grid(nu);
  ModelSpec spec;
  spec.basis_config = BasisConfig{degree, !raw_rows, nu};
  spec.basis = assemble_basis(obs.lat, obs.lon, grid, spec.basis_config);
  spec.structure = scale_structure(icar_structure(grid));
  spec.tau_alpha = tau_alpha;
  spec.hyper_a = hyper_a;
  spec.hyper_b = hyper_b;

  FitOptions options;
  options.draws = draws;
  options.burnin = burnin;
  options.thin = thin;
  options.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  const PosteriorSamples samples = gibbs_fit(obs, spec, options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::cerr << "sampling took " << fmt(seconds) << " s for "
            << burnin + draws * thin << " iterations\n";

  write_samples(resolve_output(output), samples);
  const FitSummary summary = summarize(samples);
  std::cout << "alpha     mean " << fmt(summary.alpha.mean) << "  95% ["
            << fmt(summary.alpha.q025) << ", " << fmt(summary.alpha.q975)
            << "]\n"
            << "tau_beta  mean " << fmt(summary.tau_beta.mean) << "  95% ["
            << fmt(summary.tau_beta.q025) << ", " << fmt(summary.tau_beta.q975)
            << "]\n"
            << "tau_eps   mean " << fmt(summary.tau_eps.mean) << "  95% ["
            << fmt(summary.tau_eps.q025) << ", " << fmt(summary.tau_eps.q975)
            << "]\n"
            << "noise sd  mean " << fmt(summary.noise_sd.mean) << "  95% ["
            << fmt(summary.noise_sd.q025) << ", " << fmt(summary.noise_sd.q975)
            << "]\n"
            << "samples written to " << output << "\n";
  return 0;
}

std::pair<int, int> parse_raster_shape(const std::string& shape) {
  const auto x = shape.find('x');
  if (x == std::string::npos) {
    throw std::runtime_error("raster shape must look like ROWSxCOLS");
  }
  const int rows = std::stoi(shape.substr(0, x));
  const int cols = std::stoi(shape.substr(x + 1));
  if (rows < 1 || cols < 1) {
    throw std::runtime_error("raster shape must be positive");
  }
  return {rows, cols};
}

void read_locations_csv(const std::string& path, std::vector<double>& lat,
                        std::vector<double>& lon) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open locations file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("locations file: line " +
                               std::to_string(line_no) + " is not lat,lon");
    }
    try {
      lat.push_back(std::stod(line.substr(0, comma)));
      lon.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header line
      throw std::runtime_error("locations file: bad numbers on line " +
                               std::to_string(line_no));
    }
  }
  if (lat.empty()) throw std::runtime_error("locations file is empty");
}

int run_predict(const std::string& samples_path, const std::string& shape,
                const std::string& locations_path, int nu_override,
                int degree_override, const std::string& output_mean,
                const std::string& output_sd, const std::string& output) {
  const PosteriorSamples samples = read_samples(samples_path);
  const int nu = nu_override >= 0 ? nu_override : samples.meta.nu;
  const int degree = degree_override >= 0 ? degree_override : samples.meta.degree;
  const GeodesicGrid grid(nu);
  const BasisConfig cfg{degree, samples.meta.normalize_rows, nu};

  if (!shape.empty()) {
    if (output_mean.empty() || output_sd.empty()) {
      throw std::runtime_error(
          "raster prediction needs --output-mean and --output-sd");
    }
    const auto [rows, cols] = parse_raster_shape(shape);
    MeanSdRasters maps = mean_sd_raster(samples, grid, cfg, rows, cols);
    maps.mean.units = "posterior-mean";
    maps.sd.units = "posterior-sd";
    write_raster(resolve_output(output_mean), maps.mean);
    write_raster(resolve_output(output_sd), maps.sd);
    std::cout << "posterior mean and sd rasters (" << rows << "x" << cols
              << ") written to " << output_mean << " and " << output_sd << "\n";
    return 0;
  }

  if (locations_path.empty()) {
    throw std::runtime_error("predict needs either --raster or --locations");
  }
  if (output.empty()) {
    throw std::runtime_error("location prediction needs --output");
  }
  PredictionRequest req;
  read_locations_csv(locations_path, req.lat, req.lon);
  req.samples = &samples;
  req.grid = &grid;
  req.cfg = cfg;
  const Eigen::MatrixX2d stats = mean_sd_at(req);
  std::ofstream os = open_output(output);
  os << "lat,lon,mean,sd\n";
  for (Eigen::Index i = 0; i < stats.rows(); ++i) {
    os << fmt(req.lat[i]) << ',' << fmt(req.lon[i]) << ',' << fmt(stats(i, 0))
       << ',' << fmt(stats(i, 1)) << '\n';
  }
  std::cout << stats.rows() << " predictions written to " << output << "\n";
  return 0;
}

int run_itcz(const std::string& samples_path, int width_km, int lat_points,
             int meridians, int nu_override, const std::string& output) {
  const PosteriorSamples samples = read_samples(samples_path);
  const int nu = nu_override >= 0 ? nu_override : samples.meta.nu;
  const GeodesicGrid grid(nu);
  const BasisConfig cfg{samples.meta.degree, samples.meta.normalize_rows, nu};

  DetectConfig detect;
  detect.width_km = width_km;
  detect.latitude_points = lat_points;
  detect.meridian_count = meridians;
  const BandProbabilityMap map = band_probability(samples, grid, cfg, detect);

  std::ofstream os = open_output(output);
  os << "lon,lat,probability\n";
  for (int m = 0; m < meridians; ++m) {
    for (int l = 0; l < lat_points; ++l) {
      os << fmt(map.longitudes[m]) << ',' << fmt(map.latitudes[l]) << ','
         << fmt(map.probability(m, l)) << '\n';
    }
  }
  std::cout << "band probabilities (" << meridians << " meridians x "
            << lat_points << " latitudes, w " << fmt(detect.w())
            << ") written to " << output << "\n";
  return 0;
}

int run_synth(const SynthSpec& spec, std::uint64_t seed,
              const std::string& output, const std::string& output_truth) {
  SynthResult result = synth_generate(spec, seed);
  write_raster(resolve_output(output), result.observed);
  std::cout << "synthetic " << spec.rows << "x" << spec.cols
            << " raster written to " << output << " (missing fraction "
            << fmt(result.observed.missing_fraction()) << ")\n";
  if (!output_truth.empty()) {
    write_raster(resolve_output(output_truth), result.truth);
    std::cout << "noise-free truth written to " << output_truth << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geops: geodesic P-spline smoothing of point data on the sphere"};
  app.require_subcommand(1);

  // grid-info
  auto* cmd_grid = app.add_subcommand("grid-info", "Describe a geodesic grid");
  int gi_nu = 5;
  bool gi_json = false;
  cmd_grid->add_option("--nu", gi_nu, "Subdivision level")->required();
  cmd_grid->add_flag("--json", gi_json, "Emit JSON instead of text");

  // build-basis
  auto* cmd_basis =
      app.add_subcommand("build-basis", "Evaluate the basis at raster centroids");
  int bb_nu = 5, bb_degree = 3;
  bool bb_raw = false;
  std::string bb_input, bb_output;
  cmd_basis->add_option("--nu", bb_nu, "Subdivision level")->required();
  cmd_basis->add_option("--degree", bb_degree, "B-spline degree (1, 2 or 3)");
  cmd_basis->add_flag("--raw-rows", bb_raw, "Skip row normalization");
  cmd_basis->add_option("--input", bb_input, "Input raster CSV")->required();
  cmd_basis->add_option("--output", bb_output, "Output sparse matrix file")
      ->required();

  // penalty-variances
  auto* cmd_penalty = app.add_subcommand(
      "penalty-variances", "Marginal variances implied by a structure matrix");
  std::string pv_kind = "geodesic", pv_output;
  int pv_nu = 3, pv_lat = 26, pv_lon = 25;
  bool pv_no_scale = false;
  cmd_penalty
      ->add_option("--kind", pv_kind, "geodesic, naive or circular")
      ->check(CLI::IsMember({"geodesic", "naive", "circular"}));
  cmd_penalty->add_option("--nu", pv_nu, "Subdivision level (geodesic)");
  cmd_penalty->add_option("--lat-knots", pv_lat, "Latitude knots (planar kinds)");
  cmd_penalty->add_option("--lon-knots", pv_lon, "Longitude knots (planar kinds)");
  cmd_penalty->add_flag("--no-scale", pv_no_scale, "Report unscaled variances");
  cmd_penalty->add_option("--output", pv_output, "Output CSV")->required();

  // fit
  auto* cmd_fit = app.add_subcommand("fit", "Fit the hierarchical model");
  std::string fit_input, fit_output;
  int fit_nu = 5, fit_degree = 3, fit_draws = 5000, fit_burnin = 500,
      fit_thin = 1;
  std::uint64_t fit_seed = 0;
  double fit_a = 1.0, fit_b = 5e-5, fit_tau_alpha = 1e-6;
  bool fit_raw = false;
  cmd_fit->add_option("--input", fit_input, "Input raster CSV")->required();
  cmd_fit->add_option("--nu", fit_nu, "Subdivision level");
  cmd_fit->add_option("--degree", fit_degree, "B-spline degree (1, 2 or 3)");
  cmd_fit->add_flag("--raw-rows", fit_raw, "Skip row normalization");
  cmd_fit->add_option("--draws", fit_draws, "Posterior draws to keep");
  cmd_fit->add_option("--burnin", fit_burnin, "Burn-in iterations");
  cmd_fit->add_option("--thin", fit_thin, "Thinning interval");
  cmd_fit->add_option("--seed", fit_seed, "RNG seed");
  cmd_fit->add_option("--hyper-a", fit_a, "Gamma shape for both precisions");
  cmd_fit->add_option("--hyper-b", fit_b, "Gamma rate for both precisions");
  cmd_fit->add_option("--tau-alpha", fit_tau_alpha, "Fixed intercept precision");
  cmd_fit->add_option("--output", fit_output, "Output samples file")->required();

  // predict
  auto* cmd_predict =
      app.add_subcommand("predict", "Posterior mean/sd of the latent field");
  std::string pr_samples, pr_shape, pr_locations, pr_mean, pr_sd, pr_output;
  int pr_nu = -1, pr_degree = -1;
  cmd_predict->add_option("--samples", pr_samples, "Samples file")->required();
  cmd_predict->add_option("--raster", pr_shape, "Prediction grid, ROWSxCOLS");
  cmd_predict->add_option("--locations", pr_locations,
                          "CSV of lat,lon prediction points");
  cmd_predict->add_option("--nu", pr_nu,
                          "Expected subdivision level (validated)");
  cmd_predict->add_option("--degree", pr_degree,
                          "Expected B-spline degree (validated)");
  cmd_predict->add_option("--output-mean", pr_mean, "Mean raster CSV");
  cmd_predict->add_option("--output-sd", pr_sd, "Sd raster CSV");
  cmd_predict->add_option("--output", pr_output, "Location predictions CSV");

  // itcz
  auto* cmd_itcz =
      app.add_subcommand("itcz", "Rank-based band probabilities per meridian");
  std::string it_samples, it_output;
  int it_width = 1000, it_lat = 1000, it_meridians = 360, it_nu = -1;
  cmd_itcz->add_option("--samples", it_samples, "Samples file")->required();
  cmd_itcz->add_option("--width-km", it_width, "Band width in km");
  cmd_itcz->add_option("--L", it_lat, "Latitude grid points per meridian");
  cmd_itcz->add_option("--M", it_meridians, "Meridian count");
  cmd_itcz->add_option("--nu", it_nu, "Expected subdivision level (validated)");
  cmd_itcz->add_option("--output", it_output, "Output CSV")->required();

  // synth
  auto* cmd_synth =
      app.add_subcommand("synth", "Generate a synthetic observation raster");
  SynthSpec synth;
  std::uint64_t sy_seed = 0;
  std::string sy_output, sy_truth;
  cmd_synth->add_option("--rows", synth.rows, "Raster rows");
  cmd_synth->add_option("--cols", synth.cols, "Raster columns");
  cmd_synth->add_option("--base", synth.base, "Background level");
  cmd_synth->add_option("--amplitude", synth.amplitude, "Band amplitude");
  cmd_synth->add_option("--band-center", synth.band_center_lat,
                        "Band center latitude (deg)");
  cmd_synth->add_option("--band-wobble", synth.band_wobble_deg,
                        "Sinusoidal wobble of the center (deg)");
  cmd_synth->add_option("--band-phase", synth.band_phase_deg,
                        "Longitude phase of the wobble (deg)");
  cmd_synth->add_option("--band-width", synth.band_width_deg,
                        "Gaussian width of the band (deg)");
  cmd_synth->add_option("--noise-sd", synth.noise_sd, "Observation noise sd");
  cmd_synth->add_option("--mask-fraction", synth.mask_fraction,
                        "Fraction of cells masked as missing");
  cmd_synth->add_option("--mask-seed", synth.mask_seed, "Mask pattern seed");
  cmd_synth->add_option("--seed", sy_seed, "Noise seed");
  cmd_synth->add_option("--output", sy_output, "Output raster CSV")->required();
  cmd_synth->add_option("--output-truth", sy_truth, "Noise-free truth CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_grid) return run_grid_info(gi_nu, gi_json);
    if (*cmd_basis)
      return run_build_basis(bb_nu, bb_degree, bb_raw, bb_input, bb_output);
    if (*cmd_penalty)
      return run_penalty_variances(pv_kind, pv_nu, pv_lat, pv_lon, pv_no_scale,
                                   pv_output);
    if (*cmd_fit)
      return run_fit(fit_input, fit_nu, fit_degree, fit_raw, fit_draws,
                     fit_burnin, fit_thin, fit_seed, fit_a, fit_b,
                     fit_tau_alpha, fit_output);
    if (*cmd_predict)
      return run_predict(pr_samples, pr_shape, pr_locations, pr_nu, pr_degree,
                         pr_mean, pr_sd, pr_output);
    if (*cmd_itcz)
      return run_itcz(it_samples, it_width, it_lat, it_meridians, it_nu,
                      it_output);
    if (*cmd_synth) return run_synth(synth, sy_seed, sy_output, sy_truth);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
