#include "geops/samples_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace geops {

namespace {
constexpr const char* kMagic = "GEOPS-SAMPLES v1 ";

void write_block(std::ofstream& os, const double* data, std::size_t count) {
  os.write(reinterpret_cast<const char*>(data),
           static_cast<std::streamsize>(count * sizeof(double)));
}

void read_block(std::ifstream& is, double* data, std::size_t count) {
  is.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw std::runtime_error("read_samples: truncated sample block");
}
}  // namespace

void write_samples(const std::string& path, const PosteriorSamples& samples) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_samples: cannot open " + path);

  nlohmann::json j;
  j["G"] = samples.draw_count();
  j["K"] = samples.coefficient_count();
  j["nu"] = samples.meta.nu;
  j["degree"] = samples.meta.degree;
  j["normalize"] = samples.meta.normalize_rows;
  j["kappa"] = samples.meta.kappa;
  j["seed"] = samples.meta.seed;
  j["burnin"] = samples.meta.burnin;
  j["thin"] = samples.meta.thin;
  j["hyper_a"] = samples.meta.hyper_a;
  j["hyper_b"] = samples.meta.hyper_b;
  j["tau_alpha"] = samples.meta.tau_alpha;
  j["n_obs"] = samples.meta.n_obs;
  os << kMagic << j.dump() << '\n';

  const auto G = static_cast<std::size_t>(samples.draw_count());
  const auto K = static_cast<std::size_t>(samples.coefficient_count());
  write_block(os, samples.alpha.data(), G);
  write_block(os, samples.tau_beta.data(), G);
  write_block(os, samples.tau_eps.data(), G);
  write_block(os, samples.beta.data(), G * K);
  if (!os) throw std::runtime_error("write_samples: write failed on " + path);
}

PosteriorSamples read_samples(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_samples: cannot open " + path);

  std::string header;
  if (!std::getline(is, header) || header.rfind(kMagic, 0) != 0) {
    throw std::runtime_error("read_samples: not a samples file: " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header.substr(std::string(kMagic).size()));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("read_samples: malformed metadata: " +
                             std::string(e.what()));
  }

  PosteriorSamples samples;
  Eigen::Index G = 0, K = 0;
  try {
    G = j.at("G").get<Eigen::Index>();
    K = j.at("K").get<Eigen::Index>();
    samples.meta.nu = j.at("nu").get<int>();
    samples.meta.degree = j.at("degree").get<int>();
    samples.meta.normalize_rows = j.at("normalize").get<bool>();
    samples.meta.kappa = j.at("kappa").get<double>();
    samples.meta.seed = j.at("seed").get<std::uint64_t>();
    samples.meta.burnin = j.at("burnin").get<int>();
    samples.meta.thin = j.at("thin").get<int>();
    samples.meta.hyper_a = j.at("hyper_a").get<double>();
    samples.meta.hyper_b = j.at("hyper_b").get<double>();
    samples.meta.tau_alpha = j.at("tau_alpha").get<double>();
    samples.meta.n_obs = j.at("n_obs").get<Eigen::Index>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("read_samples: malformed metadata: " +
                             std::string(e.what()));
  }
  if (G < 1 || K < 1) {
    throw std::runtime_error("read_samples: malformed metadata: bad dimensions");
  }

  samples.alpha.resize(G);
  samples.tau_beta.resize(G);
  samples.tau_eps.resize(G);
  samples.beta.resize(G, K);
  read_block(is, samples.alpha.data(), static_cast<std::size_t>(G));
  read_block(is, samples.tau_beta.data(), static_cast<std::size_t>(G));
  read_block(is, samples.tau_eps.data(), static_cast<std::size_t>(G));
  read_block(is, samples.beta.data(),
             static_cast<std::size_t>(G) * static_cast<std::size_t>(K));
  return samples;
}

}  // namespace geops
