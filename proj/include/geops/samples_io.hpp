#pragma once

#include <string>

#include "geops/model_fit.hpp"

namespace geops {

/**
 * Posterior samples file: one text header line
 *   GEOPS-SAMPLES v1 {json metadata}
 * followed by raw little-endian doubles in the order
 *   alpha[G], tau_beta[G], tau_eps[G], beta[G*K] (draw-major).
 * The metadata carries nu, degree, normalize, kappa, seed, burnin, thin,
 * hyperparameters, n and K, and is what prediction validates against.
 */
void write_samples(const std::string& path, const PosteriorSamples& samples);
PosteriorSamples read_samples(const std::string& path);

}  // namespace geops
