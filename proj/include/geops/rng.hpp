#pragma once

#include <cstdint>
#include <random>

namespace geops {

/**
 * Seedable random stream with a fully documented draw path, so that a fixed
 * seed pins the entire sampler output.
 *
 * Engine: std::mt19937_64 (the 64-bit Mersenne Twister specified by the C++
 * standard, hence identical across implementations). Uniform doubles are
 * built from the top 53 bits, offset by half an ulp so the result lies in
 * the open interval (0,1). Normal variates use Wichura's percentile-point
 * inversion (algorithm AS 241, double-precision branch) applied to one
 * uniform each; gamma variates use the Marsaglia-Tsang squeeze method.
 * All three consume the engine in a deterministic order.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in the open interval (0,1).
  double uniform();

  /// Standard normal draw by inversion of a single uniform.
  double normal();

  /// Gamma draw with the (shape, rate) parameterization; mean = shape/rate.
  double gamma(double shape, double rate);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Inverse of the standard normal CDF (Wichura AS 241, |error| < 1e-15).
double normal_quantile(double p);

}  // namespace geops
