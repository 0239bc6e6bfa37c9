#include "geops/model_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace geops {

void ModelSpec::validate() const {
  if (!structure.scaled) {
    throw std::invalid_argument("ModelSpec: structure must be scaled");
  }
  if (basis.cols() != structure.R.rows()) {
    throw std::invalid_argument("ModelSpec: basis columns != structure size");
  }
  if (!(hyper_a > 0.0) || !(hyper_b > 0.0) || !(tau_alpha > 0.0)) {
    throw std::invalid_argument("ModelSpec: hyperparameters must be positive");
  }
}

namespace {

Eigen::SparseMatrix<double> conditional_precision(
    const Eigen::SparseMatrix<double>& btb,
    const Eigen::SparseMatrix<double>& structure, double tau_beta,
    double tau_eps) {
  Eigen::SparseMatrix<double> Q = tau_eps * btb + tau_beta * structure;
  Q.makeCompressed();
  return Q;
}

}  // namespace

std::pair<Eigen::SparseMatrix<double>, Eigen::VectorXd> full_conditional_beta(
    const Eigen::VectorXd& y, double alpha, double tau_beta, double tau_eps,
    const ModelSpec& spec) {
  spec.validate();
  if (!(tau_beta > 0.0) || !(tau_eps > 0.0)) {
    throw std::invalid_argument("full_conditional_beta: precisions must be positive");
  }
  const Eigen::SparseMatrix<double> btb =
      (spec.basis.transpose() * spec.basis).pruned(0.0);
  const Eigen::SparseMatrix<double> structure(spec.structure.R);
  Eigen::VectorXd info =
      tau_eps * (spec.basis.transpose() * (y.array() - alpha).matrix());
  return {conditional_precision(btb, structure, tau_beta, tau_eps),
          std::move(info)};
}

std::pair<double, double> full_conditional_alpha(const Eigen::VectorXd& y,
                                                 const Eigen::VectorXd& beta,
                                                 double tau_eps,
                                                 const ModelSpec& spec) {
  if (!(tau_eps > 0.0)) {
    throw std::invalid_argument("full_conditional_alpha: tau_eps must be positive");
  }
  const double n = static_cast<double>(y.size());
  const double variance = 1.0 / (spec.tau_alpha + n * tau_eps);
  const double residual_sum = (y - spec.basis * beta).sum();
  return {variance * tau_eps * residual_sum, variance};
}

std::pair<double, double> full_conditional_tau_beta(const Eigen::VectorXd& beta,
                                                    const ModelSpec& spec) {
  const double rank = static_cast<double>(spec.K() - 1);
  const double quad = beta.dot(spec.structure.R * beta);
  return {spec.hyper_a + 0.5 * rank, spec.hyper_b + 0.5 * quad};
}

std::pair<double, double> full_conditional_tau_eps(const Eigen::VectorXd& y,
                                                   double alpha,
                                                   const Eigen::VectorXd& beta,
                                                   const ModelSpec& spec) {
  const Eigen::VectorXd residual =
      y - Eigen::VectorXd::Constant(y.size(), alpha) - spec.basis * beta;
  return {spec.hyper_a + 0.5 * static_cast<double>(y.size()),
          spec.hyper_b + 0.5 * residual.squaredNorm()};
}

PosteriorSamples gibbs_fit(const Observations& obs, const ModelSpec& spec,
                           const FitOptions& options) {
  spec.validate();
  const Eigen::VectorXd& y = obs.value;
  if (y.size() == 0) {
    throw std::invalid_argument("gibbs_fit: no observations after dropping missing values");
  }
  if (y.size() != spec.n()) {
    throw std::invalid_argument("gibbs_fit: observation count != basis rows");
  }
  if (options.draws < 1) {
    throw std::invalid_argument("gibbs_fit: draws must be >= 1");
  }
  if (options.burnin < 0 || options.thin < 1) {
    throw std::invalid_argument("gibbs_fit: invalid burnin/thin");
  }

  const Eigen::Index n = spec.n();
  const Eigen::Index K = spec.K();

  // Quantities with fixed values or a fixed sparsity pattern across the run.
  const Eigen::SparseMatrix<double> btb =
      (spec.basis.transpose() * spec.basis).pruned(0.0);
  const Eigen::SparseMatrix<double> structure(spec.structure.R);
  const Eigen::VectorXd a = spec.basis.transpose() * Eigen::VectorXd::Ones(n);
  const double constraint_tol = 1e-6 * static_cast<double>(n);

  Rng rng(options.seed);

  // Deterministic start: alpha at the data mean, flat field, unit smoothing
  // precision, noise precision from the data variance.
  double alpha = y.mean();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(K);
  double tau_beta = 1.0;
  const double var_y = (y.array() - alpha).square().sum() /
                       std::max<double>(1.0, static_cast<double>(n - 1));
  double tau_eps = var_y > 0.0 ? 1.0 / var_y : 1.0;

  SparseFactor factor(
      conditional_precision(btb, structure, tau_beta, tau_eps));

  PosteriorSamples out;
  out.alpha.resize(options.draws);
  out.tau_beta.resize(options.draws);
  out.tau_eps.resize(options.draws);
  out.beta.resize(options.draws, K);
  out.meta.nu = spec.basis_config.grid_level;
  out.meta.degree = spec.basis_config.degree;
  out.meta.normalize_rows = spec.basis_config.normalize_rows;
  out.meta.kappa = spec.structure.kappa;
  out.meta.seed = options.seed;
  out.meta.burnin = options.burnin;
  out.meta.thin = options.thin;
  out.meta.hyper_a = spec.hyper_a;
  out.meta.hyper_b = spec.hyper_b;
  out.meta.tau_alpha = spec.tau_alpha;
  out.meta.n_obs = n;

  const int total = options.burnin + options.draws * options.thin;
  int stored = 0;
  for (int iter = 0; iter < total; ++iter) {
    // alpha | rest
    {
      const auto [mean, variance] = full_conditional_alpha(y, beta, tau_eps, spec);
      alpha = mean + std::sqrt(variance) * rng.normal();
    }
    // beta | rest: unconstrained GMRF draw, then conditioning by kriging
    {
      Eigen::VectorXd info =
          tau_eps * (spec.basis.transpose() * (y.array() - alpha).matrix());
      factor.refactorize(
          conditional_precision(btb, structure, tau_beta, tau_eps));
      const Eigen::VectorXd unconstrained = sample_gaussian(info, factor, rng);
      beta = constrain(unconstrained, a, factor);
      const double residual = std::fabs(a.dot(beta));
      if (!(residual <= constraint_tol)) {
        throw std::runtime_error("gibbs_fit: constraint residual " +
                                 std::to_string(residual) + " at iteration " +
                                 std::to_string(iter));
      }
    }
    // tau_beta | beta
    {
      const auto [shape, rate] = full_conditional_tau_beta(beta, spec);
      tau_beta = rng.gamma(shape, rate);
    }
    // tau_eps | rest
    {
      const auto [shape, rate] = full_conditional_tau_eps(y, alpha, beta, spec);
      tau_eps = rng.gamma(shape, rate);
    }

    if (!std::isfinite(alpha) || !std::isfinite(tau_beta) ||
        !std::isfinite(tau_eps) || !beta.allFinite()) {
      throw std::runtime_error("gibbs_fit: non-finite draw at iteration " +
                               std::to_string(iter));
    }

    const int past_burnin = iter - options.burnin;
    if (past_burnin >= 0 && (past_burnin + 1) % options.thin == 0) {
      out.alpha[stored] = alpha;
      out.tau_beta[stored] = tau_beta;
      out.tau_eps[stored] = tau_eps;
      out.beta.row(stored) = beta;
      ++stored;
    }
  }
  return out;
}

namespace {

ScalarSummary summarize_draws(Eigen::VectorXd draws) {
  ScalarSummary s;
  s.mean = draws.mean();
  std::sort(draws.data(), draws.data() + draws.size());
  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(draws.size() - 1);
    const auto lo = static_cast<Eigen::Index>(std::floor(h));
    const auto hi = std::min(lo + 1, draws.size() - 1);
    return draws[lo] + (h - static_cast<double>(lo)) * (draws[hi] - draws[lo]);
  };
  s.q025 = quantile(0.025);
  s.q975 = quantile(0.975);
  return s;
}

}  // namespace

FitSummary summarize(const PosteriorSamples& samples) {
  FitSummary summary;
  summary.alpha = summarize_draws(samples.alpha);
  summary.tau_beta = summarize_draws(samples.tau_beta);
  summary.tau_eps = summarize_draws(samples.tau_eps);
  summary.noise_sd = summarize_draws(samples.tau_eps.cwiseSqrt().cwiseInverse());
  summary.beta.reserve(samples.coefficient_count());
  for (Eigen::Index k = 0; k < samples.coefficient_count(); ++k) {
    summary.beta.push_back(summarize_draws(samples.beta.col(k)));
  }
  return summary;
}

}  // namespace geops
