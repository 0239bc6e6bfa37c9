#include "geops/gmrf_sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace geops {

SparseFactor::SparseFactor(const Eigen::SparseMatrix<double>& Q)
    : dim_(Q.rows()), solver_(std::make_unique<Solver>()) {
  if (Q.rows() != Q.cols()) {
    throw std::invalid_argument("factorize: matrix must be square");
  }
  solver_->analyzePattern(Q);
  solver_->factorize(Q);
  check_pivots();
}

void SparseFactor::refactorize(const Eigen::SparseMatrix<double>& Q) {
  if (Q.rows() != dim_) {
    throw std::invalid_argument("refactorize: dimension changed");
  }
  solver_->factorize(Q);
  check_pivots();
}

void SparseFactor::check_pivots() const {
  // Scan the pivots before consulting info(): Eigen stops at an exact zero
  // pivot and the break position is the first offending index.
  const Eigen::VectorXd& D = solver_->vectorD();
  for (Eigen::Index k = 0; k < D.size(); ++k) {
    if (!(D[k] > 0.0) || !std::isfinite(D[k])) {
      // Map the elimination position back to the original index by probing
      // the permutation with a ramp vector.
      Eigen::VectorXd ramp(D.size());
      for (Eigen::Index i = 0; i < ramp.size(); ++i) ramp[i] = double(i);
      const Eigen::VectorXd shuffled = solver_->permutationP() * ramp;
      const auto original = static_cast<Eigen::Index>(shuffled[k]);
      throw std::runtime_error(
          "factorize: non-positive pivot " + std::to_string(D[k]) +
          " at index " + std::to_string(original) +
          " (matrix is not positive-definite: semi-definite or asymmetric "
          "input?)");
    }
  }
  if (solver_->info() != Eigen::Success) {
    throw std::runtime_error("factorize: sparse factorization failed");
  }
}

double SparseFactor::min_pivot() const { return solver_->vectorD().minCoeff(); }

Eigen::VectorXd SparseFactor::solve(const Eigen::VectorXd& b) const {
  return solver_->solve(b);
}

Eigen::VectorXd sample_gaussian(const Eigen::VectorXd& b,
                                const SparseFactor& factor, Rng& rng) {
  if (b.size() != factor.dim()) {
    throw std::invalid_argument("sample_gaussian: size mismatch");
  }
  const auto& solver = *factor.solver_;

  // mu = Q^{-1} b; fluctuation from z ~ N(0, I) via
  // x = mu + Pinv L^{-T} D^{-1/2} z, which has covariance Q^{-1}.
  Eigen::VectorXd x(factor.dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
  x.array() /= solver.vectorD().array().sqrt();
  solver.matrixU().solveInPlace(x);
  x = solver.permutationPinv() * x;
  if (!b.isZero(0.0)) {
    x += solver.solve(b);
  }
  return x;
}

Eigen::VectorXd constrain(const Eigen::VectorXd& x, const Eigen::VectorXd& a,
                          const SparseFactor& factor) {
  if (x.size() != factor.dim() || a.size() != factor.dim()) {
    throw std::invalid_argument("constrain: size mismatch");
  }
  if (a.isZero(0.0)) {
    throw std::invalid_argument("constrain: constraint vector is zero");
  }
  const Eigen::VectorXd qa = factor.solve(a);
  const double denom = a.dot(qa);
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw std::runtime_error("constrain: a' Q^{-1} a = " +
                             std::to_string(denom) + " is not positive");
  }
  return x - qa * (a.dot(x) / denom);
}

}  // namespace geops
