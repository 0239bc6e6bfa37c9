#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <memory>

#include "geops/rng.hpp"
#include "geops/spline_basis.hpp"

namespace geops {

/**
 * Sparse LDL^T factorization of a symmetric positive-definite precision
 * matrix behind an approximate-minimum-degree ordering. The ordering and
 * symbolic analysis are computed once; refactorize() reuses them for a new
 * matrix with the same sparsity pattern, which is what the Gibbs loop does
 * every iteration. Immutable from the caller's point of view after each
 * (re)factorization and shareable across threads for solves.
 */
class SparseFactor {
 public:
  /// Factorize Q (lower triangle is referenced; Q is assumed symmetric).
  /// Throws std::runtime_error naming the first non-positive pivot when Q
  /// is not numerically positive-definite.
  explicit SparseFactor(const Eigen::SparseMatrix<double>& Q);
  explicit SparseFactor(const SparseMat& Q)
      : SparseFactor(Eigen::SparseMatrix<double>(Q)) {}

  /// New numerical values on the pattern analyzed at construction.
  void refactorize(const Eigen::SparseMatrix<double>& Q);

  Eigen::Index dim() const { return dim_; }
  double min_pivot() const;

  /// x = Q^{-1} b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  friend Eigen::VectorXd sample_gaussian(const Eigen::VectorXd&,
                                         const SparseFactor&, Rng&);
  using Solver = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;

  void check_pivots() const;

  Eigen::Index dim_ = 0;
  std::unique_ptr<Solver> solver_;
};

inline SparseFactor factorize(const SparseMat& Q) { return SparseFactor(Q); }

/**
 * Exact draw from N(Q^{-1} b, Q^{-1}) given the factor of Q: the mean is a
 * solve, the fluctuation a back-substitution of scaled standard normals.
 * Consumes exactly dim() normal variates from the stream.
 */
Eigen::VectorXd sample_gaussian(const Eigen::VectorXd& b,
                                const SparseFactor& factor, Rng& rng);

/**
 * Conditioning by kriging for a single linear constraint: returns
 *   x* = x - Q^{-1} a (a' Q^{-1} a)^{-1} (a' x),
 * the conditional law of x given a'x = 0. Throws std::runtime_error when
 * a' Q^{-1} a is not positive.
 */
Eigen::VectorXd constrain(const Eigen::VectorXd& x, const Eigen::VectorXd& a,
                          const SparseFactor& factor);

}  // namespace geops
