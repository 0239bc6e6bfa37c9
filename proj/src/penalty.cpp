#include "geops/penalty.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace geops {

std::string to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::GeodesicIcar: return "geodesic-icar";
    case StructureKind::PlanarNaive: return "planar-naive";
    case StructureKind::CircularLon: return "circular-lon";
  }
  return "unknown";
}

StructureMatrix icar_structure(const GeodesicGrid& grid) {
  const auto& adjacency = grid.adjacency();
  const auto K = static_cast<Eigen::Index>(adjacency.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(K) * 7);
  for (Eigen::Index i = 0; i < K; ++i) {
    triplets.emplace_back(i, i, static_cast<double>(adjacency[i].size()));
    for (int j : adjacency[i]) {
      triplets.emplace_back(i, j, -1.0);
    }
  }
  StructureMatrix s;
  s.R.resize(K, K);
  s.R.setFromTriplets(triplets.begin(), triplets.end());
  s.R.makeCompressed();
  s.kind = StructureKind::GeodesicIcar;
  return s;
}

namespace {

// First-order random-walk structure on a path (or cycle) of n knots.
std::vector<Eigen::Triplet<double>> rw1_structure(int n, bool circular) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    double degree = 2.0;
    if (!circular && (i == 0 || i == n - 1)) degree = 1.0;
    t.emplace_back(i, i, degree);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0);
      t.emplace_back(i + 1, i, -1.0);
    }
  }
  if (circular) {
    t.emplace_back(0, n - 1, -1.0);
    t.emplace_back(n - 1, 0, -1.0);
  }
  return t;
}

}  // namespace

StructureMatrix planar_structure(int lat_knots, int lon_knots,
                                 bool circular_longitude) {
  if (lat_knots < 3 || lon_knots < 3) {
    throw std::invalid_argument("planar_structure: grid dimensions must be >= 3");
  }
  const auto lat = rw1_structure(lat_knots, false);
  const auto lon = rw1_structure(lon_knots, circular_longitude);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(lat.size() * lon_knots + lon.size() * lat_knots);
  // I_L (x) R_lon
  for (int l = 0; l < lat_knots; ++l) {
    for (const auto& e : lon) {
      triplets.emplace_back(l * lon_knots + e.row(), l * lon_knots + e.col(),
                            e.value());
    }
  }
  // R_lat (x) I_Q
  for (const auto& e : lat) {
    for (int q = 0; q < lon_knots; ++q) {
      triplets.emplace_back(e.row() * lon_knots + q, e.col() * lon_knots + q,
                            e.value());
    }
  }
  StructureMatrix s;
  s.R.resize(static_cast<Eigen::Index>(lat_knots) * lon_knots,
             static_cast<Eigen::Index>(lat_knots) * lon_knots);
  s.R.setFromTriplets(triplets.begin(), triplets.end());
  s.R.makeCompressed();
  s.kind = circular_longitude ? StructureKind::CircularLon
                              : StructureKind::PlanarNaive;
  return s;
}

namespace {

Eigen::VectorXd pseudo_inverse_diag_dense(const SparseMat& R) {
  const Eigen::MatrixXd dense(R);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("marginal_variance_diag: eigendecomposition failed");
  }
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double tol = 1e-8 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  int null_count = 0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (std::fabs(lambda[k]) <= tol) ++null_count;
  }
  if (null_count != 1) {
    throw std::runtime_error(
        "marginal_variance_diag: expected rank deficiency 1, found " +
        std::to_string(null_count) + " null eigenvalues");
  }
  const Eigen::MatrixXd& V = es.eigenvectors();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(R.rows());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (std::fabs(lambda[k]) <= tol) continue;
    diag.noalias() += V.col(k).cwiseAbs2() / lambda[k];
  }
  return diag;
}

/**
 * Sparse route: fix the last coefficient at zero, factorize the leading
 * (K-1)x(K-1) block, read off diag of its inverse by triangular solves
 * restricted to elimination-tree paths, then project onto the sum-to-zero
 * subspace.
 */
Eigen::VectorXd pseudo_inverse_diag_sparse(const SparseMat& R) {
  const Eigen::Index K = R.rows();
  const Eigen::Index n = K - 1;
  Eigen::SparseMatrix<double> block =
      Eigen::SparseMatrix<double>(R).topLeftCorner(n, n);
  block.makeCompressed();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(block);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error(
        "marginal_variance_diag: leading block factorization failed "
        "(unexpected rank deficiency)");
  }
  const Eigen::VectorXd D = solver.vectorD();
  if (D.minCoeff() <= 1e-10 * D.maxCoeff()) {
    throw std::runtime_error(
        "marginal_variance_diag: near-zero pivot in leading block "
        "(unexpected rank deficiency)");
  }

  // Materialized unit-lower factor and its elimination tree.
  const Eigen::SparseMatrix<double> L = solver.matrixL();
  std::vector<int> parent(n, -1);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(L, j); it; ++it) {
      if (it.row() > j) {
        parent[j] = static_cast<int>(it.row());
        break;  // rows are ascending; first strict-lower entry is the parent
      }
    }
  }

  // Row position of P e_i: probe the permutation once.
  Eigen::VectorXd ramp(n);
  for (Eigen::Index i = 0; i < n; ++i) ramp[i] = static_cast<double>(i);
  const Eigen::VectorXd shuffled = solver.permutationP() * ramp;
  std::vector<int> position(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    position[static_cast<int>(shuffled[j])] = static_cast<int>(j);
  }

  // S_ii = e_i' R11^{-1} e_i = z' D^{-1} z with L z = P e_i; z is supported
  // on the elimination-tree path of position[i], and every update from a
  // path column lands on an ancestor, so the solve never leaves the path.
  Eigen::VectorXd work = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd block_diag(n);
  std::vector<int> path;
  for (Eigen::Index i = 0; i < n; ++i) {
    path.clear();
    for (int j = position[i]; j != -1; j = parent[j]) path.push_back(j);
    work[position[i]] = 1.0;
    double acc = 0.0;
    for (int j : path) {
      const double xj = work[j];
      if (xj == 0.0) continue;
      acc += xj * xj / D[j];
      for (Eigen::SparseMatrix<double>::InnerIterator it(L, j); it; ++it) {
        if (it.row() > j) work[it.row()] -= it.value() * xj;
      }
    }
    block_diag[i] = acc;
    for (int j : path) work[j] = 0.0;
  }

  // Projection correction onto the sum-to-zero subspace.
  const Eigen::VectorXd block_row_sums = solver.solve(Eigen::VectorXd::Ones(n));
  const double total = block_row_sums.sum();
  const double kd = static_cast<double>(K);
  Eigen::VectorXd diag(K);
  for (Eigen::Index i = 0; i < n; ++i) {
    diag[i] = block_diag[i] - 2.0 * block_row_sums[i] / kd + total / (kd * kd);
  }
  diag[n] = total / (kd * kd);
  return diag;
}

}  // namespace

Eigen::VectorXd marginal_variance_diag(const StructureMatrix& structure,
                                       int dense_threshold) {
  const Eigen::Index K = structure.R.rows();
  if (K < 2) {
    throw std::invalid_argument("marginal_variance_diag: structure too small");
  }
  Eigen::VectorXd diag = (K <= dense_threshold)
                             ? pseudo_inverse_diag_dense(structure.R)
                             : pseudo_inverse_diag_sparse(structure.R);
  if (diag.minCoeff() <= 0.0) {
    throw std::runtime_error(
        "marginal_variance_diag: non-positive marginal variance");
  }
  return diag;
}

StructureMatrix scale_structure(const StructureMatrix& structure,
                                int dense_threshold) {
  const Eigen::VectorXd diag = marginal_variance_diag(structure, dense_threshold);
  const double kappa = std::exp(diag.array().log().mean());
  StructureMatrix scaled;
  scaled.R = structure.R * kappa;
  scaled.R.makeCompressed();
  scaled.kind = structure.kind;
  scaled.scaled = true;
  scaled.kappa = structure.kappa * kappa;
  return scaled;
}

}  // namespace geops
