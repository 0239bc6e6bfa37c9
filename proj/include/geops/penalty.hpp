#pragma once

#include <Eigen/Core>
#include <string>

#include "geops/geodesic_grid.hpp"
#include "geops/spline_basis.hpp"

namespace geops {

enum class StructureKind { GeodesicIcar, PlanarNaive, CircularLon };

std::string to_string(StructureKind kind);

/**
 * Intrinsic GMRF structure matrix: symmetric, rows sum to zero, diagonal
 * equal to the vertex degree, -1 at neighbour pairs. Rank is K-1 with the
 * constant vector spanning the null space. `kappa` records the cumulative
 * scaling applied to the raw integer structure (1 while unscaled).
 */
struct StructureMatrix {
  SparseMat R;
  StructureKind kind = StructureKind::GeodesicIcar;
  bool scaled = false;
  double kappa = 1.0;

  Eigen::Index size() const { return R.rows(); }
};

/// ICAR structure on the grid adjacency; diagonal entries are 5 at the 12
/// icosahedron nodes and 6 elsewhere.
StructureMatrix icar_structure(const GeodesicGrid& grid);

/**
 * Kronecker-sum structure (I_L x R_lon) + (R_lat x I_Q) on an L x Q
 * latitude-longitude knot lattice, R_lat and R_lon being first-order
 * random-walk structures. With `circular_longitude` the longitudinal walk
 * closes into a cycle. Knot (l,q) maps to index l*Q + q.
 */
StructureMatrix planar_structure(int lat_knots, int lon_knots,
                                 bool circular_longitude);

/**
 * Diagonal of the generalized inverse of R under the sum-to-zero
 * identification (the Moore-Penrose pseudo-inverse of the rank K-1
 * structure). Up to `dense_threshold` unknowns this uses a dense
 * eigendecomposition; above it, a fix-one-coefficient generalized inverse
 * from a sparse factorization of the leading (K-1) x (K-1) block, corrected
 * to the projected pseudo-inverse diagonal
 *   diag(P S P)_i = S_ii - 2(S1)_i/K + (1'S1)/K^2 ,
 * with S_ii obtained by per-column triangular solves along the elimination
 * tree.
 *
 * Throws std::runtime_error on unexpected rank deficiency.
 */
Eigen::VectorXd marginal_variance_diag(const StructureMatrix& structure,
                                       int dense_threshold = 3000);

/// Scaled structure R* = kappa R with kappa the geometric mean of
/// diag(R^-), so that the scaled generalized-inverse diagonal has geometric
/// mean one.
StructureMatrix scale_structure(const StructureMatrix& structure,
                                int dense_threshold = 3000);

}  // namespace geops
