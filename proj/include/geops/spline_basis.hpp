#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "geops/geodesic_grid.hpp"

namespace geops {

/// Sparse matrices are kept in compressed-row form: per row an ascending
/// run of (column, value) pairs. Basis matrices B are n x K with three
/// structural non-zeros per row; structure matrices R are symmetric K x K.
using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct BasisConfig {
  int degree = 3;              // B-spline degree, one of {1,2,3}
  bool normalize_rows = true;  // divide each row by its sum
  int grid_level = 5;          // nu of the grid the basis lives on

  void validate() const;
};

/**
 * Non-zero basis values at the three surrounding knots, as polynomials in
 * the barycentric coordinates:
 *   d=1: b           d=2: b^2 + b        d=3: b^3 + b^2 + b
 * Raw values; at a vertex the cubic entry is 3, so rows are normalized
 * downstream when a partition of unity is wanted.
 */
std::array<double, 3> bernstein_entries(const std::array<double, 3>& bary,
                                        int degree);

/// One basis row: exactly three structural entries at the located
/// triangle's knots, in ascending column order.
struct BasisRow {
  std::array<int, 3> cols{};
  std::array<double, 3> values{};
};

BasisRow basis_row(const Vec3& point, const GeodesicGrid& grid,
                   const BasisConfig& cfg);

/**
 * Assemble the n x K basis matrix for geographic locations (degrees).
 * Latitudes outside [-90,90] or longitudes outside [-180,180] are rejected
 * with the offending row index. nnz is exactly 3n.
 */
SparseMat assemble_basis(const std::vector<double>& lat_deg,
                         const std::vector<double>& lon_deg,
                         const GeodesicGrid& grid, const BasisConfig& cfg);

/// Text serialization: header "rows cols nnz", then one "row col value"
/// triple per line, row-major, 17 significant digits.
void write_sparse(std::ostream& os, const SparseMat& m);
void write_sparse_file(const std::string& path, const SparseMat& m);
SparseMat read_sparse(std::istream& is);

}  // namespace geops
