#include "geops/spline_basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace geops {

void BasisConfig::validate() const {
  if (degree < 1 || degree > 3) {
    throw std::invalid_argument("BasisConfig: degree must be 1, 2 or 3");
  }
  if (grid_level < 1) {
    throw std::invalid_argument("BasisConfig: grid_level must be >= 1");
  }
}

std::array<double, 3> bernstein_entries(const std::array<double, 3>& bary,
                                        int degree) {
  std::array<double, 3> e{};
  switch (degree) {
    case 1:
      e = bary;
      break;
    case 2:
      for (int i = 0; i < 3; ++i) e[i] = bary[i] * bary[i] + bary[i];
      break;
    case 3:
      for (int i = 0; i < 3; ++i) {
        const double b = bary[i];
        e[i] = b * b * b + b * b + b;
      }
      break;
    default:
      throw std::invalid_argument("bernstein_entries: degree must be 1, 2 or 3");
  }
  return e;
}

BasisRow basis_row(const Vec3& point, const GeodesicGrid& grid,
                   const BasisConfig& cfg) {
  cfg.validate();
  if (grid.level() != cfg.grid_level) {
    throw std::invalid_argument("basis_row: grid level does not match config");
  }
  const TriangleLocation loc = grid.locate(point);
  std::array<double, 3> values = bernstein_entries(loc.barycentric, cfg.degree);
  if (cfg.normalize_rows) {
    const double sum = values[0] + values[1] + values[2];
    for (double& v : values) v /= sum;
  }

  BasisRow row;
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return loc.vertex_ids[a] < loc.vertex_ids[b];
  });
  for (int i = 0; i < 3; ++i) {
    row.cols[i] = loc.vertex_ids[order[i]];
    row.values[i] = values[order[i]];
  }
  return row;
}

SparseMat assemble_basis(const std::vector<double>& lat_deg,
                         const std::vector<double>& lon_deg,
                         const GeodesicGrid& grid, const BasisConfig& cfg) {
  cfg.validate();
  if (lat_deg.size() != lon_deg.size()) {
    throw std::invalid_argument("assemble_basis: lat/lon length mismatch");
  }
  const auto n = static_cast<Eigen::Index>(lat_deg.size());
  SparseMat basis(n, grid.knot_count());
  basis.reserve(Eigen::VectorXi::Constant(n, 3));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lat_deg[i] >= -90.0 && lat_deg[i] <= 90.0) ||
        !(lon_deg[i] >= -180.0 && lon_deg[i] <= 180.0)) {
      throw std::invalid_argument("assemble_basis: coordinates out of range at row " +
                                  std::to_string(i));
    }
    const BasisRow row =
        basis_row(lat_lon_to_unit(lat_deg[i], lon_deg[i]), grid, cfg);
    for (int k = 0; k < 3; ++k) {
      basis.insert(i, row.cols[k]) = row.values[k];
    }
  }
  basis.makeCompressed();
  return basis;
}

void write_sparse(std::ostream& os, const SparseMat& m) {
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(m, r); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%.17g", it.value());
      os << it.row() << ' ' << it.col() << ' ' << buf << '\n';
    }
  }
}

void write_sparse_file(const std::string& path, const SparseMat& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_sparse_file: cannot open " + path);
  write_sparse(os, m);
}

SparseMat read_sparse(std::istream& is) {
  Eigen::Index rows = 0, cols = 0, nnz = 0;
  if (!(is >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
    throw std::runtime_error("read_sparse: malformed header");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nnz);
  for (Eigen::Index k = 0; k < nnz; ++k) {
    Eigen::Index r, c;
    double v;
    if (!(is >> r >> c >> v)) {
      throw std::runtime_error("read_sparse: truncated at entry " +
                               std::to_string(k));
    }
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw std::runtime_error("read_sparse: index out of range at entry " +
                               std::to_string(k));
    }
    triplets.emplace_back(r, c, v);
  }
  SparseMat m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace geops
