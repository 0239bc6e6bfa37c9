#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "geops/triangle_mesh.hpp"

namespace geops {

/**
 * Result of locating a sphere point in the grid: the base icosahedron face,
 * the level-nu subtriangle within it (subtriangles of base face f occupy the
 * contiguous global face range [f*4^nu, (f+1)*4^nu)), the three knot indices
 * spanning that subtriangle, and the barycentric coordinates of the
 * gnomonically projected point within it. Barycentric components in
 * [-1e-12, 0) are clamped to zero and the triple renormalized to sum to 1.
 */
struct TriangleLocation {
  int base_face = 0;
  int subtriangle = 0;
  std::array<int, 3> vertex_ids{};
  std::array<double, 3> barycentric{};
};

/**
 * Geodesic discrete global grid: paired icomesh/icosphere at level nu, knot
 * adjacency, and the per-level edge-midpoint maps needed to descend the
 * subdivision hierarchy during point location. Immutable once built and safe
 * to share across threads; locate() is pure.
 */
class GeodesicGrid {
 public:
  explicit GeodesicGrid(int level, int vertex_budget = kDefaultVertexBudget);

  int level() const { return level_; }
  int knot_count() const { return icosphere_.vertex_count(); }
  /// Subtriangles per base face at the grid level (4^nu).
  int subtriangles_per_face() const { return subdivisions_per_face_; }

  const TriangleMesh& icomesh() const { return icomesh_; }
  const TriangleMesh& icosphere() const { return icosphere_; }
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }

  /// Global icomesh/icosphere face index of a located subtriangle.
  int global_face(int base_face, int subtriangle) const {
    return base_face * subdivisions_per_face_ + subtriangle;
  }

  /// Latitude/longitude (degrees) of a knot on the icosphere.
  Eigen::Vector2d knot_lat_lon(int knot) const;

  /**
   * Locate a unit vector in the grid. The point is projected gnomonically
   * (rays through the sphere centre) onto the plane of each candidate base
   * face; the face whose planar triangle contains the projection wins, ties
   * on shared edges going to the lowest face index. The containing level-nu
   * subtriangle is then found by descending the four-way split hierarchy,
   * lowest child index first.
   *
   * Throws std::invalid_argument unless | ||point|| - 1 | <= 1e-9.
   */
  TriangleLocation locate(const Vec3& point) const;

 private:
  struct FaceFrame {
    Vec3 origin;       // base corner A
    Vec3 e1, e2;       // orthonormal in-plane axes
    Vec3 normal;       // unit plane normal
    double plane_d;    // normal . A  (> 0: plane faces away from origin)
  };

  Eigen::Vector2d to_plane(int face, const Vec3& p) const {
    const Vec3 d = p - frames_[face].origin;
    return {d.dot(frames_[face].e1), d.dot(frames_[face].e2)};
  }

  int level_;
  int subdivisions_per_face_;
  TriangleMesh base_;
  TriangleMesh icomesh_;
  TriangleMesh icosphere_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<EdgeMidpointMap> midpoints_;  // one map per level 0..nu-1
  std::array<FaceFrame, 20> frames_;
};

/// (b1,b2,b3) of a 2D point within triangle (v1,v2,v3); reconstruction
/// b1*v1+b2*v2+b3*v3 = v and b1+b2+b3 = 1 hold to 1e-12.
/// Throws std::invalid_argument when the triangle is degenerate.
std::array<double, 3> barycentric(const Eigen::Vector2d& v,
                                  const Eigen::Vector2d& v1,
                                  const Eigen::Vector2d& v2,
                                  const Eigen::Vector2d& v3);

/// Unit sphere vector from geographic coordinates in degrees.
Vec3 lat_lon_to_unit(double lat_deg, double lon_deg);

/// Geographic coordinates (degrees) of a 3-vector; longitude in [-180,180].
Eigen::Vector2d unit_to_lat_lon(const Vec3& v);

}  // namespace geops
