#include "geops/geodesic_grid.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace geops {

namespace {
constexpr double kBaryClamp = 1e-12;

// Clamp tiny negative components to 0 and renormalize to sum 1.
std::array<double, 3> clamp_barycentric(std::array<double, 3> b) {
  double sum = 0.0;
  for (double& c : b) {
    if (c < 0.0 && c >= -kBaryClamp) c = 0.0;
    sum += c;
  }
  for (double& c : b) c /= sum;
  return b;
}
}  // namespace

std::array<double, 3> barycentric(const Eigen::Vector2d& v,
                                  const Eigen::Vector2d& v1,
                                  const Eigen::Vector2d& v2,
                                  const Eigen::Vector2d& v3) {
  const Eigen::Vector2d d1 = v1 - v3;
  const Eigen::Vector2d d2 = v2 - v3;
  const double det = d1.x() * d2.y() - d2.x() * d1.y();
  if (std::fabs(det) <= 2e-14) {  // det = twice the signed area
    throw std::invalid_argument("barycentric: degenerate triangle");
  }
  const Eigen::Vector2d dv = v - v3;
  const double b1 = (dv.x() * d2.y() - d2.x() * dv.y()) / det;
  const double b2 = (d1.x() * dv.y() - dv.x() * d1.y()) / det;
  return {b1, b2, 1.0 - b1 - b2};
}

Vec3 lat_lon_to_unit(double lat_deg, double lon_deg) {
  const double lat = lat_deg * M_PI / 180.0;
  const double lon = lon_deg * M_PI / 180.0;
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
          std::sin(lat)};
}

Eigen::Vector2d unit_to_lat_lon(const Vec3& v) {
  const double lat = std::atan2(v.z(), std::hypot(v.x(), v.y()));
  const double lon = std::atan2(v.y(), v.x());
  return {lat * 180.0 / M_PI, lon * 180.0 / M_PI};
}

GeodesicGrid::GeodesicGrid(int level, int vertex_budget) : level_(level) {
  if (level < 0) {
    throw std::invalid_argument("GeodesicGrid: level must be >= 0");
  }
  subdivisions_per_face_ = 1;
  for (int i = 0; i < level; ++i) subdivisions_per_face_ *= 4;

  base_ = build_icosahedron();
  icomesh_ = subdivide(base_, level, &midpoints_, vertex_budget);
  icosphere_ = normalize_to_sphere(icomesh_);
  adjacency_ = vertex_adjacency(icosphere_);

  for (int f = 0; f < 20; ++f) {
    const Face& face = base_.faces[f];
    const Vec3& a = base_.vertices[face[0]];
    const Vec3& b = base_.vertices[face[1]];
    const Vec3& c = base_.vertices[face[2]];
    FaceFrame frame;
    frame.origin = a;
    frame.e1 = (b - a).normalized();
    const Vec3 ac = c - a;
    frame.e2 = (ac - ac.dot(frame.e1) * frame.e1).normalized();
    frame.normal = (b - a).cross(c - a).normalized();
    frame.plane_d = frame.normal.dot(a);
    frames_[f] = frame;
  }
}

Eigen::Vector2d GeodesicGrid::knot_lat_lon(int knot) const {
  return unit_to_lat_lon(icosphere_.vertices[knot]);
}

TriangleLocation GeodesicGrid::locate(const Vec3& point) const {
  if (std::fabs(point.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("locate: point must be a unit vector");
  }

  // Base face: gnomonic projection onto each candidate face plane, accept
  // the lowest-index face containing the projection. The argmax of the
  // minimum barycentric component is kept as a fallback for points that
  // graze an edge beyond the clamp tolerance.
  int face = -1;
  Eigen::Vector2d planar;
  int best_face = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  Eigen::Vector2d best_planar;
  for (int f = 0; f < 20; ++f) {
    const FaceFrame& fr = frames_[f];
    const double np = fr.normal.dot(point);
    if (np <= 1e-12) continue;  // back hemisphere of this face
    const Vec3 projected = (fr.plane_d / np) * point;
    const Eigen::Vector2d u = to_plane(f, projected);
    const Face& corners = base_.faces[f];
    const auto b = barycentric(u, to_plane(f, base_.vertices[corners[0]]),
                               to_plane(f, base_.vertices[corners[1]]),
                               to_plane(f, base_.vertices[corners[2]]));
    const double mn = std::min({b[0], b[1], b[2]});
    if (mn >= -kBaryClamp) {
      face = f;
      planar = u;
      break;
    }
    if (mn > best_min) {
      best_min = mn;
      best_face = f;
      best_planar = u;
    }
  }
  if (face < 0) {
    face = best_face;
    planar = best_planar;
  }

  // Descend the four-way split hierarchy on the planar base triangle.
  Face tri = base_.faces[face];
  int sub = 0;
  for (int lev = 0; lev < level_; ++lev) {
    const EdgeMidpointMap& mids = midpoints_[lev];
    const int m01 = mids.at(edge_key(tri[0], tri[1]));
    const int m12 = mids.at(edge_key(tri[1], tri[2]));
    const int m20 = mids.at(edge_key(tri[2], tri[0]));
    const auto children = split_face(tri, m01, m12, m20);

    int pick = -1;
    double pick_min = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < 4; ++c) {
      const Face& child = children[c];
      const auto b = barycentric(planar, to_plane(face, icomesh_.vertices[child[0]]),
                                 to_plane(face, icomesh_.vertices[child[1]]),
                                 to_plane(face, icomesh_.vertices[child[2]]));
      const double mn = std::min({b[0], b[1], b[2]});
      if (mn >= -kBaryClamp) {
        pick = c;
        break;
      }
      if (mn > pick_min) {
        pick_min = mn;
        pick = c;
      }
    }
    tri = children[pick];
    sub = sub * 4 + pick;
  }

  const auto b = barycentric(planar, to_plane(face, icomesh_.vertices[tri[0]]),
                             to_plane(face, icomesh_.vertices[tri[1]]),
                             to_plane(face, icomesh_.vertices[tri[2]]));
  TriangleLocation loc;
  loc.base_face = face;
  loc.subtriangle = sub;
  loc.vertex_ids = {tri[0], tri[1], tri[2]};
  loc.barycentric = clamp_barycentric(b);
  return loc;
}

}  // namespace geops
