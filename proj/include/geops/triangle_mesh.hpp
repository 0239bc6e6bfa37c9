#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

namespace geops {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

/**
 * Triangular mesh with a subdivision level. Two flavours are used throughout:
 * the "icomesh" keeps midpoint vertices on the flat faces of the base
 * icosahedron, so each base face carries a planar, regularly subdivided
 * triangle; the "icosphere" is the icomesh with every vertex pushed onto the
 * unit sphere.
 */
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  int level = 0;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }
  /// Unique undirected edge count.
  int edge_count() const;
};

/// Midpoint vertex indices created by one split pass, keyed by the parent
/// edge (min,max) packed into a 64-bit integer.
using EdgeMidpointMap = std::unordered_map<std::uint64_t, int>;

inline std::uint64_t edge_key(int a, int b) {
  const std::uint64_t lo = static_cast<std::uint32_t>(a < b ? a : b);
  const std::uint64_t hi = static_cast<std::uint32_t>(a < b ? b : a);
  return (hi << 32) | lo;
}

/// Children of a face split at its edge midpoints, in the index order shared
/// by subdivision and point location: corner 0, corner 1, corner 2, centre.
inline std::array<Face, 4> split_face(const Face& f, int m01, int m12, int m20) {
  return {Face{f[0], m01, m20}, Face{f[1], m12, m01}, Face{f[2], m20, m12},
          Face{m01, m12, m20}};
}

/// Default cap on subdivision size; admits levels up to 8 (10*4^8+2 vertices).
inline constexpr int kDefaultVertexBudget = 10 * 65536 + 2;

/**
 * Regular icosahedron inscribed in the unit sphere. One vertex sits at
 * exactly (0,0,1); the azimuth is fixed so that one of the pole's
 * neighbours lies in the x-z plane at longitude 0.
 */
TriangleMesh build_icosahedron();

/**
 * Split every face in four, `iterations` times, inserting edge midpoints as
 * plain coordinate averages (no renormalization). Midpoints on shared edges
 * are deduplicated by parent index pair, never by coordinate hashing.
 *
 * If `trace` is non-null, the per-level midpoint maps are appended to it so
 * point location can later replay the same descent.
 *
 * Throws std::length_error if the result would exceed `vertex_budget`.
 */
TriangleMesh subdivide(const TriangleMesh& mesh, int iterations,
                       std::vector<EdgeMidpointMap>* trace = nullptr,
                       int vertex_budget = kDefaultVertexBudget);

/// Radial projection of every vertex onto the unit sphere; faces unchanged.
/// Throws std::runtime_error on a zero-norm vertex.
TriangleMesh normalize_to_sphere(const TriangleMesh& icomesh);

/// Sorted neighbour lists derived from the face list.
std::vector<std::vector<int>> vertex_adjacency(const TriangleMesh& mesh);

/// Histogram of vertex degrees (degree -> count).
std::map<int, int> degree_histogram(const TriangleMesh& mesh);

}  // namespace geops
