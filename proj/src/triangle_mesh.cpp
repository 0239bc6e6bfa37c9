#include "geops/triangle_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace geops {

int TriangleMesh::edge_count() const {
  std::unordered_set<std::uint64_t> edges;
  edges.reserve(faces.size() * 2);
  for (const Face& f : faces) {
    edges.insert(edge_key(f[0], f[1]));
    edges.insert(edge_key(f[1], f[2]));
    edges.insert(edge_key(f[2], f[0]));
  }
  return static_cast<int>(edges.size());
}

TriangleMesh build_icosahedron() {
  TriangleMesh mesh;
  mesh.level = 0;
  mesh.vertices.reserve(12);

  // Poles exact; two rings of five at z = +-1/sqrt(5), ring radius 2/sqrt(5).
  // Upper-ring vertex 1 sits at longitude 0, i.e. in the x-z plane.
  const double z = 1.0 / std::sqrt(5.0);
  const double r = 2.0 / std::sqrt(5.0);
  const double step = 2.0 * M_PI / 5.0;

  mesh.vertices.emplace_back(0.0, 0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const double lon = k * step;
    mesh.vertices.emplace_back(r * std::cos(lon), r * std::sin(lon), z);
  }
  for (int k = 0; k < 5; ++k) {
    const double lon = (k + 0.5) * step;
    mesh.vertices.emplace_back(r * std::cos(lon), r * std::sin(lon), -z);
  }
  mesh.vertices.emplace_back(0.0, 0.0, -1.0);

  mesh.faces.reserve(20);
  for (int k = 0; k < 5; ++k) {
    const int u0 = 1 + k, u1 = 1 + (k + 1) % 5;        // upper ring
    const int w0 = 6 + k, w1 = 6 + (k + 1) % 5;        // lower ring
    mesh.faces.push_back({0, u0, u1});                 // polar cap
    mesh.faces.push_back({u0, w0, u1});                // belt, apex up
    mesh.faces.push_back({w0, w1, u1});                // belt, apex down
    mesh.faces.push_back({11, w1, w0});                // antarctic cap
  }
  return mesh;
}

TriangleMesh subdivide(const TriangleMesh& mesh, int iterations,
                       std::vector<EdgeMidpointMap>* trace, int vertex_budget) {
  if (iterations < 0) {
    throw std::invalid_argument("subdivide: iterations must be >= 0");
  }
  TriangleMesh out = mesh;
  for (int it = 0; it < iterations; ++it) {
    const int projected = out.vertex_count() + out.edge_count();
    if (projected > vertex_budget) {
      throw std::length_error(
          "subdivide: level " + std::to_string(out.level + 1) + " needs " +
          std::to_string(projected) + " vertices, budget is " +
          std::to_string(vertex_budget));
    }
    EdgeMidpointMap midpoints;
    midpoints.reserve(out.faces.size() * 2);
    auto midpoint_index = [&](int a, int b) {
      const auto [pos, inserted] =
          midpoints.try_emplace(edge_key(a, b), out.vertex_count());
      if (inserted) {
        out.vertices.push_back(0.5 * (out.vertices[a] + out.vertices[b]));
      }
      return pos->second;
    };

    std::vector<Face> next;
    next.reserve(out.faces.size() * 4);
    for (const Face& f : out.faces) {
      const int m01 = midpoint_index(f[0], f[1]);
      const int m12 = midpoint_index(f[1], f[2]);
      const int m20 = midpoint_index(f[2], f[0]);
      for (const Face& child : split_face(f, m01, m12, m20)) {
        next.push_back(child);
      }
    }
    out.faces = std::move(next);
    out.level += 1;
    if (trace != nullptr) {
      trace->push_back(std::move(midpoints));
    }
  }
  return out;
}

TriangleMesh normalize_to_sphere(const TriangleMesh& icomesh) {
  TriangleMesh out = icomesh;
  for (std::size_t i = 0; i < out.vertices.size(); ++i) {
    const double n = out.vertices[i].norm();
    if (!(n > 1e-300)) {
      throw std::runtime_error("normalize_to_sphere: zero-norm vertex at index " +
                               std::to_string(i));
    }
    out.vertices[i] /= n;
  }
  return out;
}

std::vector<std::vector<int>> vertex_adjacency(const TriangleMesh& mesh) {
  std::vector<std::unordered_set<int>> sets(mesh.vertices.size());
  for (const Face& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      const int a = f[e], b = f[(e + 1) % 3];
      sets[a].insert(b);
      sets[b].insert(a);
    }
  }
  std::vector<std::vector<int>> adjacency(mesh.vertices.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    adjacency[i].assign(sets[i].begin(), sets[i].end());
    std::sort(adjacency[i].begin(), adjacency[i].end());
  }
  return adjacency;
}

std::map<int, int> degree_histogram(const TriangleMesh& mesh) {
  std::map<int, int> hist;
  for (const auto& nbrs : vertex_adjacency(mesh)) {
    hist[static_cast<int>(nbrs.size())] += 1;
  }
  return hist;
}

}  // namespace geops
