#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hcurl/geometry.hpp"

namespace hcurl {

/// Material region of a triangle. Interfaces between regions follow mesh edges.
enum class Region : int { omega1 = 1, omega2 = 2 };

inline constexpr Index kNoIndex = std::numeric_limits<Index>::max();

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Triangle {
  std::array<Index, 3> vertices;
  Region region = Region::omega1;
  /// Local edge k is the edge opposite local vertex k.
  int refinement_edge = 0;
};

struct Edge {
  /// Global orientation: vertices[0] < vertices[1].
  std::array<Index, 2> vertices;
  /// plus() < minus() when both exist; minus is kNoIndex on the boundary.
  std::array<Index, 2> triangles{kNoIndex, kNoIndex};
  /// Unit normal pointing out of triangles[0] (into triangles[1] if interior).
  Vec2 normal;

  bool is_boundary() const { return triangles[1] == kNoIndex; }
  Index plus() const { return triangles[0]; }
  Index minus() const { return triangles[1]; }
};

struct EdgeGeometry {
  double length;
  Vec2 normal;
  Index plus;
  std::optional<Index> minus;
};

namespace detail {

/// Longest local edge, ties broken by the smallest opposite vertex id.
inline int longest_edge(const std::array<Vec2, 3>& p, const std::array<Index, 3>& v) {
  int best = 0;
  double best_len = -1.0;
  for (int k = 0; k < 3; ++k) {
    const double len = norm(p[(k + 2) % 3] - p[(k + 1) % 3]);
    if (len > best_len || (len == best_len && v[k] < v[best])) {
      best = k;
      best_len = len;
    }
  }
  return best;
}

inline std::pair<Index, Index> edge_key(Index a, Index b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace detail

/**
 * Conforming triangulation with edge topology.
 *
 * Immutable after construction. Triangles are stored counterclockwise; edges are
 * numbered in order of first appearance while walking triangles by id and local
 * edges 0,1,2, so numbering is deterministic for a given triangle list.
 */
class Mesh {
 public:
  Mesh() = default;

  Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
       std::vector<Index> parents = {})
      : vertices_(std::move(vertices)),
        triangles_(std::move(triangles)),
        parents_(std::move(parents)) {
    if (!parents_.empty() && parents_.size() != triangles_.size()) {
      throw MeshError("parent list size does not match triangle count");
    }
    validate_and_orient();
    build_edges();
  }

  std::span<const Vec2> vertices() const { return vertices_; }
  std::span<const Triangle> triangles() const { return triangles_; }
  std::span<const Edge> edges() const { return edges_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  std::size_t num_boundary_edges() const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_boundary(); }));
  }
  std::size_t num_interior_edges() const { return num_edges() - num_boundary_edges(); }

  const Vec2& vertex(Index i) const { return vertices_.at(i); }
  const Triangle& triangle(Index t) const { return triangles_.at(t); }
  const Edge& edge(Index e) const { return edges_.at(e); }

  /// Global edge ids of the local edges of triangle t.
  const std::array<Index, 3>& triangle_edges(Index t) const { return tri_edges_.at(t); }

  /// +1 where the global edge orientation matches the counterclockwise traversal.
  const std::array<int, 3>& triangle_edge_signs(Index t) const { return tri_signs_.at(t); }

  /// Index of the originating triangle in the mesh this one was refined from.
  /// Empty for meshes that were not produced by refinement.
  std::span<const Index> parents() const { return parents_; }

  TriangleGeometry geometry(Index t) const {
    const auto& v = triangles_.at(t).vertices;
    return {{vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]}};
  }

  double diameter(Index t) const { return geometry(t).diameter(); }

  double edge_length(Index e) const {
    const auto& v = edges_.at(e).vertices;
    return norm(vertices_[v[1]] - vertices_[v[0]]);
  }

  /// Unit tangent along the global orientation.
  Vec2 edge_tangent(Index e) const {
    const auto& v = edges_.at(e).vertices;
    const Vec2 d = vertices_[v[1]] - vertices_[v[0]];
    return (1.0 / norm(d)) * d;
  }

  EdgeGeometry edge_geometry(Index e) const {
    const Edge& edge = edges_.at(e);
    std::optional<Index> minus;
    if (!edge.is_boundary()) minus = edge.minus();
    return {edge_length(e), edge.normal, edge.plus(), minus};
  }

  /// Local index (0..2) of global edge e within triangle t.
  int local_edge_index(Index t, Index e) const {
    const auto& te = tri_edges_.at(t);
    for (int k = 0; k < 3; ++k) {
      if (te[k] == e) return k;
    }
    throw MeshError("edge is not incident to triangle");
  }

  long euler_characteristic() const {
    return static_cast<long>(num_vertices()) - static_cast<long>(num_edges()) +
           static_cast<long>(num_triangles());
  }

 private:
  void validate_and_orient() {
    for (const Vec2& v : vertices_) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw MeshError("non-finite vertex");
    }
    for (auto& t : triangles_) {
      auto& v = t.vertices;
      for (Index i : v) {
        if (i >= vertices_.size()) throw MeshError("triangle references missing vertex");
      }
      if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) {
        throw MeshError("triangle has repeated vertex ids");
      }
      if (t.refinement_edge < 0 || t.refinement_edge > 2) {
        throw MeshError("refinement edge out of range");
      }
      TriangleGeometry g{{vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]}};
      const double area = g.signed_area();
      if (area == 0.0) throw MeshError("degenerate triangle");
      if (area < 0.0) {
        // Swapping vertices 1 and 2 swaps local edges 1 and 2 as well.
        std::swap(v[1], v[2]);
        if (t.refinement_edge != 0) t.refinement_edge = 3 - t.refinement_edge;
      }
    }
  }

  void build_edges() {
    std::map<std::pair<Index, Index>, Index> lookup;
    tri_edges_.resize(triangles_.size());
    tri_signs_.resize(triangles_.size());
    for (Index t = 0; t < triangles_.size(); ++t) {
      const auto& v = triangles_[t].vertices;
      for (int k = 0; k < 3; ++k) {
        const Index a = v[(k + 1) % 3];
        const Index b = v[(k + 2) % 3];
        const auto key = detail::edge_key(a, b);
        auto [it, inserted] = lookup.try_emplace(key, static_cast<Index>(edges_.size()));
        if (inserted) {
          Edge e;
          e.vertices = {key.first, key.second};
          e.triangles[0] = t;
          // Outward normal of a CCW triangle along a -> b.
          const Vec2 d = vertices_[b] - vertices_[a];
          e.normal = (1.0 / norm(d)) * rotate_cw(d);
          edges_.push_back(e);
        } else {
          Edge& e = edges_[it->second];
          if (e.triangles[1] != kNoIndex) {
            throw MeshError("edge shared by more than two triangles");
          }
          // The first visitor already traversed a -> b in the same direction.
          const Index first = e.triangles[0];
          const int kf = local_edge_index_raw(first, it->second);
          const auto& vf = triangles_[first].vertices;
          if (vf[(kf + 1) % 3] == a) {
            throw MeshError("inconsistent orientation across shared edge");
          }
          e.triangles[1] = t;
        }
        tri_edges_[t][k] = it->second;
        tri_signs_[t][k] = a < b ? 1 : -1;
      }
    }
  }

  int local_edge_index_raw(Index t, Index e) const {
    for (int k = 0; k < 3; ++k) {
      if (tri_edges_[t][k] == e) return k;
    }
    return -1;
  }

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Index> parents_;
  std::vector<Edge> edges_;
  std::vector<std::array<Index, 3>> tri_edges_;
  std::vector<std::array<int, 3>> tri_signs_;
};

/// Assigns each triangle its longest edge as refinement edge.
inline std::vector<Triangle> with_longest_edge_refinement(const std::vector<Vec2>& vertices,
                                                         std::vector<Triangle> triangles) {
  for (auto& t : triangles) {
    const auto& v = t.vertices;
    t.refinement_edge =
        detail::longest_edge({vertices[v[0]], vertices[v[1]], vertices[v[2]]}, v);
  }
  return triangles;
}

/**
 * n x n grid of squares on the unit square, each cut by the diagonal from its
 * lower-left to its upper-right corner. Cell (i, j) contributes triangles
 * 2(jn + i) (below the diagonal) and 2(jn + i) + 1 (above it).
 */
inline Mesh build_structured_unit_square(int n) {
  if (n < 1) throw MeshError("subdivision count must be positive");
  const auto un = static_cast<Index>(n);
  std::vector<Vec2> vertices;
  vertices.reserve((un + 1) * (un + 1));
  for (Index j = 0; j <= un; ++j) {
    for (Index i = 0; i <= un; ++i) {
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  auto id = [un](Index i, Index j) { return j * (un + 1) + i; };
  std::vector<Triangle> triangles;
  triangles.reserve(2 * un * un);
  for (Index j = 0; j < un; ++j) {
    for (Index i = 0; i < un; ++i) {
      const Index ll = id(i, j), lr = id(i + 1, j), ur = id(i + 1, j + 1), ul = id(i, j + 1);
      triangles.push_back({{ll, lr, ur}, Region::omega1, 0});
      triangles.push_back({{ll, ur, ul}, Region::omega1, 0});
    }
  }
  triangles = with_longest_edge_refinement(vertices, std::move(triangles));
  return Mesh(std::move(vertices), std::move(triangles));
}

/**
 * Uniform red refinement: every triangle is split into four similar children by
 * joining its edge midpoints. The midpoint of edge e becomes vertex V + e.
 * Children of triangle t occupy ids 4t..4t+3; child 3 is the interior one.
 */
inline Mesh red_refine(const Mesh& mesh) {
  const auto nv = static_cast<Index>(mesh.num_vertices());
  std::vector<Vec2> vertices(mesh.vertices().begin(), mesh.vertices().end());
  vertices.reserve(nv + mesh.num_edges());
  for (const Edge& e : mesh.edges()) {
    vertices.push_back(0.5 * (mesh.vertex(e.vertices[0]) + mesh.vertex(e.vertices[1])));
  }
  std::vector<Triangle> triangles;
  std::vector<Index> parents;
  triangles.reserve(4 * mesh.num_triangles());
  parents.reserve(4 * mesh.num_triangles());
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangle(t);
    const auto& v = tri.vertices;
    const auto& te = mesh.triangle_edges(t);
    // m[k] is the midpoint of the edge opposite vertex k.
    const std::array<Index, 3> m{nv + te[0], nv + te[1], nv + te[2]};
    const std::array<std::array<Index, 3>, 4> kids{{{v[0], m[2], m[1]},
                                                    {m[2], v[1], m[0]},
                                                    {m[1], m[0], v[2]},
                                                    {m[0], m[1], m[2]}}};
    for (const auto& kid : kids) {
      triangles.push_back({kid, tri.region, 0});
      parents.push_back(t);
    }
  }
  triangles = with_longest_edge_refinement(vertices, std::move(triangles));
  return Mesh(std::move(vertices), std::move(triangles), std::move(parents));
}

struct BisectionOptions {
  /// Bound on propagation sweeps of the conforming closure.
  int max_closure_depth = 1000;
};

/**
 * Newest-vertex bisection of the marked triangles plus the conforming closure.
 *
 * The refinement edge of every marked triangle is marked, then marks are
 * propagated until every triangle with a marked edge also has its refinement
 * edge marked. Each triangle is then bisected recursively across marked
 * refinement edges; the new vertex is opposite the refinement edge of both
 * children.
 */
inline Mesh bisect_refine(const Mesh& mesh, std::span<const Index> marked,
                          const BisectionOptions& options = {}) {
  std::vector<char> edge_marked(mesh.num_edges(), 0);
  for (Index t : marked) {
    if (t >= mesh.num_triangles()) throw MeshError("marked triangle id out of range");
    const Triangle& tri = mesh.triangle(t);
    edge_marked[mesh.triangle_edges(t)[tri.refinement_edge]] = 1;
  }

  int depth = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
      const auto& te = mesh.triangle_edges(t);
      const Index ref = te[mesh.triangle(t).refinement_edge];
      if (edge_marked[ref]) continue;
      if (edge_marked[te[0]] || edge_marked[te[1]] || edge_marked[te[2]]) {
        edge_marked[ref] = 1;
        changed = true;
      }
    }
    if (changed && ++depth > options.max_closure_depth) {
      throw MeshError("bisection closure exceeded depth bound");
    }
  }

  std::vector<Vec2> vertices(mesh.vertices().begin(), mesh.vertices().end());
  std::map<std::pair<Index, Index>, Index> midpoints;
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    if (!edge_marked[e]) continue;
    const auto& ev = mesh.edge(e).vertices;
    const auto mid = static_cast<Index>(vertices.size());
    vertices.push_back(0.5 * (mesh.vertex(ev[0]) + mesh.vertex(ev[1])));
    midpoints.emplace(std::pair{ev[0], ev[1]}, mid);
  }

  std::vector<Triangle> triangles;
  std::vector<Index> parents;
  std::function<void(const Triangle&, Index)> split = [&](const Triangle& tri, Index parent) {
    const int r = tri.refinement_edge;
    const Index apex = tri.vertices[r];
    const Index a = tri.vertices[(r + 1) % 3];
    const Index b = tri.vertices[(r + 2) % 3];
    auto it = midpoints.find(detail::edge_key(a, b));
    if (it == midpoints.end()) {
      triangles.push_back(tri);
      parents.push_back(parent);
      return;
    }
    const Index m = it->second;
    // Children (apex, a, m) and (apex, m, b); the new vertex m is local vertex 2
    // resp. 1, and its opposite edge is the next refinement edge.
    split(Triangle{{apex, a, m}, tri.region, 2}, parent);
    split(Triangle{{apex, m, b}, tri.region, 1}, parent);
  };
  for (Index t = 0; t < mesh.num_triangles(); ++t) split(mesh.triangle(t), t);

  return Mesh(std::move(vertices), std::move(triangles), std::move(parents));
}

/// Retags every triangle by evaluating the classifier at its centroid.
inline Mesh tag_regions(const Mesh& mesh, const std::function<Region(Vec2)>& classifier) {
  std::vector<Triangle> triangles(mesh.triangles().begin(), mesh.triangles().end());
  for (Index t = 0; t < triangles.size(); ++t) {
    triangles[t].region = classifier(mesh.geometry(t).centroid());
  }
  std::vector<Vec2> vertices(mesh.vertices().begin(), mesh.vertices().end());
  std::vector<Index> parents(mesh.parents().begin(), mesh.parents().end());
  return Mesh(std::move(vertices), std::move(triangles), std::move(parents));
}

struct ConformityReport {
  bool ok = true;
  std::string message;
};

/**
 * Checks positive orientation, edge valence, opposite traversal across interior
 * edges, and the absence of hanging vertices on edges that have only one
 * neighbour.
 */
inline ConformityReport check_conformity(const Mesh& mesh) {
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    if (!(mesh.geometry(t).signed_area() > 0.0)) {
      return {false, "triangle " + std::to_string(t) + " is not counterclockwise"};
    }
  }
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    if (edge.is_boundary()) continue;
    const int kp = mesh.local_edge_index(edge.plus(), e);
    const int km = mesh.local_edge_index(edge.minus(), e);
    if (mesh.triangle_edge_signs(edge.plus())[kp] + mesh.triangle_edge_signs(edge.minus())[km] != 0) {
      return {false, "edge " + std::to_string(e) + " has equal signs on both sides"};
    }
  }
  // A hanging vertex sits strictly inside an edge seen from one side only.
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    if (!edge.is_boundary()) continue;
    const Vec2 a = mesh.vertex(edge.vertices[0]);
    const Vec2 b = mesh.vertex(edge.vertices[1]);
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
      if (v == edge.vertices[0] || v == edge.vertices[1]) continue;
      const Vec2 w = mesh.vertex(v) - a;
      const double s = dot(w, d) / len2;
      if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;
      if (std::abs(cross(d, w)) <= 1e-12 * len2) {
        return {false, "hanging vertex " + std::to_string(v) + " on edge " + std::to_string(e)};
      }
    }
  }
  return {};
}

/// Plain-text mesh: `V E F`, V lines `x y`, F lines `a b c region`.
inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << mesh.num_vertices() << ' ' << mesh.num_edges() << ' ' << mesh.num_triangles() << '\n';
  const auto old_precision = os.precision(17);
  for (const Vec2& v : mesh.vertices()) os << v.x << ' ' << v.y << '\n';
  os.precision(old_precision);
  for (const Triangle& t : mesh.triangles()) {
    os << t.vertices[0] << ' ' << t.vertices[1] << ' ' << t.vertices[2] << ' '
       << static_cast<int>(t.region) << '\n';
  }
}

inline Mesh read_mesh(std::istream& is) {
  std::size_t nv = 0, ne = 0, nt = 0;
  if (!(is >> nv >> ne >> nt)) throw MeshError("malformed mesh header");
  std::vector<Vec2> vertices(nv);
  for (auto& v : vertices) {
    if (!(is >> v.x >> v.y)) throw MeshError("malformed vertex record");
  }
  std::vector<Triangle> triangles(nt);
  for (auto& t : triangles) {
    int region = 0;
    if (!(is >> t.vertices[0] >> t.vertices[1] >> t.vertices[2] >> region)) {
      throw MeshError("malformed triangle record");
    }
    if (region != 1 && region != 2) throw MeshError("unknown region tag");
    t.region = static_cast<Region>(region);
  }
  triangles = with_longest_edge_refinement(vertices, std::move(triangles));
  Mesh mesh(std::move(vertices), std::move(triangles));
  if (mesh.num_edges() != ne) throw MeshError("edge count in header does not match topology");
  return mesh;
}

}  // namespace hcurl
