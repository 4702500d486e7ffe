#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "helmfosls/types.hpp"

namespace helmfosls {

enum class BoundaryTag : std::uint8_t { Dirichlet, Neumann, Robin };

char boundary_tag_char(BoundaryTag t);
BoundaryTag boundary_tag_from_char(char c);

// vertex pair key with a <= b ordering
struct EdgeKey {
  int a, b;
  EdgeKey(int u, int v) : a(u < v ? u : v), b(u < v ? v : u) {}
  bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
  bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};

// Triangle vertices are stored counterclockwise with the newest vertex first,
// so the refinement edge is always (v[1], v[2]).
struct Triangle {
  std::array<int, 3> v;
  int generation = 0;
};

struct MeshEdge {
  int a, b;                    // endpoints, a < b
  std::array<int, 2> tri;      // incident triangles, second = -1 on boundary
  std::optional<BoundaryTag> tag;
};

class Triangulation {
 public:
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::map<EdgeKey, BoundaryTag> boundary_tags;

  // refinement bookkeeping relative to the mesh this one was refined from
  // (parent[t] = -1 and is_new[t] = 0 on an initial mesh)
  std::vector<int> parent;
  std::vector<std::uint8_t> is_new;

  // derived connectivity, rebuilt by finalize()
  std::vector<MeshEdge> edges;
  std::vector<std::array<int, 3>> tri_edges;  // edge ids, entry k opposite local vertex k

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  Real area(int t) const;
  Vec2 centroid(int t) const;

  // builds edge connectivity and validates: positive areas, conformity
  // (each edge in 1 or 2 triangles), boundary edges tagged, interior untagged
  void finalize();

  // true iff every interior edge is the refinement edge of both or of
  // neither of its two triangles
  bool satisfies_matching_condition() const;
  void require_matching() const;  // throws NonMatchingMesh
};

// Rotates each triangle's vertex list so that the vertex at newest_idx[t]
// comes first; orientation (cyclic order) is preserved.
Triangulation with_newest_assignment(const Triangulation& base, const std::vector<int>& newest_idx);

// Searches for a newest-vertex assignment satisfying the matching condition
// (backtracking over per-triangle choices). Returns newest positions w.r.t.
// the stored vertex order, or nullopt.
std::optional<std::vector<int>> find_matching_assignment(const Triangulation& mesh);

// Newest-vertex bisection. Marked triangles are bisected at least once;
// recursive closure keeps the mesh conforming. Deterministic.
Triangulation refine_adaptive(const Triangulation& mesh, const std::vector<int>& marked);
Triangulation refine_uniform(const Triangulation& mesh);

struct VertexPatch {
  int vertex;
  std::vector<int> tris;  // ascending ids
};

class MeshHierarchy {
 public:
  std::vector<Triangulation> levels;

  explicit MeshHierarchy(Triangulation initial);
  void append(Triangulation next);  // must have parent links into current finest

  int n_levels() const { return static_cast<int>(levels.size()); }
  const Triangulation& level(int l) const;

  // vertices of level l introduced by refinement from level l-1, i.e. those
  // whose patch touches a triangle with is_new set; for l = 0: all vertices
  std::vector<int> new_patch_vertices(int l) const;
};

// patches around every vertex (or a subset), triangles ascending
std::vector<VertexPatch> vertex_patches(const Triangulation& mesh);
std::vector<VertexPatch> vertex_patches(const Triangulation& mesh, const std::vector<int>& verts);

// text format:
//   dim 2
//   vertices N        (then N lines "x y")
//   triangles M       (then M lines "v0 v1 v2 newest_idx")
//   boundary K        (then K lines "va vb tag", tag in {D,N,R})
Triangulation read_mesh(std::istream& in);
Triangulation read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Triangulation& mesh);
void write_mesh_file(const std::string& path, const Triangulation& mesh);

}  // namespace helmfosls
