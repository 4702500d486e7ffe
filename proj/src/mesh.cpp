#include "helmfosls/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace helmfosls {

char boundary_tag_char(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Dirichlet: return 'D';
    case BoundaryTag::Neumann: return 'N';
    case BoundaryTag::Robin: return 'R';
  }
  return '?';
}

BoundaryTag boundary_tag_from_char(char c) {
  if (c == 'D') return BoundaryTag::Dirichlet;
  if (c == 'N') return BoundaryTag::Neumann;
  if (c == 'R') return BoundaryTag::Robin;
  throw InvalidGeometry(std::string("unknown boundary tag '") + c + "'");
}

static Real signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

Real Triangulation::area(int t) const {
  const auto& tr = triangles[t];
  return signed_area(vertices[tr.v[0]], vertices[tr.v[1]], vertices[tr.v[2]]);
}

Vec2 Triangulation::centroid(int t) const {
  const auto& tr = triangles[t];
  return (vertices[tr.v[0]] + vertices[tr.v[1]] + vertices[tr.v[2]]) / 3.0;
}

void Triangulation::finalize() {
  const int nv = n_vertices();
  const int nt = n_triangles();
  for (const auto& p : vertices)
    if (!p.allFinite()) throw InvalidGeometry("non-finite vertex coordinates");

  std::set<std::array<int, 3>> seen;
  std::vector<char> used(nv, 0);
  for (int t = 0; t < nt; ++t) {
    const auto& v = triangles[t].v;
    for (int k = 0; k < 3; ++k) {
      if (v[k] < 0 || v[k] >= nv) throw InvalidGeometry("triangle vertex id out of range");
      used[v[k]] = 1;
    }
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2])
      throw InvalidGeometry("degenerate triangle (repeated vertex)");
    std::array<int, 3> key = v;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) throw InvalidGeometry("triangle listed twice");
    if (area(t) <= 0.0) throw InvalidGeometry("triangle with non-positive area");
  }
  for (int i = 0; i < nv; ++i)
    if (!used[i]) throw InvalidGeometry("unreferenced vertex");

  edges.clear();
  tri_edges.assign(nt, {-1, -1, -1});
  std::map<EdgeKey, int> edge_id;
  for (int t = 0; t < nt; ++t) {
    const auto& v = triangles[t].v;
    for (int k = 0; k < 3; ++k) {
      EdgeKey key(v[(k + 1) % 3], v[(k + 2) % 3]);
      auto it = edge_id.find(key);
      if (it == edge_id.end()) {
        it = edge_id.emplace(key, static_cast<int>(edges.size())).first;
        edges.push_back(MeshEdge{key.a, key.b, {t, -1}, std::nullopt});
      } else {
        MeshEdge& e = edges[it->second];
        if (e.tri[1] != -1) throw InvalidGeometry("edge shared by more than two triangles");
        e.tri[1] = t;
      }
      tri_edges[t][k] = it->second;
    }
  }

  for (const auto& [key, tag] : boundary_tags) {
    auto it = edge_id.find(key);
    if (it == edge_id.end()) throw InvalidGeometry("boundary tag on non-existent edge");
    MeshEdge& e = edges[it->second];
    if (e.tri[1] != -1) throw InvalidGeometry("boundary tag on interior edge");
    e.tag = tag;
  }
  for (const auto& e : edges)
    if (e.tri[1] == -1 && !e.tag)
      throw InvalidGeometry("untagged boundary edge");

  if (!parent.empty() && static_cast<int>(parent.size()) != nt)
    throw InvalidGeometry("parent array size mismatch");
  if (!is_new.empty() && static_cast<int>(is_new.size()) != nt)
    throw InvalidGeometry("is_new array size mismatch");
}

bool Triangulation::satisfies_matching_condition() const {
  for (const auto& e : edges) {
    if (e.tri[1] == -1) continue;
    EdgeKey key(e.a, e.b);
    bool r0 = EdgeKey(triangles[e.tri[0]].v[1], triangles[e.tri[0]].v[2]) == key;
    bool r1 = EdgeKey(triangles[e.tri[1]].v[1], triangles[e.tri[1]].v[2]) == key;
    if (r0 != r1) return false;
  }
  return true;
}

void Triangulation::require_matching() const {
  if (!satisfies_matching_condition())
    throw NonMatchingMesh("refinement-edge assignment violates the matching condition");
}

Triangulation with_newest_assignment(const Triangulation& base, const std::vector<int>& newest_idx) {
  if (newest_idx.size() != base.triangles.size())
    throw InvalidGeometry("newest assignment size mismatch");
  Triangulation out = base;
  for (int t = 0; t < out.n_triangles(); ++t) {
    int n = newest_idx[t];
    if (n < 0 || n > 2) throw InvalidGeometry("newest index out of range");
    auto v = base.triangles[t].v;
    out.triangles[t].v = {v[n], v[(n + 1) % 3], v[(n + 2) % 3]};
  }
  out.finalize();
  return out;
}

std::optional<std::vector<int>> find_matching_assignment(const Triangulation& mesh) {
  const int nt = mesh.n_triangles();
  // neighbor table: for triangle t and local edge k (opposite vertex k),
  // the adjacent triangle and whether that edge is boundary
  std::vector<std::array<int, 3>> nbr(nt, {-1, -1, -1});
  for (const auto& e : mesh.edges) {
    if (e.tri[1] == -1) continue;
    for (int s = 0; s < 2; ++s) {
      int t = e.tri[s], o = e.tri[1 - s];
      for (int k = 0; k < 3; ++k)
        if (mesh.tri_edges[t][k] == &e - mesh.edges.data()) nbr[t][k] = o;
    }
  }

  // BFS order so constraints bind early
  std::vector<int> order, pos(nt, -1);
  for (int seed = 0; seed < nt; ++seed) {
    if (pos[seed] != -1) continue;
    std::vector<int> queue{seed};
    pos[seed] = 0;
    while (!queue.empty()) {
      int t = queue.front();
      queue.erase(queue.begin());
      order.push_back(t);
      for (int k = 0; k < 3; ++k)
        if (nbr[t][k] != -1 && pos[nbr[t][k]] == -1) {
          pos[nbr[t][k]] = 0;
          queue.push_back(nbr[t][k]);
        }
    }
  }
  for (int i = 0; i < nt; ++i) pos[order[i]] = i;

  // choice[t] in {0,1,2}: refinement edge of t = edge opposite vertex choice[t]
  std::vector<int> choice(nt, -1);
  long long nodes = 0;
  const long long node_cap = 20'000'000;

  auto consistent = [&](int t) {
    EdgeKey ref_t(mesh.triangles[t].v[(choice[t] + 1) % 3], mesh.triangles[t].v[(choice[t] + 2) % 3]);
    for (int k = 0; k < 3; ++k) {
      int o = nbr[t][k];
      if (o == -1 || choice[o] == -1) continue;
      const MeshEdge& e = mesh.edges[mesh.tri_edges[t][k]];
      EdgeKey key(e.a, e.b);
      bool mine = ref_t == key;
      EdgeKey ref_o(mesh.triangles[o].v[(choice[o] + 1) % 3], mesh.triangles[o].v[(choice[o] + 2) % 3]);
      bool theirs = ref_o == key;
      if (mine != theirs) return false;
    }
    return true;
  };

  std::vector<int> trial(nt, 0);
  int depth = 0;
  while (depth >= 0) {
    if (depth == nt) {
      std::vector<int> newest(nt);
      for (int t = 0; t < nt; ++t) newest[t] = choice[t];
      return newest;
    }
    int t = order[depth];
    bool advanced = false;
    for (int c = trial[depth]; c < 3; ++c) {
      if (++nodes > node_cap) return std::nullopt;
      choice[t] = c;
      if (consistent(t)) {
        trial[depth] = c + 1;
        ++depth;
        if (depth < nt) trial[depth] = 0;
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      choice[t] = -1;
      trial[depth] = 0;
      --depth;
      if (depth >= 0) choice[order[depth]] = -1;
    }
  }
  return std::nullopt;
}

namespace {

struct WorkTri {
  std::array<int, 3> v;  // newest first
  int gen;
  int orig;   // index in the input mesh
  bool alive;
};

struct RefineState {
  std::vector<Vec2> verts;
  std::vector<WorkTri> tris;
  std::map<EdgeKey, std::vector<int>> edge_tris;  // may contain dead ids
  std::map<EdgeKey, int> midpoint;
  std::map<EdgeKey, BoundaryTag> btags;
  long long bisections = 0;

  void add_tri(std::array<int, 3> v, int gen, int orig) {
    int id = static_cast<int>(tris.size());
    tris.push_back(WorkTri{v, gen, orig, true});
    for (int k = 0; k < 3; ++k) edge_tris[EdgeKey(v[(k + 1) % 3], v[(k + 2) % 3])].push_back(id);
  }

  int neighbor_across(int t, EdgeKey e) const {
    auto it = edge_tris.find(e);
    if (it == edge_tris.end()) return -1;
    for (int id : it->second)
      if (id != t && tris[id].alive) return id;
    return -1;
  }

  int midpoint_of(EdgeKey e) {
    auto it = midpoint.find(e);
    if (it != midpoint.end()) return it->second;
    int id = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[e.a] + verts[e.b]));
    midpoint.emplace(e, id);
    auto bt = btags.find(e);
    if (bt != btags.end()) {
      btags.emplace(EdgeKey(e.a, id), bt->second);
      btags.emplace(EdgeKey(id, e.b), bt->second);
      btags.erase(bt);
    }
    return id;
  }

  void split(int t, int m) {
    WorkTri w = tris[t];  // copy: push_back below may reallocate
    tris[t].alive = false;
    add_tri({m, w.v[0], w.v[1]}, w.gen + 1, w.orig);
    add_tri({m, w.v[2], w.v[0]}, w.gen + 1, w.orig);
  }

  // bisect t's refinement edge, recursing into incompatible neighbors first
  void ensure_bisected(int t0, long long cap) {
    std::vector<int> stack{t0};
    while (!stack.empty()) {
      int t = stack.back();
      if (!tris[t].alive) {  // handled as somebody's partner
        stack.pop_back();
        continue;
      }
      EdgeKey e(tris[t].v[1], tris[t].v[2]);
      int o = neighbor_across(t, e);
      if (o != -1 && !(EdgeKey(tris[o].v[1], tris[o].v[2]) == e)) {
        stack.push_back(o);
        if (static_cast<long long>(stack.size()) > cap)
          throw ClosureDiverged("conforming closure recursion exceeded bound");
        continue;
      }
      int m = midpoint_of(e);
      split(t, m);
      if (o != -1) split(o, m);
      if (++bisections > cap)
        throw ClosureDiverged("conforming closure exceeded bisection bound");
      stack.pop_back();
    }
  }
};

}  // namespace

Triangulation refine_adaptive(const Triangulation& mesh, const std::vector<int>& marked) {
  for (int t : marked)
    if (t < 0 || t >= mesh.n_triangles())
      throw InvalidGeometry("marked triangle id out of range");

  RefineState st;
  st.verts = mesh.vertices;
  st.btags = mesh.boundary_tags;
  for (int t = 0; t < mesh.n_triangles(); ++t)
    st.add_tri(mesh.triangles[t].v, mesh.triangles[t].generation, t);

  std::vector<int> todo(marked);
  std::sort(todo.begin(), todo.end());
  todo.erase(std::unique(todo.begin(), todo.end()), todo.end());

  const long long cap = 100LL * mesh.n_triangles() + 10000;
  for (int t : todo)
    if (st.tris[t].alive) st.ensure_bisected(t, cap);

  Triangulation out;
  out.vertices = std::move(st.verts);
  out.boundary_tags = std::move(st.btags);
  for (const auto& w : st.tris) {
    if (!w.alive) continue;
    out.triangles.push_back(Triangle{w.v, w.gen});
    out.parent.push_back(w.orig);
    out.is_new.push_back(w.gen > mesh.triangles[w.orig].generation ? 1 : 0);
  }
  out.finalize();
  return out;
}

Triangulation refine_uniform(const Triangulation& mesh) {
  std::vector<int> all(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) all[t] = t;
  return refine_adaptive(mesh, all);
}

MeshHierarchy::MeshHierarchy(Triangulation initial) {
  initial.parent.assign(initial.triangles.size(), -1);
  initial.is_new.assign(initial.triangles.size(), 0);
  levels.push_back(std::move(initial));
}

void MeshHierarchy::append(Triangulation next) {
  const Triangulation& prev = levels.back();
  if (next.parent.size() != next.triangles.size() || next.is_new.size() != next.triangles.size())
    throw MeshMismatch("appended mesh lacks refinement bookkeeping");
  for (int p : next.parent)
    if (p < 0 || p >= prev.n_triangles())
      throw MeshMismatch("appended mesh parent links do not point into current finest level");
  levels.push_back(std::move(next));
}

const Triangulation& MeshHierarchy::level(int l) const {
  if (l < 0 || l >= n_levels()) throw LevelNotInHierarchy("level index out of range");
  return levels[l];
}

std::vector<int> MeshHierarchy::new_patch_vertices(int l) const {
  const Triangulation& mesh = level(l);
  std::vector<int> out;
  if (l == 0) {
    out.resize(mesh.n_vertices());
    for (int i = 0; i < mesh.n_vertices(); ++i) out[i] = i;
    return out;
  }
  std::vector<char> mark(mesh.n_vertices(), 0);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    if (mesh.is_new[t])
      for (int k = 0; k < 3; ++k) mark[mesh.triangles[t].v[k]] = 1;
  for (int i = 0; i < mesh.n_vertices(); ++i)
    if (mark[i]) out.push_back(i);
  return out;
}

std::vector<VertexPatch> vertex_patches(const Triangulation& mesh) {
  std::vector<int> all(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i) all[i] = i;
  return vertex_patches(mesh, all);
}

std::vector<VertexPatch> vertex_patches(const Triangulation& mesh, const std::vector<int>& verts) {
  std::vector<std::vector<int>> incid(mesh.n_vertices());
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int k = 0; k < 3; ++k) incid[mesh.triangles[t].v[k]].push_back(t);
  std::vector<VertexPatch> out;
  out.reserve(verts.size());
  for (int v : verts) {
    if (v < 0 || v >= mesh.n_vertices()) throw InvalidGeometry("patch vertex id out of range");
    out.push_back(VertexPatch{v, incid[v]});
  }
  return out;
}

Triangulation read_mesh(std::istream& in) {
  auto fail = [](const std::string& m) -> void { throw InvalidGeometry("mesh file: " + m); };
  std::string kw;
  int dim = 0;
  if (!(in >> kw >> dim) || kw != "dim" || dim != 2) fail("expected 'dim 2'");
  int nv = 0;
  if (!(in >> kw >> nv) || kw != "vertices" || nv < 3) fail("expected 'vertices N'");
  Triangulation mesh;
  mesh.vertices.resize(nv);
  for (int i = 0; i < nv; ++i)
    if (!(in >> mesh.vertices[i].x() >> mesh.vertices[i].y())) fail("bad vertex line");
  int nt = 0;
  if (!(in >> kw >> nt) || kw != "triangles" || nt < 1) fail("expected 'triangles M'");
  mesh.triangles.resize(nt);
  for (int t = 0; t < nt; ++t) {
    int a, b, c, n;
    if (!(in >> a >> b >> c >> n)) fail("bad triangle line");
    if (n < 0 || n > 2) fail("newest index out of range");
    std::array<int, 3> v{a, b, c};
    mesh.triangles[t].v = {v[n], v[(n + 1) % 3], v[(n + 2) % 3]};
  }
  int nb = 0;
  if (!(in >> kw >> nb) || kw != "boundary" || nb < 1) fail("expected 'boundary K'");
  for (int i = 0; i < nb; ++i) {
    int a, b;
    std::string tag;
    if (!(in >> a >> b >> tag) || tag.size() != 1) fail("bad boundary line");
    mesh.boundary_tags.emplace(EdgeKey(a, b), boundary_tag_from_char(tag[0]));
  }
  mesh.parent.assign(nt, -1);
  mesh.is_new.assign(nt, 0);
  mesh.finalize();
  return mesh;
}

Triangulation read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidGeometry("cannot open mesh file: " + path);
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Triangulation& mesh) {
  out.precision(17);
  out << "dim 2\n";
  out << "vertices " << mesh.n_vertices() << "\n";
  for (const auto& p : mesh.vertices) out << p.x() << " " << p.y() << "\n";
  out << "triangles " << mesh.n_triangles() << "\n";
  for (const auto& t : mesh.triangles)
    out << t.v[0] << " " << t.v[1] << " " << t.v[2] << " 0\n";
  out << "boundary " << mesh.boundary_tags.size() << "\n";
  for (const auto& [key, tag] : mesh.boundary_tags)
    out << key.a << " " << key.b << " " << boundary_tag_char(tag) << "\n";
}

void write_mesh_file(const std::string& path, const Triangulation& mesh) {
  std::ofstream out(path);
  if (!out) throw InvalidGeometry("cannot open mesh file for writing: " + path);
  write_mesh(out, mesh);
}

}  // namespace helmfosls
