#include "helmfosls/problems.hpp"

#include <cmath>

namespace helmfosls {

ProblemId problem_from_string(const std::string& s) {
  if (s == "unit_square") return ProblemId::unit_square;
  if (s == "non_trapping") return ProblemId::non_trapping;
  if (s == "trapping") return ProblemId::trapping;
  throw ConfigError("unknown problem: " + s);
}

std::string problem_to_string(ProblemId id) {
  switch (id) {
    case ProblemId::unit_square: return "unit_square";
    case ProblemId::non_trapping: return "non_trapping";
    case ProblemId::trapping: return "trapping";
  }
  return "?";
}

Complex plane_wave(Real kappa, const Vec2& r, const Vec2& x) {
  return std::exp(Complex(0.0, kappa * r.dot(x)));
}

namespace {

void orient_ccw(Triangulation& mesh) {
  for (auto& t : mesh.triangles) {
    Vec2 a = mesh.vertices[t.v[0]], b = mesh.vertices[t.v[1]], c = mesh.vertices[t.v[2]];
    if ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()) < 0)
      std::swap(t.v[1], t.v[2]);
  }
}

// ear clipping for a simple ccw polygon given by global vertex ids
void clip_polygon(const std::vector<Vec2>& pts, std::vector<int> poly,
                  std::vector<std::array<int, 3>>& tris) {
  auto cross = [&](int a, int b, int c) {
    Vec2 u = pts[b] - pts[a], v = pts[c] - pts[a];
    return u.x() * v.y() - u.y() * v.x();
  };
  auto inside = [&](int a, int b, int c, int p) {
    // strict interior or on-edge counts as blocking
    Real d1 = cross(a, b, p), d2 = cross(b, c, p), d3 = cross(c, a, p);
    return d1 >= -1e-14 && d2 >= -1e-14 && d3 >= -1e-14;
  };
  int guard = 0;
  while (poly.size() > 3) {
    if (++guard > 10000) throw InvalidGeometry("polygon triangulation failed");
    bool clipped = false;
    const int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
      int a = poly[(i + n - 1) % n], b = poly[i], c = poly[(i + 1) % n];
      if (cross(a, b, c) <= 1e-14) continue;  // reflex or flat corner
      bool ear = true;
      for (int j = 0; j < n && ear; ++j) {
        int p = poly[j];
        if (p == a || p == b || p == c) continue;
        if (inside(a, b, c, p)) ear = false;
      }
      if (!ear) continue;
      tris.push_back({a, b, c});
      poly.erase(poly.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) throw InvalidGeometry("polygon has no ear to clip");
  }
  tris.push_back({poly[0], poly[1], poly[2]});
}

Triangulation assemble_from_polygons(const std::vector<Vec2>& pts,
                                     const std::vector<std::vector<int>>& polys,
                                     const std::function<BoundaryTag(const Vec2&, const Vec2&)>& tag_rule) {
  Triangulation mesh;
  mesh.vertices = pts;
  std::vector<std::array<int, 3>> tris;
  for (const auto& poly : polys) clip_polygon(pts, poly, tris);
  for (const auto& t : tris) mesh.triangles.push_back(Triangle{{t[0], t[1], t[2]}, 0});
  orient_ccw(mesh);
  // tag polygon boundary edges
  for (const auto& poly : polys) {
    const int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
      int a = poly[i], b = poly[(i + 1) % n];
      mesh.boundary_tags.emplace(EdgeKey(a, b), tag_rule(pts[a], pts[b]));
    }
  }
  mesh.parent.assign(mesh.triangles.size(), -1);
  mesh.is_new.assign(mesh.triangles.size(), 0);
  mesh.finalize();
  auto assignment = find_matching_assignment(mesh);
  if (!assignment) throw NonMatchingMesh("no compatible refinement-edge assignment found");
  Triangulation out = with_newest_assignment(mesh, *assignment);
  out.parent.assign(out.triangles.size(), -1);
  out.is_new.assign(out.triangles.size(), 0);
  out.require_matching();
  return out;
}

Triangulation build_unit_square() {
  Triangulation mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  // center vertex is the newest vertex of all four triangles
  mesh.triangles = {Triangle{{4, 0, 1}, 0}, Triangle{{4, 1, 2}, 0}, Triangle{{4, 2, 3}, 0},
                    Triangle{{4, 3, 0}, 0}};
  for (int k = 0; k < 4; ++k)
    mesh.boundary_tags.emplace(EdgeKey(k, (k + 1) % 4), BoundaryTag::Robin);
  mesh.parent.assign(4, -1);
  mesh.is_new.assign(4, 0);
  mesh.finalize();
  mesh.require_matching();
  return mesh;
}

Triangulation build_non_trapping() {
  // square (-1,1)^2 with a dart-shaped obstacle; the notch vertex at the
  // origin is re-entrant for the domain
  std::vector<Vec2> pts = {
      {-1, -1},        // 0 A
      {1, -1},         // 1 B
      {1, 1},          // 2 C
      {-1, 1},         // 3 D
      {-0.5, 0.5},     // 4 P  dart left tip
      {0, 0},          // 5 Q  notch
      {0.5, 0.5},      // 6 R  dart right tip
      {0, -0.5},       // 7 S  dart bottom
      {0, 0.75},       // 8    helper above notch
      {-0.75, 0},      // 9    helper left
      {0.75, 0},       // 10   helper right
  };
  std::vector<std::array<int, 3>> tris = {
      {3, 4, 8}, {3, 8, 2}, {8, 6, 2}, {8, 4, 5}, {8, 5, 6}, {3, 9, 4}, {3, 0, 9},
      {9, 4, 7}, {0, 9, 7}, {2, 10, 6}, {2, 1, 10}, {10, 6, 7}, {1, 10, 7}, {0, 7, 1},
  };
  Triangulation mesh;
  mesh.vertices = pts;
  for (const auto& t : tris) mesh.triangles.push_back(Triangle{{t[0], t[1], t[2]}, 0});
  orient_ccw(mesh);
  for (auto [a, b] : {std::pair{0, 1}, {1, 2}, {2, 3}, {3, 0}})
    mesh.boundary_tags.emplace(EdgeKey(a, b), BoundaryTag::Robin);
  for (auto [a, b] : {std::pair{4, 5}, {5, 6}, {6, 7}, {7, 4}})
    mesh.boundary_tags.emplace(EdgeKey(a, b), BoundaryTag::Dirichlet);
  mesh.parent.assign(mesh.triangles.size(), -1);
  mesh.is_new.assign(mesh.triangles.size(), 0);
  mesh.finalize();
  auto assignment = find_matching_assignment(mesh);
  if (!assignment) throw NonMatchingMesh("no compatible refinement-edge assignment found");
  Triangulation out = with_newest_assignment(mesh, *assignment);
  out.parent.assign(out.triangles.size(), -1);
  out.is_new.assign(out.triangles.size(), 0);
  out.require_matching();
  return out;
}

Triangulation build_trapping() {
  // square with a C-shaped obstacle opening to the right and two wedge walls
  // narrowing its mouth; the region behind the wedges communicates with the
  // rest of the domain only through the narrow gaps. A sealed rectangular
  // pocket between the C-shape and the left wall forms a second component.
  std::vector<Vec2> pts = {
      {-1, -1},         // 0
      {1, -1},          // 1
      {1, 1},           // 2
      {-1, 1},          // 3
      {-1, 0.75},       // 4
      {-0.5, 0.5},      // 5
      {0, 0.5},         // 6
      {-0.1, 0.3},      // 7
      {0, 0.25},        // 8
      {-0.125, 0.25},   // 9
      {-0.25, 0},       // 10
      {-0.125, -0.25},  // 11
      {0, -0.25},       // 12
      {-0.1, -0.3},     // 13
      {0, -0.5},        // 14
      {-0.5, -0.5},     // 15
      {-1, -0.75},      // 16
      // pocket
      {-1, 0.25},       // 17
      {-0.5, 0.25},     // 18
      {-0.5, -0.25},    // 19
      {-1, -0.25},      // 20
  };
  std::vector<std::vector<int>> polys = {
      {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16},
      {20, 19, 18, 17},  // ccw
  };
  auto tag_rule = [](const Vec2& a, const Vec2& b) {
    Vec2 mid = 0.5 * (a + b);
    bool on_square = std::abs(std::abs(mid.x()) - 1.0) < 1e-12 || std::abs(std::abs(mid.y()) - 1.0) < 1e-12;
    return on_square ? BoundaryTag::Robin : BoundaryTag::Dirichlet;
  };
  return assemble_from_polygons(pts, polys, tag_rule);
}

}  // namespace

Triangulation build_initial_mesh(ProblemId id) {
  switch (id) {
    case ProblemId::unit_square: return build_unit_square();
    case ProblemId::non_trapping: return build_non_trapping();
    case ProblemId::trapping: return build_trapping();
  }
  throw ConfigError("unknown problem id");
}

ProblemData make_problem(ProblemId id, Real kappa) {
  ProblemData data;
  data.kappa = kappa;
  if (id == ProblemId::unit_square) {
    // manufactured plane wave: phi = exp(i kappa r.x), u = i r phi;
    // all-Robin boundary, g = i (r.n - 1) phi / kappa
    const Vec2 r(std::cos(M_PI / 3.0), std::sin(M_PI / 3.0));
    data.g_flux = [kappa, r](const Vec2& x, const Vec2& n) {
      return Complex(0, 1) * (r.dot(n) - 1.0) * plane_wave(kappa, r, x) / kappa;
    };
    data.has_exact = true;
    data.exact_phi = [kappa, r](const Vec2& x) { return plane_wave(kappa, r, x); };
    data.exact_u = [kappa, r](const Vec2& x) {
      Complex phi = plane_wave(kappa, r, x);
      return Vec2c(Complex(0, 1) * r.x() * phi, Complex(0, 1) * r.y() * phi);
    };
  } else {
    // sound-soft scattering of an incident plane wave: the scattered field
    // satisfies phi = -phi_inc on the obstacle, radiation condition outside
    const Vec2 r = id == ProblemId::non_trapping
                       ? Vec2(std::cos(-M_PI / 3.0), std::sin(-M_PI / 3.0))
                       : Vec2(std::cos(9.0 * M_PI / 10.0), std::sin(9.0 * M_PI / 10.0));
    data.g_dirichlet = [kappa, r](const Vec2& x) { return -plane_wave(kappa, r, x) / kappa; };
    data.g_flux = [](const Vec2&, const Vec2&) { return Complex(0, 0); };
    data.has_exact = false;
  }
  return data;
}

}  // namespace helmfosls
