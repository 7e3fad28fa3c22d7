#include "fracot/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracot/errors.hpp"

namespace fracot {

namespace {

double norm(const Point& p, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += p[k] * p[k];
  return std::sqrt(s);
}

Point box_gap(const Point& lo1, const Point& hi1, const Point& lo2, const Point& hi2, int dim) {
  Point g{0.0, 0.0};
  for (int k = 0; k < dim; ++k) g[k] = std::max({0.0, lo2[k] - hi1[k], lo1[k] - hi2[k]});
  return g;
}

std::string describe(const Shape& s) {
  std::ostringstream os;
  if (s.kind == Shape::Kind::Ball) {
    os << "ball(c=" << s.center[0];
    if (s.dim == 2) os << "," << s.center[1];
    os << ", r=" << s.radius << ")";
  } else if (s.dim == 1) {
    os << "(" << s.lower[0] << ", " << s.upper[0] << ")";
  } else {
    os << "(" << s.lower[0] << ", " << s.upper[0] << ")x(" << s.lower[1] << ", " << s.upper[1]
       << ")";
  }
  return os.str();
}

}  // namespace

bool Box::contains_closed(const Point& p, double tol) const {
  for (int k = 0; k < dim; ++k) {
    if (p[k] < lower[k] - tol || p[k] > upper[k] + tol) return false;
  }
  return true;
}

Shape Shape::interval(double a, double b) {
  require(a < b, Errc::InvalidArgument, "interval needs a < b");
  Shape s;
  s.kind = Kind::Box;
  s.dim = 1;
  s.lower = {a, 0.0};
  s.upper = {b, 0.0};
  return s;
}

Shape Shape::rect(double x0, double y0, double x1, double y1) {
  require(x0 < x1 && y0 < y1, Errc::InvalidArgument, "rectangle needs lower < upper");
  Shape s;
  s.kind = Kind::Box;
  s.dim = 2;
  s.lower = {x0, y0};
  s.upper = {x1, y1};
  return s;
}

Shape Shape::ball(int dim, const Point& c, double r) {
  require(r > 0.0, Errc::InvalidArgument, "ball radius must be positive");
  Shape s;
  s.kind = Kind::Ball;
  s.dim = dim;
  s.center = c;
  s.radius = r;
  if (dim == 1) s.center[1] = 0.0;
  return s;
}

bool Shape::contains(const Point& p) const {
  if (kind == Kind::Ball) {
    Point d{p[0] - center[0], p[1] - center[1]};
    return norm(d, dim) < radius;
  }
  for (int k = 0; k < dim; ++k) {
    if (!(p[k] > lower[k] && p[k] < upper[k])) return false;
  }
  return true;
}

bool Shape::contains_closed(const Point& p, double tol) const { return distance(p) <= tol; }

double Shape::distance(const Point& p) const {
  if (kind == Kind::Ball) {
    Point d{p[0] - center[0], p[1] - center[1]};
    return std::max(0.0, norm(d, dim) - radius);
  }
  return norm(box_gap(lower, upper, p, p, dim), dim);
}

Shape Shape::dilated(double delta) const {
  Shape s = *this;
  if (kind == Kind::Ball) {
    s.radius += delta;
  } else {
    for (int k = 0; k < dim; ++k) {
      s.lower[k] -= delta;
      s.upper[k] += delta;
    }
  }
  return s;
}

Box Shape::bounds() const {
  Box b;
  b.dim = dim;
  if (kind == Kind::Ball) {
    for (int k = 0; k < dim; ++k) {
      b.lower[k] = center[k] - radius;
      b.upper[k] = center[k] + radius;
    }
  } else {
    b.lower = lower;
    b.upper = upper;
  }
  return b;
}

double Shape::diameter() const {
  if (kind == Kind::Ball) return 2.0 * radius;
  Point d{upper[0] - lower[0], upper[1] - lower[1]};
  return norm(d, dim);
}

double distance(const Shape& a, const Shape& b) {
  const int dim = a.dim;
  if (a.kind == Shape::Kind::Ball && b.kind == Shape::Kind::Ball) {
    Point d{a.center[0] - b.center[0], a.center[1] - b.center[1]};
    return std::max(0.0, norm(d, dim) - a.radius - b.radius);
  }
  if (a.kind == Shape::Kind::Ball) return std::max(0.0, b.distance(a.center) - a.radius);
  if (b.kind == Shape::Kind::Ball) return std::max(0.0, a.distance(b.center) - b.radius);
  return norm(box_gap(a.lower, a.upper, b.lower, b.upper, dim), dim);
}

bool intersects(const Shape& a, const Shape& b) {
  const int dim = a.dim;
  if (a.kind == Shape::Kind::Box && b.kind == Shape::Kind::Box) {
    for (int k = 0; k < dim; ++k) {
      if (std::max(a.lower[k], b.lower[k]) >= std::min(a.upper[k], b.upper[k])) return false;
    }
    return true;
  }
  if (a.kind == Shape::Kind::Ball && b.kind == Shape::Kind::Ball) {
    Point d{a.center[0] - b.center[0], a.center[1] - b.center[1]};
    return norm(d, dim) < a.radius + b.radius;
  }
  const Shape& ball = a.kind == Shape::Kind::Ball ? a : b;
  const Shape& box = a.kind == Shape::Kind::Ball ? b : a;
  return box.distance(ball.center) < ball.radius;
}

bool contains_neighbourhood(const Shape& outer, const Shape& inner, double delta) {
  const int dim = outer.dim;
  if (outer.kind == Shape::Kind::Box) {
    const Box ib = inner.bounds();
    for (int k = 0; k < dim; ++k) {
      if (ib.lower[k] - delta < outer.lower[k] || ib.upper[k] + delta > outer.upper[k]) return false;
    }
    return true;
  }
  if (inner.kind == Shape::Kind::Ball) {
    Point d{outer.center[0] - inner.center[0], outer.center[1] - inner.center[1]};
    return norm(d, dim) + inner.radius + delta <= outer.radius;
  }
  double far = 0.0;
  for (int cx = 0; cx < 2; ++cx) {
    for (int cy = 0; cy < (dim == 2 ? 2 : 1); ++cy) {
      Point c{cx ? inner.upper[0] : inner.lower[0], cy ? inner.upper[1] : inner.lower[1]};
      Point d{c[0] - outer.center[0], dim == 2 ? c[1] - outer.center[1] : 0.0};
      far = std::max(far, norm(d, dim));
    }
  }
  return far + delta <= outer.radius;
}

std::array<int, 2> Mesh::node_grid(int i) const {
  if (dim == 1) return {i, 0};
  return {i / (cells[1] + 1), i % (cells[1] + 1)};
}

const Shape& Mesh::shape(std::string_view label) const {
  auto it = shapes.find(label);
  if (it == shapes.end()) fail(Errc::UnknownRegion, "no region labelled '" + std::string(label) + "'");
  return it->second;
}

std::vector<int> Mesh::exterior_dofs() const {
  std::vector<int> out;
  for (int i = 0; i < num_nodes(); ++i) {
    if (!interior_mask[i]) out.push_back(i);
  }
  return out;
}

Mesh build_mesh(const Box& box, double h, const std::vector<Region>& regions) {
  require(box.dim == 1 || box.dim == 2, Errc::InvalidArgument, "dimension must be 1 or 2");
  require(h > 0.0, Errc::NonConformingSpacing, "spacing must be positive");
  Mesh mesh;
  mesh.dim = box.dim;
  mesh.box = box;
  mesh.h = h;
  for (int k = 0; k < box.dim; ++k) {
    require(box.lower[k] < box.upper[k], Errc::InvalidArgument, "box needs lower < upper");
    const double ratio = box.width(k) / h;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 || rounded < 1.0) {
      std::ostringstream os;
      os << "h=" << h << " does not divide box width " << box.width(k) << " along axis " << k;
      fail(Errc::NonConformingSpacing, os.str());
    }
    mesh.cells[k] = static_cast<int>(rounded);
  }

  if (mesh.dim == 1) {
    const int nx = mesh.cells[0];
    for (int i = 0; i <= nx; ++i) mesh.nodes.push_back({box.lower[0] + i * h, 0.0});
    for (int i = 0; i < nx; ++i) {
      Element e;
      e.v = {i, i + 1, -1};
      e.cell = {i, 0};
      mesh.elements.push_back(e);
    }
  } else {
    const int nx = mesh.cells[0];
    const int ny = mesh.cells[1];
    for (int i = 0; i <= nx; ++i) {
      for (int j = 0; j <= ny; ++j) mesh.nodes.push_back({box.lower[0] + i * h, box.lower[1] + j * h});
    }
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const int v00 = mesh.node_index(i, j);
        const int v10 = mesh.node_index(i + 1, j);
        const int v01 = mesh.node_index(i, j + 1);
        const int v11 = mesh.node_index(i + 1, j + 1);
        Element lo;
        lo.v = {v00, v10, v11};
        lo.cell = {i, j};
        lo.type = 0;
        Element up;
        up.v = {v00, v11, v01};
        up.cell = {i, j};
        up.type = 1;
        mesh.elements.push_back(lo);
        mesh.elements.push_back(up);
      }
    }
  }

  const Shape* omega = nullptr;
  for (const Region& r : regions) {
    require(r.shape.dim == mesh.dim, Errc::InvalidArgument,
            "region '" + r.name + "' has the wrong dimension");
    require(!mesh.shapes.count(r.name), Errc::InvalidArgument, "duplicate region '" + r.name + "'");
    mesh.shapes.emplace(r.name, r.shape);
    if (r.name == kOmega) omega = &mesh.shapes.at(r.name);
  }
  if (omega) {
    for (const Region& r : regions) {
      if (r.name.rfind("W", 0) == 0 && intersects(*omega, r.shape)) {
        fail(Errc::RegionOverlapViolation, "Omega " + describe(*omega) + " intersects " + r.name +
                                               " " + describe(r.shape) +
                                               "; measurement sets must lie outside closure(Omega)");
      }
    }
  }
  for (const Region& r : regions) {
    std::vector<int> dofs;
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      if (r.shape.contains(mesh.nodes[i])) dofs.push_back(i);
    }
    if (dofs.empty()) fail(Errc::EmptyRegion, "region '" + r.name + "' " + describe(r.shape) + " captures no node");
    mesh.regions.emplace(r.name, std::move(dofs));
  }

  if (omega) mesh.interior_dofs = dofs_supported_in(mesh, *omega);
  mesh.interior_mask = mask_of(mesh, mesh.interior_dofs);
  return mesh;
}

const std::vector<int>& region_dofs(const Mesh& mesh, std::string_view label) {
  auto it = mesh.regions.find(label);
  if (it == mesh.regions.end()) fail(Errc::UnknownRegion, "no region labelled '" + std::string(label) + "'");
  return it->second;
}

std::vector<int> dofs_supported_in(const Mesh& mesh, const Shape& shape) {
  const double tol = 1e-12 * std::max(1.0, shape.diameter());
  std::vector<int> out;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (!shape.contains(mesh.nodes[i])) continue;
    const auto g = mesh.node_grid(i);
    bool ok = true;
    if (mesh.dim == 1) {
      for (int d : {-1, 1}) {
        const int j = g[0] + d;
        if (j < 0 || j > mesh.cells[0] || !shape.contains_closed(mesh.nodes[j], tol)) ok = false;
      }
    } else {
      static const int nb[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}};
      for (const auto& d : nb) {
        const int a = g[0] + d[0];
        const int b = g[1] + d[1];
        if (a < 0 || b < 0 || a > mesh.cells[0] || b > mesh.cells[1] ||
            !shape.contains_closed(mesh.nodes[mesh.node_index(a, b)], tol)) {
          ok = false;
        }
      }
    }
    if (ok) out.push_back(i);
  }
  return out;
}

Box enclosing_box(const std::vector<Region>& regions, double margin, double h) {
  require(!regions.empty(), Errc::InvalidArgument, "no regions to enclose");
  Box b;
  b.dim = regions.front().shape.dim;
  b.lower = {1e300, 1e300};
  b.upper = {-1e300, -1e300};
  for (const Region& r : regions) {
    const Box rb = r.shape.bounds();
    for (int k = 0; k < b.dim; ++k) {
      b.lower[k] = std::min(b.lower[k], rb.lower[k]);
      b.upper[k] = std::max(b.upper[k], rb.upper[k]);
    }
  }
  for (int k = 0; k < b.dim; ++k) {
    b.lower[k] = std::floor((b.lower[k] - margin) / h + 1e-9) * h;
    b.upper[k] = std::ceil((b.upper[k] + margin) / h - 1e-9) * h;
  }
  if (b.dim == 1) b.lower[1] = b.upper[1] = 0.0;
  return b;
}

std::vector<char> mask_of(const Mesh& mesh, const std::vector<int>& dofs) {
  std::vector<char> m(mesh.num_nodes(), 0);
  for (int i : dofs) m[i] = 1;
  return m;
}

}  // namespace fracot
