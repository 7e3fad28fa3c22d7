#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fracot {

using Point = std::array<double, 2>;

inline constexpr const char* kOmega = "Omega";
inline constexpr const char* kW1 = "W1";
inline constexpr const char* kW2 = "W2";
inline constexpr const char* kOmegaPrime = "OmegaPrime";
inline constexpr const char* kCutoff = "Cutoff";

struct Box {
  int dim = 1;
  Point lower{0.0, 0.0};
  Point upper{0.0, 0.0};

  double width(int axis) const { return upper[axis] - lower[axis]; }
  bool contains_closed(const Point& p, double tol = 0.0) const;
};

// Open axis-aligned box or open ball.
struct Shape {
  enum class Kind { Box, Ball };
  Kind kind = Kind::Box;
  int dim = 1;
  Point lower{0.0, 0.0};
  Point upper{0.0, 0.0};
  Point center{0.0, 0.0};
  double radius = 0.0;

  static Shape interval(double a, double b);
  static Shape rect(double x0, double y0, double x1, double y1);
  static Shape ball(int dim, const Point& c, double r);

  bool contains(const Point& p) const;
  bool contains_closed(const Point& p, double tol) const;
  // Euclidean distance from p to the closed shape (0 inside).
  double distance(const Point& p) const;
  // Outer parallel set for balls; for boxes the enclosing box grown by delta.
  Shape dilated(double delta) const;
  Box bounds() const;
  double diameter() const;
};

double distance(const Shape& a, const Shape& b);
bool intersects(const Shape& a, const Shape& b);
// True when the delta-neighbourhood of inner lies inside the open set outer.
bool contains_neighbourhood(const Shape& outer, const Shape& inner, double delta);

struct Region {
  std::string name;
  Shape shape;
};

struct Element {
  std::array<int, 3> v{0, 0, 0};
  std::array<int, 2> cell{0, 0};
  int type = 0;  // 2D: 0 lower triangle, 1 upper triangle
};

class Mesh {
 public:
  int dim = 1;
  Box box;
  double h = 0.0;
  std::array<int, 2> cells{0, 0};
  std::vector<Point> nodes;
  std::vector<Element> elements;
  std::map<std::string, std::vector<int>, std::less<>> regions;
  std::map<std::string, Shape, std::less<>> shapes;
  std::vector<int> interior_dofs;
  std::vector<char> interior_mask;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  int nodes_per_element() const { return dim + 1; }
  int node_index(int ix, int iy = 0) const { return dim == 1 ? ix : ix * (cells[1] + 1) + iy; }
  std::array<int, 2> node_grid(int i) const;
  double element_measure() const { return dim == 1 ? h : 0.5 * h * h; }
  bool has_region(std::string_view label) const { return regions.count(label) != 0; }
  const Shape& shape(std::string_view label) const;
  // Nodes with no hat support inside Omega; the exterior data lives here.
  std::vector<int> exterior_dofs() const;
};

Mesh build_mesh(const Box& box, double h, const std::vector<Region>& regions);

const std::vector<int>& region_dofs(const Mesh& mesh, std::string_view label);

// Nodes inside the open shape whose whole hat support lies in the closed shape.
std::vector<int> dofs_supported_in(const Mesh& mesh, const Shape& shape);

// Smallest grid-aligned box containing every region grown by margin.
Box enclosing_box(const std::vector<Region>& regions, double margin, double h);

std::vector<char> mask_of(const Mesh& mesh, const std::vector<int>& dofs);

}  // namespace fracot
