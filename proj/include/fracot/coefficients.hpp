#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fracot/mesh.hpp"

namespace fracot {

struct Coefficients {
  Eigen::VectorXd gamma;
  Eigen::VectorXd q;
  Eigen::VectorXd m_gamma;
  double gamma0 = 1.0;

  // Throws NonPositiveGamma unless every nodal gamma is positive and finite.
  static Coefficients from_nodal(Eigen::VectorXd gamma, Eigen::VectorXd q);
  static Coefficients background(int num_nodes);

  Eigen::VectorXd sqrt_gamma() const { return gamma.array().sqrt(); }
};

// 1 for t <= 0, 0 for t >= 1, C-infinity in between.
double smooth_step(double t);

// Standard mollifier profile exp(-1/(1 - r^2)) on r < 1, unnormalized.
double bump_profile(double r);

// Scalar field presets sampled at nodes.
struct Profile {
  enum class Kind { Constant, Gaussian, Piecewise, Table, Plateau };
  Kind kind = Kind::Constant;
  double base = 1.0;
  double amplitude = 0.0;
  Point center{0.0, 0.0};
  double width = 1.0;
  // Piecewise: values[i] on [breaks[i-1], breaks[i]) along x; Table: (breaks[i], values[i]) knots.
  std::vector<double> breaks;
  std::vector<double> values;
  // Plateau: value amplitude on the shape, base beyond transition distance.
  Shape shape;
  double transition = 0.1;

  static Profile constant(double v);
  double operator()(const Point& x) const;
};

Eigen::VectorXd sample(const Mesh& mesh, const Profile& profile);

}  // namespace fracot
