#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "fracot/assembly.hpp"
#include "fracot/coefficients.hpp"
#include "fracot/mesh.hpp"
#include "fracot/solver.hpp"

namespace fx {

using namespace fracot;

// Omega = (-1, 1) with W1 = (1.3, 1.9), box grown by margin.
inline Mesh line(double h, double margin = 2.0) {
  const std::vector<Region> regs = {{kOmega, Shape::interval(-1, 1)}, {kW1, Shape::interval(1.3, 1.9)}};
  return build_mesh(enclosing_box(regs, margin, h), h, regs);
}

inline Mesh square(double h, double margin = 1.0) {
  const std::vector<Region> regs = {{kOmega, Shape::rect(-1, -1, 1, 1)}, {kW1, Shape::rect(1.3, -0.3, 1.9, 0.3)}};
  return build_mesh(enclosing_box(regs, margin, h), h, regs);
}

// Mesh with its quadrature and the coefficient-free forms.
struct Lab {
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<PairQuadrature> quad;
  KernelParams params;
  SymForm A;
  SymForm M;

  Lab(Mesh m, double s) : mesh(std::make_unique<Mesh>(std::move(m))), params(KernelParams::standard(mesh->dim, s)) {
    quad = std::make_unique<PairQuadrature>(*mesh, params);
    A = gagliardo_form(*quad);
    M = mass_matrix(*mesh);
  }
  int n() const { return mesh->num_nodes(); }
  Eigen::VectorXd ones() const { return Eigen::VectorXd::Ones(n()); }
  Eigen::VectorXd zeros() const { return Eigen::VectorXd::Zero(n()); }
  Coefficients coeffs(const Eigen::VectorXd& gamma, const Eigen::VectorXd& q) const {
    return Coefficients::from_nodal(gamma, q);
  }
  DirichletSolver solver(const Coefficients& c, const SolverOptions& opts = {}) const {
    return DirichletSolver(*mesh, assemble_forward(*quad, c), opts);
  }
  Eigen::VectorXd sample(double (*f)(double)) const {
    Eigen::VectorXd v(n());
    for (int i = 0; i < n(); ++i) v(i) = f(mesh->nodes[i][0]);
    return v;
  }
};

inline Eigen::VectorXd bump_at(const Mesh& mesh, const Point& c, double r, const std::vector<char>* mask = nullptr) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mask && !(*mask)[i]) continue;
    double d2 = 0.0;
    for (int k = 0; k < mesh.dim; ++k) d2 += (mesh.nodes[i][k] - c[k]) * (mesh.nodes[i][k] - c[k]);
    v(i) = bump_profile(std::sqrt(d2) / r);
  }
  return v;
}

inline Eigen::VectorXd random_on(const std::vector<int>& dofs, int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int i : dofs) v(i) = U(rng);
  return v;
}

inline double max_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

}  // namespace fx
