#pragma once

#include <Eigen/Dense>

#include "fracot/dnmap.hpp"
#include "fracot/solver.hpp"

namespace fracot {

struct ReducedPotentialForm {
  SymForm base;
  Coefficients gamma_ref;
};

// v^T Q w = -<(-Delta)^s m, Pi(gamma^{-1/2} v w)> + (gamma^{-1/2} v)^T M_q (gamma^{-1/2} w), with m
// continued beyond the box by its side values.
ReducedPotentialForm reduced_potential_form(const PairQuadrature& quad, const SymForm& gagliardo,
                                            const Coefficients& coeffs);

// Solver for ((-Delta)^s + Q) v = 0 in Omega.
DirichletSolver schrodinger_solver(const Mesh& mesh, const SymForm& gagliardo,
                                   const ReducedPotentialForm& Q, const SolverOptions& opts = {});

// |B_{gamma,q}(u, phi) - B_Q(Pi(g u), Pi(g phi))| / (|B_{gamma,q}(u, phi)| + guard), g = sqrt(gamma).
double liouville_residual(const ForwardForms& forms, const SymForm& gagliardo,
                          const ReducedPotentialForm& Q, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& phi);

// Relative gap between <Lambda_{gamma,q} f, g> and <Lambda_Q (sqrt(Gamma) f), sqrt(Gamma) g>.
double dn_transfer_residual(const DirichletSolver& conductivity, const DirichletSolver& schrodinger,
                            const Coefficients& coeffs, const Eigen::VectorXd& Gamma,
                            const std::vector<int>& w, const Eigen::VectorXd& f,
                            const Eigen::VectorXd& g);

struct DecompositionCheck {
  double lhs = 0.0;             // <(Lambda_1 - Lambda_2) f, f>
  double deviation_term = 0.0;  // <(-Delta)^s (m2 - m1), g1 f^2>
  double potential_term = 0.0;  // <(q1 - q2) f, f>
  double relation_term = 0.0;   // <(-Delta)^{s/2}(g1 u1 - g2 u2), (-Delta)^{s/2}(g1 f)>
  double residual = 0.0;        // |lhs - sum of terms| relative to their magnitude
};

DecompositionCheck dn_difference_decomposition(const PairQuadrature& quad,
                                               const DirichletSolver& pair1, const Coefficients& c1,
                                               const DirichletSolver& pair2, const Coefficients& c2,
                                               const Eigen::VectorXd& f);

double relative_guard(double value, double scale);

}  // namespace fracot
