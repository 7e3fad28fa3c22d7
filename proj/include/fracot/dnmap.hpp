#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fracot/solver.hpp"

namespace fracot {

struct DNMatrix {
  std::vector<int> rows;  // W2 hat nodes
  std::vector<int> cols;  // W1 hat nodes
  Eigen::MatrixXd entries;  // entries(j, i) = <Lambda phi_cols[i], phi_rows[j]>

  double symmetry_defect() const;
};

// <Lambda f, g> = B_{gamma,q}(u_f, g); f and g must vanish on the interior dofs.
double dn_pairing(const DirichletSolver& solver, const Eigen::VectorXd& f, const Eigen::VectorXd& g);

// One Dirichlet solve per column, columns in parallel on the shared factorization.
DNMatrix dn_matrix(const DirichletSolver& solver, const std::vector<int>& w1, const std::vector<int>& w2,
                   Execution exec = Execution::Parallel);

Eigen::VectorXd hat(int num_nodes, int node);

// |g1 u1 - g2 u2|_{L2} / |g1 u1|_{L2} with g = sqrt(gamma) and u_f solved for both pairs.
double solution_relation_residual(const DirichletSolver& pair1, const Coefficients& c1,
                                  const DirichletSolver& pair2, const Coefficients& c2,
                                  const SymForm& mass, const Eigen::VectorXd& f,
                                  const std::vector<int>& w2);

}  // namespace fracot
