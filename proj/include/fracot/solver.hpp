#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

#include "fracot/assembly.hpp"
#include "fracot/linalg.hpp"
#include "fracot/mesh.hpp"

namespace fracot {

struct SolverOptions {
  double tolerance = 1e-10;
  int direct_limit = 2000;
  int max_iteration_factor = 10;
  EigenOptions eigen;
};

// The pair {B_gamma, M_q} defining B_{gamma,q}.
struct ForwardForms {
  SymForm conductivity;
  SymForm potential;

  Eigen::MatrixXd system() const { return conductivity.entries + potential.entries; }
};

ForwardForms assemble_forward(const PairQuadrature& quad, const Coefficients& coeffs,
                              Execution exec = Execution::Parallel,
                              ExteriorGamma ext = ExteriorGamma::Boundary);

struct DirichletSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd f_ext;
  double residual = 0.0;
  double energy = 0.0;
};

// Factorized interior block of a system matrix; solves for many exterior data.
class DirichletSolver {
 public:
  // interior defaults to mesh.interior_dofs when empty.
  DirichletSolver(const Mesh& mesh, ForwardForms forms, const SolverOptions& opts = {},
                  std::vector<int> interior = {});

  // f_ext: nodal data vanishing on the interior; F_src: nodal functional (interior entries used);
  // exterior: constants continuing the data beyond each box side.
  DirichletSolution solve(const Eigen::VectorXd& f_ext, const Eigen::VectorXd* F_src = nullptr,
                          const std::array<double, 4>& exterior = {0, 0, 0, 0}) const;

  const Mesh& mesh() const { return *mesh_; }
  const ForwardForms& forms() const { return forms_; }
  const Eigen::MatrixXd& system() const { return system_; }
  const std::vector<int>& interior() const { return interior_; }
  const std::vector<char>& interior_mask() const { return mask_; }

 private:
  const Mesh* mesh_;
  ForwardForms forms_;
  SolverOptions opts_;
  std::vector<int> interior_;
  std::vector<char> mask_;
  Eigen::MatrixXd system_;
  Eigen::MatrixXd block_;
  std::shared_ptr<Eigen::LLT<Eigen::MatrixXd>> llt_;
};

DirichletSolution solve_dirichlet(const ForwardForms& forms, const Mesh& mesh,
                                  const Eigen::VectorXd& f_ext, const Eigen::VectorXd& F_src,
                                  const SolverOptions& opts = {});

enum class PoincareConvention { Gagliardo, Energy };

struct PoincareResult {
  double C_opt = 0.0;
  double delta0 = 0.0;
  double lambda_min = 0.0;
};

// C_opt = 1 / min over interior vectors of seminorm(u) / |u|^2, the seminorm being (2/C) A under
// the Gagliardo convention and A itself under the energy convention.
PoincareResult poincare_constant(const Mesh& mesh, const KernelParams& params, const SymForm& gagliardo,
                                 const SymForm& mass, const std::vector<int>& dofs,
                                 PoincareConvention conv = PoincareConvention::Gagliardo,
                                 const EigenOptions& opts = {});

double delta0_from(double C_opt);

// Largest |lambda| of (M_q, A + M) restricted to dofs (all nodes when empty).
double multiplier_norm_estimate(const SymForm& gagliardo, const SymForm& mass, const SymForm& potential,
                                const std::vector<int>& dofs = {}, const EigenOptions& opts = {});

double coercivity_bound(double gamma0, double delta0, double q_small_norm);

// Smallest eigenvalue of the interior block of system with respect to A + M.
double interior_min_eigenvalue(const Eigen::MatrixXd& system, const SymForm& gagliardo,
                               const SymForm& mass, const std::vector<int>& dofs,
                               const EigenOptions& opts = {});

// Splits q into q1 = q - q2 and q2 = max(q, 0) on the declared nonnegative dofs.
std::pair<Eigen::VectorXd, Eigen::VectorXd> split_potential(const Eigen::VectorXd& q,
                                                            const std::vector<char>& nonnegative_part);

}  // namespace fracot
