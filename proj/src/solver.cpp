#include "fracot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracot/errors.hpp"

namespace fracot {

ForwardForms assemble_forward(const PairQuadrature& quad, const Coefficients& coeffs, Execution exec,
                              ExteriorGamma ext) {
  ForwardForms f;
  f.conductivity = conductivity_form(quad, coeffs, exec, ext);
  f.potential = potential_form(quad.mesh(), coeffs.q);
  return f;
}

DirichletSolver::DirichletSolver(const Mesh& mesh, ForwardForms forms, const SolverOptions& opts,
                                 std::vector<int> interior)
    : mesh_(&mesh), forms_(std::move(forms)), opts_(opts), interior_(std::move(interior)) {
  if (interior_.empty()) interior_ = mesh.interior_dofs;
  require(!interior_.empty(), Errc::InvalidArgument, "Dirichlet problem has no interior dofs");
  mask_ = mask_of(mesh, interior_);
  system_ = forms_.system();
  block_ = principal_block(system_, interior_);
  if (static_cast<int>(interior_.size()) <= opts_.direct_limit) {
    llt_ = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(block_);
    if (llt_->info() != Eigen::Success) {
      fail(Errc::CoercivityLost, "interior block of B_{gamma,q} is not positive definite");
    }
  }
}

DirichletSolution DirichletSolver::solve(const Eigen::VectorXd& f_ext, const Eigen::VectorXd* F_src,
                                         const std::array<double, 4>& exterior) const {
  const Mesh& mesh = *mesh_;
  const int n = mesh.num_nodes();
  require(f_ext.size() == n, Errc::InvalidArgument, "exterior data has the wrong size");
  for (int i : interior_) {
    if (f_ext(i) != 0.0) fail(Errc::SupportViolation, "exterior data is nonzero on an interior dof");
  }
  Eigen::VectorXd full_rhs = -system_ * f_ext + forms_.conductivity.exterior_functional(exterior);
  if (F_src) {
    require(F_src->size() == n, Errc::InvalidArgument, "source functional has the wrong size");
    full_rhs += *F_src;
  }
  const Eigen::VectorXd rhs = gather(full_rhs, interior_);
  Eigen::VectorXd x;
  if (llt_) {
    x = llt_->solve(rhs);
  } else {
    x = Eigen::VectorXd::Zero(rhs.size());
    const int max_it = opts_.max_iteration_factor * static_cast<int>(rhs.size());
    const PcgResult r = pcg(block_, rhs, x, opts_.tolerance, max_it);
    if (r.lost_positivity) fail(Errc::CoercivityLost, "conjugate gradient met nonpositive curvature");
    if (!r.converged) {
      std::ostringstream os;
      os << "conjugate gradient stalled at relative residual " << r.relative_residual;
      fail(Errc::SolverDiverged, os.str());
    }
  }
  DirichletSolution sol;
  sol.f_ext = f_ext;
  sol.u = f_ext;
  for (std::size_t k = 0; k < interior_.size(); ++k) sol.u(interior_[k]) = x(k);
  const double rn = rhs.norm();
  sol.residual = (block_ * x - rhs).norm() / (rn > 0.0 ? rn : 1.0);
  if (!(sol.residual <= std::max(opts_.tolerance, 1e-12))) {
    std::ostringstream os;
    os << "solve finished with relative residual " << sol.residual;
    fail(Errc::SolverDiverged, os.str());
  }
  const Eigen::VectorXd tc = forms_.conductivity.exterior_functional(exterior);
  double far = 0.0;
  for (int k = 0; k < forms_.conductivity.tail.cols(); ++k) {
    far += exterior[k] * exterior[k] * forms_.conductivity.tail.col(k).sum();
  }
  sol.energy = sol.u.dot(system_ * sol.u) - 2.0 * sol.u.dot(tc) + far;
  return sol;
}

DirichletSolution solve_dirichlet(const ForwardForms& forms, const Mesh& mesh, const Eigen::VectorXd& f_ext,
                                  const Eigen::VectorXd& F_src, const SolverOptions& opts) {
  DirichletSolver solver(mesh, forms, opts);
  return solver.solve(f_ext, &F_src);
}

double delta0_from(double C_opt) { return 2.0 * std::max(1.0, C_opt); }

PoincareResult poincare_constant(const Mesh& mesh, const KernelParams& params, const SymForm& gagliardo,
                                 const SymForm& mass, const std::vector<int>& dofs,
                                 PoincareConvention conv, const EigenOptions& opts) {
  (void)mesh;
  require(!dofs.empty(), Errc::InvalidArgument, "Poincare constant needs at least one interior dof");
  const double scale = conv == PoincareConvention::Gagliardo ? 2.0 / params.C : 1.0;
  const Eigen::MatrixXd K = scale * principal_block(gagliardo.entries, dofs);
  const Eigen::MatrixXd M = principal_block(mass.entries, dofs);
  // shift-invert: the largest eigenvalue of (M, K) is 1 / lambda_min(K, M)
  const Extremes e = pencil_extremes(M, K, opts);
  require(e.max > 0.0, Errc::EigenFailure, "seminorm block is not positive definite");
  PoincareResult r;
  r.C_opt = e.max;
  r.lambda_min = 1.0 / e.max;
  r.delta0 = delta0_from(r.C_opt);
  return r;
}

double multiplier_norm_estimate(const SymForm& gagliardo, const SymForm& mass, const SymForm& potential,
                                const std::vector<int>& dofs, const EigenOptions& opts) {
  std::vector<int> idx = dofs;
  if (idx.empty()) {
    idx.resize(gagliardo.dim());
    for (int i = 0; i < gagliardo.dim(); ++i) idx[i] = i;
  }
  const Eigen::MatrixXd Q = principal_block(potential.entries, idx);
  if (Q.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Eigen::MatrixXd H = principal_block(gagliardo.entries + mass.entries, idx);
  const Extremes e = pencil_extremes(Q, H, opts);
  return std::max(std::abs(e.min), std::abs(e.max));
}

double coercivity_bound(double gamma0, double delta0, double q_small_norm) {
  return gamma0 / delta0 - q_small_norm;
}

double interior_min_eigenvalue(const Eigen::MatrixXd& system, const SymForm& gagliardo,
                               const SymForm& mass, const std::vector<int>& dofs,
                               const EigenOptions& opts) {
  const Eigen::MatrixXd K = principal_block(system, dofs);
  const Eigen::MatrixXd H = principal_block(gagliardo.entries + mass.entries, dofs);
  return pencil_extremes(K, H, opts).min;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> split_potential(const Eigen::VectorXd& q,
                                                            const std::vector<char>& nonnegative_part) {
  Eigen::VectorXd q2 = Eigen::VectorXd::Zero(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (!nonnegative_part.empty() && nonnegative_part[i]) q2(i) = std::max(q(i), 0.0);
  }
  return {q - q2, q2};
}

}  // namespace fracot
