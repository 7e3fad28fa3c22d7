#include "fracot/reduction.hpp"

#include <cmath>
#include <sstream>

#include "fracot/errors.hpp"

namespace fracot {

double relative_guard(double value, double scale) { return std::abs(value) + 1e-14 * scale + 1e-300; }

ReducedPotentialForm reduced_potential_form(const PairQuadrature& quad, const SymForm& gagliardo,
                                            const Coefficients& coeffs) {
  const Mesh& mesh = quad.mesh();
  const int n = mesh.num_nodes();
  require(coeffs.gamma.size() == n, Errc::InvalidArgument, "coefficients do not match the mesh");
  for (int i = 0; i < n; ++i) {
    if (!(coeffs.gamma(i) > 0.0)) fail(Errc::NonPositiveGamma, "gamma must be positive");
  }
  const Eigen::VectorXd g = coeffs.sqrt_gamma();
  const Eigen::VectorXd dm =
      frac_laplacian_functional(gagliardo, coeffs.m_gamma) - gagliardo.exterior_functional(quad.side_values(coeffs.m_gamma));
  const SymForm mq = potential_form(mesh, coeffs.q);
  const Eigen::VectorXd ginv = g.cwiseInverse();
  ReducedPotentialForm Q;
  Q.gamma_ref = coeffs;
  Q.base.entries = ginv.asDiagonal() * mq.entries * ginv.asDiagonal();
  Q.base.entries.diagonal() -= dm.cwiseProduct(ginv);
  Q.base.entries = 0.5 * (Q.base.entries + Q.base.entries.transpose()).eval();
  Q.base.tail = Eigen::MatrixXd::Zero(n, quad.num_sides());
  return Q;
}

DirichletSolver schrodinger_solver(const Mesh& mesh, const SymForm& gagliardo,
                                   const ReducedPotentialForm& Q, const SolverOptions& opts) {
  ForwardForms forms;
  forms.conductivity = gagliardo;
  forms.potential = Q.base;
  return DirichletSolver(mesh, std::move(forms), opts);
}

double liouville_residual(const ForwardForms& forms, const SymForm& gagliardo,
                          const ReducedPotentialForm& Q, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& phi) {
  const Eigen::MatrixXd B = forms.system();
  const double lhs = u.dot(B * phi);
  const Eigen::VectorXd g = Q.gamma_ref.sqrt_gamma();
  const Eigen::VectorXd v = g.cwiseProduct(u);
  const Eigen::VectorXd w = g.cwiseProduct(phi);
  const double rhs = v.dot(gagliardo.entries * w) + v.dot(Q.base.entries * w);
  const double scale = u.cwiseAbs().dot(B.cwiseAbs() * phi.cwiseAbs());
  return std::abs(lhs - rhs) / relative_guard(lhs, scale);
}

double dn_transfer_residual(const DirichletSolver& conductivity, const DirichletSolver& schrodinger,
                            const Coefficients& coeffs, const Eigen::VectorXd& Gamma,
                            const std::vector<int>& w, const Eigen::VectorXd& f,
                            const Eigen::VectorXd& g) {
  const int n = conductivity.mesh().num_nodes();
  const std::vector<char> in_w = mask_of(conductivity.mesh(), w);
  for (int i = 0; i < n; ++i) {
    if ((f(i) != 0.0 || g(i) != 0.0) && !in_w[i]) {
      fail(Errc::SupportViolation, "f and g must be supported in W");
    }
  }
  for (int i : w) {
    if (coeffs.gamma(i) != Gamma(i)) {
      std::ostringstream os;
      os << "gamma differs from Gamma on W node " << i;
      fail(Errc::HypothesisViolation, os.str());
    }
  }
  const double a = dn_pairing(conductivity, f, g);
  const Eigen::VectorXd sg = Gamma.array().sqrt();
  const double b = dn_pairing(schrodinger, sg.cwiseProduct(f), sg.cwiseProduct(g));
  const double scale = f.cwiseAbs().dot(conductivity.system().cwiseAbs() * g.cwiseAbs());
  return std::abs(a - b) / relative_guard(a, scale);
}

DecompositionCheck dn_difference_decomposition(const PairQuadrature& quad,
                                               const DirichletSolver& pair1, const Coefficients& c1,
                                               const DirichletSolver& pair2, const Coefficients& c2,
                                               const Eigen::VectorXd& f) {
  const Mesh& mesh = quad.mesh();
  // Products with f only see elements touching supp f; gamma must agree there and u = f there.
  for (const Element& el : mesh.elements) {
    bool touches = false;
    for (int k = 0; k < mesh.nodes_per_element(); ++k) touches = touches || f(el.v[k]) != 0.0;
    if (!touches) continue;
    for (int k = 0; k < mesh.nodes_per_element(); ++k) {
      const int i = el.v[k];
      if (c1.gamma(i) != c2.gamma(i)) fail(Errc::HypothesisViolation, "gamma differs near supp f");
      if (pair1.interior_mask()[i] || pair2.interior_mask()[i]) {
        fail(Errc::HypothesisViolation, "supp f must stay one element away from the interior");
      }
    }
  }
  DecompositionCheck out;
  const DirichletSolution s1 = pair1.solve(f);
  const DirichletSolution s2 = pair2.solve(f);
  out.lhs = s1.u.dot(pair1.system() * f) - s2.u.dot(pair2.system() * f);

  const Eigen::VectorXd g1 = c1.sqrt_gamma();
  const Eigen::VectorXd g2 = c2.sqrt_gamma();
  const auto e1 = quad.side_values(g1);
  const auto e2 = quad.side_values(g2);
  std::array<double, 4> dm_ext{};
  for (int k = 0; k < 4; ++k) dm_ext[k] = e2[k] - e1[k];

  ProductField dm;
  dm.add(c2.m_gamma - c1.m_gamma, dm_ext);
  ProductField g1ff;
  g1ff.add(g1, e1);
  g1ff.add(f);
  g1ff.add(f);
  out.deviation_term = product_energy(quad, dm, g1ff);

  out.potential_term = f.dot((pair1.forms().potential.entries - pair2.forms().potential.entries) * f);

  ProductField g1f;
  g1f.add(g1, e1);
  g1f.add(f);
  ProductField g1u1;
  g1u1.add(g1, e1);
  g1u1.add(s1.u);
  ProductField g2u2;
  g2u2.add(g2, e2);
  g2u2.add(s2.u);
  out.relation_term = product_energy(quad, g1u1, g1f) - product_energy(quad, g2u2, g1f);

  const double sum = out.deviation_term + out.potential_term + out.relation_term;
  const double scale = std::abs(out.deviation_term) + std::abs(out.potential_term) +
                       std::abs(out.relation_term) + std::abs(out.lhs);
  out.residual = std::abs(out.lhs - sum) / (scale + 1e-300);
  return out;
}

}  // namespace fracot
