#include "fracot/dnmap.hpp"

#include <omp.h>

#include <cmath>
#include <sstream>

#include "fracot/errors.hpp"

namespace fracot {

namespace {

void check_exterior(const DirichletSolver& solver, const Eigen::VectorXd& v, const char* name) {
  require(v.size() == solver.mesh().num_nodes(), Errc::InvalidArgument, std::string(name) + " has the wrong size");
  for (int i : solver.interior()) {
    if (v(i) != 0.0) {
      std::ostringstream os;
      os << name << " is nonzero on interior dof " << i;
      fail(Errc::SupportViolation, os.str());
    }
  }
}

}  // namespace

double DNMatrix::symmetry_defect() const {
  const double scale = std::max(entries.cwiseAbs().maxCoeff(), 1e-300);
  return (entries - entries.transpose()).cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXd hat(int num_nodes, int node) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(num_nodes);
  v(node) = 1.0;
  return v;
}

double dn_pairing(const DirichletSolver& solver, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  check_exterior(solver, f, "f");
  check_exterior(solver, g, "g");
  const DirichletSolution sol = solver.solve(f);
  return sol.u.dot(solver.system() * g);
}

DNMatrix dn_matrix(const DirichletSolver& solver, const std::vector<int>& w1, const std::vector<int>& w2,
                   Execution exec) {
  require(!w1.empty() && !w2.empty(), Errc::InvalidArgument, "measurement sets must be nonempty");
  const int n = solver.mesh().num_nodes();
  for (int i : w1) require(!solver.interior_mask()[i], Errc::SupportViolation, "W1 node lies in the interior");
  for (int j : w2) require(!solver.interior_mask()[j], Errc::SupportViolation, "W2 node lies in the interior");
  DNMatrix dn;
  dn.cols = w1;
  dn.rows = w2;
  dn.entries.resize(w2.size(), w1.size());
  const int ncols = static_cast<int>(w1.size());
  auto column = [&](int c) {
    const DirichletSolution sol = solver.solve(hat(n, w1[c]));
    const Eigen::VectorXd bu = solver.system() * sol.u;
    for (std::size_t r = 0; r < w2.size(); ++r) dn.entries(r, c) = bu(w2[r]);
  };
  if (exec == Execution::Serial) {
    for (int c = 0; c < ncols; ++c) column(c);
  } else {
#pragma omp parallel for schedule(static, 1)
    for (int c = 0; c < ncols; ++c) column(c);
  }
  return dn;
}

double solution_relation_residual(const DirichletSolver& pair1, const Coefficients& c1,
                                  const DirichletSolver& pair2, const Coefficients& c2,
                                  const SymForm& mass, const Eigen::VectorXd& f,
                                  const std::vector<int>& w2) {
  for (int j : w2) {
    if (c1.gamma(j) != c2.gamma(j)) {
      std::ostringstream os;
      os << "gamma differs on W2 node " << j << ": " << c1.gamma(j) << " vs " << c2.gamma(j);
      fail(Errc::HypothesisViolation, os.str());
    }
  }
  check_exterior(pair1, f, "f");
  check_exterior(pair2, f, "f");
  const Eigen::VectorXd v1 = c1.sqrt_gamma().cwiseProduct(pair1.solve(f).u);
  const Eigen::VectorXd v2 = c2.sqrt_gamma().cwiseProduct(pair2.solve(f).u);
  const Eigen::VectorXd d = v1 - v2;
  const double num = std::sqrt(std::max(0.0, d.dot(mass.entries * d)));
  const double den = std::sqrt(std::max(0.0, v1.dot(mass.entries * v1)));
  return num / std::max(den, 1e-300);
}

}  // namespace fracot
