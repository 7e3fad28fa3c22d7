#include "fracot/linalg.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "fracot/errors.hpp"

namespace fracot {

Eigen::MatrixXd principal_block(const Eigen::MatrixXd& a, const std::vector<int>& idx) {
  return cross_block(a, idx, idx);
}

Eigen::MatrixXd cross_block(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                            const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) out(i, j) = a(rows[i], cols[j]);
  }
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
  return out;
}

Extremes lanczos_extremes(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& op,
                          int n, const EigenOptions& opts) {
  const int steps = std::min(n, opts.max_steps);
  std::mt19937 rng(opts.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd V(n, steps + 1);
  Eigen::VectorXd alpha(steps), beta(steps);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  V.col(0) = v.normalized();
  Eigen::VectorXd w(n);
  Extremes last;
  for (int k = 0; k < steps; ++k) {
    op(V.col(k), w);
    alpha(k) = V.col(k).dot(w);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd c = V.leftCols(k + 1).transpose() * w;
      w -= V.leftCols(k + 1) * c;
    }
    beta(k) = w.norm();
    const int m = k + 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(alpha.head(m), beta.head(std::max(m - 1, 0)), Eigen::ComputeEigenvectors);
    if (tri.info() != Eigen::Success) fail(Errc::EigenFailure, "tridiagonal eigensolver failed");
    const Eigen::VectorXd& theta = tri.eigenvalues();
    last.min = theta(0);
    last.max = theta(m - 1);
    const double scale = std::max(std::abs(last.min), std::abs(last.max));
    const double res_min = std::abs(beta(k) * tri.eigenvectors()(m - 1, 0));
    const double res_max = std::abs(beta(k) * tri.eigenvectors()(m - 1, m - 1));
    const bool exhausted = beta(k) <= 1e-14 * std::max(scale, 1e-300) || m == n;
    if (exhausted || (res_min <= opts.tolerance * scale && res_max <= opts.tolerance * scale)) return last;
    V.col(k + 1) = w / beta(k);
  }
  std::ostringstream os;
  os << "Lanczos did not converge in " << steps << " steps";
  fail(Errc::EigenFailure, os.str());
}

Extremes pencil_extremes(const Eigen::MatrixXd& K, const Eigen::MatrixXd& M, const EigenOptions& opts) {
  const int n = static_cast<int>(K.rows());
  require(n > 0, Errc::EigenFailure, "empty eigenproblem");
  if (n <= opts.dense_limit) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(K, M, Eigen::EigenvaluesOnly);
    if (ges.info() != Eigen::Success) fail(Errc::EigenFailure, "dense generalized eigensolver failed");
    return {ges.eigenvalues()(0), ges.eigenvalues()(n - 1)};
  }
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) fail(Errc::EigenFailure, "metric matrix is not positive definite");
  const auto& L = llt.matrixL();
  auto op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    Eigen::VectorXd t = L.transpose().solve(x);
    t = K * t;
    y = L.solve(t);
  };
  return lanczos_extremes(op, n, opts);
}

PcgResult pcg(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
              int max_iterations) {
  PcgResult res;
  const Eigen::VectorXd dinv = a.diagonal().cwiseInverse();
  const double bnorm = std::max(b.norm(), 1e-300);
  Eigen::VectorXd r = b - a * x;
  Eigen::VectorXd z = dinv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < max_iterations; ++it) {
    res.relative_residual = r.norm() / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      res.iterations = it;
      return res;
    }
    const Eigen::VectorXd ap = a * p;
    const double curv = p.dot(ap);
    if (!(curv > 0.0)) {
      res.lost_positivity = true;
      res.iterations = it;
      return res;
    }
    const double step = rz / curv;
    x += step * p;
    r -= step * ap;
    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  res.relative_residual = r.norm() / bnorm;
  res.converged = res.relative_residual <= tol;
  res.iterations = max_iterations;
  return res;
}

}  // namespace fracot
