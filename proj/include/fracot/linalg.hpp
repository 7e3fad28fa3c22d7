#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace fracot {

struct EigenOptions {
  int dense_limit = 500;
  int max_steps = 400;
  double tolerance = 1e-10;
  unsigned seed = 12345;
};

struct Extremes {
  double min = 0.0;
  double max = 0.0;
};

// Extreme eigenvalues of the pencil (K, M) with M symmetric positive definite.
Extremes pencil_extremes(const Eigen::MatrixXd& K, const Eigen::MatrixXd& M, const EigenOptions& opts = {});

// Lanczos with full reorthogonalization on a symmetric operator of size n.
Extremes lanczos_extremes(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& op,
                          int n, const EigenOptions& opts);

Eigen::MatrixXd principal_block(const Eigen::MatrixXd& a, const std::vector<int>& idx);
Eigen::MatrixXd cross_block(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                            const std::vector<int>& cols);
Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx);

struct PcgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  bool lost_positivity = false;
};

// Jacobi-preconditioned conjugate gradient; x holds the initial guess on entry.
PcgResult pcg(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
              int max_iterations);

}  // namespace fracot
