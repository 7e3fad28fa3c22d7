#include "fracot/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "fracot/errors.hpp"

namespace fracot {

namespace {

// Golub-Welsch on [-1, 1] for the weight (1 - t)^a (1 + t)^b.
void jacobi_symmetric(int n, double a, double b, Eigen::VectorXd& t, Eigen::VectorXd& w) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    if (k == 0) {
      diag(k) = (b - a) / (a + b + 2.0);
    } else {
      diag(k) = (b * b - a * a) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    double beta;
    if (k == 1) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    } else {
      beta = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    }
    off(k - 1) = std::sqrt(beta);
  }
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  require(eig.info() == Eigen::Success, Errc::QuadratureFailure,
          "Golub-Welsch eigenproblem failed for n=" + std::to_string(n));
  t = eig.eigenvalues();
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    w(k) = mu0 * v0 * v0;
  }
}

}  // namespace

Rule1D gauss_jacobi01(int n, double alpha, double beta) {
  require(n >= 1, Errc::InvalidArgument, "rule size must be positive");
  require(alpha > -1.0 && beta > -1.0, Errc::InvalidArgument, "Jacobi exponents must exceed -1");
  Eigen::VectorXd t, w;
  jacobi_symmetric(n, alpha, beta, t, w);
  // x = (1 + t)/2 maps (1 - t)^a (1 + t)^b dt onto 2^{a+b+1} (1 - x)^a x^b dx.
  const double scale = std::pow(2.0, -(alpha + beta + 1.0));
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int k = 0; k < n; ++k) {
    r.x[k] = 0.5 * (1.0 + t(k));
    r.w[k] = w(k) * scale;
  }
  return r;
}

TriangleRule collapsed_triangle_rule(int n) {
  // u runs along the collapsed direction with the Jacobian (1 - u) absorbed into the weight.
  const Rule1D a = gauss_jacobi01(n, 1.0, 0.0);
  const Rule1D b = gauss_legendre01(n);
  TriangleRule r;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      r.u.push_back(a.x[i]);
      r.v.push_back((1.0 - a.x[i]) * b.x[j]);
      r.w.push_back(a.w[i] * b.w[j]);
    }
  }
  return r;
}

}  // namespace fracot
