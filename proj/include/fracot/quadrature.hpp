#pragma once

#include <vector>

namespace fracot {

// One-dimensional rule on [0, 1].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
  int size() const { return static_cast<int>(x.size()); }
};

// Gauss rule for the weight (1 - x)^alpha * x^beta on [0, 1].
Rule1D gauss_jacobi01(int n, double alpha, double beta);

inline Rule1D gauss_legendre01(int n) { return gauss_jacobi01(n, 0.0, 0.0); }

// Rule on the reference triangle {u, v >= 0, u + v <= 1}; weights sum to 1/2.
struct TriangleRule {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> w;
  int size() const { return static_cast<int>(u.size()); }
};

// Collapsed tensor Gauss rule with n points per direction.
TriangleRule collapsed_triangle_rule(int n);

}  // namespace fracot
