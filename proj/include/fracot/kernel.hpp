#pragma once

namespace fracot {

// C_{n,s} = 4^s Gamma(n/2 + s) / (pi^{n/2} |Gamma(-s)|).
double normalization_constant(int n, double s);

struct KernelParams {
  int n = 1;
  double s = 0.25;
  double C = 0.0;

  static KernelParams standard(int n, double s);
  // Validates 0 < s < min(1, n/2) and C > 0.
  void validate() const;
};

}  // namespace fracot
