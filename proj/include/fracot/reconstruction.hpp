#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "fracot/dnmap.hpp"

namespace fracot {

enum class BumpProfile { Mollifier, Polynomial };

struct BumpSequence {
  Point center{0.0, 0.0};
  std::vector<double> scales;
  std::vector<Eigen::VectorXd> vectors;
  std::vector<double> energies;      // Phi^T A Phi after normalization
  std::vector<double> raw_energies;  // energy of the unscaled profile phi(N (x - x0))
  std::vector<double> amplitudes;    // c_N
  std::vector<double> l2_norms;
};

// Powers of two starting at 2, kept while the support lies in W, stopped once it spans < 4 nodes.
std::vector<double> default_schedule(const Mesh& mesh, const Shape& W, const Point& x0);

BumpSequence bump_sequence(const Mesh& mesh, const SymForm& gagliardo, const SymForm& mass,
                           const Shape& W, const Point& x0, std::vector<double> Ns = {},
                           BumpProfile profile = BumpProfile::Mollifier);

struct ReconstructionSample {
  double N = 0.0;
  double estimate = 0.0;
  double potential_term = 0.0;
  double correction_energy = 0.0;       // E(u - Phi)
  double decomposition_residual = 0.0;  // ⟨Lambda Phi, Phi⟩ vs E(u-Phi) + 2B(u-Phi, Phi) + E(Phi)
};

struct PowerFit {
  double limit = 0.0;
  double amplitude = 0.0;
  double rate = 0.0;
};

// Least-squares fit of y = limit + amplitude * N^{-rate}.
PowerFit fit_power_limit(const std::vector<double>& N, const std::vector<double>& y);

// Least-squares slope of log|y| against log N.
double loglog_slope(const std::vector<double>& N, const std::vector<double>& y);

struct Reconstruction {
  std::vector<ReconstructionSample> samples;
  PowerFit fit;
  double extrapolated = 0.0;
};

Reconstruction exterior_reconstruct(const DirichletSolver& solver, const BumpSequence& bumps);

struct DecaySample {
  double N = 0.0;
  double value = 0.0;
  double bound = 0.0;
};

struct DecayCheck {
  std::vector<DecaySample> samples;
  double theta = 1.0;
  double C = 0.0;
  double fitted_exponent = 0.0;
  bool vanishing = true;  // |value_N| nonincreasing
  bool bounded = true;    // |value_N| <= bound_N (1 + tol)
};

DecayCheck potential_decay_check(const Mesh& mesh, const Eigen::VectorXd& q, const BumpSequence& bumps,
                                 double p, const KernelParams& params, double tol = 1e-9);

double interpolation_exponent(int n, double s, double p);

}  // namespace fracot
