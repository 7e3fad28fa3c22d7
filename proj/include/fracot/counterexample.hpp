#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fracot/dnmap.hpp"
#include "fracot/solver.hpp"

namespace fracot {

enum class Layout { Figure, Text };

struct CounterexampleGeometry {
  Shape omega;        // Omega
  Shape omega_prime;  // compactly inside Omega
  Shape cutoff;       // support of the exterior cutoff
  Shape W;
  double eps = 0.05;
  Layout layout = Layout::Figure;
};

// Default figure layout in one dimension.
CounterexampleGeometry figure_geometry();

// Throws GeometryViolation when the separation hypotheses fail.
void check_geometry(const CounterexampleGeometry& g);

// sup of the unit-mass standard mollifier on B_1 in R^n.
double mollifier_sup(int n);
double unit_ball_volume(int n);

// eps^{n/2} / (2 |B_1|^{1/2} |rho|_inf^{1/2} |m_tilde|_{L2})
double scaling_constant(int n, double eps, double m_tilde_l2);

// Discrete convolution with the sampled mollifier of radius eps, weights normalized to unit sum.
Eigen::VectorXd mollify(const Mesh& mesh, const Eigen::VectorXd& v, double eps);

struct CounterexampleOptions {
  double eta_amplitude = 1.0;
  double transition_factor = 2.5;  // eta falls from 1 to 0 over this many eps away from the cutoff set
  double negativity_tolerance = 1e-9;
  SolverOptions solver;
};

struct CounterexamplePair {
  CounterexampleGeometry geometry;
  Eigen::VectorXd eta;
  Eigen::VectorXd m_tilde;
  Eigen::VectorXd m;
  Eigen::VectorXd frac_lap_m;  // nodal (-Delta)^s m
  Eigen::VectorXd q1;
  Coefficients gamma1;  // gamma1 = (1 + m)^2 with q = q1
  double m_tilde_l2 = 0.0;
  double C_eps = 0.0;
};

CounterexamplePair build_counterexample(const Mesh& mesh, const SymForm& gagliardo, const SymForm& mass,
                                        const CounterexampleGeometry& geometry,
                                        const CounterexampleOptions& opts = {});

struct NonuniquenessReport {
  double dn_gap = 0.0;              // |Lambda_1 - Lambda_0|_F / |Lambda_0|_F over W hats
  double q_gap = 0.0;               // |q1|_{L2(W)} / |q1|_{L2(box)}
  double q_form_check = 0.0;        // max |v^T Q w| / (|v|_H |w|_H) over interior test pairs
  double q_form_scale = 0.0;        // the same maximum for the diagonal part alone
  double condition3_residual = 0.0; // max over W nodes |(-Delta)^s m - q1|
  double gamma_w_deviation = 0.0;   // max over W nodes |gamma1 - 1|
  double m_min = 0.0;
  double m_max = 0.0;
  double multiplier_estimate = 0.0;
  double delta0 = 0.0;              // energy convention, where the coercivity chain holds
  double delta0_gagliardo = 0.0;
  double gamma0 = 1.0;
  bool admissible = false;          // multiplier_estimate < gamma0 / delta0
  int w_nodes = 0;
};

NonuniquenessReport verify_nonuniqueness(const PairQuadrature& quad, const SymForm& gagliardo,
                                         const SymForm& mass, const CounterexamplePair& pair,
                                         const std::vector<int>& w_dofs, const SolverOptions& opts = {});

// gamma2 = gamma1 (1 + amplitude chi), chi = 0 on W and 1 on Omega: gamma differs away from W only.
Coefficients mismatched_partner(const Mesh& mesh, const CounterexamplePair& pair, double amplitude = 9.0);

}  // namespace fracot
