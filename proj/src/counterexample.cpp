#include "fracot/counterexample.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracot/errors.hpp"
#include "fracot/reduction.hpp"

namespace fracot {

CounterexampleGeometry figure_geometry() {
  CounterexampleGeometry g;
  g.omega = Shape::interval(-1.0, 1.0);
  g.omega_prime = Shape::interval(-0.5, 0.5);
  g.cutoff = Shape::interval(-1.5, -1.3);
  g.W = Shape::interval(1.3, 1.9);
  g.eps = 0.05;
  g.layout = Layout::Figure;
  return g;
}

namespace {

void expect(bool ok, const char* what) {
  if (!ok) fail(Errc::GeometryViolation, what);
}

}  // namespace

void check_geometry(const CounterexampleGeometry& g) {
  require(g.eps > 0.0, Errc::GeometryViolation, "eps must be positive");
  const double e5 = 5.0 * g.eps;
  expect(contains_neighbourhood(g.omega, g.omega_prime, e5), "OmegaPrime grown by 5 eps leaves Omega");
  expect(distance(g.omega_prime, g.cutoff) >= 2.0 * e5, "OmegaPrime and Cutoff neighbourhoods overlap");
  expect(distance(g.omega_prime, g.W) >= e5, "OmegaPrime neighbourhood meets W");
  expect(distance(g.cutoff, g.W) >= e5, "Cutoff neighbourhood meets W");
  expect(!intersects(g.omega, g.W), "W meets Omega");
  if (g.layout == Layout::Figure) {
    expect(distance(g.cutoff, g.omega) >= e5, "Cutoff neighbourhood meets Omega");
  } else {
    expect(contains_neighbourhood(g.omega, g.cutoff, e5), "Cutoff neighbourhood leaves Omega");
  }
}

double unit_ball_volume(int n) { return n == 1 ? 2.0 : std::numbers::pi; }

double mollifier_sup(int n) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double Z = 0.0;
  if (n == 1) {
    Z = 2.0 * ts.integrate([](double r) { return bump_profile(r); }, 0.0, 1.0);
  } else {
    Z = 2.0 * std::numbers::pi * ts.integrate([](double r) { return r * bump_profile(r); }, 0.0, 1.0);
  }
  return std::exp(-1.0) / Z;
}

double scaling_constant(int n, double eps, double m_tilde_l2) {
  require(m_tilde_l2 > 0.0, Errc::InvalidArgument, "cutoff solution vanishes");
  return std::pow(eps, 0.5 * n) /
         (2.0 * std::sqrt(unit_ball_volume(n)) * std::sqrt(mollifier_sup(n)) * m_tilde_l2);
}

Eigen::VectorXd mollify(const Mesh& mesh, const Eigen::VectorXd& v, double eps) {
  const int r = static_cast<int>(std::floor(eps / mesh.h));
  struct Tap {
    int dx, dy;
    double w;
  };
  std::vector<Tap> taps;
  double total = 0.0;
  const int ry = mesh.dim == 2 ? r : 0;
  for (int dx = -r; dx <= r; ++dx) {
    for (int dy = -ry; dy <= ry; ++dy) {
      const double d = mesh.h * std::sqrt(double(dx * dx + dy * dy)) / eps;
      const double w = bump_profile(d);
      if (w > 0.0) {
        taps.push_back({dx, dy, w});
        total += w;
      }
    }
  }
  require(total > 0.0, Errc::UnresolvableScale, "mollifier radius below mesh size");
  for (Tap& t : taps) t.w /= total;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  const int nx = mesh.cells[0];
  const int ny = mesh.dim == 2 ? mesh.cells[1] : 0;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const auto g = mesh.node_grid(i);
    double acc = 0.0;
    for (const Tap& t : taps) {
      const int jx = g[0] - t.dx;
      const int jy = g[1] - t.dy;
      if (jx < 0 || jx > nx || jy < 0 || jy > ny) continue;
      acc += t.w * v(mesh.node_index(jx, jy));
    }
    out(i) = acc;
  }
  return out;
}

CounterexamplePair build_counterexample(const Mesh& mesh, const SymForm& gagliardo, const SymForm& mass,
                                        const CounterexampleGeometry& geometry,
                                        const CounterexampleOptions& opts) {
  check_geometry(geometry);
  CounterexamplePair out;
  out.geometry = geometry;
  const int N = mesh.num_nodes();
  const double width = opts.transition_factor * geometry.eps;
  out.eta.resize(N);
  for (int i = 0; i < N; ++i) {
    out.eta(i) = opts.eta_amplitude * smooth_step(geometry.cutoff.distance(mesh.nodes[i]) / width);
  }
  const Shape harmonic_set = geometry.omega_prime.dilated(2.0 * geometry.eps);
  std::vector<int> interior = dofs_supported_in(mesh, harmonic_set);
  require(!interior.empty(), Errc::EmptyRegion, "no nodes inside the grown OmegaPrime");

  ForwardForms forms{gagliardo, potential_form(mesh, Eigen::VectorXd::Zero(N))};
  DirichletSolver solver(mesh, forms, opts.solver, interior);
  out.m_tilde = solver.solve(out.eta).u;
  const double peak = std::max(1.0, out.m_tilde.cwiseAbs().maxCoeff());
  if (out.m_tilde.minCoeff() < -opts.negativity_tolerance * peak) {
    std::ostringstream os;
    os << "cutoff solution dips to " << out.m_tilde.minCoeff();
    fail(Errc::NegativeSolution, os.str());
  }
  out.m_tilde_l2 = std::sqrt(std::max(0.0, out.m_tilde.dot(mass.entries * out.m_tilde)));
  if (out.m_tilde_l2 == 0.0) {
    out.C_eps = 0.0;
    out.m = Eigen::VectorXd::Zero(N);
  } else {
    out.C_eps = scaling_constant(mesh.dim, geometry.eps, out.m_tilde_l2);
    out.m = out.C_eps * mollify(mesh, out.m_tilde, geometry.eps);
  }
  out.frac_lap_m = nodal_frac_laplacian(gagliardo, mass, out.m);
  const Eigen::VectorXd g = (1.0 + out.m.array()).matrix();
  out.q1 = g.cwiseProduct(out.frac_lap_m);
  out.gamma1 = Coefficients::from_nodal(g.cwiseProduct(g), out.q1);
  return out;
}

namespace {

double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double nb = b.norm();
  return (a - b).norm() / std::max(nb, 1e-300);
}

Eigen::VectorXd test_bump(const Mesh& mesh, const Point& c, double r, const std::vector<char>& mask) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (!mask[i]) continue;
    double d2 = 0.0;
    for (int k = 0; k < mesh.dim; ++k) d2 += (mesh.nodes[i][k] - c[k]) * (mesh.nodes[i][k] - c[k]);
    v(i) = bump_profile(std::sqrt(d2) / r);
  }
  return v;
}

}  // namespace

NonuniquenessReport verify_nonuniqueness(const PairQuadrature& quad, const SymForm& gagliardo,
                                         const SymForm& mass, const CounterexamplePair& pair,
                                         const std::vector<int>& w_dofs, const SolverOptions& opts) {
  const Mesh& mesh = quad.mesh();
  const int N = mesh.num_nodes();
  NonuniquenessReport rep;
  rep.w_nodes = static_cast<int>(w_dofs.size());
  require(!w_dofs.empty(), Errc::EmptyRegion, "W has no nodes");

  const Coefficients background = Coefficients::background(N);
  DirichletSolver s1(mesh, assemble_forward(quad, pair.gamma1), opts);
  DirichletSolver s0(mesh, assemble_forward(quad, background), opts);
  const DNMatrix d1 = dn_matrix(s1, w_dofs, w_dofs);
  const DNMatrix d0 = dn_matrix(s0, w_dofs, w_dofs);
  rep.dn_gap = relative_frobenius(d1.entries, d0.entries);

  const std::vector<char> wmask = mask_of(mesh, w_dofs);
  Eigen::VectorXd qw = Eigen::VectorXd::Zero(N);
  for (int i : w_dofs) qw(i) = pair.q1(i);
  const double qall = std::sqrt(std::max(0.0, pair.q1.dot(mass.entries * pair.q1)));
  rep.q_gap = std::sqrt(std::max(0.0, qw.dot(mass.entries * qw))) / std::max(qall, 1e-300);

  for (int i : w_dofs) {
    rep.condition3_residual = std::max(rep.condition3_residual, std::abs(pair.frac_lap_m(i) - pair.q1(i)));
    rep.gamma_w_deviation = std::max(rep.gamma_w_deviation, std::abs(pair.gamma1.gamma(i) - 1.0));
  }
  rep.m_min = pair.m.minCoeff();
  rep.m_max = pair.m.maxCoeff();

  // Q vanishes on Omega: test with smooth bumps supported in Omega.
  const ReducedPotentialForm Q = reduced_potential_form(quad, gagliardo, pair.gamma1);
  const Eigen::MatrixXd H = gagliardo.entries + mass.entries;
  const Eigen::VectorXd g = pair.gamma1.sqrt_gamma();
  Eigen::VectorXd diag_part(N);
  for (int i = 0; i < N; ++i) diag_part(i) = (gagliardo.entries.row(i).dot(pair.m)) / g(i);
  const Box b = mesh.shape(kOmega).bounds();
  const double len = b.upper[0] - b.lower[0];
  std::vector<Eigen::VectorXd> tests;
  for (double t : {0.25, 0.5, 0.75}) {
    Point c{b.lower[0] + t * len, 0.5 * (b.lower[1] + b.upper[1])};
    const Eigen::VectorXd v = test_bump(mesh, c, 0.2 * len, mesh.interior_mask);
    if (v.norm() > 0.0) tests.push_back(v);
  }
  for (const auto& v : tests) {
    for (const auto& w : tests) {
      const double nv = std::sqrt(v.dot(H * v));
      const double nw = std::sqrt(w.dot(H * w));
      rep.q_form_check = std::max(rep.q_form_check, std::abs(v.dot(Q.base.entries * w)) / (nv * nw));
      const double dpart = (v.array() * w.array() * diag_part.array()).sum();
      rep.q_form_scale = std::max(rep.q_form_scale, std::abs(dpart) / (nv * nw));
    }
  }

  const SymForm mq = potential_form(mesh, pair.q1);
  rep.multiplier_estimate = multiplier_norm_estimate(gagliardo, mass, mq, {}, opts.eigen);
  const PoincareResult pe = poincare_constant(mesh, quad.params(), gagliardo, mass, mesh.interior_dofs,
                                              PoincareConvention::Energy, opts.eigen);
  const PoincareResult pg = poincare_constant(mesh, quad.params(), gagliardo, mass, mesh.interior_dofs,
                                              PoincareConvention::Gagliardo, opts.eigen);
  rep.delta0 = pe.delta0;
  rep.delta0_gagliardo = pg.delta0;
  rep.gamma0 = 1.0;
  rep.admissible = rep.multiplier_estimate < rep.gamma0 / rep.delta0;
  return rep;
}

Coefficients mismatched_partner(const Mesh& mesh, const CounterexamplePair& pair, double amplitude) {
  const Shape& W = pair.geometry.W;
  const Shape& omega = pair.geometry.omega;
  const double gap = std::max(distance(W, omega), mesh.h);
  Eigen::VectorXd gamma2 = pair.gamma1.gamma;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const double chi = smooth_step(omega.distance(mesh.nodes[i]) / (0.5 * gap));
    gamma2(i) *= 1.0 + amplitude * chi;
  }
  return Coefficients::from_nodal(gamma2, pair.q1);
}

}  // namespace fracot
