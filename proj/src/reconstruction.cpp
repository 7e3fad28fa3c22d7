#include "fracot/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracot/coefficients.hpp"
#include "fracot/errors.hpp"

namespace fracot {

namespace {

double profile_value(BumpProfile profile, double r) {
  if (r >= 1.0) return 0.0;
  if (profile == BumpProfile::Mollifier) return bump_profile(r);
  const double t = 1.0 - r * r;
  return t * t * t * t;
}

double dist(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

int support_count(const Mesh& mesh, const Point& x0, double radius) {
  int c = 0;
  for (const Point& p : mesh.nodes) c += dist(p, x0, mesh.dim) < radius;
  return c;
}

}  // namespace

std::vector<double> default_schedule(const Mesh& mesh, const Shape& W, const Point& x0) {
  std::vector<double> out;
  for (double N = 2.0; N < 1e9; N *= 2.0) {
    const double radius = 1.0 / N;
    // nodes across the support along one axis
    int across = 0;
    for (int k = -static_cast<int>(radius / mesh.h) - 1; k <= static_cast<int>(radius / mesh.h) + 1; ++k) {
      across += std::abs(k * mesh.h) < radius;
    }
    if (across < 4) break;
    if (contains_neighbourhood(W, Shape::ball(mesh.dim, x0, radius), 0.0)) out.push_back(N);
  }
  return out;
}

BumpSequence bump_sequence(const Mesh& mesh, const SymForm& gagliardo, const SymForm& mass,
                           const Shape& W, const Point& x0, std::vector<double> Ns, BumpProfile profile) {
  if (!W.contains(x0)) fail(Errc::OutsideMeasurementSet, "bump centre lies outside W");
  if (Ns.empty()) Ns = default_schedule(mesh, W, x0);
  require(!Ns.empty(), Errc::UnresolvableScale, "no bump scale fits inside W on this mesh");
  std::sort(Ns.begin(), Ns.end());
  BumpSequence seq;
  seq.center = x0;
  for (double N : Ns) {
    const double radius = 1.0 / N;
    if (!contains_neighbourhood(W, Shape::ball(mesh.dim, x0, radius), 0.0)) {
      std::ostringstream os;
      os << "support of radius " << radius << " leaves W";
      fail(Errc::OutsideMeasurementSet, os.str());
    }
    int across = 0;
    for (int k = -static_cast<int>(radius / mesh.h) - 1; k <= static_cast<int>(radius / mesh.h) + 1; ++k) {
      across += std::abs(k * mesh.h) < radius;
    }
    if (across < 4 || support_count(mesh, x0, radius) < 4) {
      std::ostringstream os;
      os << "scale N=" << N << " spans " << across << " nodes across its support";
      fail(Errc::UnresolvableScale, os.str());
    }
    Eigen::VectorXd phi(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) phi(i) = profile_value(profile, N * dist(mesh.nodes[i], x0, mesh.dim));
    const double raw = phi.dot(gagliardo.entries * phi);
    require(raw > 0.0, Errc::UnresolvableScale, "bump has zero discrete energy");
    const double c = 1.0 / std::sqrt(raw);
    phi *= c;
    seq.scales.push_back(N);
    seq.raw_energies.push_back(raw);
    seq.amplitudes.push_back(c);
    seq.energies.push_back(phi.dot(gagliardo.entries * phi));
    seq.l2_norms.push_back(std::sqrt(phi.dot(mass.entries * phi)));
    seq.vectors.push_back(std::move(phi));
  }
  return seq;
}

PowerFit fit_power_limit(const std::vector<double>& N, const std::vector<double>& y) {
  PowerFit best;
  const std::size_t m = N.size();
  require(m == y.size() && m >= 1, Errc::InvalidArgument, "fit needs matching samples");
  if (m < 3) {
    best.limit = y.back();
    return best;
  }
  auto solve = [&](double b, PowerFit& fit) {
    // linear least squares for (limit, amplitude) at fixed rate b
    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double x = std::pow(N[k], -b);
      s1 += 1;
      sx += x;
      sxx += x * x;
      sy += y[k];
      sxy += x * y[k];
    }
    const double det = s1 * sxx - sx * sx;
    if (std::abs(det) < 1e-300) return 1e300;
    fit.limit = (sxx * sy - sx * sxy) / det;
    fit.amplitude = (s1 * sxy - sx * sy) / det;
    fit.rate = b;
    double sse = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double r = y[k] - fit.limit - fit.amplitude * std::pow(N[k], -b);
      sse += r * r;
    }
    return sse;
  };
  double best_sse = 1e300;
  double best_b = 1.0;
  for (double b = 0.05; b <= 4.0 + 1e-12; b += 0.01) {
    PowerFit f;
    const double e = solve(b, f);
    if (e < best_sse) {
      best_sse = e;
      best_b = b;
    }
  }
  double lo = std::max(0.01, best_b - 0.01);
  double hi = best_b + 0.01;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double a = hi - g * (hi - lo);
    const double b = lo + g * (hi - lo);
    PowerFit fa, fb;
    if (solve(a, fa) < solve(b, fb)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  solve(0.5 * (lo + hi), best);
  return best;
}

double loglog_slope(const std::vector<double>& N, const std::vector<double>& y) {
  const std::size_t m = N.size();
  require(m >= 2 && m == y.size(), Errc::InvalidArgument, "slope needs two or more samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double lx = std::log(N[k]);
    const double ly = std::log(std::abs(y[k]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

Reconstruction exterior_reconstruct(const DirichletSolver& solver, const BumpSequence& bumps) {
  Reconstruction out;
  const Eigen::MatrixXd& B = solver.system();
  std::vector<double> Ns, ys;
  for (std::size_t k = 0; k < bumps.vectors.size(); ++k) {
    const Eigen::VectorXd& phi = bumps.vectors[k];
    const DirichletSolution sol = solver.solve(phi);
    const Eigen::VectorXd d = sol.u - phi;
    ReconstructionSample r;
    r.N = bumps.scales[k];
    r.estimate = sol.u.dot(B * phi);
    r.potential_term = phi.dot(solver.forms().potential.entries * phi);
    r.correction_energy = d.dot(B * d);
    const double rhs = r.correction_energy + 2.0 * d.dot(B * phi) + phi.dot(B * phi);
    r.decomposition_residual = std::abs(r.estimate - rhs) / std::max(std::abs(r.estimate), 1e-300);
    out.samples.push_back(r);
    Ns.push_back(r.N);
    ys.push_back(r.estimate);
  }
  out.fit = fit_power_limit(Ns, ys);
  out.extrapolated = out.fit.limit;
  return out;
}

double interpolation_exponent(int n, double s, double p) {
  const double lower = n / (2.0 * s);
  if (!(p > lower)) {
    std::ostringstream os;
    os << "integrability exponent p=" << p << " must exceed n/(2s)=" << lower;
    fail(Errc::ExponentOutOfRange, os.str());
  }
  if (p <= n / s) return 2.0 - n / (s * p);
  return 1.0;
}

DecayCheck potential_decay_check(const Mesh& mesh, const Eigen::VectorXd& q, const BumpSequence& bumps,
                                 double p, const KernelParams& params, double tol) {
  DecayCheck out;
  out.theta = interpolation_exponent(params.n, params.s, p);
  require(!bumps.vectors.empty(), Errc::InvalidArgument, "empty bump sequence");
  const SymForm mq = potential_form(mesh, q);
  for (std::size_t k = 0; k < bumps.vectors.size(); ++k) {
    DecaySample d;
    d.N = bumps.scales[k];
    d.value = bumps.vectors[k].dot(mq.entries * bumps.vectors[k]);
    out.samples.push_back(d);
  }
  out.C = std::abs(out.samples[0].value) / std::pow(bumps.l2_norms[0], out.theta);
  std::vector<double> Ns, vs;
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    DecaySample& d = out.samples[k];
    d.bound = out.C * std::pow(bumps.l2_norms[k], out.theta);
    if (std::abs(d.value) > d.bound * (1.0 + tol) + 1e-300) out.bounded = false;
    if (k > 0 && std::abs(d.value) > std::abs(out.samples[k - 1].value) * (1.0 + tol)) out.vanishing = false;
    if (d.value != 0.0) {
      Ns.push_back(d.N);
      vs.push_back(d.value);
    }
  }
  if (Ns.size() >= 2) out.fitted_exponent = loglog_slope(Ns, vs);
  return out;
}

}  // namespace fracot
