#include "fracot/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracot/errors.hpp"

namespace fracot {

Coefficients Coefficients::from_nodal(Eigen::VectorXd gamma, Eigen::VectorXd q) {
  require(gamma.size() == q.size(), Errc::InvalidArgument, "gamma and q sizes differ");
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    if (!(gamma(i) > 0.0) || !std::isfinite(gamma(i))) {
      std::ostringstream os;
      os << "gamma(" << i << ") = " << gamma(i);
      fail(Errc::NonPositiveGamma, os.str());
    }
    require(std::isfinite(q(i)), Errc::InvalidArgument, "q must be finite");
  }
  Coefficients c;
  c.m_gamma = gamma.array().sqrt() - 1.0;
  c.gamma0 = gamma.minCoeff();
  c.gamma = std::move(gamma);
  c.q = std::move(q);
  return c;
}

Coefficients Coefficients::background(int num_nodes) {
  return from_nodal(Eigen::VectorXd::Ones(num_nodes), Eigen::VectorXd::Zero(num_nodes));
}

double smooth_step(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

double bump_profile(double r) {
  if (std::abs(r) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

Profile Profile::constant(double v) {
  Profile p;
  p.kind = Kind::Constant;
  p.base = v;
  return p;
}

double Profile::operator()(const Point& x) const {
  switch (kind) {
    case Kind::Constant:
      return base;
    case Kind::Gaussian: {
      const double dx = x[0] - center[0];
      const double dy = x[1] - center[1];
      return base + amplitude * std::exp(-(dx * dx + dy * dy) / (width * width));
    }
    case Kind::Piecewise: {
      const auto it = std::upper_bound(breaks.begin(), breaks.end(), x[0]);
      return values[static_cast<std::size_t>(it - breaks.begin())];
    }
    case Kind::Table: {
      if (x[0] <= breaks.front()) return values.front();
      if (x[0] >= breaks.back()) return values.back();
      const auto it = std::upper_bound(breaks.begin(), breaks.end(), x[0]);
      const std::size_t k = static_cast<std::size_t>(it - breaks.begin());
      const double t = (x[0] - breaks[k - 1]) / (breaks[k] - breaks[k - 1]);
      return (1.0 - t) * values[k - 1] + t * values[k];
    }
    case Kind::Plateau:
      return base + (amplitude - base) * smooth_step(shape.distance(x) / transition);
  }
  return base;
}

Eigen::VectorXd sample(const Mesh& mesh, const Profile& profile) {
  Eigen::VectorXd v(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) v(i) = profile(mesh.nodes[i]);
  return v;
}

}  // namespace fracot
