#include "fracot/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracot/errors.hpp"

namespace fracot {

double normalization_constant(int n, double s) {
  require(s > 0.0 && s < 1.0, Errc::InvalidArgument, "order s must lie in (0, 1)");
  const double half_n = 0.5 * n;
  return std::pow(4.0, s) * std::tgamma(half_n + s) /
         (std::pow(std::numbers::pi, half_n) * std::abs(std::tgamma(-s)));
}

KernelParams KernelParams::standard(int n, double s) {
  KernelParams p;
  p.n = n;
  p.s = s;
  p.C = normalization_constant(n, s);
  return p;
}

void KernelParams::validate() const {
  std::ostringstream os;
  os << "need 0 < s < min(1, n/2) with n in {1,2}; got n=" << n << " s=" << s;
  require(n == 1 || n == 2, Errc::InvalidArgument, os.str());
  require(s > 0.0 && s < std::min(1.0, 0.5 * n), Errc::InvalidArgument, os.str());
  require(C > 0.0 && std::isfinite(C), Errc::InvalidArgument, "normalization constant must be positive");
}

}  // namespace fracot
