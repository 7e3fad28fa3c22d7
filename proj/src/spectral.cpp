#include "fracot/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "fracot/errors.hpp"

namespace fracot {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void check_margin(const Mesh& mesh, const Eigen::VectorXd& u, const SpectralOptions& opts) {
  const double peak = u.cwiseAbs().maxCoeff();
  if (peak == 0.0) return;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (std::abs(u(i)) <= opts.support_threshold * peak) continue;
    for (int k = 0; k < mesh.dim; ++k) {
      const double margin = opts.min_margin_fraction * mesh.box.width(k);
      const double x = mesh.nodes[i][k];
      if (x - mesh.box.lower[k] < margin - 1e-12 || mesh.box.upper[k] - x < margin - 1e-12) {
        std::ostringstream os;
        os << "field is non-negligible at node " << i << " within " << margin
           << " of the box edge along axis " << k;
        fail(Errc::InsufficientPadding, os.str());
      }
    }
  }
}

}  // namespace

Eigen::VectorXd spectral_frac_laplacian(const Mesh& mesh, const KernelParams& params,
                                        const Eigen::VectorXd& u, const SpectralOptions& opts) {
  require(u.size() == mesh.num_nodes(), Errc::InvalidArgument, "field has the wrong size");
  check_margin(mesh, u, opts);
  const double two_pi = 2.0 * std::numbers::pi;
  const double h = mesh.h;
  const double s = params.s;
  Eigen::VectorXd out(mesh.num_nodes());

  if (mesh.dim == 1) {
    const int nb = mesh.num_nodes();
    const int P = next_pow2(opts.padding_factor * nb);
    std::vector<double> in(P, 0.0);
    std::vector<std::complex<double>> spec(P / 2 + 1);
    for (int i = 0; i < nb; ++i) in[i] = u(i);
    fftw_plan fwd, bwd;
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fwd = fftw_plan_dft_r2c_1d(P, in.data(), reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
      bwd = fftw_plan_dft_c2r_1d(P, reinterpret_cast<fftw_complex*>(spec.data()), in.data(), FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    for (int k = 0; k <= P / 2; ++k) {
      const double xi = two_pi * k / (P * h);
      spec[k] *= std::pow(xi, 2.0 * s) / P;
    }
    fftw_execute(bwd);
    for (int i = 0; i < nb; ++i) out(i) = in[i];
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    return out;
  }

  const int nx = mesh.cells[0] + 1;
  const int ny = mesh.cells[1] + 1;
  const int px = next_pow2(opts.padding_factor * nx);
  const int py = next_pow2(opts.padding_factor * ny);
  const int pyc = py / 2 + 1;
  std::vector<double> in(static_cast<std::size_t>(px) * py, 0.0);
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(px) * pyc);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) in[static_cast<std::size_t>(i) * py + j] = u(mesh.node_index(i, j));
  }
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_dft_r2c_2d(px, py, in.data(), reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(px, py, reinterpret_cast<fftw_complex*>(spec.data()), in.data(), FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  const double norm = 1.0 / (static_cast<double>(px) * py);
  for (int i = 0; i < px; ++i) {
    const int ki = i <= px / 2 ? i : i - px;
    const double xi1 = two_pi * ki / (px * h);
    for (int j = 0; j < pyc; ++j) {
      const double xi2 = two_pi * j / (py * h);
      const double mag2 = xi1 * xi1 + xi2 * xi2;
      spec[static_cast<std::size_t>(i) * pyc + j] *= std::pow(mag2, s) * norm;
    }
  }
  fftw_execute(bwd);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) out(mesh.node_index(i, j)) = in[static_cast<std::size_t>(i) * py + j];
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  return out;
}

}  // namespace fracot
