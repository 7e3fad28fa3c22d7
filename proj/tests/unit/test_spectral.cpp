#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "fracot/assembly.hpp"
#include "fracot/errors.hpp"
#include "fracot/spectral.hpp"
#include "oracles.hpp"

using namespace fracot;

namespace {

Mesh wide_line(double half, double h) {
  return build_mesh(Box{1, {-half, 0}, {half, 0}}, h, {{kOmega, Shape::interval(-1, 1)}});
}

Eigen::VectorXd gaussian(const Mesh& mesh) {
  Eigen::VectorXd u(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    double r2 = 0.0;
    for (int k = 0; k < mesh.dim; ++k) r2 += mesh.nodes[i][k] * mesh.nodes[i][k];
    u(i) = std::exp(-r2);
  }
  return u;
}

}  // namespace

TEST(Spectral, ZeroAndLinearity) {
  const Mesh mesh = wide_line(8, 1.0 / 16);
  const KernelParams p = KernelParams::standard(1, 0.25);
  EXPECT_EQ(spectral_frac_laplacian(mesh, p, Eigen::VectorXd::Zero(mesh.num_nodes())).cwiseAbs().maxCoeff(), 0.0);
  const Eigen::VectorXd u = gaussian(mesh);
  const Eigen::VectorXd a = spectral_frac_laplacian(mesh, p, u);
  const Eigen::VectorXd b = spectral_frac_laplacian(mesh, p, -3.5 * u);
  EXPECT_LT((b + 3.5 * a).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
}

TEST(Spectral, GaussianMatchesHypergeometric) {
  for (int n : {1, 2}) {
    const Mesh mesh = n == 1 ? wide_line(8, 1.0 / 32)
                             : build_mesh(Box{2, {-8, -8}, {8, 8}}, 0.25, {{kOmega, Shape::rect(-1, -1, 1, 1)}});
    for (double s : {0.25, 0.4}) {
      const Eigen::VectorXd v = spectral_frac_laplacian(mesh, KernelParams::standard(n, s), gaussian(mesh));
      double worst = 0.0;
      for (int i = 0; i < mesh.num_nodes(); ++i) {
        double r2 = 0.0;
        for (int k = 0; k < n; ++k) r2 += mesh.nodes[i][k] * mesh.nodes[i][k];
        if (r2 > 4.0) continue;
        worst = std::max(worst, std::abs(v(i) - oracle::gaussian_frac_laplacian(n, s, r2)));
      }
      EXPECT_LT(worst, 0.01 * oracle::gaussian_frac_laplacian(n, s, 0.0)) << n << " " << s;
    }
  }
}

TEST(Spectral, GaussianAtOriginAgreesWithQuadrature) {
  const Mesh mesh = wide_line(8, 1.0 / 64);
  const KernelParams p = KernelParams::standard(1, 0.25);
  PairQuadrature quad(mesh, p);
  const SymForm A = gagliardo_form(quad);
  const Eigen::VectorXd u = gaussian(mesh);
  const Eigen::VectorXd strong = nodal_frac_laplacian(A, mass_matrix(mesh), u);
  const Eigen::VectorXd spec = spectral_frac_laplacian(mesh, p, u);
  const int c = mesh.num_nodes() / 2;
  EXPECT_NEAR(strong(c), spec(c), 0.02 * std::abs(spec(c)));
}

TEST(Spectral, BumpFunctionalAgreesWithQuadrature) {
  const Mesh mesh = wide_line(4, 1.0 / 64);
  const KernelParams p = KernelParams::standard(1, 0.25);
  PairQuadrature quad(mesh, p);
  const SymForm A = gagliardo_form(quad);
  const Eigen::VectorXd m = fx::bump_at(mesh, {0, 0}, 1.0);
  const Eigen::VectorXd F = frac_laplacian_functional(A, m);
  const Eigen::VectorXd G = mass_matrix(mesh).entries * spectral_frac_laplacian(mesh, p, m);
  EXPECT_LT((F - G).norm(), 0.02 * G.norm());
}

TEST(Spectral, InsufficientPadding) {
  const Mesh mesh = wide_line(2, 1.0 / 16);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(mesh.num_nodes());
  try {
    spectral_frac_laplacian(mesh, KernelParams::standard(1, 0.25), u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InsufficientPadding);
  }
}
