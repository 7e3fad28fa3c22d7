#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "fixtures.hpp"
#include "fracot/assembly.hpp"
#include "fracot/errors.hpp"
#include "oracles.hpp"

using namespace fracot;

namespace {

Mesh interval_mesh(double a, double b, double h) {
  return build_mesh(Box{1, {a, 0}, {b, 0}}, h, {{kOmega, Shape::interval(0.5 * a, 0.5 * b)}});
}

Mesh rect_mesh(double w, double hgt, double h) {
  return build_mesh(Box{2, {0, 0}, {w, hgt}}, h, {{kOmega, Shape::rect(0.25 * w, 0.25 * hgt, 0.75 * w, 0.75 * hgt)}});
}

SymForm assemble(const Mesh& mesh, double s) {
  PairQuadrature quad(mesh, KernelParams::standard(mesh.dim, s));
  return gagliardo_form(quad);
}

// max over entries of |a - b| / sqrt(b_ii b_jj)
double scaled_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::sqrt(b(i, i) * b(j, j)));
    }
  }
  return worst;
}

}  // namespace

class GagliardoOrder : public ::testing::TestWithParam<double> {};

TEST_P(GagliardoOrder, InteriorEntriesMatchFourierSymbol) {
  const double s = GetParam();
  const double h = 0.25;
  const Mesh mesh = interval_mesh(-3, 3, h);
  const SymForm A = assemble(mesh, s);
  const int c = mesh.num_nodes() / 2;
  const double diag = oracle::fourier_gagliardo_1d(h, s, 0);
  for (int k = 0; k <= 6; ++k) {
    EXPECT_NEAR(A.entries(c, c + k), oracle::fourier_gagliardo_1d(h, s, k), 1e-4 * diag) << "offset " << k;
  }
}

TEST_P(GagliardoOrder, ConstantOnBoxEqualsAnalyticTail) {
  const double s = GetParam();
  const double L = 4.0;
  const Mesh mesh = interval_mesh(-2, 2, 0.125);
  const SymForm A = assemble(mesh, s);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(mesh.num_nodes());
  const double C = normalization_constant(1, s);
  const double exact = C * 2.0 * std::pow(L, 1.0 - 2.0 * s) / (2.0 * s * (1.0 - 2.0 * s));
  EXPECT_NEAR(one.dot(A.entries * one), exact, 1e-6 * exact);
  // a field constant on all of R is in the kernel: rows reduce to their tails
  const Eigen::VectorXd rows = A.entries * one;
  const Eigen::VectorXd tails = A.tail.rowwise().sum();
  EXPECT_LT((rows - tails).cwiseAbs().maxCoeff(), 1e-10 * A.entries.diagonal().maxCoeff());
}

TEST_P(GagliardoOrder, AllEntriesMatchBruteForceOnSmallLine) {
  const double s = GetParam();
  const Mesh mesh = interval_mesh(-1.5, 1.5, 3.0 / 18);
  ASSERT_LE(mesh.num_nodes(), 20);
  const SymForm A = assemble(mesh, s);
  const Eigen::MatrixXd B = oracle::brute_force_gagliardo(mesh, s, 10);
  EXPECT_LT(scaled_gap(A.entries, B), 0.01);
}

TEST_P(GagliardoOrder, AllEntriesMatchBruteForceOnSmallRectangle) {
  const double s = GetParam();
  const Mesh mesh = rect_mesh(4.0 / 3, 1.0, 1.0 / 3);
  ASSERT_LE(mesh.num_nodes(), 20);
  const SymForm A = assemble(mesh, s);
  const Eigen::MatrixXd B = oracle::brute_force_gagliardo(mesh, s, 10);
  EXPECT_LT(scaled_gap(A.entries, B), 0.01);
}

TEST_P(GagliardoOrder, ScalesWithMeshDilation) {
  const double s = GetParam();
  const SymForm a = assemble(interval_mesh(-2, 2, 0.25), s);
  const SymForm b = assemble(interval_mesh(-4, 4, 0.5), s);
  const double f = std::pow(2.0, 1.0 - 2.0 * s);
  EXPECT_LT(fx::max_rel(b.entries, f * a.entries), 1e-12);
  const SymForm c = assemble(rect_mesh(1.0, 1.0, 0.25), s);
  const SymForm d = assemble(rect_mesh(2.0, 2.0, 0.5), s);
  EXPECT_LT(fx::max_rel(d.entries, std::pow(2.0, 2.0 - 2.0 * s) * c.entries), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Orders, GagliardoOrder, ::testing::Values(0.1, 0.25, 0.4));

TEST(Gagliardo, SingleHatMatchesBruteForce) {
  const Mesh mesh = interval_mesh(-2, 2, 0.5);
  const SymForm A = assemble(mesh, 0.25);
  const Eigen::MatrixXd B = oracle::brute_force_gagliardo(mesh, 0.25, 10);
  const int c = 4;
  ASSERT_DOUBLE_EQ(mesh.nodes[c][0], 0.0);
  EXPECT_NEAR(A.entries(c, c), B(c, c), 0.01 * B(c, c));
}

TEST(Gagliardo, StoredExactlySymmetric) {
  for (const Mesh& mesh : {interval_mesh(-1, 1, 0.125), rect_mesh(1.0, 1.0, 0.125)}) {
    const SymForm A = assemble(mesh, 0.3);
    EXPECT_EQ(A.symmetry_defect(), 0.0);
    EXPECT_TRUE((A.entries.array() == A.entries.transpose().array()).all());
  }
}

TEST(Gagliardo, PositiveDefiniteOnInterior) {
  for (const Mesh& mesh : {interval_mesh(-1, 1, 0.0625), rect_mesh(1.0, 1.0, 0.125)}) {
    for (double s : {0.1, 0.4}) {
      const SymForm A = assemble(mesh, s);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.entries);
      EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    }
  }
}

TEST(Gagliardo, HighOrderPlaneAgainstExtrapolatedOracle) {
  // midpoint error of the oracle decays like d^{2-2s}; extrapolate two refinements
  const double s = 0.75;
  const Mesh mesh = rect_mesh(2.0 / 3, 2.0 / 3, 1.0 / 3);
  const SymForm A = assemble(mesh, s);
  const int c = mesh.node_index(1, 1);
  const Eigen::MatrixXd b1 = oracle::brute_force_gagliardo(mesh, s, 16);
  const Eigen::MatrixXd b2 = oracle::brute_force_gagliardo(mesh, s, 24);
  const double p = 2.0 - 2.0 * s;
  const double w1 = std::pow(16.0, p), w2 = std::pow(24.0, p);
  const double extrapolated = (w2 * b2(c, c) - w1 * b1(c, c)) / (w2 - w1);
  EXPECT_NEAR(A.entries(c, c), extrapolated, 0.01 * extrapolated);
}

TEST(Conductivity, UnitGammaReproducesGagliardo) {
  for (const Mesh& mesh : {interval_mesh(-2, 2, 0.25), rect_mesh(1.0, 1.0, 0.25)}) {
    PairQuadrature quad(mesh, KernelParams::standard(mesh.dim, 0.25));
    const SymForm A = gagliardo_form(quad);
    const SymForm B = conductivity_form(quad, Coefficients::background(mesh.num_nodes()));
    EXPECT_LT((A.entries - B.entries).cwiseAbs().maxCoeff(), 1e-12 * A.entries.cwiseAbs().maxCoeff());
  }
}

TEST(Conductivity, ConstantGammaScales) {
  const Mesh mesh = interval_mesh(-2, 2, 0.25);
  PairQuadrature quad(mesh, KernelParams::standard(1, 0.25));
  const SymForm A = gagliardo_form(quad);
  const int n = mesh.num_nodes();
  const Coefficients four = Coefficients::from_nodal(Eigen::VectorXd::Constant(n, 4.0), Eigen::VectorXd::Zero(n));
  const SymForm B = conductivity_form(quad, four);
  EXPECT_LT(fx::max_rel(B.entries, 4.0 * A.entries), 1e-12);
  // sqrt(gamma) dropping to 1 beyond the box only lowers the exterior pairs
  const SymForm U = conductivity_form(quad, four, Execution::Parallel, ExteriorGamma::Unit);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(4.0 * A.entries - U.entries);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12 * A.entries.maxCoeff());
  EXPECT_GT((4.0 * A.entries - U.entries).diagonal()(0), 0.0);
}

TEST(Conductivity, SmoothGammaCentralHatMatchesBruteForce) {
  const double s = 0.25;
  const Mesh mesh = interval_mesh(-2, 2, 0.25);
  PairQuadrature quad(mesh, KernelParams::standard(1, s));
  auto gamma = [](double x) { return 1.0 + 0.5 * std::exp(-x * x); };
  Eigen::VectorXd g(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) g(i) = gamma(mesh.nodes[i][0]);
  const SymForm B = conductivity_form(quad, Coefficients::from_nodal(g, Eigen::VectorXd::Zero(mesh.num_nodes())));
  const Eigen::MatrixXd ref =
      oracle::brute_force_gagliardo(mesh, s, 10, [&](const double* x) { return std::sqrt(gamma(x[0])); });
  const int c = mesh.num_nodes() / 2;
  EXPECT_NEAR(B.entries(c, c), ref(c, c), 0.01 * ref(c, c));
  EXPECT_NEAR(B.entries(c, c + 1), ref(c, c + 1), 0.01 * ref(c, c));
}

TEST(Conductivity, RejectsNonPositiveGamma) {
  Eigen::VectorXd g = Eigen::VectorXd::Ones(5);
  g(2) = 0.0;
  try {
    Coefficients::from_nodal(g, Eigen::VectorXd::Zero(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonPositiveGamma);
  }
}

TEST(Mass, OneDimensionalBlocks) {
  const Mesh mesh = build_mesh(Box{1, {0, 0}, {1, 0}}, 0.25, {{kOmega, Shape::interval(0.25, 0.75)}});
  const SymForm M = mass_matrix(mesh);
  EXPECT_NEAR(M.entries(2, 2), 2 * 0.25 / 3, 1e-15);
  EXPECT_NEAR(M.entries(2, 3), 0.25 / 6, 1e-15);
  EXPECT_NEAR(M.entries(0, 0), 0.25 / 3, 1e-15);
  EXPECT_EQ(M.entries(0, 2), 0.0);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(mesh.num_nodes());
  EXPECT_NEAR(one.dot(M.entries * one), 1.0, 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.entries);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(Mass, PlaneIntegratesAffineProducts) {
  const Mesh mesh = rect_mesh(1.0, 2.0, 0.25);
  const SymForm M = mass_matrix(mesh);
  Eigen::VectorXd x(mesh.num_nodes()), y(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    x(i) = mesh.nodes[i][0];
    y(i) = mesh.nodes[i][1];
  }
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(mesh.num_nodes());
  EXPECT_NEAR(one.dot(M.entries * one), 2.0, 1e-13);
  EXPECT_NEAR(x.dot(M.entries * y), 0.5 * 2.0, 1e-13);  // int x y over [0,1]x[0,2]
  EXPECT_NEAR(x.dot(M.entries * x), 2.0 / 3.0, 1e-13);
}

TEST(Potential, Examples) {
  const Mesh mesh = interval_mesh(-2, 2, 0.5);
  const int n = mesh.num_nodes();
  EXPECT_EQ(potential_form(mesh, Eigen::VectorXd::Zero(n)).entries.cwiseAbs().maxCoeff(), 0.0);
  const SymForm M = mass_matrix(mesh);
  EXPECT_LT((potential_form(mesh, Eigen::VectorXd::Ones(n)).entries - M.entries).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  q(4) = 1.0;
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
  EXPECT_NEAR(one.dot(potential_form(mesh, q).entries * one), 0.5, 1e-14);
}

TEST(Potential, ExactForProductsOfThreeHats) {
  const Mesh mesh = rect_mesh(1.0, 1.0, 0.5);
  Eigen::VectorXd q(mesh.num_nodes()), u(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    q(i) = mesh.nodes[i][0];
    u(i) = mesh.nodes[i][1];
  }
  // int x y^2 over the unit square
  EXPECT_NEAR(u.dot(potential_form(mesh, q).entries * u), 1.0 / 6.0, 1e-14);
}

TEST(FracLaplacianFunctional, ZeroAndDefinition) {
  const Mesh mesh = interval_mesh(-2, 2, 0.25);
  const SymForm A = assemble(mesh, 0.25);
  const int n = mesh.num_nodes();
  EXPECT_EQ(frac_laplacian_functional(A, Eigen::VectorXd::Zero(n)).cwiseAbs().maxCoeff(), 0.0);
  const Eigen::VectorXd m = fx::bump_at(mesh, {0, 0}, 1.0);
  EXPECT_LT((frac_laplacian_functional(A, m) - A.entries * m).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ProductEnergy, MatchesFormOnSingleFactors) {
  const Mesh mesh = interval_mesh(-2, 2, 0.25);
  PairQuadrature quad(mesh, KernelParams::standard(1, 0.25));
  const SymForm A = gagliardo_form(quad);
  const Eigen::VectorXd u = fx::bump_at(mesh, {0.2, 0}, 1.2);
  const Eigen::VectorXd v = fx::bump_at(mesh, {-0.3, 0}, 0.9);
  ProductField fu, fv;
  fu.add(u);
  fv.add(v);
  EXPECT_NEAR(product_energy(quad, fu, fv), u.dot(A.entries * v), 1e-12 * std::abs(u.dot(A.entries * v)));
}
