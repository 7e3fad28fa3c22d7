#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "fracot/coefficients.hpp"
#include "fracot/pair_rules.hpp"

namespace fracot {

// Dense symmetric form over the nodal basis. tail(i, k) is the form evaluated on the hat phi_i
// and the unit function beyond side k of the box, with the opposite sign: for a field equal to
// u inside the box and to c_k beyond side k, B(field, phi_i) = (entries u)_i - sum_k c_k tail(i, k).
struct SymForm {
  Eigen::MatrixXd entries;
  Eigen::MatrixXd tail;

  int dim() const { return static_cast<int>(entries.rows()); }
  double symmetry_defect() const;
  Eigen::VectorXd exterior_functional(const std::array<double, 4>& side_values) const;
};

enum class Execution { Serial, Parallel };

// How sqrt(gamma) continues beyond the box.
enum class ExteriorGamma { Boundary, Unit };

SymForm gagliardo_form(const PairQuadrature& quad, Execution exec = Execution::Parallel);
SymForm conductivity_form(const PairQuadrature& quad, const Coefficients& coeffs,
                          Execution exec = Execution::Parallel,
                          ExteriorGamma ext = ExteriorGamma::Boundary);
SymForm potential_form(const Mesh& mesh, const Eigen::VectorXd& q);
SymForm mass_matrix(const Mesh& mesh);

// F_i = <(-Delta)^s m, phi_i> for m vanishing beyond the box, i.e. A m.
Eigen::VectorXd frac_laplacian_functional(const SymForm& gagliardo, const Eigen::VectorXd& m);
// Nodal values M^{-1} (A m - exterior part) of (-Delta)^s m, m continued by side constants.
Eigen::VectorXd nodal_frac_laplacian(const SymForm& gagliardo, const SymForm& mass,
                                     const Eigen::VectorXd& m,
                                     const std::array<double, 4>& exterior = {0, 0, 0, 0});

// Pointwise product of P1 fields, continued beyond each box side by a constant.
struct ProductField {
  std::vector<Eigen::VectorXd> factors;
  std::vector<std::array<double, 4>> exterior;

  void add(const Eigen::VectorXd& f, const std::array<double, 4>& ext = {0, 0, 0, 0}) {
    factors.push_back(f);
    exterior.push_back(ext);
  }
};

// (C/2) int int (F1(x)-F1(y))(F2(x)-F2(y)) |x-y|^{-n-2s} over R^n x R^n, products evaluated at
// quadrature points rather than interpolated.
double product_energy(const PairQuadrature& quad, const ProductField& f1, const ProductField& f2,
                      Execution exec = Execution::Parallel);

}  // namespace fracot
