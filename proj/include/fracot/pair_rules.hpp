#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "fracot/kernel.hpp"
#include "fracot/mesh.hpp"

namespace fracot {

struct QuadratureOptions {
  int singular_order = 6;  // Gauss-Jacobi order on element pairs sharing a node
  int duffy_order = 6;     // Gauss-Legendre order in the collapsed direction
  int far_order = 4;
  int near_far_order = 8;
  int near_far_span = 3;  // separated pairs up to this element offset use near_far_order
  int tail_order = 6;
  // 2D only
  int near_point_order = 6;  // collapsed Gauss per direction for the outer point of touching pairs
  int angle_order = 8;
  int radial_order = 8;
  int tail_angle_order = 16;
  int far_order_2d = 2;       // collapsed Gauss per direction on each triangle
  int near_far_order_2d = 3;
  int near_far_span_2d = 2;   // cell distance
  double self_check_tolerance = 1e-6;
};

// x in element a with basis values px, y in element b with basis values py.
// w carries the measure and |x - y|^{-n-2s} but not C_{n,s}.
struct PairSample {
  double px[3];
  double py[3];
  double w;
};

// y ranges over the complement of the box; w[k] integrates |x - y|^{-n-2s} over the part of
// the complement beyond side k (1D: left, right; 2D: x-low, x-high, y-low, y-high).
struct TailSample {
  double px[3];
  double w[4];
};

class PairQuadrature {
 public:
  PairQuadrature(const Mesh& mesh, const KernelParams& params, const QuadratureOptions& opts = {});

  const Mesh& mesh() const { return *mesh_; }
  const KernelParams& params() const { return params_; }
  int num_sides() const { return 2 * mesh_->dim; }

  // Samples of element a times element b; a == b covers the full product K x K.
  std::span<const PairSample> pair_samples(int a, int b, std::vector<PairSample>& scratch) const;
  std::span<const TailSample> tail_samples(int a) const;
  bool touching(int a, int b) const;

  // Per-side exterior values used to continue a nodal field beyond the box.
  std::array<double, 4> side_values(const Eigen::VectorXd& nodal) const;

 private:
  void build_1d();
  void build_2d();
  void far_2d(int a, int b, std::vector<PairSample>& out) const;

  const Mesh* mesh_;
  KernelParams params_;
  QuadratureOptions opts_;
  // 1D: rules indexed by element offset.
  std::vector<std::vector<PairSample>> by_offset_;
  // 2D: touching pairs keyed by (type a, type b, cell di, cell dj).
  std::map<std::tuple<int, int, int, int>, std::vector<PairSample>> near_;
  struct TriPoint {
    double rel[2];
    double phi[3];
    double w;
  };
  // [0] far rule, [1] near-far rule; each indexed by triangle type.
  std::array<std::array<std::vector<TriPoint>, 2>, 2> far_rules_;
  std::vector<std::vector<TailSample>> tails_;
};

// Local basis values on an element from coordinates relative to its cell corner in units of h.
void local_basis(int dim, int type, const double* rel, double* out);

}  // namespace fracot
