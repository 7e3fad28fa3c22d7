#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fracot/assembly.hpp"
#include "fracot/coefficients.hpp"
#include "fracot/counterexample.hpp"
#include "fracot/pair_rules.hpp"
#include "fracot/reconstruction.hpp"
#include "fracot/solver.hpp"

namespace fracot {

struct ExperimentConfig {
  // [problem]
  int n = 1;
  double s = 0.25;
  std::optional<double> C;
  ExteriorGamma exterior_gamma = ExteriorGamma::Boundary;
  // [mesh]
  double h = 1.0 / 64;
  std::optional<double> margin;  // default 2 diam(Omega)
  std::optional<Box> box;
  // [regions]
  std::vector<Region> regions;
  // [gamma], [q]
  Profile gamma = Profile::constant(1.0);
  Profile q = Profile::constant(0.0);
  std::vector<std::string> q_nonnegative;  // region names where q counts as the nonnegative part
  // [source]
  double source = 0.0;         // constant interior source
  Point data_center{0.0, 0.0};  // exterior data bump
  double data_radius = 0.0;     // 0: centre of W1 with a third of its width
  double data_amplitude = 1.0;
  // [solver], [quadrature]
  SolverOptions solver;
  QuadratureOptions quadrature;
  // [reconstruct]
  std::optional<Point> x0;
  std::vector<double> scales;
  BumpProfile bump = BumpProfile::Mollifier;
  double p = std::numeric_limits<double>::infinity();
  std::string measure_region = kW1;
  // [counterexample]
  double eps = 0.05;
  Layout layout = Layout::Figure;
  double eta_amplitude = 1.0;
  double transition_factor = 2.5;
  double mismatch_amplitude = 9.0;
  // [study]
  std::vector<double> study_h{1.0 / 32, 1.0 / 64, 1.0 / 128};
  // [run], [output]
  unsigned seed = 0;
  int threads = 0;
  std::string out_dir = "out";

  KernelParams kernel() const;
  const Region* find_region(const std::string& name) const;
  // Box from [mesh] box, or the grid-aligned hull of all regions grown by the margin.
  Box resolved_box(double spacing) const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// "interval a b", "rect x0 y0 x1 y1", "ball cx r" (1D) or "ball cx cy r" (2D).
Shape parse_shape(const std::string& spec, int dim);

// The figure layout of the counterexample as regions, used when [regions] is empty.
std::vector<Region> default_regions(int dim);

}  // namespace fracot
