#pragma once

#include <Eigen/Dense>

#include "fracot/kernel.hpp"
#include "fracot/mesh.hpp"

namespace fracot {

struct SpectralOptions {
  int padding_factor = 16;        // periodic grid is at least this many times the box
  double min_margin_fraction = 0.25;
  double support_threshold = 1e-6;  // relative level below which u counts as zero
};

// Pointwise (-Delta)^s u at the nodes via the symbol |xi|^{2s} on a zero-padded periodic grid.
Eigen::VectorXd spectral_frac_laplacian(const Mesh& mesh, const KernelParams& params,
                                        const Eigen::VectorXd& u, const SpectralOptions& opts = {});

}  // namespace fracot
