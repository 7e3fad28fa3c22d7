#include "oracles.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

using std::numbers::pi;

double normalization_constant(int n, double s) {
  return s * std::pow(4.0, s) * std::tgamma(0.5 * n + s) / (std::pow(pi, 0.5 * n) * std::tgamma(1.0 - s));
}

double getoor_kappa(double s) {
  return std::tgamma(0.5) / (std::pow(2.0, 2.0 * s) * std::tgamma(0.5 + s) * std::tgamma(1.0 + s));
}

double gaussian_frac_laplacian(int n, double s, double r2) {
  return std::pow(4.0, s) * std::tgamma(0.5 * n + s) / std::tgamma(0.5 * n) *
         boost::math::hypergeometric_1F1(0.5 * n + s, 0.5 * n, -r2);
}

namespace {

// Radial function of a centrally symmetric polygon with vertices sorted by angle.
double polygon_radius(const std::vector<Eigen::Vector2d>& poly, double theta) {
  const Eigen::Vector2d e(std::cos(theta), std::sin(theta));
  double r = 1e300;
  const std::size_t k = poly.size();
  for (std::size_t a = 0; a < k; ++a) {
    const Eigen::Vector2d p = poly[a], q = poly[(a + 1) % k];
    // solve r e = p + t (q - p)
    Eigen::Matrix2d M;
    M.col(0) = e;
    M.col(1) = p - q;
    if (std::abs(M.determinant()) < 1e-14) continue;
    const Eigen::Vector2d sol = M.fullPivLu().solve(p);
    if (sol(0) > 0 && sol(1) >= -1e-12 && sol(1) <= 1 + 1e-12) r = std::min(r, sol(0));
  }
  return r;
}

}  // namespace

Eigen::Matrix2d triangle_self_moment(double s, const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                     const Eigen::Vector2d& p2) {
  // |T cap (T + z)| = |T| (1 - |z|_{T-T})^2, so the radial integral is a beta function.
  const Eigen::Vector2d e1 = p1 - p0, e2 = p2 - p0, e3 = p2 - p1;
  std::vector<Eigen::Vector2d> poly = {e1, e2, e3, -e1, -e2, -e3};
  std::sort(poly.begin(), poly.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return std::atan2(a(1), a(0)) < std::atan2(b(1), b(0));
  });
  std::vector<double> kinks;
  for (const auto& v : poly) kinks.push_back(std::atan2(v(1), v(0)));
  kinks.push_back(kinks.front() + 2 * pi);
  const double area = 0.5 * std::abs(e1(0) * e2(1) - e1(1) * e2(0));
  const double radial = boost::math::beta(2.0 - 2.0 * s, 3.0);
  Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
  for (std::size_t k = 0; k + 1 < kinks.size(); ++k) {
    for (int c = 0; c < 3; ++c) {
      auto f = [&](double t) {
        const double e[2] = {std::cos(t), std::sin(t)};
        return e[c == 2 ? 1 : 0] * e[c == 0 ? 0 : 1] * std::pow(polygon_radius(poly, t), 2.0 - 2.0 * s);
      };
      const double v =
          boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, kinks[k], kinks[k + 1], 8, 1e-14);
      if (c == 0) out(0, 0) += v;
      if (c == 1) {
        out(0, 1) += v;
        out(1, 0) += v;
      }
      if (c == 2) out(1, 1) += v;
    }
  }
  return area * radial * out;
}

namespace {

struct Cell {
  double c[2];
  double area;
  std::vector<std::pair<int, double>> phi;  // nonzero hats at the centroid
  std::vector<std::pair<int, Eigen::Vector2d>> grad;
  int shape = 0;  // 1D: 0; 2D: 0 lower, 1 upper orientation
  double weight = 1.0;
};

double tail_kernel_1d(double x, double a, double b, double s, double wa, double wb) {
  return (wa * std::pow(x - a, -2.0 * s) + wb * std::pow(b - x, -2.0 * s)) / (2.0 * s);
}

double ray_exit(const double x[2], double t, const fracot::Box& box) {
  const double d[2] = {std::cos(t), std::sin(t)};
  double r = 1e300;
  for (int k = 0; k < 2; ++k) {
    if (d[k] > 0) r = std::min(r, (box.upper[k] - x[k]) / d[k]);
    if (d[k] < 0) r = std::min(r, (box.lower[k] - x[k]) / d[k]);
  }
  return r;
}

double tail_kernel_2d(const double x[2], const fracot::Box& box, double s, const Weight& weight) {
  const int m = 1024;
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const double t = 2.0 * pi * (k + 0.5) / m;
    const double r = ray_exit(x, t, box);
    double w = 1.0;
    if (weight) {
      const double e[2] = {x[0] + r * std::cos(t), x[1] + r * std::sin(t)};
      w = weight(e);
    }
    acc += w * std::pow(r, -2.0 * s);
  }
  return acc * (2.0 * pi / m) / (2.0 * s);
}

}  // namespace

Eigen::MatrixXd brute_force_gagliardo(const fracot::Mesh& mesh, double s, int refine, const Weight& weight) {
  const int n = mesh.dim;
  const int N = mesh.num_nodes();
  const double C = normalization_constant(n, s);
  const double h = mesh.h;
  const double d = h / refine;
  std::vector<Cell> cells;
  auto hats_at = [&](const fracot::Element& e, const double* x, Cell& cell) {
    if (n == 1) {
      const double x0 = mesh.nodes[e.v[0]][0];
      const double t = (x[0] - x0) / h;
      cell.phi = {{e.v[0], 1 - t}, {e.v[1], t}};
      cell.grad = {{e.v[0], Eigen::Vector2d(-1 / h, 0)}, {e.v[1], Eigen::Vector2d(1 / h, 0)}};
      return;
    }
    const double u = (x[0] - mesh.nodes[e.v[0]][0]) / h;
    const double v = (x[1] - mesh.nodes[e.v[0]][1]) / h;
    if (e.type == 0) {  // (0,0) (1,0) (1,1)
      cell.phi = {{e.v[0], 1 - u}, {e.v[1], u - v}, {e.v[2], v}};
      cell.grad = {{e.v[0], Eigen::Vector2d(-1 / h, 0)}, {e.v[1], Eigen::Vector2d(1 / h, -1 / h)},
                   {e.v[2], Eigen::Vector2d(0, 1 / h)}};
    } else {  // (0,0) (1,1) (0,1)
      cell.phi = {{e.v[0], 1 - v}, {e.v[1], u}, {e.v[2], v - u}};
      cell.grad = {{e.v[0], Eigen::Vector2d(0, -1 / h)}, {e.v[1], Eigen::Vector2d(1 / h, 0)},
                   {e.v[2], Eigen::Vector2d(-1 / h, 1 / h)}};
    }
  };
  for (const auto& e : mesh.elements) {
    const double ox = mesh.nodes[e.v[0]][0];
    const double oy = n == 2 ? mesh.nodes[e.v[0]][1] : 0.0;
    if (n == 1) {
      for (int a = 0; a < refine; ++a) {
        Cell c;
        c.c[0] = ox + (a + 0.5) * d;
        c.c[1] = 0;
        c.area = d;
        hats_at(e, c.c, c);
        cells.push_back(c);
      }
      continue;
    }
    // sub-triangles of a triangle refined uniformly; element type 0 has vertices (0,0),(1,0),(1,1)
    for (int a = 0; a < refine; ++a) {
      for (int b = 0; b < refine; ++b) {
        // square sub-cell [a,a+1]x[b,b+1] in units of d, split along its diagonal
        const double x0 = ox + a * d, y0 = oy + b * d;
        const bool lower_half = e.type == 0;
        if (lower_half ? (b > a) : (b < a)) continue;
        auto add = [&](double cx, double cy, int shape) {
          Cell c;
          c.c[0] = cx;
          c.c[1] = cy;
          c.area = 0.5 * d * d;
          c.shape = shape;
          hats_at(e, c.c, c);
          cells.push_back(c);
        };
        if (a == b) {
          if (lower_half) {
            add(x0 + 2 * d / 3, y0 + d / 3, 0);
          } else {
            add(x0 + d / 3, y0 + 2 * d / 3, 1);
          }
        } else {
          add(x0 + 2 * d / 3, y0 + d / 3, 0);
          add(x0 + d / 3, y0 + 2 * d / 3, 1);
        }
      }
    }
  }
  for (Cell& c : cells) c.weight = weight ? weight(c.c) : 1.0;
  const int m = static_cast<int>(cells.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  std::vector<double> dphi(N);
  for (int p = 0; p < m; ++p) {
    for (int q = p + 1; q < m; ++q) {
      const double dx = cells[p].c[0] - cells[q].c[0];
      const double dy = cells[p].c[1] - cells[q].c[1];
      const double r = std::sqrt(dx * dx + dy * dy);
      const double w = C * cells[p].area * cells[q].area * cells[p].weight * cells[q].weight * std::pow(r, -n - 2.0 * s);
      std::vector<int> touched;
      for (auto& [i, v] : cells[p].phi) {
        if (dphi[i] == 0.0) touched.push_back(i);
        dphi[i] += v;
      }
      for (auto& [i, v] : cells[q].phi) {
        if (dphi[i] == 0.0) touched.push_back(i);
        dphi[i] -= v;
      }
      for (int i : touched) {
        for (int j : touched) A(i, j) += w * dphi[i] * dphi[j];
      }
      for (int i : touched) dphi[i] = 0.0;
    }
  }
  // self-interaction of each sub-cell, exact for linear hats
  if (n == 1) {
    const double self = 2.0 * std::pow(d, 3.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
    for (const Cell& c : cells) {
      for (auto& [i, gi] : c.grad) {
        for (auto& [j, gj] : c.grad) A(i, j) += 0.5 * C * c.weight * c.weight * gi(0) * gj(0) * self;
      }
    }
  } else {
    const Eigen::Matrix2d I_lower = triangle_self_moment(s, {0, 0}, {d, 0}, {d, d});
    const Eigen::Matrix2d I_upper = triangle_self_moment(s, {0, 0}, {d, d}, {0, d});
    for (const Cell& c : cells) {
      const Eigen::Matrix2d& I = c.shape == 0 ? I_lower : I_upper;
      for (auto& [i, gi] : c.grad) {
        for (auto& [j, gj] : c.grad) A(i, j) += 0.5 * C * c.weight * c.weight * gi.dot(I * gj);
      }
    }
  }
  // exterior tail: C int_box phi_i phi_j kappa(x) dx
  if (n == 1) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double a = mesh.box.lower[0], b = mesh.box.upper[0];
    const double wa = weight ? weight(&a) : 1.0, wb = weight ? weight(&b) : 1.0;
    for (const auto& e : mesh.elements) {
      const double x0 = mesh.nodes[e.v[0]][0];
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
          auto f = [&](double x) {
            const double t = (x - x0) / h;
            const double vp = p == 0 ? 1 - t : t;
            const double vq = q == 0 ? 1 - t : t;
            return (weight ? weight(&x) : 1.0) * vp * vq * tail_kernel_1d(x, a, b, s, wa, wb);
          };
          A(e.v[p], e.v[q]) += C * ts.integrate(f, x0, x0 + h);
        }
      }
    }
    return A;
  }
  // Tail: each triangle collapsed onto the unit square, both axes graded at both ends against the
  // dist^{-2s} edge singularity, then tensor Gauss-Legendre.
  const int k = std::max(3, static_cast<int>(std::ceil(1.0 / (1.0 - 2.0 * std::min(s, 0.45)))));
  auto grade = [k](double t, double& dt) {
    const double a = std::pow(t, k), b = std::pow(1.0 - t, k);
    dt = k * std::pow(t * (1.0 - t), k - 1) / ((a + b) * (a + b));
    return a / (a + b);
  };
  std::vector<double> gx, gw;
  {
    using GL = boost::math::quadrature::gauss<double, 40>;
    for (std::size_t i = 0; i < GL::abscissa().size(); ++i) {
      for (int sign : {-1, 1}) {
        gx.push_back(0.5 + 0.5 * sign * GL::abscissa()[i]);
        gw.push_back(0.5 * GL::weights()[i]);
      }
    }
  }
  for (const auto& e : mesh.elements) {
    const double ox = mesh.nodes[e.v[0]][0], oy = mesh.nodes[e.v[0]][1];
    Cell cell;
    for (std::size_t p = 0; p < gx.size(); ++p) {
      double da, db;
      const double a = grade(gx[p], da);
      for (std::size_t q = 0; q < gx.size(); ++q) {
        const double b = grade(gx[q], db);
        // type 0: 0 <= v <= u <= 1 with u = a, v = a b; type 1 swaps the roles of u and v
        const double u = e.type == 0 ? a : a * b;
        const double v = e.type == 0 ? a * b : a;
        const double x[2] = {ox + h * u, oy + h * v};
        hats_at(e, x, cell);
        const double wt = gw[p] * gw[q] * da * db * a * h * h;
        const double kx = (weight ? weight(x) : 1.0) * tail_kernel_2d(x, mesh.box, s, weight);
        if (!std::isfinite(kx)) continue;  // graded point rounded onto the box edge
        for (auto& [i, vi] : cell.phi) {
          for (auto& [j, vj] : cell.phi) A(i, j) += C * wt * vi * vj * kx;
        }
      }
    }
  }
  return A;
}

double fourier_gagliardo_1d(double h, double s, int offset) {
  // (1/pi) int_0^inf xi^{2s} h^2 sinc^4(xi h/2) cos(xi offset h) dxi
  auto f = [&](double xi) {
    const double a = 0.5 * xi * h;
    const double sc = a == 0.0 ? 1.0 : std::sin(a) / a;
    return std::pow(xi, 2.0 * s) * h * h * std::pow(sc, 4) * std::cos(xi * offset * h);
  };
  double total = 0.0;
  const double period = 2.0 * pi / h;
  for (int k = 0; k < 4000; ++k) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, k * period, (k + 1) * period, 6, 1e-13);
  }
  return total / pi;
}

}  // namespace oracle
