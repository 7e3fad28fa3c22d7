#include "fracot/pair_rules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracot/errors.hpp"
#include "fracot/quadrature.hpp"

namespace fracot {

namespace {

constexpr double kPi = std::numbers::pi;

// Reference triangles in cell coordinates; vertex order matches Element::v.
constexpr double kTri[2][3][2] = {{{0, 0}, {1, 0}, {1, 1}}, {{0, 0}, {1, 1}, {0, 1}}};

struct Vec2 {
  double x, y;
};

Vec2 tri_vertex(int type, int k, int di = 0, int dj = 0) {
  return {kTri[type][k][0] + di, kTri[type][k][1] + dj};
}

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

// Interpolatory weights w_q with sum_q w_q p(r_q) = int_{r0}^{r1} p(r) r^{-1-2s} dr for
// polynomials p of degree < n, nodes at Gauss points. Moments by geometrically graded Gauss.
void product_weights(double r0, double r1, double s, const Rule1D& nodes, const Rule1D& fine,
                     std::vector<double>& r, std::vector<double>& w) {
  const int n = nodes.size();
  r.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int q = 0; q < n; ++q) r[q] = r0 + (r1 - r0) * nodes.x[q];
  double a = r0;
  while (a < r1) {
    const double b = std::min(r1, 2.0 * a);
    for (int k = 0; k < fine.size(); ++k) {
      const double rr = a + (b - a) * fine.x[k];
      const double wk = (b - a) * fine.w[k] * std::pow(rr, -1.0 - 2.0 * s);
      const double t = (rr - r0) / (r1 - r0);
      for (int q = 0; q < n; ++q) {
        double lag = 1.0;
        for (int p = 0; p < n; ++p) {
          if (p != q) lag *= (t - nodes.x[p]) / (nodes.x[q] - nodes.x[p]);
        }
        w[q] += wk * lag;
      }
    }
    a = b;
  }
}

}  // namespace

void local_basis(int dim, int type, const double* rel, double* out) {
  if (dim == 1) {
    out[0] = 1.0 - rel[0];
    out[1] = rel[0];
    out[2] = 0.0;
    return;
  }
  const double xi = rel[0];
  const double eta = rel[1];
  if (type == 0) {
    out[0] = 1.0 - xi;
    out[1] = xi - eta;
    out[2] = eta;
  } else {
    out[0] = 1.0 - eta;
    out[1] = xi;
    out[2] = eta - xi;
  }
}

PairQuadrature::PairQuadrature(const Mesh& mesh, const KernelParams& params,
                               const QuadratureOptions& opts)
    : mesh_(&mesh), params_(params), opts_(opts) {
  params_.validate();
  require(params.n == mesh.dim, Errc::InvalidArgument, "kernel dimension differs from mesh dimension");
  if (mesh.dim == 1) {
    build_1d();
  } else {
    build_2d();
  }
}

void PairQuadrature::build_1d() {
  const double s = params_.s;
  const double h = mesh_->h;
  const double hs = std::pow(h, 1.0 - 2.0 * s);
  const int ne = mesh_->num_elements();
  by_offset_.assign(ne, {});

  auto push = [](std::vector<PairSample>& out, double tx, double ty, double w) {
    PairSample p;
    local_basis(1, 0, &tx, p.px);
    local_basis(1, 0, &ty, p.py);
    p.w = w;
    out.push_back(p);
  };

  // Identical element: z = x - y carries the Jacobi weight z^{1-2s}.
  {
    const Rule1D z = gauss_jacobi01(opts_.singular_order, 0.0, 1.0 - 2.0 * s);
    const Rule1D e = gauss_legendre01(opts_.singular_order);
    auto& out = by_offset_[0];
    for (int i = 0; i < z.size(); ++i) {
      for (int j = 0; j < e.size(); ++j) {
        const double y = (1.0 - z.x[i]) * e.x[j];
        const double w = hs * z.w[i] * (1.0 - z.x[i]) * e.w[j] / (z.x[i] * z.x[i]);
        push(out, y + z.x[i], y, w);
        push(out, y, y + z.x[i], w);
      }
    }
  }
  // Neighbours: distances xi, eta to the shared node, eta = xi t on each half.
  if (ne > 1) {
    const Rule1D xi = gauss_jacobi01(opts_.singular_order, 0.0, 2.0 - 2.0 * s);
    const Rule1D t = gauss_legendre01(opts_.duffy_order);
    auto& out = by_offset_[1];
    for (int i = 0; i < xi.size(); ++i) {
      for (int j = 0; j < t.size(); ++j) {
        const double w = hs * xi.w[i] * t.w[j] * std::pow(1.0 + t.x[j], -1.0 - 2.0 * s) /
                         (xi.x[i] * xi.x[i]);
        push(out, 1.0 - xi.x[i], xi.x[i] * t.x[j], w);
        push(out, 1.0 - xi.x[i] * t.x[j], xi.x[i], w);
      }
    }
  }
  const Rule1D g_far = gauss_legendre01(opts_.far_order);
  const Rule1D g_near = gauss_legendre01(opts_.near_far_order);
  for (int d = 2; d < ne; ++d) {
    const Rule1D& g = d <= opts_.near_far_span ? g_near : g_far;
    auto& out = by_offset_[d];
    for (int i = 0; i < g.size(); ++i) {
      for (int j = 0; j < g.size(); ++j) {
        const double dist = d + g.x[j] - g.x[i];
        push(out, g.x[i], g.x[j], hs * g.w[i] * g.w[j] * std::pow(dist, -1.0 - 2.0 * s));
      }
    }
  }

  // Tails: int_{y < lower} |x - y|^{-1-2s} dy = (x - lower)^{-2s} / (2s), likewise on the right.
  const Rule1D gl = gauss_legendre01(opts_.tail_order);
  const Rule1D left_sing = gauss_jacobi01(opts_.tail_order, 0.0, -2.0 * s);
  const Rule1D right_sing = gauss_jacobi01(opts_.tail_order, -2.0 * s, 0.0);
  const double inv2s = 1.0 / (2.0 * s);
  tails_.assign(ne, {});
  for (int e = 0; e < ne; ++e) {
    auto& out = tails_[e];
    auto add = [&](double t, double wl, double wr) {
      TailSample ts;
      local_basis(1, 0, &t, ts.px);
      ts.w[0] = wl;
      ts.w[1] = wr;
      ts.w[2] = ts.w[3] = 0.0;
      out.push_back(ts);
    };
    const bool first = e == 0;
    const bool last = e == ne - 1;
    if (first) {
      for (int k = 0; k < left_sing.size(); ++k) add(left_sing.x[k], hs * left_sing.w[k] * inv2s, 0.0);
    }
    if (last) {
      for (int k = 0; k < right_sing.size(); ++k) add(right_sing.x[k], 0.0, hs * right_sing.w[k] * inv2s);
    }
    for (int k = 0; k < gl.size(); ++k) {
      const double t = gl.x[k];
      const double wl = first ? 0.0 : hs * gl.w[k] * std::pow(e + t, -2.0 * s) * inv2s;
      const double wr = last ? 0.0 : hs * gl.w[k] * std::pow(ne - e - t, -2.0 * s) * inv2s;
      if (wl != 0.0 || wr != 0.0) add(t, wl, wr);
    }
  }

  // Self-check against closed forms of int int |x - y|^{1-2s} over touching unit elements.
  auto apply = [&](const std::vector<PairSample>& rule, double shift) {
    double acc = 0.0;
    for (const PairSample& p : rule) {
      const double x = p.px[1];
      const double y = p.py[1] + shift;
      acc += p.w * (x - y) * (x - y);
    }
    return acc / hs;
  };
  const double c = (2.0 - 2.0 * s) * (3.0 - 2.0 * s);
  const double exact_same = 2.0 / c;
  const double got_same = apply(by_offset_[0], 0.0);
  double worst = std::abs(got_same - exact_same) / exact_same;
  if (ne > 1) {
    const double exact_adj = (std::pow(2.0, 3.0 - 2.0 * s) - 2.0) / c;
    worst = std::max(worst, std::abs(apply(by_offset_[1], 1.0) - exact_adj) / exact_adj);
  }
  if (!(worst <= opts_.self_check_tolerance)) {
    std::ostringstream os;
    os << "touching-pair rule misses the closed form by " << worst << " (tolerance "
       << opts_.self_check_tolerance << ")";
    fail(Errc::QuadratureFailure, os.str());
  }
}

void PairQuadrature::build_2d() {
  const double s = params_.s;
  const double h = mesh_->h;
  const double hs = std::pow(h, 2.0 - 2.0 * s);
  const TriangleRule xr = collapsed_triangle_rule(opts_.near_point_order);
  const Rule1D ang = gauss_legendre01(opts_.angle_order);
  const Rule1D rad_sing = gauss_jacobi01(opts_.radial_order, 0.0, 1.0 - 2.0 * s);
  const Rule1D rad_nodes = gauss_legendre01(opts_.radial_order);
  const Rule1D fine = gauss_legendre01(12);

  for (int ta = 0; ta < 2; ++ta) {
    Vec2 A[3];
    for (int k = 0; k < 3; ++k) A[k] = tri_vertex(ta, k);
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        for (int tb = 0; tb < 2; ++tb) {
          Vec2 B[3];
          for (int k = 0; k < 3; ++k) B[k] = tri_vertex(tb, k, di, dj);
          int shared = 0;
          for (auto& a : A) {
            for (auto& b : B) shared += (a.x == b.x && a.y == b.y);
          }
          if (shared == 0) continue;
          const bool same = shared == 3;
          // Outward edge normals of B: edge k joins B[k] and B[k+1].
          double cx = (B[0].x + B[1].x + B[2].x) / 3.0;
          double cy = (B[0].y + B[1].y + B[2].y) / 3.0;
          Vec2 nrm[3];
          double off[3];
          for (int k = 0; k < 3; ++k) {
            const Vec2 p = B[k];
            const Vec2 q = B[(k + 1) % 3];
            Vec2 n{q.y - p.y, -(q.x - p.x)};
            const double len = std::hypot(n.x, n.y);
            n.x /= len;
            n.y /= len;
            if (n.x * (cx - p.x) + n.y * (cy - p.y) > 0.0) {
              n.x = -n.x;
              n.y = -n.y;
            }
            nrm[k] = n;
            off[k] = n.x * p.x + n.y * p.y;
          }
          std::vector<PairSample> out;
          std::vector<double> rq, wq;
          for (int ix = 0; ix < xr.size(); ++ix) {
            const double px = A[0].x + xr.u[ix] * (A[1].x - A[0].x) + xr.v[ix] * (A[2].x - A[0].x);
            const double py = A[0].y + xr.u[ix] * (A[1].y - A[0].y) + xr.v[ix] * (A[2].y - A[0].y);
            const double wx = xr.w[ix];  // unit Jacobian for these triangles
            double xrel[2] = {px, py};
            double phix[3];
            local_basis(2, ta, xrel, phix);
            // Sector boundaries at the vertex directions of B seen from x.
            double ang_v[3];
            for (int k = 0; k < 3; ++k) ang_v[k] = std::atan2(B[k].y - py, B[k].x - px);
            std::vector<std::pair<double, double>> sectors;
            if (same) {
              std::sort(ang_v, ang_v + 3);
              sectors = {{ang_v[0], ang_v[1]}, {ang_v[1], ang_v[2]}, {ang_v[2], ang_v[0] + 2.0 * kPi}};
            } else {
              const double ac = std::atan2(cy - py, cx - px);
              double d[3];
              for (int k = 0; k < 3; ++k) d[k] = wrap_angle(ang_v[k] - ac);
              std::sort(d, d + 3);
              sectors = {{ac + d[0], ac + d[1]}, {ac + d[1], ac + d[2]}};
            }
            for (const auto& [t0, t1] : sectors) {
              const double span = t1 - t0;
              if (span <= 1e-14) continue;
              for (int it = 0; it < ang.size(); ++it) {
                const double th = t0 + span * ang.x[it];
                const double ex = std::cos(th);
                const double ey = std::sin(th);
                double rin = 0.0;
                double rout = 1e300;
                for (int k = 0; k < 3; ++k) {
                  const double g = nrm[k].x * px + nrm[k].y * py - off[k];
                  const double dn = nrm[k].x * ex + nrm[k].y * ey;
                  if (std::abs(dn) < 1e-300) continue;
                  const double r = -g / dn;
                  if (dn > 0.0) {
                    rout = std::min(rout, r);
                  } else {
                    rin = std::max(rin, r);
                  }
                }
                if (!(rout > rin)) continue;
                const double wth = wx * span * ang.w[it];
                if (same) {
                  const double scale = std::pow(rout, 2.0 - 2.0 * s);
                  for (int k = 0; k < rad_sing.size(); ++k) {
                    const double r = rout * rad_sing.x[k];
                    PairSample ps;
                    std::copy(phix, phix + 3, ps.px);
                    double yrel[2] = {px + r * ex - di, py + r * ey - dj};
                    local_basis(2, tb, yrel, ps.py);
                    ps.w = hs * wth * scale * rad_sing.w[k] / (r * r);
                    out.push_back(ps);
                  }
                } else {
                  product_weights(rin, rout, s, rad_nodes, fine, rq, wq);
                  for (int k = 0; k < rad_nodes.size(); ++k) {
                    PairSample ps;
                    std::copy(phix, phix + 3, ps.px);
                    double yrel[2] = {px + rq[k] * ex - di, py + rq[k] * ey - dj};
                    local_basis(2, tb, yrel, ps.py);
                    ps.w = hs * wth * wq[k];
                    out.push_back(ps);
                  }
                }
              }
            }
          }
          near_[{ta, tb, di, dj}] = std::move(out);
        }
      }
    }
  }

  const int orders[2] = {opts_.far_order_2d, opts_.near_far_order_2d};
  for (int level = 0; level < 2; ++level) {
    const TriangleRule r = collapsed_triangle_rule(orders[level]);
    for (int t = 0; t < 2; ++t) {
      auto& out = far_rules_[level][t];
      out.clear();
      for (int k = 0; k < r.size(); ++k) {
        TriPoint p;
        const Vec2 A0 = tri_vertex(t, 0), A1 = tri_vertex(t, 1), A2 = tri_vertex(t, 2);
        p.rel[0] = A0.x + r.u[k] * (A1.x - A0.x) + r.v[k] * (A2.x - A0.x);
        p.rel[1] = A0.y + r.u[k] * (A1.y - A0.y) + r.v[k] * (A2.y - A0.y);
        local_basis(2, t, p.rel, p.phi);
        p.w = r.w[k];
        out.push_back(p);
      }
    }
  }

  // Tails: per-side angular integrals of rho(theta)^{-2s} / (2s) from each outer point. For 2s < 1
  // a side touching the element gets its own rule with the dist^{-2s} factor as Gauss-Jacobi
  // weight. For 2s >= 1 hats that are nonzero on the box edge have no finite tail; their entries
  // then come from the regular rule and depend on the quadrature.
  const int nx = mesh_->cells[0];
  const int ny = mesh_->cells[1];
  const Rule1D ta_rule = gauss_legendre01(opts_.tail_angle_order);
  const TriangleRule inner = collapsed_triangle_rule(opts_.near_point_order);
  const TriangleRule edge = collapsed_triangle_rule(opts_.near_point_order + 4);
  const int ns = opts_.near_point_order + 4;
  const bool integrable = 2.0 * s < 1.0;
  const Rule1D near_sing = integrable ? gauss_jacobi01(ns, 0.0, -2.0 * s) : Rule1D{};
  const Rule1D far_sing = integrable ? gauss_jacobi01(ns, -2.0 * s, 0.0) : Rule1D{};
  const Rule1D along = gauss_legendre01(ns);
  // side, start, end, distance, normal angle
  auto side_geometry = [&](double x, double y, int side, double& t0, double& t1, double& dist, double& nang) {
    const double c_bl = std::atan2(-y, -x);
    const double c_br = std::atan2(-y, nx - x);
    const double c_tr = std::atan2(ny - y, nx - x);
    const double c_tl = std::atan2(ny - y, -x);
    const double spans[4][4] = {{c_tl, c_bl + 2.0 * kPi, x, kPi},
                                {c_br, c_tr, nx - x, 0.0},
                                {c_bl, c_br, y, -0.5 * kPi},
                                {c_tr, c_tl, ny - y, 0.5 * kPi}};
    t0 = spans[side][0];
    t1 = spans[side][1];
    dist = spans[side][2];
    nang = spans[side][3];
  };
  // (t1 - t0) * mean of cos^{2s} over the span, over 2s; times dist^{-2s} this is the side's share.
  auto angular = [&](double x, double y, int side, double& dist) {
    double t0, t1, nang;
    side_geometry(x, y, side, t0, t1, dist, nang);
    double acc = 0.0;
    for (int q = 0; q < ta_rule.size(); ++q) {
      const double th = t0 + (t1 - t0) * ta_rule.x[q];
      const double c = std::cos(th - nang);
      acc += ta_rule.w[q] * std::pow(std::max(c, 0.0), 2.0 * s);
    }
    return acc * (t1 - t0) / (2.0 * s);
  };
  tails_.assign(mesh_->num_elements(), {});
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const Element& el = mesh_->elements[e];
    const int ci = el.cell[0];
    const int cj = el.cell[1];
    const bool boundary = ci == 0 || cj == 0 || ci == nx - 1 || cj == ny - 1;
    const bool touches[4] = {integrable && ci == 0, integrable && ci == nx - 1, integrable && cj == 0,
                             integrable && cj == ny - 1};
    const TriangleRule& r = boundary ? edge : inner;
    const Vec2 A0 = tri_vertex(el.type, 0), A1 = tri_vertex(el.type, 1), A2 = tri_vertex(el.type, 2);
    for (int k = 0; k < r.size(); ++k) {
      TailSample ts;
      double rel[2] = {A0.x + r.u[k] * (A1.x - A0.x) + r.v[k] * (A2.x - A0.x),
                       A0.y + r.u[k] * (A1.y - A0.y) + r.v[k] * (A2.y - A0.y)};
      local_basis(2, el.type, rel, ts.px);
      for (int side = 0; side < 4; ++side) {
        if (touches[side]) {
          ts.w[side] = 0.0;
          continue;
        }
        double dist;
        const double a = angular(ci + rel[0], cj + rel[1], side, dist);
        ts.w[side] = hs * r.w[k] * a * std::pow(dist, -2.0 * s);
      }
      tails_[e].push_back(ts);
    }
    // Touching sides: outer coordinate normal to the side, inner coordinate across the triangle.
    // Type 0 is v <= u, type 1 is v >= u (local coordinates in the cell).
    for (int side = 0; side < 4; ++side) {
      if (!touches[side]) continue;
      const bool outer_is_u = side < 2;
      const Rule1D& normal = (side == 0 || side == 2) ? near_sing : far_sing;
      for (int p = 0; p < normal.size(); ++p) {
        const double o = normal.x[p];
        double lo, hi;
        if (el.type == 0) {
          lo = outer_is_u ? 0.0 : o;
          hi = outer_is_u ? o : 1.0;
        } else {
          lo = outer_is_u ? o : 0.0;
          hi = outer_is_u ? 1.0 : o;
        }
        for (int q = 0; q < along.size(); ++q) {
          const double i = lo + (hi - lo) * along.x[q];
          double rel[2] = {outer_is_u ? o : i, outer_is_u ? i : o};
          TailSample ts;
          local_basis(2, el.type, rel, ts.px);
          double dist;
          const double a = angular(ci + rel[0], cj + rel[1], side, dist);
          for (double& w : ts.w) w = 0.0;
          ts.w[side] = hs * normal.w[p] * along.w[q] * (hi - lo) * a;
          tails_[e].push_back(ts);
        }
      }
    }
  }

  // Self-check: the identical-pair rule must give a finite positive energy for a linear field.
  double sum = 0.0;
  for (const auto& [key, rule] : near_) {
    if (std::get<0>(key) == std::get<1>(key) && std::get<2>(key) == 0 && std::get<3>(key) == 0) {
      for (const PairSample& p : rule) {
        const double d = (p.px[1] - p.py[1]);
        sum += p.w * d * d;
      }
    }
  }
  require(std::isfinite(sum) && sum > 0.0, Errc::QuadratureFailure, "identical-pair rule is degenerate");
}

std::span<const PairSample> PairQuadrature::pair_samples(int a, int b,
                                                         std::vector<PairSample>& scratch) const {
  if (mesh_->dim == 1) {
    const int d = std::abs(b - a);
    if (b >= a) return by_offset_[d];
    scratch.clear();
    for (const PairSample& p : by_offset_[d]) {
      PairSample q;
      // mirror: swap roles of x and y
      std::copy(p.py, p.py + 3, q.px);
      std::copy(p.px, p.px + 3, q.py);
      q.w = p.w;
      scratch.push_back(q);
    }
    return scratch;
  }
  const Element& ea = mesh_->elements[a];
  const Element& eb = mesh_->elements[b];
  const int di = eb.cell[0] - ea.cell[0];
  const int dj = eb.cell[1] - ea.cell[1];
  if (std::abs(di) <= 1 && std::abs(dj) <= 1) {
    auto it = near_.find({ea.type, eb.type, di, dj});
    if (it != near_.end()) return it->second;
  }
  far_2d(a, b, scratch);
  return scratch;
}

void PairQuadrature::far_2d(int a, int b, std::vector<PairSample>& out) const {
  const Element& ea = mesh_->elements[a];
  const Element& eb = mesh_->elements[b];
  const int di = eb.cell[0] - ea.cell[0];
  const int dj = eb.cell[1] - ea.cell[1];
  const int level = std::max(std::abs(di), std::abs(dj)) <= opts_.near_far_span_2d ? 1 : 0;
  const auto& rx = far_rules_[level][ea.type];
  const auto& ry = far_rules_[level][eb.type];
  const double s = params_.s;
  const double hs = std::pow(mesh_->h, 2.0 - 2.0 * s);
  const double expo = -(1.0 + s);  // |d|^{-2-2s} = (|d|^2)^{-1-s}
  out.clear();
  for (const TriPoint& p : rx) {
    for (const TriPoint& q : ry) {
      const double dx = di + q.rel[0] - p.rel[0];
      const double dy = dj + q.rel[1] - p.rel[1];
      PairSample ps;
      std::copy(p.phi, p.phi + 3, ps.px);
      std::copy(q.phi, q.phi + 3, ps.py);
      ps.w = hs * p.w * q.w * std::pow(dx * dx + dy * dy, expo);
      out.push_back(ps);
    }
  }
}

std::span<const TailSample> PairQuadrature::tail_samples(int a) const { return tails_[a]; }

bool PairQuadrature::touching(int a, int b) const {
  if (mesh_->dim == 1) return std::abs(a - b) <= 1;
  const auto& va = mesh_->elements[a].v;
  const auto& vb = mesh_->elements[b].v;
  for (int i : va) {
    for (int j : vb) {
      if (i == j) return true;
    }
  }
  return false;
}

std::array<double, 4> PairQuadrature::side_values(const Eigen::VectorXd& nodal) const {
  std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
  const Mesh& m = *mesh_;
  if (m.dim == 1) {
    out[0] = nodal(0);
    out[1] = nodal(m.num_nodes() - 1);
    return out;
  }
  const int nx = m.cells[0];
  const int ny = m.cells[1];
  for (int j = 0; j <= ny; ++j) {
    out[0] += nodal(m.node_index(0, j)) / (ny + 1);
    out[1] += nodal(m.node_index(nx, j)) / (ny + 1);
  }
  for (int i = 0; i <= nx; ++i) {
    out[2] += nodal(m.node_index(i, 0)) / (nx + 1);
    out[3] += nodal(m.node_index(i, ny)) / (nx + 1);
  }
  return out;
}

}  // namespace fracot
