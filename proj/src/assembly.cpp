#include "fracot/assembly.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracot/errors.hpp"

namespace fracot {

namespace {

constexpr int kMaxLocal = 6;

struct LocalDofs {
  int n = 0;
  int node[kMaxLocal];
  int ia[3];
  int ib[3];
};

LocalDofs union_dofs(const Mesh& mesh, int a, int b) {
  LocalDofs d;
  const int nv = mesh.nodes_per_element();
  const auto& va = mesh.elements[a].v;
  const auto& vb = mesh.elements[b].v;
  for (int i = 0; i < nv; ++i) {
    d.node[d.n] = va[i];
    d.ia[i] = d.n++;
  }
  for (int j = 0; j < nv; ++j) {
    int found = -1;
    for (int k = 0; k < nv; ++k) {
      if (va[k] == vb[j]) found = k;
    }
    if (found >= 0) {
      d.ib[j] = d.ia[found];
    } else {
      d.node[d.n] = vb[j];
      d.ib[j] = d.n++;
    }
  }
  return d;
}

// Element-pair kernel shared by the serial and parallel drivers.
class WeightedKernel {
 public:
  WeightedKernel(const PairQuadrature& quad, const Eigen::VectorXd* weight,
                 const std::array<double, 4>& ext)
      : quad_(quad), mesh_(quad.mesh()), weight_(weight), ext_(ext) {}

  void pair(int a, int b, Eigen::MatrixXd& acc, std::vector<PairSample>& scratch) const {
    const int nv = mesh_.nodes_per_element();
    const LocalDofs d = union_dofs(mesh_, a, b);
    double wa[3] = {1, 1, 1};
    double wb[3] = {1, 1, 1};
    if (weight_) {
      for (int i = 0; i < nv; ++i) {
        wa[i] = (*weight_)(mesh_.elements[a].v[i]);
        wb[i] = (*weight_)(mesh_.elements[b].v[i]);
      }
    }
    double L[kMaxLocal][kMaxLocal] = {};
    double psi[kMaxLocal];
    for (const PairSample& p : quad_.pair_samples(a, b, scratch)) {
      double gx = 0.0;
      double gy = 0.0;
      for (int i = 0; i < nv; ++i) {
        gx += wa[i] * p.px[i];
        gy += wb[i] * p.py[i];
      }
      std::fill(psi, psi + d.n, 0.0);
      for (int i = 0; i < nv; ++i) {
        psi[d.ia[i]] += p.px[i];
        psi[d.ib[i]] -= p.py[i];
      }
      const double w = p.w * gx * gy;
      for (int k = 0; k < d.n; ++k) {
        const double wk = w * psi[k];
        for (int l = k; l < d.n; ++l) L[k][l] += wk * psi[l];
      }
    }
    const double C = quad_.params().C;
    const double factor = a == b ? 0.5 * C : C;
    for (int k = 0; k < d.n; ++k) {
      for (int l = k; l < d.n; ++l) {
        const double v = factor * L[k][l];
        acc(d.node[k], d.node[l]) += v;
        if (k != l) acc(d.node[l], d.node[k]) += v;
      }
    }
  }

  void tail(int a, Eigen::MatrixXd& acc, Eigen::MatrixXd& tail) const {
    const int nv = mesh_.nodes_per_element();
    const int sides = quad_.num_sides();
    const auto& va = mesh_.elements[a].v;
    double wa[3] = {1, 1, 1};
    if (weight_) {
      for (int i = 0; i < nv; ++i) wa[i] = (*weight_)(va[i]);
    }
    const double C = quad_.params().C;
    double L[3][3] = {};
    double T[3][4] = {};
    for (const TailSample& t : quad_.tail_samples(a)) {
      double gx = 0.0;
      for (int i = 0; i < nv; ++i) gx += wa[i] * t.px[i];
      double wt = 0.0;
      for (int k = 0; k < sides; ++k) wt += t.w[k] * ext_[k];
      for (int i = 0; i < nv; ++i) {
        for (int j = i; j < nv; ++j) L[i][j] += wt * gx * t.px[i] * t.px[j];
        for (int k = 0; k < sides; ++k) T[i][k] += t.w[k] * ext_[k] * gx * t.px[i];
      }
    }
    for (int i = 0; i < nv; ++i) {
      for (int j = i; j < nv; ++j) {
        acc(va[i], va[j]) += C * L[i][j];
        if (i != j) acc(va[j], va[i]) += C * L[i][j];
      }
      for (int k = 0; k < sides; ++k) tail(va[i], k) += C * T[i][k];
    }
  }

 private:
  const PairQuadrature& quad_;
  const Mesh& mesh_;
  const Eigen::VectorXd* weight_;
  std::array<double, 4> ext_;
};

SymForm assemble_weighted(const PairQuadrature& quad, const Eigen::VectorXd* weight,
                          const std::array<double, 4>& ext, Execution exec) {
  const Mesh& mesh = quad.mesh();
  const int n = mesh.num_nodes();
  const int ne = mesh.num_elements();
  const int sides = quad.num_sides();
  const WeightedKernel kernel(quad, weight, ext);
  SymForm form;
  form.entries = Eigen::MatrixXd::Zero(n, n);
  form.tail = Eigen::MatrixXd::Zero(n, sides);

  if (exec == Execution::Serial) {
    std::vector<PairSample> scratch;
    for (int a = 0; a < ne; ++a) {
      for (int b = a; b < ne; ++b) kernel.pair(a, b, form.entries, scratch);
      kernel.tail(a, form.entries, form.tail);
    }
    return form;
  }

  const int threads = omp_get_max_threads();
  std::vector<Eigen::MatrixXd> acc(threads);
  std::vector<Eigen::MatrixXd> tails(threads);
#pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
    Eigen::MatrixXd& mine = acc[tid];
    Eigen::MatrixXd& my_tail = tails[tid];
    mine = Eigen::MatrixXd::Zero(n, n);
    my_tail = Eigen::MatrixXd::Zero(n, sides);
    std::vector<PairSample> scratch;
#pragma omp for schedule(static, 1)
    for (int a = 0; a < ne; ++a) {
      for (int b = a; b < ne; ++b) kernel.pair(a, b, mine, scratch);
      kernel.tail(a, mine, my_tail);
    }
  }
  for (int t = 0; t < threads; ++t) {
    form.entries += acc[t];
    form.tail += tails[t];
  }
  return form;
}

// int over an element of prod_k lambda_k^{e_k} for barycentric lambda.
double barycentric_moment(int dim, double measure, const int* e) {
  double num = 1.0;
  int total = 0;
  for (int k = 0; k <= dim; ++k) {
    num *= std::tgamma(e[k] + 1.0);
    total += e[k];
  }
  return measure * std::tgamma(dim + 1.0) * num / std::tgamma(total + dim + 1.0);
}

}  // namespace

double SymForm::symmetry_defect() const {
  const double scale = std::max(entries.cwiseAbs().maxCoeff(), 1e-300);
  return (entries - entries.transpose()).cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXd SymForm::exterior_functional(const std::array<double, 4>& side_values) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
  for (int k = 0; k < tail.cols(); ++k) out += side_values[k] * tail.col(k);
  return out;
}

SymForm gagliardo_form(const PairQuadrature& quad, Execution exec) {
  return assemble_weighted(quad, nullptr, {1.0, 1.0, 1.0, 1.0}, exec);
}

SymForm conductivity_form(const PairQuadrature& quad, const Coefficients& coeffs, Execution exec,
                          ExteriorGamma ext) {
  const Mesh& mesh = quad.mesh();
  require(coeffs.gamma.size() == mesh.num_nodes(), Errc::InvalidArgument, "gamma has the wrong size");
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (!(coeffs.gamma(i) > 0.0)) {
      std::ostringstream os;
      os << "gamma(" << i << ") = " << coeffs.gamma(i);
      fail(Errc::NonPositiveGamma, os.str());
    }
  }
  const Eigen::VectorXd g = coeffs.sqrt_gamma();
  std::array<double, 4> e{1.0, 1.0, 1.0, 1.0};
  if (ext == ExteriorGamma::Boundary) e = quad.side_values(g);
  return assemble_weighted(quad, &g, e, exec);
}

SymForm potential_form(const Mesh& mesh, const Eigen::VectorXd& q) {
  const int n = mesh.num_nodes();
  require(q.size() == n, Errc::InvalidArgument, "q has the wrong size");
  require(q.allFinite(), Errc::InvalidArgument, "q must be finite");
  const int nv = mesh.nodes_per_element();
  const double meas = mesh.element_measure();
  // moments[i][j][k] = int lambda_i lambda_j lambda_k
  double mom[3][3][3];
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) {
      for (int k = 0; k < nv; ++k) {
        int e[3] = {0, 0, 0};
        ++e[i];
        ++e[j];
        ++e[k];
        mom[i][j][k] = barycentric_moment(mesh.dim, meas, e);
      }
    }
  }
  SymForm form;
  form.entries = Eigen::MatrixXd::Zero(n, n);
  form.tail = Eigen::MatrixXd::Zero(n, 2 * mesh.dim);
  for (const Element& el : mesh.elements) {
    for (int i = 0; i < nv; ++i) {
      for (int j = 0; j < nv; ++j) {
        double v = 0.0;
        for (int k = 0; k < nv; ++k) v += q(el.v[k]) * mom[i][j][k];
        form.entries(el.v[i], el.v[j]) += v;
      }
    }
  }
  return form;
}

SymForm mass_matrix(const Mesh& mesh) {
  const int n = mesh.num_nodes();
  const int nv = mesh.nodes_per_element();
  const double meas = mesh.element_measure();
  SymForm form;
  form.entries = Eigen::MatrixXd::Zero(n, n);
  form.tail = Eigen::MatrixXd::Zero(n, 2 * mesh.dim);
  for (const Element& el : mesh.elements) {
    for (int i = 0; i < nv; ++i) {
      for (int j = 0; j < nv; ++j) {
        int e[3] = {0, 0, 0};
        ++e[i];
        ++e[j];
        form.entries(el.v[i], el.v[j]) += barycentric_moment(mesh.dim, meas, e);
      }
    }
  }
  return form;
}

Eigen::VectorXd frac_laplacian_functional(const SymForm& gagliardo, const Eigen::VectorXd& m) {
  require(m.size() == gagliardo.dim(), Errc::InvalidArgument, "field has the wrong size");
  return gagliardo.entries * m;
}

Eigen::VectorXd nodal_frac_laplacian(const SymForm& gagliardo, const SymForm& mass,
                                     const Eigen::VectorXd& m, const std::array<double, 4>& exterior) {
  const Eigen::VectorXd rhs = frac_laplacian_functional(gagliardo, m) - gagliardo.exterior_functional(exterior);
  Eigen::LLT<Eigen::MatrixXd> llt(mass.entries);
  require(llt.info() == Eigen::Success, Errc::InvalidArgument, "mass matrix is not positive definite");
  return llt.solve(rhs);
}

namespace {

// Per-element values of a product field and whether it vanishes identically there.
struct ProductEval {
  const ProductField& f;
  const Mesh& mesh;
  std::vector<char> active;
  std::array<double, 4> ext{1, 1, 1, 1};

  ProductEval(const ProductField& field, const Mesh& m) : f(field), mesh(m) {
    const int nv = mesh.nodes_per_element();
    active.assign(mesh.num_elements(), 1);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      for (const auto& fac : f.factors) {
        bool zero = true;
        for (int i = 0; i < nv; ++i) zero = zero && fac(mesh.elements[e].v[i]) == 0.0;
        if (zero) active[e] = 0;
      }
    }
    for (std::size_t k = 0; k < f.factors.size(); ++k) {
      for (int side = 0; side < 4; ++side) ext[side] *= f.exterior[k][side];
    }
  }

  // Nodal factor values on element e, laid out [factor][local node].
  void gather(int e, std::vector<double>& vals) const {
    const int nv = mesh.nodes_per_element();
    vals.resize(f.factors.size() * nv);
    for (std::size_t k = 0; k < f.factors.size(); ++k) {
      for (int i = 0; i < nv; ++i) vals[k * nv + i] = f.factors[k](mesh.elements[e].v[i]);
    }
  }

  double eval(const std::vector<double>& vals, const double* phi) const {
    const int nv = mesh.nodes_per_element();
    double p = 1.0;
    for (std::size_t k = 0; k < f.factors.size(); ++k) {
      double v = 0.0;
      for (int i = 0; i < nv; ++i) v += vals[k * nv + i] * phi[i];
      p *= v;
    }
    return p;
  }
};

double product_energy_range(const PairQuadrature& quad, const ProductEval& e1,
                            const ProductEval& e2, int a) {
  const Mesh& mesh = quad.mesh();
  const int ne = mesh.num_elements();
  std::vector<PairSample> scratch;
  std::vector<double> a1, a2, b1, b2;
  e1.gather(a, a1);
  e2.gather(a, a2);
  double acc = 0.0;
  for (int b = a; b < ne; ++b) {
    const bool live1 = e1.active[a] || e1.active[b];
    const bool live2 = e2.active[a] || e2.active[b];
    if (!live1 || !live2) continue;
    e1.gather(b, b1);
    e2.gather(b, b2);
    double sum = 0.0;
    for (const PairSample& p : quad.pair_samples(a, b, scratch)) {
      const double d1 = e1.eval(a1, p.px) - e1.eval(b1, p.py);
      const double d2 = e2.eval(a2, p.px) - e2.eval(b2, p.py);
      sum += p.w * d1 * d2;
    }
    acc += (a == b ? 0.5 : 1.0) * sum;
  }
  const int sides = quad.num_sides();
  for (const TailSample& t : quad.tail_samples(a)) {
    const double v1 = e1.eval(a1, t.px);
    const double v2 = e2.eval(a2, t.px);
    for (int k = 0; k < sides; ++k) acc += t.w[k] * (v1 - e1.ext[k]) * (v2 - e2.ext[k]);
  }
  return acc;
}

}  // namespace

double product_energy(const PairQuadrature& quad, const ProductField& f1, const ProductField& f2,
                      Execution exec) {
  const Mesh& mesh = quad.mesh();
  const ProductEval e1(f1, mesh);
  const ProductEval e2(f2, mesh);
  const int ne = mesh.num_elements();
  double total = 0.0;
  if (exec == Execution::Serial) {
    for (int a = 0; a < ne; ++a) total += product_energy_range(quad, e1, e2, a);
  } else {
    const int threads = omp_get_max_threads();
    std::vector<double> partial(threads, 0.0);
#pragma omp parallel num_threads(threads)
    {
      double mine = 0.0;
#pragma omp for schedule(static, 1)
      for (int a = 0; a < ne; ++a) mine += product_energy_range(quad, e1, e2, a);
      partial[omp_get_thread_num()] = mine;
    }
    for (double p : partial) total += p;
  }
  return quad.params().C * total;
}

}  // namespace fracot
