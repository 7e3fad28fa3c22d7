#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "fracot/assembly.hpp"
#include "fracot/counterexample.hpp"
#include "fracot/dnmap.hpp"
#include "fracot/errors.hpp"
#include "fracot/io.hpp"
#include "fracot/reconstruction.hpp"
#include "fracot/reduction.hpp"
#include "fracot/solver.hpp"
#include "fracot/spectral.hpp"

namespace fracot::cli {

using json = nlohmann::json;

void Context::note(const std::string& line) {
  if (log.is_open()) log << line << "\n";
  if (verbose) std::cerr << line << "\n";
}

namespace {

struct Setup {
  Mesh mesh;
  std::unique_ptr<PairQuadrature> quad;
  SymForm A;
  SymForm M;
  Coefficients coeffs;
};

Setup setup(Context& ctx, double h, bool need_forms = true) {
  const ExperimentConfig& cfg = ctx.cfg;
  Setup s;
  s.mesh = build_mesh(cfg.resolved_box(h), h, cfg.regions);
  s.quad = std::make_unique<PairQuadrature>(s.mesh, cfg.kernel(), cfg.quadrature);
  s.coeffs = Coefficients::from_nodal(sample(s.mesh, cfg.gamma), sample(s.mesh, cfg.q));
  if (need_forms) {
    s.A = gagliardo_form(*s.quad);
    s.M = mass_matrix(s.mesh);
  }
  std::ostringstream os;
  os << "mesh h=" << h << " nodes=" << s.mesh.num_nodes() << " interior=" << s.mesh.interior_dofs.size();
  ctx.note(os.str());
  return s;
}

const Region& measure_region(const ExperimentConfig& cfg, const std::string& name) {
  const Region* r = cfg.find_region(name);
  require(r != nullptr, Errc::ConfigError, "region '" + name + "' is required for this command");
  return *r;
}

// Smooth exterior data supported in the measurement region.
Eigen::VectorXd exterior_data(const ExperimentConfig& cfg, const Mesh& mesh, const std::string& region,
                              double shift = 0.0) {
  const Shape& W = measure_region(cfg, region).shape;
  const Box b = W.bounds();
  Point c = cfg.data_radius > 0.0 ? cfg.data_center : Point{0.5 * (b.lower[0] + b.upper[0]), 0.5 * (b.lower[1] + b.upper[1])};
  double r = cfg.data_radius > 0.0 ? cfg.data_radius : W.diameter() / 3.0;
  if (mesh.dim == 2 && cfg.data_radius <= 0.0) r = std::min(b.width(0), b.width(1)) / 3.0;
  c[0] += shift * r;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.num_nodes());
  const std::vector<int>& dofs = region_dofs(mesh, region);
  for (int i : dofs) {
    double d2 = 0.0;
    for (int k = 0; k < mesh.dim; ++k) d2 += (mesh.nodes[i][k] - c[k]) * (mesh.nodes[i][k] - c[k]);
    f(i) = cfg.data_amplitude * bump_profile(std::sqrt(d2) / r);
  }
  return f;
}

// Smooth bump centred in Omega, vanishing off the interior dofs.
Eigen::VectorXd interior_bump(const Mesh& mesh, double shrink = 0.6) {
  const Box b = mesh.shape(kOmega).bounds();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int i : mesh.interior_dofs) {
    double r2 = 0.0;
    for (int k = 0; k < mesh.dim; ++k) {
      const double c = 0.5 * (b.lower[k] + b.upper[k]);
      const double half = 0.5 * (b.upper[k] - b.lower[k]);
      const double t = (mesh.nodes[i][k] - c) / (shrink * half);
      r2 += t * t;
    }
    v(i) = bump_profile(std::sqrt(r2));
  }
  return v;
}

json rate_records(const std::vector<double>& hs, const std::vector<double>& res) {
  json out = json::array();
  for (std::size_t k = 0; k < hs.size(); ++k) {
    json rec = {{"h", hs[k]}, {"residual", res[k]}};
    if (k > 0 && res[k] > 0 && res[k - 1] > 0) {
      rec["rate"] = std::log(res[k - 1] / res[k]) / std::log(hs[k - 1] / hs[k]);
    } else {
      rec["rate"] = nullptr;
    }
    out.push_back(rec);
  }
  return out;
}

double fitted_rate(const std::vector<double>& hs, const std::vector<double>& res) {
  std::vector<double> inv, r;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    if (res[k] > 0) {
      inv.push_back(1.0 / hs[k]);
      r.push_back(res[k]);
    }
  }
  if (inv.size() < 2) return 0.0;
  return -loglog_slope(inv, r);
}

void write_json(Context& ctx, const std::string& name, const std::string& schema, json body) {
  body["schema"] = schema;
  write_text(ctx.out / name, body.dump(2) + "\n");
  ctx.note("wrote " + (ctx.out / name).string());
}

int finish(Context& ctx, const std::string& summary, bool ok) {
  std::cout << summary << (ok ? "" : " [invariant violated]") << "\n";
  ctx.note(summary);
  return ok ? kOk : kInvariant;
}

std::vector<char> nonnegative_mask(const ExperimentConfig& cfg, const Mesh& mesh) {
  std::vector<char> mask(mesh.num_nodes(), 0);
  for (const auto& name : cfg.q_nonnegative) {
    for (int i : region_dofs(mesh, name)) mask[i] = 1;
  }
  return mask;
}

int cmd_poincare(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  Setup s = setup(ctx, cfg.h);
  const KernelParams params = cfg.kernel();
  const PoincareResult gag = poincare_constant(s.mesh, params, s.A, s.M, s.mesh.interior_dofs,
                                               PoincareConvention::Gagliardo, cfg.solver.eigen);
  const PoincareResult en = poincare_constant(s.mesh, params, s.A, s.M, s.mesh.interior_dofs,
                                              PoincareConvention::Energy, cfg.solver.eigen);
  const auto [q1, q2] = split_potential(s.coeffs.q, nonnegative_mask(cfg, s.mesh));
  const double qnorm = multiplier_norm_estimate(s.A, s.M, potential_form(s.mesh, q1), {}, cfg.solver.eigen);
  const double gamma0 = s.coeffs.gamma.minCoeff();
  const double alpha = coercivity_bound(gamma0, en.delta0, qnorm);
  const ForwardForms forms = assemble_forward(*s.quad, s.coeffs, Execution::Parallel, cfg.exterior_gamma);
  const double lam = interior_min_eigenvalue(forms.system(), s.A, s.M, s.mesh.interior_dofs, cfg.solver.eigen);
  const bool ok = !(alpha > 0.0) || lam >= alpha * (1.0 - 1e-2);
  write_json(ctx, "poincare.json", "fracot.poincare/1",
             {{"h", cfg.h},
              {"C_opt", gag.C_opt},
              {"delta0", gag.delta0},
              {"C_opt_energy", en.C_opt},
              {"delta0_energy", en.delta0},
              {"gamma0", gamma0},
              {"q_small_norm_estimate", qnorm},
              {"coercivity_bound", alpha},
              {"interior_min_eigenvalue", lam},
              {"coercivity_holds", ok}});
  std::ostringstream os;
  os << "poincare: C_opt=" << gag.C_opt << " delta0=" << gag.delta0 << " alpha=" << alpha << " lambda_min=" << lam;
  return finish(ctx, os.str(), ok);
}

int cmd_solve(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  Setup s = setup(ctx, cfg.h);
  DirichletSolver solver(s.mesh, assemble_forward(*s.quad, s.coeffs, Execution::Parallel, cfg.exterior_gamma),
                         cfg.solver);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(s.mesh.num_nodes());
  if (cfg.find_region(cfg.measure_region)) f = exterior_data(cfg, s.mesh, cfg.measure_region);
  const Eigen::VectorXd F = s.M.entries * Eigen::VectorXd::Constant(s.mesh.num_nodes(), cfg.source);
  const DirichletSolution sol = solver.solve(f, &F);
  bool ok = sol.residual <= std::max(cfg.solver.tolerance, 1e-12);
  for (int i = 0; i < s.mesh.num_nodes(); ++i) {
    if (!solver.interior_mask()[i] && sol.u(i) != f(i)) ok = false;
  }
  write_nodal_csv(ctx.out / "solution.csv", s.mesh, {"u", "f_ext", "gamma", "q"}, {&sol.u, &f, &s.coeffs.gamma, &s.coeffs.q});
  write_json(ctx, "solve.json", "fracot.solve/1",
             {{"h", cfg.h}, {"nodes", s.mesh.num_nodes()}, {"interior_dofs", s.mesh.interior_dofs.size()},
              {"residual", sol.residual}, {"energy", sol.energy}, {"source", cfg.source}});
  std::ostringstream os;
  os << "solve: nodes=" << s.mesh.num_nodes() << " residual=" << sol.residual << " energy=" << sol.energy;
  return finish(ctx, os.str(), ok);
}

int cmd_dn(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  Setup s = setup(ctx, cfg.h, false);
  DirichletSolver solver(s.mesh, assemble_forward(*s.quad, s.coeffs, Execution::Parallel, cfg.exterior_gamma),
                         cfg.solver);
  measure_region(cfg, kW1);
  const std::string w2 = cfg.find_region(kW2) ? kW2 : kW1;
  const DNMatrix dn = dn_matrix(solver, region_dofs(s.mesh, kW1), region_dofs(s.mesh, w2));
  write_dn_csv(ctx.out / "dn.csv", s.mesh, dn);
  const bool same = w2 == kW1;
  const double sym = same ? dn.symmetry_defect() : 0.0;
  const bool ok = !same || sym < 1e-10;
  write_json(ctx, "dn.json", "fracot.dn/1",
             {{"h", cfg.h}, {"rows", dn.rows.size()}, {"cols", dn.cols.size()}, {"symmetric_case", same},
              {"symmetry_defect", sym}, {"frobenius_norm", dn.entries.norm()}});
  std::ostringstream os;
  os << "dn: " << dn.rows.size() << "x" << dn.cols.size() << " symmetry_defect=" << sym;
  return finish(ctx, os.str(), ok);
}

int cmd_reconstruct(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  Setup s = setup(ctx, cfg.h);
  const Region& W = measure_region(cfg, cfg.measure_region);
  Point x0 = cfg.x0.value_or(Point{0.5 * (W.shape.bounds().lower[0] + W.shape.bounds().upper[0]),
                                   0.5 * (W.shape.bounds().lower[1] + W.shape.bounds().upper[1])});
  DirichletSolver solver(s.mesh, assemble_forward(*s.quad, s.coeffs, Execution::Parallel, cfg.exterior_gamma),
                         cfg.solver);
  const BumpSequence bumps = bump_sequence(s.mesh, s.A, s.M, W.shape, x0, cfg.scales, cfg.bump);
  const Reconstruction rec = exterior_reconstruct(solver, bumps);
  const double truth = cfg.gamma(x0);
  CsvWriter csv(ctx.out / "reconstruct.csv", {"N", "estimate", "error_vs_true", "potential_term",
                                              "correction_energy", "decomposition_residual"});
  bool ok = true;
  for (const auto& smp : rec.samples) {
    csv << smp.N << smp.estimate << (smp.estimate - truth) << smp.potential_term << smp.correction_energy
        << smp.decomposition_residual;
    csv.end_row();
    ok = ok && smp.decomposition_residual < 1e-10;
  }
  for (double e : bumps.energies) ok = ok && std::abs(e - 1.0) < 1e-10;
  json decay = nullptr;
  if (cfg.p > cfg.n / (2.0 * cfg.s)) {
    const DecayCheck d = potential_decay_check(s.mesh, s.coeffs.q, bumps, cfg.p, cfg.kernel());
    decay = {{"theta", d.theta}, {"C", d.C}, {"fitted_exponent", d.fitted_exponent},
             {"vanishing", d.vanishing}, {"bounded", d.bounded}};
    ok = ok && d.bounded;
  }
  write_json(ctx, "reconstruct.json", "fracot.reconstruct/1",
             {{"h", cfg.h}, {"x0", {x0[0], x0[1]}}, {"gamma_true", truth}, {"extrapolated", rec.extrapolated},
              {"relative_error", std::abs(rec.extrapolated - truth) / truth},
              {"fit", {{"limit", rec.fit.limit}, {"amplitude", rec.fit.amplitude}, {"rate", rec.fit.rate}}},
              {"scales", bumps.scales}, {"potential_decay", decay}});
  std::ostringstream os;
  os << "reconstruct: gamma(x0)~" << rec.extrapolated << " (true " << truth << ") from " << bumps.scales.size()
     << " scales";
  return finish(ctx, os.str(), ok);
}

int cmd_liouville(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  std::vector<double> res;
  for (double h : cfg.study_h) {
    Setup s = setup(ctx, h);
    const ForwardForms forms = assemble_forward(*s.quad, s.coeffs, Execution::Parallel, cfg.exterior_gamma);
    const ReducedPotentialForm Q = reduced_potential_form(*s.quad, s.A, s.coeffs);
    const Eigen::VectorXd phi = interior_bump(s.mesh);
    Eigen::VectorXd u = phi.cwiseSqrt() + interior_bump(s.mesh, 0.9);
    if (cfg.find_region(kW1)) u += exterior_data(cfg, s.mesh, kW1);
    res.push_back(liouville_residual(forms, s.A, Q, u, phi));
  }
  write_json(ctx, "liouville.json", "fracot.liouville/1",
             {{"records", rate_records(cfg.study_h, res)}, {"fitted_rate", fitted_rate(cfg.study_h, res)}});
  std::ostringstream os;
  os << "liouville-check: residual=" << res.back() << " rate=" << fitted_rate(cfg.study_h, res);
  return finish(ctx, os.str(), true);
}

int cmd_transfer(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  measure_region(cfg, kW1);
  std::vector<double> res;
  for (double h : cfg.study_h) {
    Setup s = setup(ctx, h);
    DirichletSolver cond(s.mesh, assemble_forward(*s.quad, s.coeffs, Execution::Parallel, cfg.exterior_gamma),
                         cfg.solver);
    const ReducedPotentialForm Q = reduced_potential_form(*s.quad, s.A, s.coeffs);
    DirichletSolver sch = schrodinger_solver(s.mesh, s.A, Q, cfg.solver);
    const Eigen::VectorXd f = exterior_data(cfg, s.mesh, kW1);
    const Eigen::VectorXd g = exterior_data(cfg, s.mesh, kW1, 0.5);
    res.push_back(dn_transfer_residual(cond, sch, s.coeffs, s.coeffs.gamma, region_dofs(s.mesh, kW1), f, g));
  }
  write_json(ctx, "transfer.json", "fracot.transfer/1",
             {{"records", rate_records(cfg.study_h, res)}, {"fitted_rate", fitted_rate(cfg.study_h, res)}});
  std::ostringstream os;
  os << "transfer-check: residual=" << res.back() << " rate=" << fitted_rate(cfg.study_h, res);
  return finish(ctx, os.str(), true);
}

CounterexampleGeometry geometry_from(const ExperimentConfig& cfg) {
  CounterexampleGeometry g;
  g.omega = measure_region(cfg, kOmega).shape;
  g.omega_prime = measure_region(cfg, kOmegaPrime).shape;
  g.cutoff = measure_region(cfg, kCutoff).shape;
  g.W = measure_region(cfg, kW1).shape;
  g.eps = cfg.eps;
  g.layout = cfg.layout;
  return g;
}

int cmd_counterexample(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const CounterexampleGeometry geo = geometry_from(cfg);
  try {
    check_geometry(geo);
  } catch (const Error& e) {
    fail(Errc::ConfigError, std::string("counterexample geometry: ") + e.what());
  }
  Setup s = setup(ctx, cfg.h);
  CounterexampleOptions opts;
  opts.eta_amplitude = cfg.eta_amplitude;
  opts.transition_factor = cfg.transition_factor;
  opts.solver = cfg.solver;
  const CounterexamplePair pair = build_counterexample(s.mesh, s.A, s.M, geo, opts);
  const NonuniquenessReport rep = verify_nonuniqueness(*s.quad, s.A, s.M, pair, region_dofs(s.mesh, kW1), cfg.solver);
  write_nodal_csv(ctx.out / "pair.csv", s.mesh, {"gamma1", "q1", "m", "m_tilde", "eta"},
                  {&pair.gamma1.gamma, &pair.q1, &pair.m, &pair.m_tilde, &pair.eta});
  const bool degenerate = pair.m.cwiseAbs().maxCoeff() == 0.0;
  const bool ok = rep.gamma_w_deviation == 0.0 && rep.m_min >= 0.0 && rep.m_max <= 0.5 &&
                  rep.condition3_residual < 1e-8 && (degenerate || rep.admissible);
  write_json(ctx, "counterexample.json", "fracot.counterexample/1",
             {{"h", cfg.h},
              {"eps", cfg.eps},
              {"layout", cfg.layout == Layout::Figure ? "figure" : "text"},
              {"dn_gap", rep.dn_gap},
              {"q_gap", rep.q_gap},
              {"q_form_check", rep.q_form_check},
              {"q_form_scale", rep.q_form_scale},
              {"condition3_residual", rep.condition3_residual},
              {"gamma_w_deviation", rep.gamma_w_deviation},
              {"m_min", rep.m_min},
              {"m_max", rep.m_max},
              {"C_eps", pair.C_eps},
              {"m_tilde_l2", pair.m_tilde_l2},
              {"multiplier_estimate", rep.multiplier_estimate},
              {"delta0", rep.delta0},
              {"delta0_gagliardo", rep.delta0_gagliardo},
              {"gamma0", rep.gamma0},
              {"admissible", rep.admissible},
              {"w_nodes", rep.w_nodes}});
  std::ostringstream os;
  os << "counterexample: dn_gap=" << rep.dn_gap << " q_gap=" << rep.q_gap << " multiplier=" << rep.multiplier_estimate
     << " (limit " << rep.gamma0 / rep.delta0 << ")";
  return finish(ctx, os.str(), ok);
}

int cmd_oracle(Context& ctx) {
  ExperimentConfig& cfg = ctx.cfg;
  if (!cfg.box) {
    Box b;
    b.dim = cfg.n;
    for (int k = 0; k < cfg.n; ++k) {
      b.lower[k] = -8.0;
      b.upper[k] = 8.0;
    }
    cfg.box = b;
  }
  Setup s = setup(ctx, cfg.h);
  Eigen::VectorXd u(s.mesh.num_nodes());
  for (int i = 0; i < s.mesh.num_nodes(); ++i) {
    double r2 = 0.0;
    for (int k = 0; k < s.mesh.dim; ++k) r2 += s.mesh.nodes[i][k] * s.mesh.nodes[i][k];
    u(i) = std::exp(-r2);
  }
  const Eigen::VectorXd quad = nodal_frac_laplacian(s.A, s.M, u);
  const Eigen::VectorXd spec = spectral_frac_laplacian(s.mesh, cfg.kernel(), u);
  write_nodal_csv(ctx.out / "oracle.csv", s.mesh, {"u", "quadrature", "spectral"}, {&u, &quad, &spec});
  const double rel = (quad - spec).norm() / spec.norm();
  const double maxerr = (quad - spec).cwiseAbs().maxCoeff();
  write_json(ctx, "oracle.json", "fracot.oracle/1",
             {{"h", cfg.h}, {"s", cfg.s}, {"relative_l2", rel}, {"max_abs", maxerr}, {"threshold", 0.02}});
  std::ostringstream os;
  os << "oracle-compare: relative L2 gap " << rel;
  return finish(ctx, os.str(), rel < 0.02);
}

int cmd_study(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Region& om = measure_region(cfg, kOmega);
  const bool closed_form = cfg.n == 1 && cfg.gamma.kind == Profile::Kind::Constant && cfg.gamma.base == 1.0 &&
                           cfg.q.kind == Profile::Kind::Constant && cfg.q.base == 0.0;
  const double src = cfg.source != 0.0 ? cfg.source : 1.0;
  const double a = om.shape.bounds().lower[0], b = om.shape.bounds().upper[0];
  const double c = 0.5 * (a + b), R = 0.5 * (b - a), s = cfg.s;
  const double kappa = src * std::pow(R, 2 * s) * std::tgamma(0.5) /
                       (std::pow(2.0, 2 * s) * std::tgamma(0.5 + s) * std::tgamma(1.0 + s));
  CsvWriter csv(ctx.out / "study.csv", {"h", "nodes", "center_value", "rel_error_center", "rel_error_inner"});
  std::vector<double> hs, e0, einner;
  for (double h : cfg.study_h) {
    Setup st = setup(ctx, h);
    DirichletSolver solver(st.mesh, assemble_forward(*st.quad, st.coeffs, Execution::Parallel, cfg.exterior_gamma),
                           cfg.solver);
    const Eigen::VectorXd F = st.M.entries * Eigen::VectorXd::Constant(st.mesh.num_nodes(), src);
    const DirichletSolution sol = solver.solve(Eigen::VectorXd::Zero(st.mesh.num_nodes()), &F);
    double centre = 0.0, err0 = NAN, errin = NAN;
    double best = 1e300;
    for (int i : st.mesh.interior_dofs) {
      const double d = std::abs(st.mesh.nodes[i][0] - c) + (st.mesh.dim == 2 ? std::abs(st.mesh.nodes[i][1]) : 0.0);
      if (d < best) {
        best = d;
        centre = sol.u(i);
      }
    }
    if (closed_form) {
      errin = 0.0;
      for (int i : st.mesh.interior_dofs) {
        const double t = (st.mesh.nodes[i][0] - c) / R;
        const double ex = kappa * std::pow(1 - t * t, s);
        if (std::abs(t) <= 0.9) errin = std::max(errin, std::abs(sol.u(i) - ex) / ex);
        if (std::abs(t) < 1e-12) err0 = std::abs(sol.u(i) - ex) / ex;
      }
    }
    csv << h << st.mesh.num_nodes() << centre << err0 << errin;
    csv.end_row();
    hs.push_back(h);
    e0.push_back(err0);
    einner.push_back(errin);
  }
  json body = {{"closed_form", closed_form}, {"h", hs}};
  if (closed_form) {
    body["center"] = rate_records(hs, e0);
    body["inner"] = rate_records(hs, einner);
    body["inner_fitted_rate"] = fitted_rate(hs, einner);
  }
  write_json(ctx, "study.json", "fracot.study/1", body);
  std::ostringstream os;
  os << "convergence-study: " << hs.size() << " levels";
  if (closed_form) os << ", inner error " << einner.back() << " rate " << fitted_rate(hs, einner);
  return finish(ctx, os.str(), true);
}

}  // namespace

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table = {
      {"poincare", cmd_poincare},           {"solve", cmd_solve},
      {"dn", cmd_dn},                       {"reconstruct", cmd_reconstruct},
      {"liouville-check", cmd_liouville},   {"transfer-check", cmd_transfer},
      {"counterexample", cmd_counterexample}, {"oracle-compare", cmd_oracle},
      {"convergence-study", cmd_study},
  };
  return table;
}

}  // namespace fracot::cli
