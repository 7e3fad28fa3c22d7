#include "fracot/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fracot/errors.hpp"

namespace fracot {

namespace pt = boost::property_tree;

namespace {

// Line lookup for diagnostics; property_tree keeps no positions.
class Locator {
 public:
  Locator(const std::string& text, std::string name) : name_(std::move(name)) {
    std::istringstream in(text);
    std::string line, section;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == ';' || line[first] == '#') continue;
      if (line[first] == '[') {
        const auto close = line.find(']', first);
        section = line.substr(first + 1, close - first - 1);
        sections_[section] = no;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(first, eq - first);
      while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
      keys_[section + "." + key] = no;
    }
  }

  [[noreturn]] void error(const std::string& section, const std::string& key, const std::string& msg) const {
    std::ostringstream os;
    os << name_;
    const auto it = keys_.find(section + "." + key);
    if (it != keys_.end()) {
      os << ":" << it->second;
    } else if (auto s = sections_.find(section); s != sections_.end()) {
      os << ":" << s->second;
    }
    os << ": [" << section << "]";
    if (!key.empty()) os << " " << key;
    os << ": " << msg;
    fail(Errc::ConfigError, os.str());
  }

 private:
  std::string name_;
  std::map<std::string, int> sections_;
  std::map<std::string, int> keys_;
};

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

double to_double(const std::string& w) {
  if (w == "inf" || w == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  // fractions such as 1/64 are accepted
  const auto slash = w.find('/');
  if (slash != std::string::npos) {
    const double a = std::stod(w.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument(w);
    const std::string rest = w.substr(slash + 1);
    const double b = std::stod(rest, &used);
    if (used != rest.size() || b == 0.0) throw std::invalid_argument(w);
    return a / b;
  }
  v = std::stod(w, &used);
  if (used != w.size()) throw std::invalid_argument(w);
  return v;
}

std::vector<double> to_list(const std::string& s) {
  std::string t = s;
  for (char& c : t) {
    if (c == ',') c = ' ';
  }
  std::vector<double> out;
  for (const auto& w : words(t)) out.push_back(to_double(w));
  return out;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, const Locator& loc) : tree_(tree), loc_(loc) {}

  const pt::ptree* section(const std::string& name) const {
    auto it = tree_.find(name);
    return it == tree_.not_found() ? nullptr : &it->second;
  }

  std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
    const pt::ptree* s = section(sec);
    if (!s) return std::nullopt;
    auto it = s->find(key);
    if (it == s->not_found()) return std::nullopt;
    used_.insert(sec + "." + key);
    return it->second.data();
  }

  template <class T>
  void number(const std::string& sec, const std::string& key, T& out) const {
    if (auto v = raw(sec, key)) {
      double d = 0.0;
      try {
        d = to_double(trim(*v));
      } catch (const std::exception&) {
        loc_.error(sec, key, "expected a number, got '" + *v + "'");
      }
      if constexpr (std::is_integral_v<T>) {
        if (d != std::floor(d)) loc_.error(sec, key, "expected an integer, got '" + *v + "'");
        out = static_cast<T>(d);
      } else {
        out = d;
      }
    }
  }

  std::vector<double> list(const std::string& sec, const std::string& key) const {
    auto v = raw(sec, key);
    if (!v) return {};
    try {
      return to_list(*v);
    } catch (const std::exception&) {
      loc_.error(sec, key, "expected a list of numbers, got '" + *v + "'");
    }
  }

  std::optional<std::string> word(const std::string& sec, const std::string& key) const {
    auto v = raw(sec, key);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void check_unknown(const std::map<std::string, std::set<std::string>>& allowed) const {
    for (const auto& [sec, body] : tree_) {
      auto a = allowed.find(sec);
      if (a == allowed.end()) loc_.error(sec, "", "unknown section");
      if (a->second.count("*")) continue;
      for (const auto& [key, value] : body) {
        if (!a->second.count(key)) loc_.error(sec, key, "unknown key");
      }
    }
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\"");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\"");
    return s.substr(a, b - a + 1);
  }

  const Locator& loc() const { return loc_; }

 private:
  const pt::ptree& tree_;
  const Locator& loc_;
  mutable std::set<std::string> used_;
};

Point to_point(const std::vector<double>& v, int dim) {
  Point p{0.0, 0.0};
  for (int k = 0; k < dim && k < static_cast<int>(v.size()); ++k) p[k] = v[k];
  return p;
}

Profile read_profile(const Reader& r, const std::string& sec, int dim, const ExperimentConfig& cfg,
                     double default_value) {
  Profile p = Profile::constant(default_value);
  const auto preset = r.word(sec, "preset").value_or("constant");
  r.number(sec, "value", p.base);
  r.number(sec, "base", p.base);
  r.number(sec, "amplitude", p.amplitude);
  r.number(sec, "width", p.width);
  r.number(sec, "transition", p.transition);
  if (auto c = r.list(sec, "center"); !c.empty()) {
    if (static_cast<int>(c.size()) != dim) r.loc().error(sec, "center", "needs one coordinate per dimension");
    p.center = to_point(c, dim);
  }
  p.breaks = r.list(sec, "breaks");
  p.values = r.list(sec, "values");
  if (preset == "constant") {
    p.kind = Profile::Kind::Constant;
  } else if (preset == "gaussian") {
    p.kind = Profile::Kind::Gaussian;
    if (!(p.width > 0.0)) r.loc().error(sec, "width", "must be positive");
  } else if (preset == "piecewise") {
    p.kind = Profile::Kind::Piecewise;
    if (p.values.size() != p.breaks.size() + 1) {
      r.loc().error(sec, "values", "piecewise needs one more value than breaks");
    }
  } else if (preset == "table") {
    p.kind = Profile::Kind::Table;
    if (p.values.size() != p.breaks.size() || p.breaks.size() < 2) {
      r.loc().error(sec, "values", "table needs matching breaks and values, at least two");
    }
  } else if (preset == "plateau") {
    p.kind = Profile::Kind::Plateau;
    const auto where = r.word(sec, "region");
    if (!where) r.loc().error(sec, "region", "plateau needs a region name or shape");
    if (const Region* reg = cfg.find_region(*where)) {
      p.shape = reg->shape;
    } else {
      try {
        p.shape = parse_shape(*where, dim);
      } catch (const Error& e) {
        r.loc().error(sec, "region", e.what());
      }
    }
    if (!(p.transition > 0.0)) r.loc().error(sec, "transition", "must be positive");
  } else {
    r.loc().error(sec, "preset", "unknown preset '" + preset + "'");
  }
  return p;
}

}  // namespace

Shape parse_shape(const std::string& spec, int dim) {
  const auto w = words(spec);
  auto bad = [&](const std::string& why) -> Shape {
    fail(Errc::ConfigError, "shape '" + spec + "': " + why);
  };
  if (w.empty()) return bad("empty");
  std::vector<double> v;
  try {
    for (std::size_t k = 1; k < w.size(); ++k) v.push_back(to_double(w[k]));
  } catch (const std::exception&) {
    return bad("non-numeric coordinate");
  }
  if (w[0] == "interval") {
    if (dim != 1) return bad("interval needs n = 1");
    if (v.size() != 2) return bad("interval takes two numbers");
    if (!(v[0] < v[1])) return bad("lower end must be below upper end");
    return Shape::interval(v[0], v[1]);
  }
  if (w[0] == "rect") {
    if (dim != 2) return bad("rect needs n = 2");
    if (v.size() != 4) return bad("rect takes four numbers");
    if (!(v[0] < v[2] && v[1] < v[3])) return bad("lower corner must be below upper corner");
    return Shape::rect(v[0], v[1], v[2], v[3]);
  }
  if (w[0] == "ball") {
    if (static_cast<int>(v.size()) != dim + 1) return bad("ball takes a centre and a radius");
    if (!(v.back() > 0.0)) return bad("radius must be positive");
    return Shape::ball(dim, to_point(v, dim), v.back());
  }
  return bad("unknown kind '" + w[0] + "'");
}

std::vector<Region> default_regions(int dim) {
  if (dim == 1) {
    const CounterexampleGeometry g = figure_geometry();
    return {{kOmega, g.omega}, {kW1, g.W}, {kOmegaPrime, g.omega_prime}, {kCutoff, g.cutoff}};
  }
  return {{kOmega, Shape::rect(-1, -1, 1, 1)},
          {kW1, Shape::rect(1.3, -0.3, 1.9, 0.3)},
          {kOmegaPrime, Shape::rect(-0.5, -0.5, 0.5, 0.5)},
          {kCutoff, Shape::rect(-1.9, -0.3, -1.3, 0.3)}};
}

KernelParams ExperimentConfig::kernel() const {
  KernelParams k = KernelParams::standard(n, s);
  if (C) k.C = *C;
  return k;
}

const Region* ExperimentConfig::find_region(const std::string& name) const {
  for (const Region& r : regions) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

Box ExperimentConfig::resolved_box(double spacing) const {
  if (box) return *box;
  const Region* om = find_region(kOmega);
  const double m = margin ? *margin : 2.0 * (om ? om->shape.diameter() : 1.0);
  return enclosing_box(regions, m, spacing);
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  pt::ptree tree;
  {
    std::istringstream in(text);
    try {
      pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      std::ostringstream os;
      os << source_name << ":" << e.line() << ": " << e.message();
      fail(Errc::ConfigError, os.str());
    }
  }
  const Locator loc(text, source_name);
  const Reader r(tree, loc);
  r.check_unknown({
      {"problem", {"n", "s", "C", "exterior_gamma"}},
      {"mesh", {"h", "margin", "box"}},
      {"regions", {"*"}},
      {"gamma", {"preset", "value", "base", "amplitude", "center", "width", "breaks", "values", "region", "transition"}},
      {"q", {"preset", "value", "base", "amplitude", "center", "width", "breaks", "values", "region", "transition",
             "nonnegative"}},
      {"source", {"value", "data_center", "data_radius", "data_amplitude"}},
      {"solver", {"tolerance", "direct_limit", "max_iteration_factor", "eigen_dense_limit", "eigen_max_steps",
                  "eigen_tolerance"}},
      {"quadrature", {"singular", "duffy", "far", "near_far", "near_far_span", "tail", "near_point", "angle",
                      "radial", "tail_angle", "far_2d", "near_far_2d", "near_far_span_2d", "self_check_tolerance"}},
      {"reconstruct", {"center", "scales", "profile", "p", "region"}},
      {"counterexample", {"eps", "layout", "eta_amplitude", "transition_factor", "mismatch_amplitude"}},
      {"study", {"h"}},
      {"run", {"seed", "threads"}},
      {"output", {"dir"}},
  });

  ExperimentConfig cfg;
  r.number("problem", "n", cfg.n);
  if (cfg.n != 1 && cfg.n != 2) loc.error("problem", "n", "dimension must be 1 or 2");
  r.number("problem", "s", cfg.s);
  if (!(cfg.s > 0.0 && cfg.s < std::min(1.0, 0.5 * cfg.n))) {
    loc.error("problem", "s", "need 0 < s < min(1, n/2)");
  }
  if (r.raw("problem", "C")) {
    double c = 0.0;
    r.number("problem", "C", c);
    if (!(c > 0.0)) loc.error("problem", "C", "must be positive");
    cfg.C = c;
  }
  if (auto e = r.word("problem", "exterior_gamma")) {
    if (*e == "boundary") {
      cfg.exterior_gamma = ExteriorGamma::Boundary;
    } else if (*e == "unit") {
      cfg.exterior_gamma = ExteriorGamma::Unit;
    } else {
      loc.error("problem", "exterior_gamma", "expected 'boundary' or 'unit'");
    }
  }

  r.number("mesh", "h", cfg.h);
  if (!(cfg.h > 0.0)) loc.error("mesh", "h", "must be positive");
  if (r.raw("mesh", "margin")) {
    double m = 0.0;
    r.number("mesh", "margin", m);
    if (!(m >= 0.0)) loc.error("mesh", "margin", "must be nonnegative");
    cfg.margin = m;
  }
  if (auto b = r.word("mesh", "box")) {
    Shape s;
    try {
      s = parse_shape(*b, cfg.n);
    } catch (const Error& e) {
      loc.error("mesh", "box", e.what());
    }
    if (s.kind != Shape::Kind::Box) loc.error("mesh", "box", "box must be an interval or rect");
    cfg.box = s.bounds();
  }

  if (const pt::ptree* regs = r.section("regions")) {
    for (const auto& [name, value] : *regs) {
      try {
        cfg.regions.push_back({name, parse_shape(value.data(), cfg.n)});
      } catch (const Error& e) {
        loc.error("regions", name, e.what());
      }
    }
  } else {
    cfg.regions = default_regions(cfg.n);
  }
  const Region* om = cfg.find_region(kOmega);
  if (!om) loc.error("regions", kOmega, "Omega is required");
  for (const Region& reg : cfg.regions) {
    if (reg.name.rfind("W", 0) == 0 && intersects(reg.shape, om->shape)) {
      loc.error("regions", reg.name, reg.name + " overlaps Omega; measurement sets must lie in the exterior");
    }
  }

  cfg.gamma = read_profile(r, "gamma", cfg.n, cfg, 1.0);
  cfg.q = read_profile(r, "q", cfg.n, cfg, 0.0);
  if (auto nn = r.word("q", "nonnegative")) {
    for (const auto& w : words(*nn)) {
      if (!cfg.find_region(w)) loc.error("q", "nonnegative", "unknown region '" + w + "'");
      cfg.q_nonnegative.push_back(w);
    }
  }

  r.number("source", "value", cfg.source);
  if (auto c = r.list("source", "data_center"); !c.empty()) cfg.data_center = to_point(c, cfg.n);
  r.number("source", "data_radius", cfg.data_radius);
  r.number("source", "data_amplitude", cfg.data_amplitude);

  r.number("solver", "tolerance", cfg.solver.tolerance);
  r.number("solver", "direct_limit", cfg.solver.direct_limit);
  r.number("solver", "max_iteration_factor", cfg.solver.max_iteration_factor);
  r.number("solver", "eigen_dense_limit", cfg.solver.eigen.dense_limit);
  r.number("solver", "eigen_max_steps", cfg.solver.eigen.max_steps);
  r.number("solver", "eigen_tolerance", cfg.solver.eigen.tolerance);
  if (!(cfg.solver.tolerance > 0.0)) loc.error("solver", "tolerance", "must be positive");

  QuadratureOptions& qo = cfg.quadrature;
  const std::pair<const char*, int*> orders[] = {
      {"singular", &qo.singular_order}, {"duffy", &qo.duffy_order},       {"far", &qo.far_order},
      {"near_far", &qo.near_far_order}, {"near_far_span", &qo.near_far_span}, {"tail", &qo.tail_order},
      {"near_point", &qo.near_point_order}, {"angle", &qo.angle_order},   {"radial", &qo.radial_order},
      {"tail_angle", &qo.tail_angle_order}, {"far_2d", &qo.far_order_2d}, {"near_far_2d", &qo.near_far_order_2d},
      {"near_far_span_2d", &qo.near_far_span_2d}};
  for (const auto& [key, dst] : orders) {
    r.number("quadrature", key, *dst);
    if (*dst < 1 && std::string(key).find("span") == std::string::npos) loc.error("quadrature", key, "order must be >= 1");
  }
  r.number("quadrature", "self_check_tolerance", qo.self_check_tolerance);

  if (auto c = r.list("reconstruct", "center"); !c.empty()) {
    if (static_cast<int>(c.size()) != cfg.n) loc.error("reconstruct", "center", "needs one coordinate per dimension");
    cfg.x0 = to_point(c, cfg.n);
  }
  cfg.scales = r.list("reconstruct", "scales");
  if (auto b = r.word("reconstruct", "profile")) {
    if (*b == "mollifier") {
      cfg.bump = BumpProfile::Mollifier;
    } else if (*b == "polynomial") {
      cfg.bump = BumpProfile::Polynomial;
    } else {
      loc.error("reconstruct", "profile", "expected 'mollifier' or 'polynomial'");
    }
  }
  r.number("reconstruct", "p", cfg.p);
  if (auto w = r.word("reconstruct", "region")) {
    if (!cfg.find_region(*w)) loc.error("reconstruct", "region", "unknown region '" + *w + "'");
    cfg.measure_region = *w;
  }

  r.number("counterexample", "eps", cfg.eps);
  if (!(cfg.eps > 0.0)) loc.error("counterexample", "eps", "must be positive");
  if (auto l = r.word("counterexample", "layout")) {
    if (*l == "figure") {
      cfg.layout = Layout::Figure;
    } else if (*l == "text") {
      cfg.layout = Layout::Text;
    } else {
      loc.error("counterexample", "layout", "expected 'figure' or 'text'");
    }
  }
  r.number("counterexample", "eta_amplitude", cfg.eta_amplitude);
  r.number("counterexample", "transition_factor", cfg.transition_factor);
  r.number("counterexample", "mismatch_amplitude", cfg.mismatch_amplitude);

  if (auto hs = r.list("study", "h"); !hs.empty()) {
    for (double v : hs) {
      if (!(v > 0.0)) loc.error("study", "h", "spacings must be positive");
    }
    cfg.study_h = hs;
  }

  r.number("run", "seed", cfg.seed);
  r.number("run", "threads", cfg.threads);
  if (auto d = r.word("output", "dir")) cfg.out_dir = *d;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ConfigError, path.string() + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

}  // namespace fracot
