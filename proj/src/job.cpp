#include "isogeo/job.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "isogeo/expr.hpp"
#include "isogeo/hermitian.hpp"
#include "isogeo/spin.hpp"

namespace isogeo {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void cfg_fail(int line, const std::string& msg) {
  throw ConfigError("config:" + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
  char* end = nullptr;
  double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(d))
    cfg_fail(line, "expected a finite number, got '" + v + "'");
  return d;
}

int to_int(const std::string& v, int line) {
  char* end = nullptr;
  long n = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || n < -1000000 || n > 1000000)
    cfg_fail(line, "expected an integer, got '" + v + "'");
  return static_cast<int>(n);
}

const std::set<std::string>& known_checks() {
  static const std::set<std::string> k = {
      "gauss_null",        "gauss_pairing",
      "gauss_tangency",    "conformality",
      "structure_gauss",   "structure_codazzi",
      "structure_gw1",     "structure_gw2",
      "structure_gw3",     "structure_vertical",
      "mean_constancy",    "mean_representation",
      "metric_representation", "hopf_representation",
      "gauss_representation",  "periodicity",
      "sphere_radius",     "sphere_fit",
      "dirac"};
  return k;
}

const std::set<std::string>& known_csv_fields() {
  static const std::set<std::string> k = {"u", "v", "l", "x", "y",
                                          "sigma", "H", "K", "Qre", "Qim",
                                          "gauss_res", "codazzi_res"};
  return k;
}

// Gauss-Jordan with partial pivoting; solution replaces b.
bool solve4(std::array<std::array<double, 4>, 4>& A, std::array<double, 4>& b) {
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (std::abs(A[piv][col]) < 1e-300) return false;
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      double f = A[r][col] / A[col][col];
      for (int c = col; c < 4; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int i = 0; i < 4; ++i) b[i] /= A[i][i];
  return true;
}

double resolve_tol(const std::string& name,
                   const std::map<std::string, double>& overrides,
                   const std::optional<double>& fallback, double def) {
  auto it = overrides.find(name);
  if (it != overrides.end()) return it->second;
  if (fallback) return *fallback;
  return def;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

JobConfig parse_config(const std::string& text, const std::string& mode) {
  JobConfig cfg;
  std::set<std::string> seen;
  std::string section, cfg_mode;

  static const std::set<std::string> kSections = {"job",  "surface", "grid",
                                                  "spin", "output",  "tolerances"};

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') cfg_fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!kSections.count(section))
        cfg_fail(line, "unknown section [" + section + "]");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) cfg_fail(line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) cfg_fail(line, "empty key");
    if (section.empty()) cfg_fail(line, "key outside any section");
    if (!seen.insert(section + "." + key).second)
      cfg_fail(line, "duplicate key '" + key + "' in [" + section + "]");

    if (section == "job") {
      if (key == "mode") cfg_mode = val;
      else cfg_fail(line, "unknown key '" + key + "' in [job]");
    } else if (section == "surface") {
      if (key == "source") cfg.source = val;
      else if (key == "name") cfg.name = val;
      else if (key == "mean") cfg.mean = to_double(val, line);
      else if (key == "a") cfg.a = to_double(val, line);
      else if (key == "ra" || key == "rb") {
        try {
          (key == "ra" ? cfg.ra : cfg.rb) = parse_rational(val);
        } catch (const std::invalid_argument& e) {
          cfg_fail(line, e.what());
        }
      } else if (key == "alpha") cfg.alpha = val;
      else if (key == "beta_h") cfg.beta_h = val;
      else if (key == "beta_ah") cfg.beta_ah = val;
      else if (key == "h") cfg.h = val;
      else if (key == "h2") cfg.h2 = val;
      else if (key == "omega") cfg.omega = val;
      else if (key == "h1_re") cfg.h1_re = to_double(val, line);
      else if (key == "h1_im") cfg.h1_im = to_double(val, line);
      else if (key == "x0_l") cfg.x0.l = to_double(val, line);
      else if (key == "x0_x") cfg.x0.x = to_double(val, line);
      else if (key == "x0_y") cfg.x0.y = to_double(val, line);
      else cfg_fail(line, "unknown key '" + key + "' in [surface]");
    } else if (section == "grid") {
      if (key == "u0") cfg.grid.u0 = to_double(val, line);
      else if (key == "u1") cfg.grid.u1 = to_double(val, line);
      else if (key == "v0") cfg.grid.v0 = to_double(val, line);
      else if (key == "v1") cfg.grid.v1 = to_double(val, line);
      else if (key == "nu") cfg.grid.nu = to_int(val, line);
      else if (key == "nv") cfg.grid.nv = to_int(val, line);
      else if (key == "base_u") cfg.base_u = to_double(val, line);
      else if (key == "base_v") cfg.base_v = to_double(val, line);
      else cfg_fail(line, "unknown key '" + key + "' in [grid]");
    } else if (section == "spin") {
      if (key == "alpha") cfg.spin_alpha = val;
      else if (key == "beta_h") cfg.spin_beta_h = val;
      else if (key == "beta_ah") cfg.spin_beta_ah = val;
      else if (key == "rho") {
        if (val != "auto") to_double(val, line);  // validate now
        cfg.spin_rho = val;
      } else cfg_fail(line, "unknown key '" + key + "' in [spin]");
    } else if (section == "output") {
      if (key == "obj") cfg.obj_path = val;
      else if (key == "csv") cfg.csv_path = val;
      else if (key == "report") cfg.report_path = val;
      else if (key == "csv_fields") {
        std::stringstream fs(val);
        std::string f;
        while (std::getline(fs, f, ',')) {
          f = trim(f);
          if (f.empty()) cfg_fail(line, "empty csv field name");
          if (!known_csv_fields().count(f))
            cfg_fail(line, "unknown csv field '" + f + "'");
          cfg.csv_fields.push_back(f);
        }
      } else cfg_fail(line, "unknown key '" + key + "' in [output]");
    } else {  // tolerances
      if (!known_checks().count(key))
        cfg_fail(line, "unknown check '" + key + "' in [tolerances]");
      double t = to_double(val, line);
      if (t <= 0) cfg_fail(line, "tolerance must be positive");
      cfg.tol[key] = t;
    }
  }

  // Mode resolution: command-line mode wins but must not contradict [job].
  if (!mode.empty()) {
    if (!cfg_mode.empty() && cfg_mode != mode)
      throw ConfigError("config: mode '" + cfg_mode +
                        "' conflicts with command '" + mode + "'");
    cfg.mode = mode;
  } else {
    cfg.mode = cfg_mode;
  }
  static const std::set<std::string> kModes = {"generate", "verify", "spin",
                                               "catalogue"};
  if (cfg.mode.empty())
    throw ConfigError("config: mode required ([job] mode or subcommand)");
  if (!kModes.count(cfg.mode))
    throw ConfigError("config: unknown mode '" + cfg.mode + "'");

  try {
    cfg.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  auto has = [&](const std::string& k) { return seen.count("surface." + k) > 0; };

  if (cfg.mode == "catalogue") {
    for (const char* k : {"source", "name", "alpha", "beta_h", "beta_ah", "h",
                          "h2", "omega", "h1_re", "h1_im", "x0_l", "x0_x",
                          "x0_y"})
      if (has(k))
        throw ConfigError(std::string("config: [surface] key '") + k +
                          "' is not valid in catalogue mode");
  } else {
    static const std::set<std::string> kSources = {"catalogue", "kenmotsu",
                                                   "weierstrass", "spinor"};
    if (cfg.source.empty())
      throw ConfigError("config: [surface] source required");
    if (!kSources.count(cfg.source))
      throw ConfigError("config: unknown source '" + cfg.source + "'");

    std::set<std::string> allowed = {"source"};
    if (cfg.source == "catalogue")
      allowed.insert({"name", "mean", "a", "ra", "rb"});
    else if (cfg.source == "weierstrass")
      allowed.insert({"h", "omega", "x0_l", "x0_x", "x0_y"});
    else if (cfg.source == "kenmotsu")
      allowed.insert({"omega", "h2", "h1_re", "h1_im", "mean", "x0_l", "x0_x",
                      "x0_y"});
    else  // spinor
      allowed.insert({"alpha", "beta_h", "beta_ah", "x0_l", "x0_x", "x0_y"});

    for (const auto& sk : seen) {
      if (sk.rfind("surface.", 0) != 0) continue;
      std::string k = sk.substr(8);
      if (!allowed.count(k))
        throw ConfigError("config: [surface] key '" + k +
                          "' is not valid for source '" + cfg.source + "'");
    }
    auto require = [&](const char* k) {
      if (!has(k))
        throw ConfigError(std::string("config: source '") + cfg.source +
                          "' requires [surface] " + k);
    };
    if (cfg.source == "catalogue") require("name");
    else if (cfg.source == "weierstrass") { require("h"); require("omega"); }
    else if (cfg.source == "kenmotsu") require("omega");
    else { require("alpha"); require("beta_h"); }
  }

  bool any_spin = false;
  for (const auto& sk : seen)
    if (sk.rfind("spin.", 0) == 0) any_spin = true;
  if (cfg.mode == "spin") {
    if (cfg.spin_alpha.empty())
      throw ConfigError("config: spin mode requires [spin] alpha");
    if (cfg.spin_rho.empty())
      throw ConfigError("config: spin mode requires [spin] rho");
    if (!cfg.spin_beta_ah.empty() && cfg.spin_beta_h.empty())
      throw ConfigError("config: [spin] beta_ah requires beta_h");
  } else if (any_spin) {
    throw ConfigError("config: [spin] section requires mode = spin");
  }

  if (!cfg.csv_path.empty() && cfg.csv_fields.empty())
    throw ConfigError("config: [output] csv requires csv_fields");
  if (cfg.csv_path.empty() && !cfg.csv_fields.empty())
    throw ConfigError("config: [output] csv_fields requires csv");

  // Expressions must parse; ParseError (with its offset) propagates.
  for (const std::string* e :
       {&cfg.alpha, &cfg.beta_h, &cfg.beta_ah, &cfg.h, &cfg.h2, &cfg.omega,
        &cfg.spin_alpha, &cfg.spin_beta_h, &cfg.spin_beta_ah})
    if (!e->empty()) parse(*e);

  return cfg;
}

// ---------------------------------------------------------------------------
// Verification

bool VerifyReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

VerifyReport verify_patch(const SurfacePatch& patch,
                          const std::map<std::string, double>& overrides,
                          std::optional<double> fallback) {
  const GridSpec& g = patch.grid;
  VerifyReport r;
  r.source = patch.meta.source;
  r.provenance = patch.meta.provenance;
  r.grid = g;
  r.period_v = patch.meta.period_v;
  r.dihedral = patch.meta.dihedral;

  std::vector<int> valid;
  valid.reserve(g.size());
  for (int s = 0; s < g.size(); ++s)
    if (patch.spacelike[s]) valid.push_back(s);
  r.spacelike_count = static_cast<int>(valid.size());

  bool first = true;
  for (int s : valid) {
    const FundForms& f = patch.forms[s];
    if (first) {
      r.mean_min = r.mean_max = f.H;
      r.curv_min = r.curv_max = f.K;
      first = false;
    } else {
      r.mean_min = std::min(r.mean_min, f.H);
      r.mean_max = std::max(r.mean_max, f.H);
      r.curv_min = std::min(r.curv_min, f.K);
      r.curv_max = std::max(r.curv_max, f.K);
    }
  }

  auto add = [&](const std::string& name, double mx, double def) {
    double t = resolve_tol(name, overrides, fallback, def);
    r.checks.push_back({name, mx, t, mx <= t});
  };

  double null_mx = 0, pair_mx = 0, tang_mx = 0, conf_mx = 0;
  for (int s : valid) {
    const Jet& j = patch.jets[s];
    const MinkVec& gm = patch.gauss[s];
    null_mx = std::max(null_mx, std::abs(mink_inner_comp(gm, gm)));
    pair_mx = std::max(pair_mx, std::abs(mink_inner_comp(gm, K) - 1));
    tang_mx = std::max(tang_mx, std::max(std::abs(mink_inner_comp(j.xu, gm)),
                                         std::abs(mink_inner_comp(j.xv, gm))));
    double E = j.xu.x1 * j.xu.x1 + j.xu.x2 * j.xu.x2;
    double G = j.xv.x1 * j.xv.x1 + j.xv.x2 * j.xv.x2;
    conf_mx = std::max(conf_mx,
                       conformality_residual(j) / (0.5 * (E + G)));
  }
  add("gauss_null", null_mx, 1e-10);
  add("gauss_pairing", pair_mx, 1e-12);
  add("gauss_tangency", tang_mx, 1e-10);
  add("conformality", conf_mx, 1e-6);

  StructResiduals m = max_residuals(structure_residuals(patch));
  add("structure_gauss", m.gauss, 1e-5);
  add("structure_codazzi", m.codazzi, 1e-5);
  add("structure_gw1", m.gw1, 1e-5);
  add("structure_gw2", m.gw2, 1e-5);
  add("structure_gw3", m.gw3, 1e-5);
  add("structure_vertical", m.vertical, 1e-5);

  if (patch.meta.h_const) {
    double mx = 0;
    for (int s : valid)
      mx = std::max(mx, std::abs(patch.forms[s].H - *patch.meta.h_const));
    add("mean_constancy", mx, 1e-4);
  }

  if (patch.repr) {
    const ReprFields& rep = *patch.repr;
    if (!rep.mean.empty()) {
      double mx = 0;
      for (int s : valid)
        mx = std::max(mx, std::abs(patch.forms[s].H - rep.mean[s]));
      add("mean_representation", mx,
          r.source == "weierstrass" ? 1e-6 : 1e-4);
    }
    if (!rep.metric.empty()) {
      double mx = 0;
      for (int s : valid) {
        double e2s = std::exp(2 * patch.forms[s].sigma);
        mx = std::max(mx, std::abs(e2s - rep.metric[s]) /
                              (1 + std::abs(rep.metric[s])));
      }
      add("metric_representation", mx, 1e-8);
    }
    if (!rep.hopf.empty()) {
      double mx = 0;
      for (int s : valid)
        mx = std::max(mx, std::abs(patch.forms[s].Q - rep.hopf[s]));
      add("hopf_representation", mx, 1e-4);
    }
    if (!rep.h.empty()) {
      double mx = 0;
      for (int s : valid)
        mx = std::max(mx,
                      (gauss_from_h(rep.h[s]) - patch.gauss[s]).max_abs());
      add("gauss_representation", mx, 1e-8);
    }
  }

  if (patch.meta.period_v) {
    double per = *patch.meta.period_v;
    double dv = g.dv();
    long long k = std::llround(per / dv);
    if (k >= 1 && k <= g.nv - 1 &&
        std::abs(k * dv - per) <= 1e-9 * (1 + std::abs(per))) {
      double mx = 0;
      for (int iu = 0; iu < g.nu; ++iu)
        for (int iv = 0; iv + k < g.nv; ++iv) {
          int s1 = g.index(iu, iv), s2 = g.index(iu, iv + static_cast<int>(k));
          if (!patch.spacelike[s1] || !patch.spacelike[s2]) continue;
          mx = std::max(mx, (patch.jets[s1].x - patch.jets[s2].x).max_abs());
        }
      add("periodicity", mx, 1e-9);
    }
  }

  if (patch.meta.expects_sphere && patch.meta.h_const &&
      *patch.meta.h_const != 0 && valid.size() >= 8) {
    // least squares for l = s (x^2 + y^2) + c1 x + c2 y + c0; radius 1/(2s)
    std::array<std::array<double, 4>, 4> A{};
    std::array<double, 4> b{};
    for (int s : valid) {
      const IsoPoint& p = patch.jets[s].x;
      double row[4] = {p.x * p.x + p.y * p.y, p.x, p.y, 1.0};
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) A[i][j] += row[i] * row[j];
        b[i] += row[i] * p.l;
      }
    }
    double inf = std::numeric_limits<double>::infinity();
    if (solve4(A, b) && b[0] != 0) {
      double radius = 1.0 / (2 * b[0]);
      add("sphere_radius", std::abs(radius - 1.0 / *patch.meta.h_const),
          1e-8);
      double mx = 0;
      for (int s : valid) {
        const IsoPoint& p = patch.jets[s].x;
        double q = p.x * p.x + p.y * p.y;
        mx = std::max(mx,
                      std::abs(b[0] * q + b[1] * p.x + b[2] * p.y + b[3] -
                               p.l));
      }
      add("sphere_fit", mx, 1e-8);
    } else {
      add("sphere_radius", inf, 1e-8);
      add("sphere_fit", inf, 1e-8);
    }
  }

  return r;
}

std::string report_text(const VerifyReport& r) {
  std::ostringstream o;
  auto line = [&](const std::string& k, const std::string& v) {
    o << k << " = " << v << "\n";
  };
  line("source", r.source.empty() ? "unknown" : r.source);
  line("provenance", r.provenance == Provenance::ClosedForm ? "closed_form"
                                                            : "integrated");
  line("grid_u0", fmt17(r.grid.u0));
  line("grid_u1", fmt17(r.grid.u1));
  line("grid_v0", fmt17(r.grid.v0));
  line("grid_v1", fmt17(r.grid.v1));
  line("grid_nu", std::to_string(r.grid.nu));
  line("grid_nv", std::to_string(r.grid.nv));
  line("samples", std::to_string(r.grid.nu * r.grid.nv));
  line("spacelike", std::to_string(r.spacelike_count));
  line("mean_min", fmt17(r.mean_min));
  line("mean_max", fmt17(r.mean_max));
  line("curv_min", fmt17(r.curv_min));
  line("curv_max", fmt17(r.curv_max));
  if (r.period_v) line("period_v", fmt17(*r.period_v));
  if (!r.dihedral.empty()) line("dihedral", r.dihedral);
  int failures = 0;
  for (const auto& c : r.checks) {
    line("check." + c.name + ".max", fmt17(c.max));
    line("check." + c.name + ".tol", fmt17(c.tol));
    line("check." + c.name + ".pass", c.pass ? "true" : "false");
    if (!c.pass) ++failures;
  }
  line("checks", std::to_string(r.checks.size()));
  line("failures", std::to_string(failures));
  line("ok", r.ok() ? "true" : "false");
  return o.str();
}

// ---------------------------------------------------------------------------
// Artifacts

void export_obj(const SurfacePatch& patch, std::ostream& out) {
  const GridSpec& g = patch.grid;
  char buf[96];
  for (const Jet& j : patch.jets) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", j.x.x, j.x.y, j.x.l);
    out << buf;
  }
  for (int iu = 0; iu + 1 < g.nu; ++iu)
    for (int iv = 0; iv + 1 < g.nv; ++iv) {
      int a = g.index(iu, iv) + 1;
      int b = g.index(iu + 1, iv) + 1;
      int c = g.index(iu + 1, iv + 1) + 1;
      int d = g.index(iu, iv + 1) + 1;
      out << "f " << a << ' ' << b << ' ' << c << "\n";
      out << "f " << a << ' ' << c << ' ' << d << "\n";
    }
}

void export_csv(const SurfacePatch& patch,
                const std::vector<std::string>& fields, std::ostream& out) {
  if (fields.empty())
    throw std::invalid_argument("csv: empty field list");
  for (const auto& f : fields)
    if (!known_csv_fields().count(f))
      throw std::invalid_argument("csv: unknown field '" + f + "'");

  const GridSpec& g = patch.grid;
  bool need_struct = false;
  for (const auto& f : fields)
    if (f == "gauss_res" || f == "codazzi_res") need_struct = true;
  std::vector<StructResiduals> rs;
  if (need_struct) rs = structure_residuals(patch);

  for (std::size_t i = 0; i < fields.size(); ++i)
    out << (i ? "," : "") << fields[i];
  out << "\n";
  for (int iu = 0; iu < g.nu; ++iu)
    for (int iv = 0; iv < g.nv; ++iv) {
      int s = g.index(iu, iv);
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string& f = fields[i];
        double val = 0;
        if (f == "u") val = g.u(iu);
        else if (f == "v") val = g.v(iv);
        else if (f == "l") val = patch.jets[s].x.l;
        else if (f == "x") val = patch.jets[s].x.x;
        else if (f == "y") val = patch.jets[s].x.y;
        else if (f == "sigma") val = patch.forms[s].sigma;
        else if (f == "H") val = patch.forms[s].H;
        else if (f == "K") val = patch.forms[s].K;
        else if (f == "Qre") val = patch.forms[s].Q.real();
        else if (f == "Qim") val = patch.forms[s].Q.imag();
        else if (f == "gauss_res") val = rs[s].gauss;
        else val = rs[s].codazzi;
        out << (i ? "," : "") << fmt17(val);
      }
      out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

SurfacePatch build_surface(const JobConfig& cfg) {
  auto anchor = cfg.grid.nearest(cfg.base_u, cfg.base_v);
  if (cfg.source == "catalogue") {
    CatalogueParams p{cfg.mean};
    p.a = cfg.a;
    p.ra = cfg.ra;
    p.rb = cfg.rb;
    return catalogue_patch(cfg.name, p, cfg.grid);
  }
  if (cfg.source == "weierstrass")
    return weierstrass_surface(parse(cfg.h), parse(cfg.omega), cfg.grid,
                               anchor, cfg.x0);
  if (cfg.source == "kenmotsu") {
    KenmotsuData d;
    d.mean = cfg.mean;
    d.omega = parse(cfg.omega);
    if (!cfg.h2.empty()) d.h2 = parse(cfg.h2);
    return kenmotsu_surface(d, cfg.grid, anchor, cfg.x0,
                            {cfg.h1_re, cfg.h1_im});
  }
  SpinorData d;
  d.alpha = parse(cfg.alpha);
  d.beta_h = parse(cfg.beta_h);
  if (!cfg.beta_ah.empty()) d.beta_ah = parse(cfg.beta_ah);
  return spinor_surface(d, cfg.grid, anchor, cfg.x0);
}

SpinField build_spin_field(const JobConfig& cfg) {
  SpinField field;
  field.grid = cfg.grid;
  ExprPtr fa = parse(cfg.spin_alpha);
  ExprPtr da = differentiate(fa);
  ExprPtr ff, dff, fg, dfg;
  if (!cfg.spin_beta_h.empty()) {
    ff = parse(cfg.spin_beta_h);
    dff = differentiate(ff);
  }
  if (!cfg.spin_beta_ah.empty()) {
    fg = parse(cfg.spin_beta_ah);
    dfg = differentiate(fg);
  }
  const GridSpec& g = cfg.grid;
  field.samples.resize(g.size());
  field.derivs.resize(g.size());
  for (int iu = 0; iu < g.nu; ++iu)
    for (int iv = 0; iv < g.nv; ++iv) {
      int s = g.index(iu, iv);
      cplx z = g.z(iu, iv);
      cplx av = eval(fa, z);
      cplx fv = ff ? eval(ff, z) : cplx{};
      cplx gv = fg ? eval(fg, z) : cplx{1, 0};
      field.samples[s] = SpinFactor{av, fv * std::conj(gv)};
      SpinDerivs d;
      d.alpha_z = eval(da, z);
      d.alpha_zb = 0;
      d.beta_z = dff ? eval(dff, z) * std::conj(gv) : cplx{};
      d.beta_zb = (ff && dfg) ? fv * std::conj(eval(dfg, z)) : cplx{};
      field.derivs[s] = d;
    }
  if (cfg.spin_rho == "auto") {
    field.rho = rho_base_plane(field);
  } else {
    field.rho.assign(g.size(), std::strtod(cfg.spin_rho.c_str(), nullptr));
  }
  field.validate();
  return field;
}

}  // namespace

int run_job(const JobConfig& cfg, const std::string& out_dir,
            std::ostream& log) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto write_artifact = [&](const std::string& name, const std::string& body) {
    fs::path p = fs::path(out_dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << body;
    if (!f) throw std::runtime_error("write failed for " + p.string());
    log << "wrote " << p.string() << "\n";
  };

  if (cfg.mode == "catalogue") {
    int status = 0;
    for (const auto& name : catalogue_names()) {
      CatalogueParams p{cfg.mean};
      p.a = cfg.a;
      p.ra = cfg.ra;
      p.rb = cfg.rb;
      SurfacePatch patch = catalogue_patch(name, p, cfg.grid);
      VerifyReport rep = verify_patch(patch, cfg.tol, cfg.tol_fallback);
      std::ostringstream obj;
      export_obj(patch, obj);
      write_artifact(name + ".obj", obj.str());
      write_artifact(name + ".report", report_text(rep));
      log << name << ": " << (rep.ok() ? "ok" : "FAIL") << "\n";
      if (!rep.ok()) status = 1;
    }
    return status;
  }

  SurfacePatch patch = build_surface(cfg);
  std::optional<VerifyCheck> dirac;

  if (cfg.mode == "spin") {
    SpinField field = build_spin_field(cfg);
    std::vector<double> res = dirac_residual(field, patch);
    double mx = 0;
    for (double v : res) mx = std::max(mx, v);
    double tol = resolve_tol("dirac", cfg.tol, cfg.tol_fallback, 1e-8);
    dirac = VerifyCheck{"dirac", mx, tol, mx <= tol};
    if (!dirac->pass) {
      VerifyReport rep;
      rep.source = "spin";
      rep.provenance = Provenance::Integrated;
      rep.grid = cfg.grid;
      rep.checks.push_back(*dirac);
      if (!cfg.report_path.empty())
        write_artifact(cfg.report_path, report_text(rep));
      log << "FAIL dirac max " << fmt17(dirac->max) << " tol "
          << fmt17(dirac->tol) << "\n";
      return 1;
    }
    auto anchor = cfg.grid.nearest(cfg.base_u, cfg.base_v);
    patch = integrate_spin(field, patch, anchor, cfg.x0);
  }

  VerifyReport rep = verify_patch(patch, cfg.tol, cfg.tol_fallback);
  if (dirac) rep.checks.insert(rep.checks.begin(), *dirac);

  if (cfg.mode != "verify") {
    if (!cfg.obj_path.empty()) {
      std::ostringstream obj;
      export_obj(patch, obj);
      write_artifact(cfg.obj_path, obj.str());
    }
    if (!cfg.csv_path.empty()) {
      std::ostringstream csv;
      export_csv(patch, cfg.csv_fields, csv);
      write_artifact(cfg.csv_path, csv.str());
    }
  }
  if (!cfg.report_path.empty())
    write_artifact(cfg.report_path, report_text(rep));

  for (const auto& c : rep.checks)
    if (!c.pass)
      log << "FAIL " << c.name << " max " << fmt17(c.max) << " tol "
          << fmt17(c.tol) << "\n";
  log << (rep.ok() ? "ok" : "verification failed") << "\n";
  return rep.ok() ? 0 : 1;
}

}  // namespace isogeo
