#include "fracollo/config.hpp"

#include "fracollo/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace fracollo {

namespace {

using nlohmann::json;

void allow_only(const json& obj, const char* section, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(std::string("section '") + section + "' must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError(std::string("unknown key '") + k + "' in section '" + section + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Point point_of(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("points must be [x, y] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

Box box_of(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ConfigError("boxes must be [x_min, x_max, y_min, y_max]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

void parse_domain(const json& d, RunConfig& cfg) {
  allow_only(d, "domain", {"case", "Lambda", "kind", "bounds", "center", "radius", "knots", "control", "vertices", "box"});
  read(d, "Lambda", cfg.Lambda);
  if (d.contains("box")) cfg.box = box_of(d["box"]);
  if (d.contains("case")) {
    cfg.case_number = d["case"].get<int>();
    if (*cfg.case_number < 0 || *cfg.case_number > 4) throw ConfigError("domain case must be 0..4");
    return;
  }
  std::string kind = "rectangle";
  read(d, "kind", kind);
  auto& s = cfg.domain;
  if (kind == "rectangle") {
    s.kind = DomainSpec::Kind::rectangle;
    if (d.contains("bounds")) s.rectangle = box_of(d["bounds"]);
  } else if (kind == "circle") {
    s.kind = DomainSpec::Kind::circle;
    if (d.contains("center")) s.center = point_of(d["center"]);
    read(d, "radius", s.radius);
  } else if (kind == "spline") {
    s.kind = DomainSpec::Kind::spline_boundary;
    read(d, "knots", s.knots);
    if (d.contains("control")) {
      for (const auto& p : d["control"]) s.control.push_back(point_of(p));
    }
  } else if (kind == "polyline") {
    s.kind = DomainSpec::Kind::polyline_boundary;
    if (d.contains("vertices")) {
      for (const auto& p : d["vertices"]) s.vertices.push_back(point_of(p));
    }
  } else {
    throw ConfigError("unknown domain kind '" + kind + "'");
  }
}

DensityMode mode_from_string(const std::string& s) {
  if (s == "nonuniform") return DensityMode::nonuniform;
  if (s == "uniform") return DensityMode::uniform;
  throw ConfigError("unknown collocation mode '" + s + "' (expected nonuniform or uniform)");
}

FluxRule flux_rule_from_string(const std::string& s) {
  if (s == "quadrature") return FluxRule::quadrature;
  if (s == "expansion") return FluxRule::expansion;
  throw ConfigError("unknown flux rule '" + s + "' (expected quadrature or expansion)");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  allow_only(j, "top level",
             {"domain", "mesh", "collocation", "regularization", "method", "solver", "time", "problem", "output", "study"});
  if (j.contains("domain")) parse_domain(j["domain"], cfg);
  auto& sp = cfg.space;
  if (j.contains("mesh")) {
    const auto& m = j["mesh"];
    allow_only(m, "mesh", {"N", "Nx", "Ny"});
    int n = 0;
    read(m, "N", n);
    if (n > 0) sp.nx = sp.ny = n;
    read(m, "Nx", sp.nx);
    read(m, "Ny", sp.ny);
  }
  if (j.contains("collocation")) {
    const auto& c = j["collocation"];
    allow_only(c, "collocation", {"p", "q", "mode", "N_b"});
    read(c, "p", sp.p);
    read(c, "q", sp.q);
    std::string mode = "nonuniform";
    read(c, "mode", mode);
    sp.mode = mode_from_string(mode);
    read(c, "N_b", sp.n_boundary);
  }
  if (j.contains("regularization")) {
    const auto& r = j["regularization"];
    allow_only(r, "regularization", {"lambda", "delta", "epsilon", "delta0", "seed", "r"});
    read(r, "lambda", sp.lambda);
    if (r.contains("delta")) cfg.delta = r["delta"].get<double>();
    read(r, "epsilon", cfg.epsilon);
    read(r, "delta0", cfg.delta0);
    read(r, "seed", cfg.seed);
    read(r, "r", cfg.r);
  }
  if (j.contains("method")) {
    const auto& m = j["method"];
    allow_only(m, "method", {"name", "rho", "K", "flux_rule"});
    std::string name = "lsc";
    read(m, "name", name);
    sp.method = method_from_string(name);
    read(m, "rho", sp.rho);
    read(m, "K", sp.flux_nodes);
    std::string rule = "quadrature";
    read(m, "flux_rule", rule);
    sp.flux_rule = flux_rule_from_string(rule);
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    allow_only(s, "solver", {"path"});
    std::string path = "qr";
    read(s, "path", path);
    try {
      sp.path = solver_path_from_string(path);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("time")) {
    const auto& t = j["time"];
    allow_only(t, "time", {"alpha", "beta", "tau", "T", "m", "m_tilde", "kappa"});
    read(t, "alpha", cfg.alpha);
    read(t, "beta", cfg.beta);
    read(t, "tau", cfg.tau);
    read(t, "T", cfg.T);
    if (t.contains("m")) cfg.m = t["m"].get<int>();
    read(t, "m_tilde", cfg.m_tilde);
    if (t.contains("kappa")) {
      if (t["kappa"].is_string()) {
        if (t["kappa"].get<std::string>() != "auto") throw ConfigError("kappa must be a number or \"auto\"");
        cfg.kappa_auto = true;
      } else {
        cfg.kappa = t["kappa"].get<double>();
      }
    }
  }
  if (j.contains("problem")) {
    const auto& p = j["problem"];
    allow_only(p, "problem", {"name", "bc", "nu", "mu", "neumann_weight"});
    read(p, "name", cfg.problem);
    std::string bc = "dirichlet";
    read(p, "bc", bc);
    cfg.bc = boundary_kind_from_string(bc);
    read(p, "nu", cfg.nu);
    read(p, "mu", cfg.mu);
    read(p, "neumann_weight", cfg.neumann_weight);
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    allow_only(o, "output", {"dir", "lattice", "export_fields", "record_times"});
    std::string dir = cfg.out_dir.string();
    read(o, "dir", dir);
    cfg.out_dir = dir;
    read(o, "lattice", cfg.lattice);
    read(o, "export_fields", cfg.export_fields);
    read(o, "record_times", cfg.record_times);
  }
  if (j.contains("study")) {
    const auto& s = j["study"];
    allow_only(s, "study", {"target", "N", "svd_count"});
    read(s, "target", cfg.study_target);
    if (cfg.study_target != "model" && cfg.study_target != "tfpde" && cfg.study_target != "coupled") {
      throw ConfigError("study target must be model, tfpde or coupled");
    }
    read(s, "N", cfg.study_n);
    read(s, "svd_count", cfg.svd_count);
  }
  if (sp.nx < 2 || sp.ny < 2) throw ConfigError("mesh needs N_x, N_y >= 2");
  if (sp.p < 1 || sp.q < 1) throw ConfigError("collocation densities p, q must be positive");
  if (cfg.r != 0 && cfg.r != 1) throw ConfigError("reference rule r must be 0 or 1");
  if (cfg.lattice < 2) throw ConfigError("output lattice must be at least 2");
  sp.box = cfg.box;
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Domain make_domain(const RunConfig& cfg) {
  try {
    if (cfg.case_number) return case_domain(*cfg.case_number, cfg.Lambda);
    return Domain::build(cfg.domain);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
}

SteadyProblem make_steady_problem(const RunConfig& cfg) {
  if (cfg.problem != "exp") throw ConfigError("unknown steady problem '" + cfg.problem + "' (expected exp)");
  return exponential_problem(cfg.nu);
}

TfpdeProblem make_tfpde_problem(const RunConfig& cfg) {
  TfpdeProblem p;
  if (cfg.problem == "manufactured") p = tfpde_manufactured(cfg.alpha);
  else if (cfg.problem == "oscillating") p = tfpde_oscillating(cfg.alpha);
  else throw ConfigError("unknown time-fractional problem '" + cfg.problem + "' (expected manufactured or oscillating)");
  return p;
}

CoupledProblem make_coupled_problem(const RunConfig& cfg) {
  if (cfg.problem == "manufactured") return coupled_manufactured(cfg.alpha, cfg.beta, cfg.mu, cfg.nu);
  if (cfg.problem == "oscillating") return coupled_oscillating(cfg.alpha, cfg.beta, cfg.mu, cfg.nu);
  throw ConfigError("unknown coupled problem '" + cfg.problem + "' (expected manufactured or oscillating)");
}

SteadyParams steady_params(const RunConfig& cfg) {
  SteadyParams p;
  p.space = cfg.space;
  p.bc = cfg.bc;
  p.delta = cfg.delta.value_or(0.01);
  p.epsilon = cfg.epsilon;
  p.delta0 = cfg.delta0;
  p.seed = cfg.seed;
  p.neumann_weight = cfg.neumann_weight;
  return p;
}

TfpdeParams tfpde_params(const RunConfig& cfg, const Domain& domain) {
  TfpdeParams p;
  p.space = cfg.space;
  p.tau = cfg.tau;
  p.T = cfg.T;
  p.m = cfg.m.value_or(3);
  p.kappa = cfg.kappa;
  p.r = cfg.r;
  p.delta = cfg.delta.value_or(domain.kind() == Domain::Kind::rectangle ? 0.0 : 0.01);
  return p;
}

CoupledParams coupled_params(const RunConfig& cfg) {
  CoupledParams p;
  p.space = cfg.space;
  if (!p.space.box) p.space.box = coupled_box();
  p.tau = cfg.tau;
  p.T = cfg.T;
  p.m = cfg.m.value_or(1);
  p.m_tilde = cfg.m_tilde;
  p.delta = cfg.delta.value_or(0.01);
  return p;
}

}  // namespace fracollo
