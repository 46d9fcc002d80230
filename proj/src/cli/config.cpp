#include "nhmech/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nhmech/models.hpp"

namespace nhmech::cli {

using json = nlohmann::ordered_json;

namespace {

enum class Shape { Scalar, Vector3, Matrix3 };

struct Field {
  std::string name;
  Shape shape;
  bool required = true;
};

struct SystemSchema {
  std::string name;
  std::vector<Field> params;
  std::vector<Field> initial;
};

const std::vector<SystemSchema>& schemas() {
  static const std::vector<SystemSchema> s = {
      {"particle",
       {{"h", Shape::Scalar}, {"force_x", Shape::Scalar, false}},
       {{"q0", Shape::Vector3}, {"q1", Shape::Vector3}}},
      {"holonomic_sphere", {{"h", Shape::Scalar}}, {{"q0", Shape::Vector3}, {"q1", Shape::Vector3}}},
      {"suslov", {{"J", Shape::Matrix3}, {"h", Shape::Scalar}}, {{"xi", Shape::Vector3}}},
      {"chaplygin_sleigh",
       {{"m", Shape::Scalar}, {"a", Shape::Scalar}, {"b", Shape::Scalar}, {"J", Shape::Scalar}},
       {{"xi", Shape::Vector3}}},
      {"veselova",
       {{"I", Shape::Matrix3},
        {"m", Shape::Scalar},
        {"g", Shape::Scalar},
        {"l", Shape::Scalar},
        {"e", Shape::Vector3},
        {"h", Shape::Scalar}},
       {{"gamma", Shape::Vector3}, {"xi", Shape::Vector3}}},
      {"rolling_ball",
       {{"m", Shape::Scalar},
        {"r", Shape::Scalar},
        {"I", Shape::Scalar},
        {"Omega", Shape::Scalar},
        {"h", Shape::Scalar}},
       {{"x0", Shape::Scalar}, {"y0", Shape::Scalar}, {"x1", Shape::Scalar}, {"y1", Shape::Scalar}}},
      {"mobile_robot",
       {{"m0", Shape::Scalar},
        {"m1", Shape::Scalar},
        {"J", Shape::Scalar},
        {"J1", Shape::Scalar},
        {"R", Shape::Scalar},
        {"c", Shape::Scalar},
        {"l", Shape::Scalar},
        {"h", Shape::Scalar}},
       {{"phi0", Shape::Scalar}, {"psi0", Shape::Scalar}, {"dphi", Shape::Scalar},
        {"dpsi", Shape::Scalar}}},
  };
  return s;
}

const SystemSchema& schema_for(const std::string& name) {
  for (const auto& s : schemas())
    if (s.name == name) return s;
  throw ConfigError("unknown system '" + name + "'");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": not finite");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + ": expected a boolean");
  return j.get<bool>();
}

std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> read_field(const json& j, Shape shape, const std::string& where) {
  switch (shape) {
    case Shape::Scalar:
      return {number(j, where)};
    case Shape::Vector3: {
      if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected 3 numbers");
      std::vector<double> v;
      for (const auto& e : j) v.push_back(number(e, where));
      return v;
    }
    case Shape::Matrix3: {
      if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected a 3x3 array");
      std::vector<double> v;
      for (const auto& row : j) {
        if (!row.is_array() || row.size() != 3) throw ConfigError(where + ": expected a 3x3 array");
        for (const auto& e : row) v.push_back(number(e, where));
      }
      return v;
    }
  }
  return {};
}

json write_field(const std::vector<double>& v, Shape shape) {
  switch (shape) {
    case Shape::Scalar:
      return v.at(0);
    case Shape::Vector3:
      return json(v);
    case Shape::Matrix3: {
      json m = json::array();
      for (int i = 0; i < 3; ++i) m.push_back(json({v.at(3 * i), v.at(3 * i + 1), v.at(3 * i + 2)}));
      return m;
    }
  }
  return {};
}

Values read_values(const json& j, const std::vector<Field>& fields, const std::string& where,
                   const std::set<std::string>& extra = {}) {
  std::set<std::string> allowed = extra;
  for (const auto& f : fields) allowed.insert(f.name);
  reject_unknown(j, allowed, where);
  Values out;
  for (const auto& f : fields) {
    if (!j.contains(f.name)) {
      if (f.required) throw ConfigError(where + ": missing '" + f.name + "'");
      continue;
    }
    out[f.name] = read_field(j.at(f.name), f.shape, where + "." + f.name);
  }
  return out;
}

json write_values(const Values& v, const std::vector<Field>& fields) {
  json j = json::object();
  for (const auto& f : fields) {
    const auto it = v.find(f.name);
    if (it != v.end()) j[f.name] = write_field(it->second, f.shape);
  }
  return j;
}

SolverOptions read_solver(const json& j) {
  reject_unknown(j,
                 {"tol_residual", "max_iters", "max_backtracks", "cond_limit", "warm_start",
                  "reorthonormalize_every", "finite_differences", "fd_step"},
                 "solver");
  SolverOptions o;
  if (j.contains("tol_residual")) o.tol_residual = number(j["tol_residual"], "solver.tol_residual");
  if (j.contains("max_iters")) o.max_iters = integer(j["max_iters"], "solver.max_iters");
  if (j.contains("max_backtracks"))
    o.max_backtracks = integer(j["max_backtracks"], "solver.max_backtracks");
  if (j.contains("cond_limit")) o.cond_limit = number(j["cond_limit"], "solver.cond_limit");
  if (j.contains("warm_start")) o.warm_start = boolean(j["warm_start"], "solver.warm_start");
  if (j.contains("reorthonormalize_every"))
    o.reorthonormalize_every = integer(j["reorthonormalize_every"], "solver.reorthonormalize_every");
  if (j.contains("finite_differences"))
    o.derivatives.finite_differences = boolean(j["finite_differences"], "solver.finite_differences");
  if (j.contains("fd_step")) o.derivatives.fd_step = number(j["fd_step"], "solver.fd_step");
  if (o.tol_residual <= 0.0) throw ConfigError("solver.tol_residual must be positive");
  if (o.max_iters < 1) throw ConfigError("solver.max_iters must be at least 1");
  if (o.max_backtracks < 0) throw ConfigError("solver.max_backtracks must be non-negative");
  if (o.cond_limit <= 1.0) throw ConfigError("solver.cond_limit must exceed 1");
  if (o.reorthonormalize_every < 0)
    throw ConfigError("solver.reorthonormalize_every must be non-negative");
  if (o.derivatives.fd_step < 0.0) throw ConfigError("solver.fd_step must be non-negative");
  return o;
}

json write_solver(const SolverOptions& o) {
  json j;
  j["tol_residual"] = o.tol_residual;
  j["max_iters"] = o.max_iters;
  j["max_backtracks"] = o.max_backtracks;
  j["cond_limit"] = o.cond_limit;
  j["warm_start"] = o.warm_start;
  j["reorthonormalize_every"] = o.reorthonormalize_every;
  j["finite_differences"] = o.derivatives.finite_differences;
  j["fd_step"] = o.derivatives.fd_step;
  return j;
}

bool same_solver(const SolverOptions& a, const SolverOptions& b) {
  return a.tol_residual == b.tol_residual && a.max_iters == b.max_iters &&
         a.max_backtracks == b.max_backtracks && a.cond_limit == b.cond_limit &&
         a.warm_start == b.warm_start && a.reorthonormalize_every == b.reorthonormalize_every &&
         a.derivatives.finite_differences == b.derivatives.finite_differences &&
         a.derivatives.fd_step == b.derivatives.fd_step;
}

double scalar(const Values& v, const std::string& k) { return v.at(k).at(0); }

lie::Vec3 vec3(const Values& v, const std::string& k) {
  const auto& x = v.at(k);
  return lie::Vec3(x.at(0), x.at(1), x.at(2));
}

lie::Mat3 mat3(const Values& v, const std::string& k) {
  const auto& x = v.at(k);
  lie::Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = x.at(3 * i + j);
  return m;
}

const std::set<std::string> kMomentumSpecs = {"particle_y", "particle_xz"};

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.system == b.system && a.params == b.params && a.initial == b.initial &&
         a.project_initial == b.project_initial && a.steps == b.steps &&
         same_solver(a.solver, b.solver) && a.output == b.output && a.check == b.check &&
         a.momentum == b.momentum;
}

std::vector<std::string> system_names() {
  std::vector<std::string> out;
  for (const auto& s : schemas()) out.push_back(s.name);
  return out;
}

RunConfig parse_config(const json& j) {
  reject_unknown(j, {"system", "initial", "steps", "solver", "output", "check", "momentum"},
                 "config");
  for (const char* k : {"system", "initial", "steps"})
    if (!j.contains(k)) throw ConfigError(std::string("config: missing '") + k + "'");
  RunConfig c;
  const json& sys = j["system"];
  reject_unknown(sys, {"name", "params"}, "system");
  if (!sys.contains("name") || !sys.contains("params"))
    throw ConfigError("system: 'name' and 'params' are required");
  c.system = string(sys["name"], "system.name");
  const SystemSchema& schema = schema_for(c.system);
  c.params = read_values(sys["params"], schema.params, "system.params");
  c.initial = read_values(j["initial"], schema.initial, "initial", {"project"});
  if (j["initial"].contains("project"))
    c.project_initial = boolean(j["initial"]["project"], "initial.project");
  c.steps = integer(j["steps"], "steps");
  if (c.steps < 0) throw ConfigError("steps must be non-negative");
  if (j.contains("solver")) c.solver = read_solver(j["solver"]);
  if (j.contains("output")) {
    const json& o = j["output"];
    reject_unknown(o, {"trajectory", "summary", "report", "format"}, "output");
    if (o.contains("trajectory")) c.output.trajectory = string(o["trajectory"], "output.trajectory");
    if (o.contains("summary")) c.output.summary = string(o["summary"], "output.summary");
    if (o.contains("report")) c.output.report = string(o["report"], "output.report");
    if (o.contains("format")) c.output.format = string(o["format"], "output.format");
    if (c.output.format != "csv" && c.output.format != "json")
      throw ConfigError("output.format must be 'csv' or 'json'");
    for (const auto* p : {&c.output.trajectory, &c.output.summary, &c.output.report})
      if (p->empty()) throw ConfigError("output: empty file name");
  }
  if (j.contains("check")) {
    const json& k = j["check"];
    reject_unknown(k, {"points", "steps"}, "check");
    CheckConfig cc;
    if (k.contains("points")) {
      if (!k["points"].is_array()) throw ConfigError("check.points: expected an array");
      for (const auto& pt : k["points"])
        cc.points.push_back(read_values(pt, schema.initial, "check.points[]"));
    }
    if (k.contains("steps")) cc.steps = integer(k["steps"], "check.steps");
    if (cc.steps < 1) throw ConfigError("check.steps must be at least 1");
    c.check = cc;
  }
  if (j.contains("momentum")) {
    const json& m = j["momentum"];
    reject_unknown(m, {"spec"}, "momentum");
    if (!m.contains("spec")) throw ConfigError("momentum: missing 'spec'");
    c.momentum = MomentumConfig{string(m["spec"], "momentum.spec")};
    if (!kMomentumSpecs.count(c.momentum->spec))
      throw ConfigError("momentum.spec: unknown spec '" + c.momentum->spec + "'");
    if (c.system != "particle") throw ConfigError("momentum specs are defined for 'particle' only");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  const SystemSchema& schema = schema_for(c.system);
  json j;
  j["system"]["name"] = c.system;
  j["system"]["params"] = write_values(c.params, schema.params);
  j["initial"] = write_values(c.initial, schema.initial);
  if (c.project_initial) j["initial"]["project"] = true;
  j["steps"] = c.steps;
  j["solver"] = write_solver(c.solver);
  j["output"] = {{"trajectory", c.output.trajectory},
                 {"summary", c.output.summary},
                 {"report", c.output.report},
                 {"format", c.output.format}};
  if (c.check) {
    json pts = json::array();
    for (const auto& p : c.check->points) pts.push_back(write_values(p, schema.initial));
    j["check"] = {{"points", pts}, {"steps", c.check->steps}};
  }
  if (c.momentum) j["momentum"] = {{"spec", c.momentum->spec}};
  return j;
}

NhProblem build_problem(const RunConfig& c) {
  const Values& v = c.params;
  try {
    if (c.system == "particle") {
      const double f = v.count("force_x") ? scalar(v, "force_x") : 0.0;
      return models::make_constrained_particle(scalar(v, "h"), f);
    }
    if (c.system == "holonomic_sphere") return models::make_holonomic_sphere(scalar(v, "h"));
    if (c.system == "suslov") return models::make_suslov(mat3(v, "J"), scalar(v, "h"));
    if (c.system == "chaplygin_sleigh")
      return models::make_chaplygin_sleigh(scalar(v, "m"), scalar(v, "a"), scalar(v, "b"),
                                           scalar(v, "J"));
    if (c.system == "veselova") {
      models::VeselovaParams q;
      q.inertia = mat3(v, "I");
      q.m = scalar(v, "m");
      q.g = scalar(v, "g");
      q.l = scalar(v, "l");
      q.e = vec3(v, "e");
      q.h = scalar(v, "h");
      return models::make_veselova(q);
    }
    if (c.system == "rolling_ball")
      return models::make_rolling_ball({scalar(v, "m"), scalar(v, "r"), scalar(v, "I"),
                                        scalar(v, "Omega"), scalar(v, "h")});
    if (c.system == "mobile_robot")
      return models::make_mobile_robot({scalar(v, "m0"), scalar(v, "m1"), scalar(v, "J"),
                                        scalar(v, "J1"), scalar(v, "R"), scalar(v, "c"),
                                        scalar(v, "l"), scalar(v, "h")});
  } catch (const DomainError& e) {
    throw ConfigError(std::string("system.params: ") + e.what());
  }
  throw ConfigError("unknown system '" + c.system + "'");
}

GroupoidElement build_element(const RunConfig& c, const NhProblem& p, const Values& v) {
  const Groupoid& G = p.groupoid;
  GroupoidElement g;
  try {
    if (c.system == "particle" || c.system == "holonomic_sphere") {
      g = G.make_pair(vec3(v, "q0"), vec3(v, "q1"));
      if (c.system == "holonomic_sphere" && std::abs(g.source.squaredNorm() - 1.0) > 1e-9) {
        if (!c.project_initial) throw ConfigError("initial: q0 is not on the unit sphere");
        g.source.normalize();
      }
    } else if (c.system == "suslov") {
      g = G.make_group(lie::Rotation3(lie::exp_so3(vec3(v, "xi"))));
    } else if (c.system == "chaplygin_sleigh") {
      g = G.make_group(lie::exp_se2(vec3(v, "xi")));
    } else if (c.system == "veselova") {
      return models::veselova_element(p, vec3(v, "gamma"), vec3(v, "xi"));
    } else if (c.system == "rolling_ball") {
      models::RollingBallParams q{scalar(c.params, "m"), scalar(c.params, "r"),
                                  scalar(c.params, "I"), scalar(c.params, "Omega"),
                                  scalar(c.params, "h")};
      return models::rolling_ball_element(q, scalar(v, "x0"), scalar(v, "y0"), scalar(v, "x1"),
                                          scalar(v, "y1"));
    } else if (c.system == "mobile_robot") {
      const Values& w = c.params;
      models::RobotParams q{scalar(w, "m0"), scalar(w, "m1"), scalar(w, "J"), scalar(w, "J1"),
                            scalar(w, "R"),  scalar(w, "c"),  scalar(w, "l"), scalar(w, "h")};
      return models::robot_element(q, scalar(v, "phi0"), scalar(v, "psi0"), scalar(v, "dphi"),
                                   scalar(v, "dpsi"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("initial: ") + e.what());
  }
  if (constraint_violation(p, g) > 1e-9) {
    if (!c.project_initial)
      throw ConfigError("initial: state is not on the constraint manifold (set \"project\": true)");
    try {
      g = project_to_manifold(p, g);
    } catch (const Error& e) {
      throw ConfigError(std::string("initial: projection failed: ") + e.what());
    }
  }
  return g;
}

MomentumSpec build_momentum_spec(const std::string& name) {
  MomentumSpec s;
  s.name = name;
  if (name == "particle_y") {
    s.dim = 1;
    s.psi = [](const Vec& xi, const Vec&) {
      Vec v = Vec::Zero(3);
      v[1] = xi[0];
      return v;
    };
    s.xi_tilde = [](const Vec&) { return Vec::Ones(1); };
    return s;
  }
  if (name == "particle_xz") {
    s.dim = 2;
    s.psi = [](const Vec& xi, const Vec&) {
      Vec v = Vec::Zero(3);
      v[0] = xi[0];
      v[2] = xi[1];
      return v;
    };
    s.xi_tilde = [](const Vec& x) {
      Vec v(2);
      v << 1.0, x[1];
      return v;
    };
    return s;
  }
  throw ConfigError("unknown momentum spec '" + name + "'");
}

}  // namespace nhmech::cli
