#include "nhmech/run.hpp"

#include <algorithm>
#include <cmath>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "nhmech/batch.hpp"

namespace nhmech::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr double kMomentumIdentityTol = 1e-9;
constexpr double kInvarianceTol = 1e-9;

int multiplier_count(const NhProblem& p) { return p.rank() - p.distribution.rank; }

std::vector<std::string> column_names(const NhProblem& p) {
  std::vector<std::string> cols = p.groupoid.coordinate_names();
  cols.push_back("iterations");
  cols.push_back("residual_norm");
  for (int i = 0; i < multiplier_count(p); ++i) cols.push_back("lambda_" + std::to_string(i + 1));
  cols.push_back("condition");
  return cols;
}

// Row k: coordinates of g_k and the statistics of the step that produced it
// (zeros on the initial row).
std::vector<double> row_values(const NhProblem& p, const Trajectory& t, std::size_t k) {
  const Vec c = p.groupoid.coordinates(t.elements[k]);
  std::vector<double> row(c.data(), c.data() + c.size());
  const int nl = multiplier_count(p);
  if (k == 0) {
    row.insert(row.end(), 3 + nl, 0.0);
    return row;
  }
  const StepResult& s = t.steps[k - 1];
  row.push_back(s.iterations);
  row.push_back(s.residual_norm);
  for (int i = 0; i < nl; ++i) row.push_back(i < s.multipliers.size() ? s.multipliers[i] : 0.0);
  row.push_back(s.jacobian_condition_estimate);
  return row;
}

json state_record(const NhProblem& p, const GroupoidElement& g) {
  json j = json::object();
  const auto names = p.groupoid.coordinate_names();
  const Vec c = p.groupoid.coordinates(g);
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = c[static_cast<Eigen::Index>(i)];
  return j;
}

std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

std::ostream& out_of(const RunContext& ctx) { return ctx.out ? *ctx.out : std::cout; }
std::ostream& log_of(const RunContext& ctx) { return ctx.log ? *ctx.log : std::cerr; }

Trajectory solve(const RunConfig& c, const NhProblem& p, const GroupoidElement& g0, int N,
                 const RunContext& ctx) {
  Trajectory t = evolve(p, g0, N, c.solver);
  if (ctx.verbose) {
    for (std::size_t k = 0; k < t.steps.size(); ++k)
      log_of(ctx) << "step " << k << " iterations " << t.steps[k].iterations << " residual "
                  << format_number(t.steps[k].residual_norm) << "\n";
  }
  return t;
}

json drift_table(const MomentumSpec& spec, const NhProblem& p, const Trajectory& t,
                 const DerivativeOptions& opts, double* max_drift, double* max_mismatch) {
  const auto entries = momentum_drift(spec, p, t, opts);
  json rows = json::array();
  *max_drift = 0.0;
  *max_mismatch = 0.0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const double mis = std::abs(entries[k].drift - entries[k].predicted);
    *max_drift = std::max(*max_drift, std::abs(entries[k].drift));
    *max_mismatch = std::max(*max_mismatch, mis);
    rows.push_back({{"step", k},
                    {"drift", entries[k].drift},
                    {"predicted", entries[k].predicted},
                    {"mismatch", mis}});
  }
  return rows;
}

json regularity_record(const NhProblem& p, const RegularityReport& r) {
  return {{"point", state_record(p, r.point)},
          {"right_nondegenerate", r.right_nondegenerate},
          {"right_sigma_min", r.right_sigma_min},
          {"left_nondegenerate", r.left_nondegenerate},
          {"left_sigma_min", r.left_sigma_min},
          {"jacobian_condition", r.jacobian_condition},
          {"regular", r.regular()}};
}

json reversibility_record(const ReversibilityReport& r) {
  return {{"samples", r.samples},
          {"solved", r.solved},
          {"max_lagrangian_defect", r.max_lagrangian_defect},
          {"max_manifold_defect", r.max_manifold_defect},
          {"max_reversed_residual", r.max_reversed_residual},
          {"max_involution_defect", r.max_involution_defect},
          {"lagrangian_invariant", r.lagrangian_invariant},
          {"manifold_invariant", r.manifold_invariant},
          {"reversed_pairs_solve", r.reversed_pairs_solve},
          {"declared_reversible", r.declared_reversible},
          {"agrees_with_declaration", r.agrees_with_declaration}};
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const NhProblem& p, const Trajectory& t) {
  std::ostringstream s;
  const auto cols = column_names(p);
  for (std::size_t i = 0; i < cols.size(); ++i) s << (i ? "," : "") << cols[i];
  s << '\n';
  for (std::size_t k = 0; k < t.elements.size(); ++k) {
    const auto row = row_values(p, t, k);
    for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << format_number(row[i]);
    s << '\n';
  }
  return s.str();
}

std::string trajectory_json(const NhProblem& p, const Trajectory& t) {
  json j;
  j["columns"] = column_names(p);
  json rows = json::array();
  for (std::size_t k = 0; k < t.elements.size(); ++k) rows.push_back(row_values(p, t, k));
  j["rows"] = rows;
  return j.dump() + "\n";
}

void write_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  const fs::path tmp =
      target.parent_path() / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into '" + path + "'");
  }
}

int run_simulate(const RunConfig& c, const RunContext& ctx) {
  const NhProblem p = build_problem(c);
  const GroupoidElement g0 = build_element(c, p, c.initial);
  ensure_dir(ctx.out_dir);
  const Trajectory t = solve(c, p, g0, c.steps, ctx);

  const std::string traj_path = join(ctx.out_dir, c.output.trajectory);
  write_atomic(traj_path, c.output.format == "csv" ? trajectory_csv(p, t) : trajectory_json(p, t));

  double max_violation = 0.0, max_residual = 0.0;
  int max_iters = 0;
  for (const auto& g : t.elements) max_violation = std::max(max_violation, constraint_violation(p, g));
  for (const auto& s : t.steps) {
    max_residual = std::max(max_residual, s.residual_norm);
    max_iters = std::max(max_iters, s.iterations);
  }
  json summary;
  summary["command"] = "simulate";
  summary["status"] = "ok";
  summary["system"] = c.system;
  summary["steps"] = c.steps;
  summary["rows"] = t.elements.size();
  summary["trajectory"] = traj_path;
  summary["final_state"] = state_record(p, t.elements.back());
  summary["max_constraint_violation"] = max_violation;
  summary["max_residual_norm"] = max_residual;
  summary["max_iterations"] = max_iters;
  if (c.momentum) {
    double drift = 0.0, mismatch = 0.0;
    drift_table(build_momentum_spec(c.momentum->spec), p, t, c.solver.derivatives, &drift,
                &mismatch);
    summary["max_momentum_drift"] = drift;
    summary["max_momentum_mismatch"] = mismatch;
  }
  write_atomic(join(ctx.out_dir, c.output.summary), summary.dump(2) + "\n");
  out_of(ctx) << summary.dump() << "\n";
  return kOk;
}

int run_check(const RunConfig& c, const RunContext& ctx) {
  const NhProblem p = build_problem(c);
  const GroupoidElement g0 = build_element(c, p, c.initial);
  ensure_dir(ctx.out_dir);
  const CheckConfig cc = c.check.value_or(CheckConfig{});

  std::vector<GroupoidElement> points;
  for (const auto& v : cc.points) points.push_back(build_element(c, p, v));
  if (points.empty()) points.push_back(g0);
  json reg = json::array();
  bool all_regular = true;
  for (const auto& r : batch::regularity_sweep(p, points)) {
    reg.push_back(regularity_record(p, r));
    all_regular = all_regular && r.regular();
  }

  const Trajectory t = solve(c, p, g0, cc.steps, ctx);
  const ReversibilityReport rev = reversibility_report(p, t.elements, c.solver);

  double max_mismatch = 0.0;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const Vec a = legendre_plus(p, t.elements[k], c.solver.derivatives).components;
    const Vec b = legendre_minus(p, t.elements[k + 1], c.solver.derivatives).components;
    max_mismatch = std::max(max_mismatch, (a - b).lpNorm<Eigen::Infinity>());
  }
  const double legendre_tol = 10.0 * c.solver.tol_residual;

  json report;
  report["command"] = "check";
  report["status"] = "ok";
  report["system"] = c.system;
  report["regular"] = all_regular;
  report["reversible"] = rev.measured_reversible;
  report["legendre_matched"] = max_mismatch <= legendre_tol;
  report["regularity"] = reg;
  report["reversibility"] = reversibility_record(rev);
  report["legendre"] = {{"steps", t.steps.size()},
                        {"max_mismatch", max_mismatch},
                        {"tolerance", legendre_tol}};
  const std::string path = join(ctx.out_dir, c.output.report);
  write_atomic(path, report.dump(2) + "\n");
  json summary = {{"command", "check"},
                  {"status", "ok"},
                  {"system", c.system},
                  {"regular", all_regular},
                  {"reversible", rev.measured_reversible},
                  {"legendre_matched", max_mismatch <= legendre_tol},
                  {"report", path}};
  out_of(ctx) << summary.dump() << "\n";
  return kOk;
}

int run_momentum(const RunConfig& c, const RunContext& ctx) {
  if (!c.momentum) throw ConfigError("momentum: the config has no 'momentum' section");
  const NhProblem p = build_problem(c);
  const GroupoidElement g0 = build_element(c, p, c.initial);
  ensure_dir(ctx.out_dir);
  const MomentumSpec spec = build_momentum_spec(c.momentum->spec);
  const Trajectory t = solve(c, p, g0, c.steps, ctx);

  double max_drift = 0.0, max_mismatch = 0.0;
  const json rows = drift_table(spec, p, t, c.solver.derivatives, &max_drift, &max_mismatch);
  double invariance = 0.0;
  for (const auto& g : t.elements)
    invariance = std::max(invariance, invariance_defect(spec, p, g, c.solver.derivatives));
  const bool invariant = invariance <= kInvarianceTol;
  const bool identity = max_mismatch <= kMomentumIdentityTol;

  json report;
  report["command"] = "momentum";
  report["status"] = "ok";
  report["system"] = c.system;
  report["spec"] = spec.name;
  report["lagrangian_invariant"] = invariant;
  report["max_invariance_defect"] = invariance;
  report["identity_holds"] = identity;
  report["max_abs_drift"] = max_drift;
  report["max_mismatch"] = max_mismatch;
  report["tolerance"] = kMomentumIdentityTol;
  report["drift"] = rows;
  const std::string path = join(ctx.out_dir, c.output.report);
  write_atomic(path, report.dump(2) + "\n");
  json summary = {{"command", "momentum"},     {"status", "ok"},
                  {"system", c.system},        {"spec", spec.name},
                  {"lagrangian_invariant", invariant}, {"identity_holds", identity},
                  {"max_abs_drift", max_drift}, {"max_mismatch", max_mismatch},
                  {"report", path}};
  out_of(ctx) << summary.dump() << "\n";
  return kOk;
}

int run_command(const std::string& command, const std::string& config_path,
                const RunContext& ctx) {
  auto fail = [&](int code, const std::string& kind, const std::string& msg, long step = -1) {
    json rec = {{"command", command}, {"status", "error"}, {"error", kind}, {"message", msg}};
    if (step >= 0) rec["step"] = step;
    out_of(ctx) << rec.dump() << "\n";
    log_of(ctx) << "error: " << msg << (step >= 0 ? " (step " + std::to_string(step) + ")" : "")
                << "\n";
    return code;
  };
  try {
    const RunConfig c = load_config(config_path);
    if (command == "simulate") return run_simulate(c, ctx);
    if (command == "check") return run_check(c, ctx);
    if (command == "momentum") return run_momentum(c, ctx);
    return fail(kConfigError, "config", "unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    return fail(kConfigError, "config", e.what());
  } catch (const Singular& e) {
    return fail(kSolveError, "singular", e.what(), e.step_index());
  } catch (const NoConvergence& e) {
    return fail(kSolveError, "no_convergence", e.what(), e.step_index());
  } catch (const IoError& e) {
    return fail(kIoError, "io", e.what());
  } catch (const Error& e) {
    return fail(kConfigError, "config", e.what());
  }
}

}  // namespace nhmech::cli
