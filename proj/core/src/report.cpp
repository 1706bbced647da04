#include "platelab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "platelab/numerics.hpp"

namespace platelab {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double need_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + " must be a number");
  return v.get<double>();
}

int need_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
  return v.get<int>();
}

bool need_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key + " must be a boolean");
  return v.get<bool>();
}

std::string need_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key + " must be a string");
  return v.get<std::string>();
}

std::array<double, 3> need_triple(const json& v, const std::string& key) {
  std::array<double, 3> t = {0.0, 0.0, 0.0};
  if (v.is_number()) {
    t[0] = v.get<double>();
    return t;
  }
  if (!v.is_array() || v.empty() || v.size() > 3)
    throw ConfigError(key + " must be a number or an array [c0, cx, cy]");
  for (std::size_t i = 0; i < v.size(); ++i) t[i] = need_number(v[i], key);
  return t;
}

ScalarField affine(const std::array<double, 3>& t) {
  return [t](const Point& p) { return t[0] + t[1] * p[0] + t[2] * p[1]; };
}

bool selected(const RunConfig& c, const std::string& name) {
  if (!c.inequalities) return true;
  for (const std::string& s : *c.inequalities) {
    if (s == name) return true;
    if (s == "classical" && (name == "payne" || name == "hile_yeh" || name == "hook" ||
                             name == "cheng_yang" || name == "wang_xia"))
      return true;
    if (s == "proposition" && name.rfind("trial_", 0) == 0) return true;
  }
  return false;
}

BoundResult skipped_row(std::string name, int k, std::string note) {
  BoundResult r;
  r.name = std::move(name);
  r.k = k;
  r.evaluable = false;
  r.note = std::move(note);
  return r;
}

// Best (largest-slack) row over the 121-point delta grid.
BoundResult sweep_best(const std::function<BoundResult(double)>& eval) {
  BoundResult best;
  bool have = false;
  for (double d : delta_sweep_grid()) {
    BoundResult r = eval(d);
    if (!have || r.slack > best.slack) {
      best = r;
      have = true;
    }
  }
  best.note = best.note.empty() ? "best of 121-point delta sweep"
                                : best.note + "; best of 121-point delta sweep";
  return best;
}

TrialSet truncate_trials(const TrialSet& full, int k) {
  TrialSet t;
  t.k = k;
  t.h_axis = full.h_axis;
  t.h_field = full.h_field;
  t.p.assign(full.p.begin(), full.p.begin() + k);
  t.phi.assign(full.phi.begin(), full.phi.begin() + k);
  t.w.assign(full.w.begin(), full.w.begin() + k);
  t.v.assign(full.v.begin(), full.v.begin() + k);
  t.tnorm2.assign(full.tnorm2.begin(), full.tnorm2.begin() + k);
  t.a.assign(std::size_t(k) * k, 0.0);
  t.r.assign(std::size_t(k) * k, 0.0);
  t.b.assign(std::size_t(k) * k, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      t.a[i * k + j] = full.a[i * full.k + j];
      t.r[i * k + j] = full.r[i * full.k + j];
      t.b[i * k + j] = full.b[i * full.k + j];
    }
  return t;
}

// Proposition rows carry discretization error, not just rounding; they get a
// 5% tolerance and the mode tag "discrete".
BoundResult discrete_row(std::string name, int k, std::optional<double> delta, double lhs,
                         double rhs) {
  BoundResult r;
  r.name = std::move(name);
  r.mode = "discrete";
  r.k = k;
  r.delta = delta;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.holds = r.slack >= -0.05 * std::fabs(rhs);
  return r;
}

void append_proposition_rows(std::vector<BoundResult>& rows, const RunConfig& c,
                             const TrialSet& full, const EigenSystem& sys, int kp) {
  TrialSet ts = truncate_trials(full, kp);
  double lamk1 = sys.eigenvalues[kp];
  double P6 = 0, P7 = 0, Q = 0;
  for (int i = 0; i < kp; ++i) {
    double gap = lamk1 - sys.eigenvalues[i];
    double pn2 = 0;
    for (double x : ts.p[i]) pn2 += x * x;
    pn2 *= sys.weight;
    P6 += gap * gap * ts.w[i];
    P7 += gap * pn2;
    Q += gap * ts.tnorm2[i];
  }
  if (selected(c, "trial_w_bound")) {
    PropositionSlacks s = proposition_check(ts, sys, 1.0);
    rows.push_back(discrete_row("trial_w_bound", kp, std::nullopt, s.lhs[0], s.rhs[0]));
  }
  if (selected(c, "trial_v_bound")) {
    double d = (P6 > 0 && Q > 0) ? delta_optimum(P6, Q).first : 1.0;
    PropositionSlacks s = proposition_check(ts, sys, d);
    rows.push_back(discrete_row("trial_v_bound", kp, d, s.lhs[1], s.rhs[1]));
  }
  if (selected(c, "trial_v_bound_combined")) {
    double d = (P7 > 0 && Q > 0) ? delta_optimum(P7, Q).first : 1.0;
    PropositionSlacks s = proposition_check(ts, sys, d);
    rows.push_back(discrete_row("trial_v_bound_combined", kp, d, s.lhs[2], s.rhs[2]));
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (key == "domain") c.domain = need_string(v, key);
    else if (key == "length") c.length = need_number(v, key);
    else if (key == "lx") c.lx = need_number(v, key);
    else if (key == "ly") c.ly = need_number(v, key);
    else if (key == "radius") c.radius = need_number(v, key);
    else if (key == "cells") c.cells = need_int(v, key);
    else if (key == "cells_y") c.cells_y = need_int(v, key);
    else if (key == "tensor") c.tensor = need_string(v, key);
    else if (key == "a") c.a = need_triple(v, key);
    else if (key == "b") c.b = need_triple(v, key);
    else if (key == "theta") c.theta = need_triple(v, key);
    else if (key == "k") c.k = need_int(v, key);
    else if (key == "tol") c.tol = need_number(v, key);
    else if (key == "max_iter") c.max_iter = need_int(v, key);
    else if (key == "seed") {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                     v.get<std::int64_t>() < 0))
        throw ConfigError("seed must be a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "delta") {
      if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s != "auto" && s != "sweep") throw ConfigError("delta must be auto, sweep, or a positive number");
        c.delta = s;
      } else if (v.is_number()) {
        double d = v.get<double>();
        if (!(d > 0.0)) throw ConfigError("delta must be positive");
        c.delta = "value";
        c.delta_value = d;
      } else {
        throw ConfigError("delta must be auto, sweep, or a positive number");
      }
    } else if (key == "inequalities") {
      if (!v.is_array()) throw ConfigError("inequalities must be an array of names");
      std::vector<std::string> sel;
      for (const auto& e : v) sel.push_back(need_string(e, key));
      c.inequalities = std::move(sel);
    } else if (key == "out_dir") c.out_dir = need_string(v, key);
    else if (key == "strict") c.strict = need_bool(v, key);
    else if (key == "strict_assembly") c.strict_assembly = need_bool(v, key);
    else if (key == "preconditioner") c.preconditioner = need_string(v, key);
    else if (key == "h_axis") c.h_axis = need_int(v, key);
    else if (key == "levels") {
      if (!v.is_array()) throw ConfigError("levels must be an array of cell counts");
      for (const auto& e : v) c.levels.push_back(need_int(e, key));
    } else if (key == "dump_eigenvectors") c.dump_eigenvectors = need_bool(v, key);
    else if (key == "dump_matrix") c.dump_matrix = need_bool(v, key);
    else if (key == "override_S0") c.overrides.S0 = need_number(v, key);
    else if (key == "override_T_star") c.overrides.T_star = need_number(v, key);
    else if (key == "override_T0") c.overrides.T0 = need_number(v, key);
    else if (key == "override_I0") c.overrides.I0 = need_number(v, key);
    else if (key == "override_H0") c.overrides.H0 = need_number(v, key);
    else if (key == "override_m") c.overrides.m = need_int(v, key);
    else throw ConfigError("unknown config key: " + key);
  }

  if (c.domain != "interval" && c.domain != "rectangle" && c.domain != "disk")
    throw ConfigError("unrecognized domain kind: " + c.domain);
  if (c.tensor != "identity" && c.tensor != "diagonal" && c.tensor != "rotated")
    throw ConfigError("unknown tensor kind: " + c.tensor);
  if (c.k < 1) throw ConfigError("k must be at least 1");
  if (!(c.tol > 0.0) || c.tol > 1e-2) throw ConfigError("tol must lie in (0, 1e-2]");
  if (c.max_iter < 1) throw ConfigError("max_iter must be positive");
  if (c.preconditioner != "operator" && c.preconditioner != "jacobi")
    throw ConfigError("unknown preconditioner: " + c.preconditioner);
  if (c.h_axis < 0 || c.h_axis > 1) throw ConfigError("h_axis must be 0 or 1");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string canonical_config_json(const RunConfig& c) {
  json j;
  j["domain"] = c.domain;
  j["length"] = c.length;
  j["lx"] = c.lx;
  j["ly"] = c.ly;
  j["radius"] = c.radius;
  j["cells"] = c.cells;
  j["cells_y"] = c.cells_y;
  j["tensor"] = c.tensor;
  j["a"] = c.a;
  j["b"] = c.b;
  j["theta"] = c.theta;
  j["k"] = c.k;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["seed"] = c.seed;
  j["delta"] = c.delta;
  if (c.delta == "value") j["delta_value"] = c.delta_value;
  if (c.inequalities) j["inequalities"] = *c.inequalities;
  j["out_dir"] = c.out_dir;
  j["strict"] = c.strict;
  j["strict_assembly"] = c.strict_assembly;
  j["preconditioner"] = c.preconditioner;
  j["h_axis"] = c.h_axis;
  if (!c.levels.empty()) j["levels"] = c.levels;
  j["dump_eigenvectors"] = c.dump_eigenvectors;
  j["dump_matrix"] = c.dump_matrix;
  if (c.overrides.S0) j["override_S0"] = *c.overrides.S0;
  if (c.overrides.T_star) j["override_T_star"] = *c.overrides.T_star;
  if (c.overrides.T0) j["override_T0"] = *c.overrides.T0;
  if (c.overrides.I0) j["override_I0"] = *c.overrides.I0;
  if (c.overrides.H0) j["override_H0"] = *c.overrides.H0;
  if (c.overrides.m) j["override_m"] = *c.overrides.m;
  return j.dump();
}

std::string config_hash(const RunConfig& c) {
  std::string s = canonical_config_json(c);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GridDomain build_domain(const RunConfig& c, int cells_override) {
  int N = cells_override > 0 ? cells_override : c.cells;
  if (c.domain == "interval") return build_interval(c.length, N);
  if (c.domain == "disk") return build_disk(c.radius, N);
  int ny = c.cells_y;
  if (ny > 0 && cells_override > 0)
    ny = int(std::llround(double(c.cells_y) * double(N) / double(c.cells)));
  if (ny <= 0) ny = int(std::llround(c.ly / (c.lx / double(N))));
  return build_rectangle(c.lx, c.ly, N, ny);
}

TensorField build_field(const RunConfig& c, double h) {
  int dim = c.domain == "interval" ? 1 : 2;
  double step = h / 4.0;
  if (c.tensor == "identity") return identity_field(dim);
  if (c.tensor == "diagonal") return diagonal_field(affine(c.a), affine(c.b), dim, step);
  return rotated_field(affine(c.theta), affine(c.a), affine(c.b), step);
}

ReportBundle run_pipeline(const RunConfig& config) {
  ReportBundle bundle;
  bundle.config = config;
  bundle.hash = config_hash(config);
  bundle.domain = build_domain(config);
  const GridDomain& dom = bundle.domain;
  TensorField field = build_field(config, dom.h);

  SparseSymMatrix K = assemble_L(dom, field);
  AssembleOptions aopt;
  aopt.strict = config.strict_assembly;
  bundle.matrix = assemble_clamped(dom, field, aopt);

  LobpcgOptions lopt;
  if (config.preconditioner == "operator")
    lopt.preconditioner = second_order_preconditioner(K, std::max(dom.nx, dom.ny) - 1);
  int solve_k = config.k + 1;
  if (std::int64_t(solve_k) * 4 > bundle.matrix.order)
    throw Error("run_pipeline: grid too coarse for the requested eigenpair count");
  bundle.system = lobpcg(bundle.matrix, solve_k, config.tol, config.max_iter, config.seed,
                         dom.cell_weight(), lopt);

  GeometricConstants consts = geometric_constants(dom, field, config.overrides);
  bundle.functionals =
      make_functional_set(bundle.system, dom, field, K, consts, config.k);

  bool has_trials = selected(config, "trial_w_bound") ||
                    selected(config, "trial_v_bound") ||
                    selected(config, "trial_v_bound_combined");
  TrialSet trials;
  if (has_trials) trials = trial_functions(bundle.system, dom, field, K, config.k, config.h_axis);

  std::optional<double> fixed_delta;
  if (config.delta == "value") fixed_delta = config.delta_value;

  for (int kp = 1; kp <= config.k; ++kp) {
    SpectrumInput spec;
    spec.eigenvalues.assign(bundle.system.eigenvalues.begin(),
                            bundle.system.eigenvalues.begin() + kp + 1);
    spec.n = consts.n;
    spec.consts = consts;
    spec.functionals = &bundle.functionals;

    if (selected(config, "theorem1")) {
      if (!bundle.functionals.has_theorem1())
        bundle.bounds.push_back(skipped_row(
            "theorem1", kp, "functional data unavailable with curved constant overrides"));
      else if (config.delta == "sweep")
        bundle.bounds.push_back(
            sweep_best([&](double d) { return check_theorem1(spec, d); }));
      else
        bundle.bounds.push_back(check_theorem1(spec, fixed_delta));
    }
    if (selected(config, "theorem2")) {
      if (config.delta == "sweep")
        bundle.bounds.push_back(
            sweep_best([&](double d) { return check_theorem2(spec, d); }));
      else
        bundle.bounds.push_back(check_theorem2(spec, fixed_delta));
    }
    if (selected(config, "theorem3")) {
      if (field.kind != TensorKind::identity)
        bundle.bounds.push_back(
            skipped_row("theorem3", kp, "defined for the identity tensor only"));
      else if (config.delta == "sweep")
        bundle.bounds.push_back(
            sweep_best([&](double d) { return check_theorem3(spec, d); }));
      else
        bundle.bounds.push_back(check_theorem3(spec, fixed_delta));
    }
    if (selected(config, "next_bound")) {
      std::vector<double> first(spec.eigenvalues.begin(), spec.eigenvalues.end() - 1);
      double next = spec.eigenvalues[kp];
      for (ExtractMode mode : {ExtractMode::as_stated, ExtractMode::rederived}) {
        double rhs = extract_next_bound_minimal(first, spec.n, mode);
        BoundResult r;
        r.name = "next_bound";
        r.mode = mode == ExtractMode::as_stated ? "as_stated" : "rederived";
        r.k = kp;
        r.lhs = next;
        r.rhs = rhs;
        r.slack = rhs - next;
        r.holds = std::isinf(rhs) || r.slack >= -1e-9 * std::fabs(rhs);
        if (std::isinf(rhs)) r.note = "no real root; bound gives no constraint";
        bundle.bounds.push_back(r);
      }
    }
    bool any_classical = selected(config, "payne") || selected(config, "hile_yeh") ||
                         selected(config, "hook") || selected(config, "cheng_yang") ||
                         selected(config, "wang_xia");
    if (any_classical) {
      for (BoundResult& r : classical_checks(spec.eigenvalues, spec.n))
        if (selected(config, r.name)) bundle.bounds.push_back(std::move(r));
    }
    if (has_trials)
      append_proposition_rows(bundle.bounds, config, trials, bundle.system, kp);
  }

  char line[160];
  std::snprintf(line, sizeof line, "symmetry defect (relative, max norm): %.3e",
                bundle.matrix.symmetry_defect);
  bundle.audits.push_back(line);
  double rmax = 0;
  for (int i = 0; i < config.k && i < int(bundle.system.residual_norms.size()); ++i)
    rmax = std::max(rmax, bundle.system.residual_norms[i]);
  std::snprintf(line, sizeof line, "max eigenpair residual over the first %d: %.3e",
                config.k, rmax);
  bundle.audits.push_back(line);
  double omax = 0;
  for (std::size_t i = 0; i < bundle.system.eigenvectors.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double d = dom.cell_weight() * dot(bundle.system.eigenvectors[i],
                                         bundle.system.eigenvectors[j]);
      omax = std::max(omax, std::fabs(d - (i == j ? 1.0 : 0.0)));
    }
  std::snprintf(line, sizeof line, "orthonormality defect: %.3e", omax);
  bundle.audits.push_back(line);

  for (const BoundResult& r : bundle.bounds) {
    if (!r.evaluable || r.holds) continue;
    if (r.mode == "as_stated") bundle.any_as_stated_failure = true;
    else bundle.any_failure = true;
  }
  return bundle;
}

ConvergenceTable convergence_study(const RunConfig& config, const std::vector<int>& levels) {
  if (levels.size() < 3) throw Error("convergence_study: at least 3 levels required");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] != 2 * levels[i - 1])
      throw Error("convergence_study: levels must double");

  ConvergenceTable table;
  table.levels = levels;
  for (int N : levels) {
    GridDomain dom = build_domain(config, N);
    TensorField field = build_field(config, dom.h);
    SparseSymMatrix K = assemble_L(dom, field);
    AssembleOptions aopt;
    aopt.strict = config.strict_assembly;
    SparseSymMatrix A = assemble_clamped(dom, field, aopt);
    LobpcgOptions lopt;
    if (config.preconditioner == "operator")
      lopt.preconditioner = second_order_preconditioner(K, std::max(dom.nx, dom.ny) - 1);
    EigenSystem sys = lobpcg(A, config.k, config.tol, config.max_iter, config.seed,
                             dom.cell_weight(), lopt);
    table.hs.push_back(dom.h);
    table.eigenvalues.push_back(sys.eigenvalues);
  }

  std::size_t L = levels.size();
  for (int j = 0; j < config.k; ++j) {
    double c = table.eigenvalues[L - 3][j];
    double m = table.eigenvalues[L - 2][j];
    double f = table.eigenvalues[L - 1][j];
    double num = c - m, den = m - f;
    double p = 2.0;
    if (den != 0.0 && num / den > 0.0) {
      double est = std::log2(num / den);
      if (std::isfinite(est) && est > 0.0) p = est;
    }
    table.observed_order.push_back(p);
    table.richardson.push_back(f + (f - m) / (std::pow(2.0, p) - 1.0));
  }
  return table;
}

std::string emit_eigen_csv(const ReportBundle& bundle) {
  std::string out = "# config_hash=" + bundle.hash + "\n";
  out += "index,eigenvalue,residual\n";
  for (int i = 0; i < bundle.config.k; ++i) {
    out += std::to_string(i + 1) + "," + fmt17(bundle.system.eigenvalues[i]) + "," +
           fmt17(bundle.system.residual_norms[i]) + "\n";
  }
  return out;
}

std::string emit_functionals_csv(const ReportBundle& bundle) {
  const FunctionalSet& f = bundle.functionals;
  std::string out = "# config_hash=" + bundle.hash + "\n";
  out += "i,lambda,A,B,C,D,E_exact,E_bound,F_exact,F_bound\n";
  auto cell = [](const std::vector<double>& v, int i) {
    return i < int(v.size()) ? fmt17(v[i]) : std::string("nan");
  };
  for (int i = 0; i < int(f.lambda.size()); ++i) {
    out += std::to_string(i + 1) + "," + fmt17(f.lambda[i]) + "," + cell(f.A, i) + "," +
           cell(f.B, i) + "," + cell(f.C, i) + "," + cell(f.D, i) + "," +
           cell(f.E_exact, i) + "," + cell(f.E_bound, i) + "," + cell(f.F_exact, i) + "," +
           cell(f.F_bound, i) + "\n";
  }
  return out;
}

std::string emit_bounds_csv(const ReportBundle& bundle) {
  std::string out = "# config_hash=" + bundle.hash + "\n";
  out += "name,mode,k,delta,lhs,rhs,slack,holds\n";
  for (const BoundResult& r : bundle.bounds) {
    out += r.name + "," + r.mode + "," + std::to_string(r.k) + ",";
    out += r.delta ? fmt17(*r.delta) : std::string();
    if (r.evaluable)
      out += "," + fmt17(r.lhs) + "," + fmt17(r.rhs) + "," + fmt17(r.slack) + "," +
             (r.holds ? "true" : "false");
    else
      out += ",,,,skipped";
    out += "\n";
  }
  return out;
}

std::string emit_markdown(const ReportBundle& bundle) {
  std::ostringstream md;
  const RunConfig& c = bundle.config;
  md << "# Spectral bound report\n\n";
  md << "config hash: `" << bundle.hash << "`\n\n";
  md << "domain: " << c.domain << ", cells: " << c.cells << ", tensor: " << c.tensor
     << ", k: " << c.k << ", seed: " << c.seed << "\n\n";

  md << "## Eigenvalues\n\n| i | lambda | residual |\n|---|---|---|\n";
  for (int i = 0; i < c.k; ++i)
    md << "| " << (i + 1) << " | " << fmt17(bundle.system.eigenvalues[i]) << " | "
       << fmt17(bundle.system.residual_norms[i]) << " |\n";
  md << "\n";

  md << "## Inequality verdicts\n\n";
  md << "| name | mode | k | delta | lhs | rhs | slack | verdict |\n";
  md << "|---|---|---|---|---|---|---|---|\n";
  for (const BoundResult& r : bundle.bounds) {
    md << "| " << r.name << " | " << (r.mode.empty() ? "-" : r.mode) << " | " << r.k
       << " | " << (r.delta ? fmt17(*r.delta) : std::string("-")) << " | ";
    if (r.evaluable)
      md << fmt17(r.lhs) << " | " << fmt17(r.rhs) << " | " << fmt17(r.slack) << " | "
         << (r.holds ? "holds" : "VIOLATED");
    else
      md << "- | - | - | skipped";
    md << " |\n";
  }
  md << "\n";

  bool pair_present = false;
  for (const BoundResult& r : bundle.bounds)
    if (r.name == "next_bound") pair_present = true;
  if (pair_present) {
    md << "## Gap bound, both published forms\n\n";
    md << "The two forms below disagree by construction; both are reported and"
          " neither is corrected.\n\n";
    md << "| k | as_stated rhs | rederived rhs | lambda_{k+1} |\n|---|---|---|---|\n";
    for (int kp = 1; kp <= c.k; ++kp) {
      double as = 0, re = 0, lhs = 0;
      bool have = false;
      for (const BoundResult& r : bundle.bounds)
        if (r.name == "next_bound" && r.k == kp) {
          (r.mode == "as_stated" ? as : re) = r.rhs;
          lhs = r.lhs;
          have = true;
        }
      if (have)
        md << "| " << kp << " | " << fmt17(as) << " | " << fmt17(re) << " | " << fmt17(lhs)
           << " |\n";
    }
    md << "\n";
  }

  md << "## Audits\n\n";
  for (const std::string& a : bundle.audits) md << "- " << a << "\n";
  if (bundle.functionals.dimensional_audit)
    md << "- note: the second majorant family mixes terms of different order in lambda;"
          " values are reported verbatim\n";
  md << "\n";
  return md.str();
}

std::string emit_convergence_csv(const RunConfig& config, const ConvergenceTable& table) {
  std::string out = "# config_hash=" + config_hash(config) + "\n";
  out += "N,h";
  for (int j = 0; j < config.k; ++j) out += ",lambda_" + std::to_string(j + 1);
  out += "\n";
  for (std::size_t l = 0; l < table.levels.size(); ++l) {
    out += std::to_string(table.levels[l]) + "," + fmt17(table.hs[l]);
    for (int j = 0; j < config.k; ++j) out += "," + fmt17(table.eigenvalues[l][j]);
    out += "\n";
  }
  out += "# order";
  for (double p : table.observed_order) out += "," + fmt17(p);
  out += "\n# richardson";
  for (double r : table.richardson) out += "," + fmt17(r);
  out += "\n";
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

void write_bundle(const ReportBundle& bundle, const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory: " + out_dir);

  write_text(dir / "eigen.csv", emit_eigen_csv(bundle));
  write_text(dir / "functionals.csv", emit_functionals_csv(bundle));
  write_text(dir / "bounds.csv", emit_bounds_csv(bundle));
  write_text(dir / "report.md", emit_markdown(bundle));

  if (bundle.config.dump_matrix) write_matrix_market(bundle.matrix, (dir / "matrix.mtx").string());
  if (bundle.config.dump_eigenvectors) {
    std::ofstream out(dir / "eigenvectors.bin", std::ios::binary);
    if (!out) throw Error("cannot open eigenvector dump");
    std::int64_t order = bundle.matrix.order;
    std::int64_t count = bundle.config.k;
    out.write(reinterpret_cast<const char*>(&order), sizeof order);
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    for (int i = 0; i < count; ++i)
      out.write(reinterpret_cast<const char*>(bundle.system.eigenvectors[i].data()),
                std::streamsize(sizeof(double)) * order);
    if (!out) throw Error("eigenvector dump failed");
  }
}

int exit_code(const ReportBundle& bundle, bool strict) {
  if (bundle.any_failure) return 2;
  if (strict && bundle.any_as_stated_failure) return 2;
  return 0;
}

}  // namespace platelab
