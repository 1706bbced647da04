#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "platelab/bounds.hpp"
#include "platelab/discretize.hpp"
#include "platelab/eigensolve.hpp"
#include "platelab/errors.hpp"
#include "platelab/functionals.hpp"
#include "platelab/geometry.hpp"

namespace platelab {

// Flat JSON config. Coefficient fields a, b, theta are affine triples
// [c0, cx, cy] evaluated as c0 + cx*x + cy*y; a bare number means constant.
struct RunConfig {
  std::string domain = "rectangle";  // interval | rectangle | disk
  double length = 1.0;
  double lx = 1.0;
  double ly = 1.0;
  double radius = 1.0;
  int cells = 32;
  int cells_y = -1;  // -1: derive from ly and the x spacing
  std::string tensor = "identity";  // identity | diagonal | rotated
  std::array<double, 3> a = {1.0, 0.0, 0.0};
  std::array<double, 3> b = {1.0, 0.0, 0.0};
  std::array<double, 3> theta = {0.0, 0.0, 0.0};
  int k = 3;
  double tol = 1e-9;
  int max_iter = 600;
  std::uint64_t seed = 1234;
  std::string delta = "auto";  // auto | sweep | value
  double delta_value = 0.0;
  std::optional<std::vector<std::string>> inequalities;  // unset: all
  std::string out_dir = "out";
  bool strict = false;           // exit policy: published-form failures also fatal
  bool strict_assembly = false;  // reject symmetry defects > 1e-6 (tensor-product grids)
  std::string preconditioner = "operator";  // operator | jacobi
  int h_axis = 0;
  std::vector<int> levels;
  bool dump_eigenvectors = false;
  bool dump_matrix = false;
  ConstantOverrides overrides;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// All keys filled with their effective values, keys sorted; hash input.
std::string canonical_config_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

GridDomain build_domain(const RunConfig& config, int cells_override = -1);
TensorField build_field(const RunConfig& config, double h);

struct ReportBundle {
  RunConfig config;
  std::string hash;
  GridDomain domain;
  SparseSymMatrix matrix;
  EigenSystem system;  // k+1 pairs solved, reports list the first k
  FunctionalSet functionals;
  std::vector<BoundResult> bounds;
  std::vector<std::string> audits;
  bool any_failure = false;
  bool any_as_stated_failure = false;
};

ReportBundle run_pipeline(const RunConfig& config);

struct ConvergenceTable {
  std::vector<int> levels;
  std::vector<double> hs;
  std::vector<std::vector<double>> eigenvalues;  // one row per level
  std::vector<double> observed_order;            // per eigenvalue index
  std::vector<double> richardson;
};

ConvergenceTable convergence_study(const RunConfig& config, const std::vector<int>& levels);

std::string emit_eigen_csv(const ReportBundle& bundle);
std::string emit_functionals_csv(const ReportBundle& bundle);
std::string emit_bounds_csv(const ReportBundle& bundle);
std::string emit_markdown(const ReportBundle& bundle);
std::string emit_convergence_csv(const RunConfig& config, const ConvergenceTable& table);

void write_bundle(const ReportBundle& bundle, const std::string& out_dir);

// 0: all evaluated rows hold; 2: a non-as_stated row fails, or any failure
// under strict. Runtime errors map to 1 at the CLI boundary.
int exit_code(const ReportBundle& bundle, bool strict);

}  // namespace platelab
