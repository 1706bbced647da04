#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "platelab/report.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  bool strict = false;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file")->required();
  cmd->add_option("--out", args.out_dir, "output directory, overrides the config");
  cmd->add_flag("--strict", args.strict, "published-form failures also exit 2");
  cmd->add_option("--seed", args.seed, "override the solver seed");
}

platelab::RunConfig make_config(const CommonArgs& args) {
  platelab::RunConfig c = platelab::load_config(args.config_path);
  if (!args.out_dir.empty()) c.out_dir = args.out_dir;
  if (args.strict) c.strict = true;
  if (args.seed) c.seed = *args.seed;
  return c;
}

int run_solve(const CommonArgs& args) {
  platelab::RunConfig c = make_config(args);
  c.inequalities = std::vector<std::string>{};
  platelab::ReportBundle bundle = platelab::run_pipeline(c);
  platelab::write_bundle(bundle, c.out_dir);
  for (int i = 0; i < c.k; ++i)
    std::printf("lambda_%d = %.17g  (residual %.3e)\n", i + 1,
                bundle.system.eigenvalues[i], bundle.system.residual_norms[i]);
  return 0;
}

int run_check(const CommonArgs& args) {
  platelab::RunConfig c = make_config(args);
  platelab::ReportBundle bundle = platelab::run_pipeline(c);
  platelab::write_bundle(bundle, c.out_dir);
  for (const platelab::BoundResult& r : bundle.bounds) {
    const char* verdict = !r.evaluable ? "skipped" : r.holds ? "holds" : "VIOLATED";
    std::printf("%-24s %-10s k=%-3d %s%s%s\n", r.name.c_str(),
                r.mode.empty() ? "-" : r.mode.c_str(), r.k, verdict,
                r.note.empty() ? "" : "  ", r.note.c_str());
  }
  return platelab::exit_code(bundle, c.strict);
}

int run_converge(const CommonArgs& args) {
  platelab::RunConfig c = make_config(args);
  if (c.levels.size() < 3)
    throw platelab::ConfigError("converge needs a levels array with at least 3 entries");
  platelab::ConvergenceTable table = platelab::convergence_study(c, c.levels);
  std::string csv = platelab::emit_convergence_csv(c, table);
  std::filesystem::create_directories(c.out_dir);
  std::string path = c.out_dir + "/convergence.csv";
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw platelab::Error("cannot open " + path);
  std::fwrite(csv.data(), 1, csv.size(), f);
  std::fclose(f);
  std::fputs(csv.c_str(), stdout);
  return 0;
}

int run_report(const CommonArgs& args) {
  platelab::RunConfig c = make_config(args);
  platelab::ReportBundle bundle = platelab::run_pipeline(c);
  platelab::write_bundle(bundle, c.out_dir);
  std::printf("report written to %s (config hash %s)\n", c.out_dir.c_str(),
              bundle.hash.c_str());
  int failures = 0, flagged = 0;
  for (const platelab::BoundResult& r : bundle.bounds)
    if (r.evaluable && !r.holds) (r.mode == "as_stated" ? flagged : failures)++;
  std::printf("%zu bound rows, %d failing, %d flagged published-form failures\n",
              bundle.bounds.size(), failures, flagged);
  return platelab::exit_code(bundle, c.strict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clamped fourth-order spectra and eigenvalue bound checks"};
  app.require_subcommand(1);

  CommonArgs solve_args, check_args, conv_args, report_args;
  CLI::App* solve = app.add_subcommand("solve", "compute eigenpairs, write eigen.csv");
  add_common(solve, solve_args);
  CLI::App* check = app.add_subcommand("check", "evaluate the selected inequalities");
  add_common(check, check_args);
  CLI::App* conv = app.add_subcommand("converge", "refinement study over config levels");
  add_common(conv, conv_args);
  CLI::App* report = app.add_subcommand("report", "full pipeline with CSV and markdown");
  add_common(report, report_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(solve_args);
    if (check->parsed()) return run_check(check_args);
    if (conv->parsed()) return run_converge(conv_args);
    if (report->parsed()) return run_report(report_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
