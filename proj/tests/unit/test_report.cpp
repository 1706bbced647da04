#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "doctest.h"
#include "platelab/report.hpp"

using namespace platelab;

namespace {

RunConfig beam_config() {
  return parse_config(R"({"domain":"interval","length":1.0,"cells":32,"k":2,
                          "tol":1e-7,"max_iter":400,"seed":7})");
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("config parsing accepts the documented keys only") {
    RunConfig c = parse_config("{}");
    CHECK(c.domain == "rectangle");
    CHECK(c.k == 3);
    CHECK(c.preconditioner == "operator");
    CHECK_THROWS_AS(parse_config(R"({"bogus":1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"k":0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"tol":0.02})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"tol":0.0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"domain":"triangle"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"tensor":"cubic"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"preconditioner":"amg"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"delta":-2.0})"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1,2]"), ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    RunConfig s = parse_config(R"({"a":2.0,"b":[1.0,0.0,0.25],"delta":0.5})");
    CHECK(s.a[0] == 2.0);
    CHECK(s.a[1] == 0.0);
    CHECK(s.b[2] == 0.25);
    CHECK(s.delta == "value");
    CHECK(s.delta_value == 0.5);
  }

  TEST_CASE("config hash is stable and key-order independent") {
    RunConfig a = parse_config(R"({"k":4,"cells":24})");
    RunConfig b = parse_config(R"({"cells":24,"k":4})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    RunConfig c = parse_config(R"({"k":5,"cells":24})");
    CHECK(config_hash(a) != config_hash(c));
    CHECK(canonical_config_json(a) == canonical_config_json(b));
  }

  TEST_CASE("pipeline emits each selected row exactly once per k") {
    ReportBundle bundle = run_pipeline(beam_config());
    CHECK(int(bundle.system.eigenvalues.size()) == 3);  // k+1 solved
    std::map<std::tuple<std::string, std::string, int>, int> seen;
    for (const BoundResult& r : bundle.bounds) ++seen[{r.name, r.mode, r.k}];
    for (const auto& [key, count] : seen) CHECK(count == 1);
    // 13 rows per k: three theorems, two extraction modes, five classical, three trial
    CHECK(bundle.bounds.size() == 26);
    CHECK(exit_code(bundle, false) == 0);
  }

  TEST_CASE("selection filters rows and empty selection gives a bare csv") {
    RunConfig c = beam_config();
    c.inequalities = std::vector<std::string>{"payne", "theorem3"};
    ReportBundle bundle = run_pipeline(c);
    std::set<std::string> names;
    for (const BoundResult& r : bundle.bounds) names.insert(r.name);
    CHECK(names == std::set<std::string>{"payne", "theorem3"});

    c.inequalities = std::vector<std::string>{};
    ReportBundle none = run_pipeline(c);
    CHECK(none.bounds.empty());
    std::string csv = emit_bounds_csv(none);
    CHECK(csv == "# config_hash=" + none.hash + "\nname,mode,k,delta,lhs,rhs,slack,holds\n");
  }

  TEST_CASE("exit code policy") {
    ReportBundle b;
    b.any_failure = false;
    b.any_as_stated_failure = false;
    CHECK(exit_code(b, false) == 0);
    CHECK(exit_code(b, true) == 0);
    b.any_as_stated_failure = true;
    CHECK(exit_code(b, false) == 0);
    CHECK(exit_code(b, true) == 2);
    b.any_failure = true;
    b.any_as_stated_failure = false;
    CHECK(exit_code(b, false) == 2);
    CHECK(exit_code(b, true) == 2);
  }

  TEST_CASE("reports are byte stable and carry the hash line") {
    RunConfig c = beam_config();
    ReportBundle b1 = run_pipeline(c);
    ReportBundle b2 = run_pipeline(c);
    CHECK(emit_eigen_csv(b1) == emit_eigen_csv(b2));
    CHECK(emit_functionals_csv(b1) == emit_functionals_csv(b2));
    CHECK(emit_bounds_csv(b1) == emit_bounds_csv(b2));
    CHECK(emit_markdown(b1) == emit_markdown(b2));
    std::string csv = emit_bounds_csv(b1);
    CHECK(csv.rfind("# config_hash=" + b1.hash, 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
    std::string md = emit_markdown(b1);
    CHECK(md.find("as_stated") != std::string::npos);
    CHECK(md.find("rederived") != std::string::npos);
  }

  TEST_CASE("functional csv marks unavailable branches") {
    RunConfig c = parse_config(R"({"domain":"rectangle","cells":12,"k":1,"tol":1e-6,
        "tensor":"diagonal","a":2.0,"b":1.0,"seed":3,"max_iter":500})");
    ReportBundle bundle = run_pipeline(c);
    std::string csv = emit_functionals_csv(bundle);
    CHECK(csv.find("nan") != std::string::npos);  // no identity-tensor columns
    bool t3_skipped = false;
    for (const BoundResult& r : bundle.bounds)
      if (r.name == "theorem3" && !r.evaluable) t3_skipped = true;
    CHECK(t3_skipped);
  }

  TEST_CASE("bundle files land on disk") {
    namespace fs = std::filesystem;
    RunConfig c = beam_config();
    c.dump_matrix = true;
    c.dump_eigenvectors = true;
    fs::path dir = fs::temp_directory_path() / "platelab_report_test";
    fs::remove_all(dir);
    ReportBundle bundle = run_pipeline(c);
    write_bundle(bundle, dir.string());
    for (const char* name : {"eigen.csv", "functionals.csv", "bounds.csv", "report.md",
                             "matrix.mtx", "eigenvectors.bin"})
      CHECK(fs::exists(dir / name));
    CHECK(fs::file_size(dir / "eigenvectors.bin") ==
          16 + sizeof(double) * std::size_t(bundle.matrix.order) * c.k);
    fs::remove_all(dir);
  }

  TEST_CASE("convergence study guards its level list") {
    RunConfig c = beam_config();
    c.k = 1;
    CHECK_THROWS_AS(convergence_study(c, {16, 32}), Error);
    CHECK_THROWS_AS(convergence_study(c, {16, 32, 48}), Error);
    ConvergenceTable t = convergence_study(c, {16, 32, 64});
    CHECK(t.levels.size() == 3);
    CHECK(t.observed_order[0] > 1.0);
    CHECK(t.observed_order[0] < 3.0);
    std::string csv = emit_convergence_csv(c, t);
    CHECK(csv.find("# order") != std::string::npos);
    CHECK(csv.find("# richardson") != std::string::npos);
  }

  TEST_CASE("sweep delta mode reports the best grid point") {
    RunConfig c = beam_config();
    c.delta = "sweep";
    c.inequalities = std::vector<std::string>{"theorem3"};
    ReportBundle bundle = run_pipeline(c);
    for (const BoundResult& r : bundle.bounds) {
      CHECK(r.note.find("sweep") != std::string::npos);
      CHECK(r.holds);
    }
  }
}
