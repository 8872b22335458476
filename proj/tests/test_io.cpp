#include "doctest.h"

#include "test_util.hpp"

#include "ndirac/io.hpp"

#include "json.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

using namespace ndirac;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ndirac_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const RunConfig d = parse_config_text("");
  CHECK(d.n == 16);
  CHECK(d.L == 8.0);
  CHECK(d.V == "constant:0.2");
  const RunConfig c = parse_config_text(
      "# comment\n"
      "grid.n = 12\n"
      "grid.L=6.5   # trailing\n"
      "model.K = rational:1,0.75\n"
      "model.V = exponential:0.1,2\n"
      "solver.tol_outer = 1e-7\n"
      "solver.initial = random\n"
      "solver.inner_starts = 3\n"
      "seed = 9\n"
      "output.dir = runs/x\n");
  CHECK(c.n == 12);
  CHECK(c.L == 6.5);
  CHECK(c.solver.tol_outer == 1e-7);
  CHECK(c.solver.initial == InitialKind::random);
  CHECK(c.solver.inner.starts == 3);
  CHECK(c.seed == 9);
  CHECK(c.solver.seed == 9);
  CHECK(c.output_dir == "runs/x");
  const ProblemModel m = build_model(c);
  CHECK(m.grid().n() == 12);
  CHECK(m.k_profile().kind == Profile::Kind::rational_decay);
  CHECK(m.k_profile().gamma == 0.75);
  CHECK(m.v_profile().sigma == 2.0);
  // echo round-trips through the parser
  std::string text;
  for (const auto& [k, v] : c.echo()) text += k + " = " + v + "\n";
  const RunConfig again = parse_config_text(text);
  CHECK(again.echo() == c.echo());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config_text("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("grid.n = 9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("grid.n = 16x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("grid.L = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("grid.L = 1\ngrid.L = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("grid.L\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("model.V = wobbly:1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("model.V = rational:1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("solver.initial = spiral\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("model.p = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/ndirac.cfg"), IoError);
}

TEST_CASE("table profiles") {
  const fs::path dir = scratch_dir("table");
  {
    std::ofstream out(dir / "k.txt");
    for (int i = 0; i < 512; ++i) out << 0.5 + 0.001 * i << (i % 8 == 7 ? '\n' : ' ');
  }
  {
    std::ofstream out(dir / "run.cfg");
    out << "grid.n = 8\nmodel.K = table:k.txt\n";
  }
  const RunConfig c = load_config(dir / "run.cfg");
  const ProblemModel m = build_model(c);
  CHECK(m.K()[3] == doctest::Approx(0.503));
  CHECK_THROWS_AS(parse_config_text("grid.n = 10\nmodel.K = table:k.txt\n", dir), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("field files round trip bit for bit") {
  const fs::path dir = scratch_dir("field");
  const SpectralSpace space(Grid(8, 3.5), 1.0);
  std::mt19937_64 rng(51);
  for (Repr repr : {Repr::physical, Repr::frequency}) {
    SpinorField u = testutil::smooth_field(space, rng);
    if (repr == Repr::frequency) u = to_frequency(u);
    write_field(dir / "f.bin", u, 1.25);
    const StoredField s = read_field(dir / "f.bin");
    CHECK(s.a == 1.25);
    CHECK(s.field.repr() == repr);
    CHECK(s.field.grid() == u.grid());
    CHECK(std::memcmp(s.field.data().data(), u.data().data(), u.data().size_bytes()) == 0);
    write_field(dir / "g.bin", s.field, s.a);
    CHECK(slurp(dir / "f.bin") == slurp(dir / "g.bin"));
  }
  const std::string bytes = slurp(dir / "f.bin");
  CHECK(bytes.size() == 32 + 16 * 4 * 512);
  CHECK(bytes.substr(0, 4) == "NDRC");
  CHECK(static_cast<unsigned char>(bytes[8]) == 8);
  CHECK(static_cast<unsigned char>(bytes[28]) == 1);
  {
    std::ofstream out(dir / "short.bin", std::ios::binary);
    out << bytes.substr(0, 100);
  }
  CHECK_THROWS_AS(read_field(dir / "short.bin"), IoError);
  {
    std::ofstream out(dir / "junk.bin", std::ios::binary);
    out << "JUNK" << bytes.substr(4);
  }
  CHECK_THROWS_AS(read_field(dir / "junk.bin"), IoError);
  CHECK_THROWS_AS(read_field(dir / "missing.bin"), IoError);
  // no temporaries left behind
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().string().find(".tmp") == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("solve outputs") {
  const fs::path dir = scratch_dir("solve");
  RunConfig cfg = parse_config_text("grid.n = 8\ngrid.L = 4\nsolver.starts = 1\n");
  const ProblemModel m = build_model(cfg);
  const GroundStateResult r = minimize_ground_state(m, cfg.solver);
  write_solve_outputs(dir, r, cfg);

  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  for (const char* key : {"c", "residual_self", "residual_minus", "residual_full", "iterations", "t_check",
                          "converged", "config_echo"})
    CHECK(summary.contains(key));
  CHECK(summary.size() == 8);
  CHECK(summary["config_echo"]["grid.n"] == "8");
  CHECK(summary["converged"].get<bool>() == r.converged);

  const StoredField s = read_field(dir / "field.bin");
  const double c = summary["c"].get<double>();
  CHECK(std::abs(energy(s.field, m).total - c) <= 1e-12 * std::abs(c));

  const std::string trace = slurp(dir / "trace.csv");
  CHECK(trace.rfind("iter,m_value,residual,step,inner_iters\n", 0) == 0);
  CHECK(std::count(trace.begin(), trace.end(), '\n') == static_cast<long>(r.trace.size()) + 1);
  const std::string profile = slurp(dir / "profile.csv");
  CHECK(profile.rfind("r,mean_abs_u,max_abs_u\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("radial profile of a constant field") {
  const Grid g(8, 2.0);
  SpinorField u(g, Repr::physical);
  for (std::size_t i = 0; i < g.points(); ++i) u(0, i) = 2.0;
  std::istringstream in(profile_csv(u, 3));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    double r, mean, mx;
    char comma;
    std::istringstream ls(line);
    ls >> r >> comma >> mean >> comma >> mx;
    CHECK(mean == doctest::Approx(2.0));
    CHECK(mx == doctest::Approx(2.0));
  }
  CHECK(rows == 3);
}

TEST_CASE("report json carries every check") {
  const ProblemModel m = testutil::default_model(8, 4.0);
  DiagnosticsReport rep;
  rep.grid = m.grid();
  rep.checks.push_back({"anticommutation", true, 1e-15, 1e-15, 13, ""});
  rep.checks.push_back({"vk0", false, -0.5, 0.0, 512, "x"});
  const auto j = nlohmann::json::parse(report_json(rep));
  CHECK(j["checks"].size() == 2);
  CHECK(j["all_pass"] == false);
  CHECK(j["environment"]["grid"]["n"] == 8);
  CHECK(j["checks"][1]["name"] == "vk0");
}
