#include "minimax/experiment.hpp"
#include "minimax/problems.hpp"
#include "minimax/rng.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace minimax;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "minimax_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& contents) {
  const fs::path p = temp_dir() / name;
  std::ofstream out(p);
  out << contents;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// CSV contents with the wall-time column blanked, for determinism compares.
std::string strip_times(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out << line.substr(0, cut) << '\n';
  }
  return out.str();
}

const char* kScalarQuadratic = R"({
  "problem": {"type": "quadratic",
              "A": [[-0.5]], "B": [[1.0]], "mu": 1.0, "c": [1.0]},
  "stop": {"grad_tol": 1e-9, "max_iters": 5000},
  "solver": {"type": "alg1-gda", "eta_init_y": 0.5, "eta_init_x": 0.1},
  "output": {"csv": "OUT"}
})";

std::string with_output(std::string text, const fs::path& csv) {
  const std::string key = "OUT";
  text.replace(text.find(key), key.size(), csv.string());
  return text;
}

}  // namespace

TEST_CASE("run executes a quadratic config and writes the report row") {
  const fs::path csv = temp_dir() / "run_quad.csv";
  const fs::path cfg =
      write_file("run_quad.json", with_output(kScalarQuadratic, csv));
  std::ostringstream err;
  CHECK(cmd_run(cfg, err) == kExitOk);

  const std::string contents = slurp(csv);
  std::istringstream in(contents);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == kCsvHeader);
  CHECK(header == "alg,iter,f_ev,g_ev,hvp,f,gx_norm,gy_norm,gphi_norm,time_s");
  CHECK(row.substr(0, row.find(',')) == "alg1-gda");
}

TEST_CASE("missing config file exits 1 without output") {
  std::ostringstream err;
  CHECK(cmd_run(temp_dir() / "no_such_config.json", err) == kExitConfig);
}

TEST_CASE("malformed json exits 1") {
  const fs::path cfg = write_file("broken.json", "{not json");
  std::ostringstream err;
  CHECK(cmd_run(cfg, err) == kExitConfig);
}

TEST_CASE("missing libsvm path exits 1 and writes nothing") {
  const fs::path csv = temp_dir() / "libsvm_missing.csv";
  const fs::path cfg = write_file("libsvm_missing.json", R"({
    "problem": {"type": "libsvm", "path": "/does/not/exist",
                "rho_x": 1.0, "rho_y": 200.0},
    "solver": {"type": "alg2-bb"},
    "output": {"csv": ")" + csv.string() + R"("}
  })");
  std::ostringstream err;
  CHECK(cmd_run(cfg, err) == kExitConfig);
  CHECK_FALSE(fs::exists(csv));
}

TEST_CASE("solver needing mu on a problem without a hint exits 1") {
  // A libsvm problem carries its own mu; the quadratic one too. Force the
  // failure through alg1 on a config with an unknown modulus by clearing it.
  const fs::path data = write_file("tiny.libsvm", "1 1:1\n-1 2:1\n");
  const fs::path csv = temp_dir() / "needs_mu.csv";
  const fs::path cfg = write_file("needs_mu.json", R"({
    "problem": {"type": "libsvm", "path": ")" + data.string() + R"(",
                "rho_x": 0.1, "rho_y": 10.0},
    "solver": {"type": "ttgda"},
    "output": {"csv": ")" + csv.string() + R"("}
  })");
  std::ostringstream err;
  // ttgda without eta_y/eta_x is a config error.
  CHECK(cmd_run(cfg, err) == kExitConfig);
}

TEST_CASE("bench with a single solver matches run output") {
  const fs::path csv_run = temp_dir() / "single_run.csv";
  const fs::path csv_bench = temp_dir() / "single_bench.csv";
  const fs::path cfg_run =
      write_file("single_run.json", with_output(kScalarQuadratic, csv_run));
  const fs::path cfg_bench = write_file(
      "single_bench.json",
      with_output(std::string(kScalarQuadratic), csv_bench));
  std::ostringstream err;
  CHECK(cmd_run(cfg_run, err) == kExitOk);
  CHECK(cmd_bench(cfg_bench, err) == kExitOk);
  CHECK(strip_times(slurp(csv_run)) == strip_times(slurp(csv_bench)));
}

TEST_CASE("bench rows are deterministic across reruns") {
  const char* bench_cfg = R"({
    "problem": {"type": "synthetic", "seed": 3, "d": 6, "N": 9,
                "rho_x": 0.1, "rho_y": 10.0},
    "stop": {"grad_tol": 1e-7, "max_iters": 20000},
    "solvers": [
      {"type": "alg2-bb"},
      {"type": "gdbb"},
      {"type": "ttgda", "eta_y": 0.1, "eta_x": 0.01}
    ],
    "output": {"csv": "OUT"}
  })";
  const fs::path csv_a = temp_dir() / "det_a.csv";
  const fs::path csv_b = temp_dir() / "det_b.csv";
  const fs::path cfg_a =
      write_file("det_a.json", with_output(bench_cfg, csv_a));
  const fs::path cfg_b =
      write_file("det_b.json", with_output(bench_cfg, csv_b));
  std::ostringstream err;
  CHECK(cmd_bench(cfg_a, err) == kExitOk);
  CHECK(cmd_bench(cfg_b, err) == kExitOk);
  CHECK(strip_times(slurp(csv_a)) == strip_times(slurp(csv_b)));
}

TEST_CASE("libsvm problems run end to end with a projection") {
  const fs::path data = write_file("small.libsvm",
                                   "0.5 1:1.0 3:0.5\n"
                                   "-1.0 2:2.0\n"
                                   "0.25 1:-1.0 2:0.5 3:1.0\n"
                                   "2.0 3:-0.5\n");
  const fs::path csv = temp_dir() / "libsvm_run.csv";
  const fs::path cfg = write_file("libsvm_run.json", R"({
    "problem": {"type": "libsvm", "path": ")" + data.string() + R"(",
                "target_dim": 2, "rho_x": 0.1, "rho_y": 10.0,
                "projection_seed": 1},
    "stop": {"grad_tol": 1e-7, "max_iters": 20000},
    "solver": {"type": "alg2-bb"},
    "output": {"csv": ")" + csv.string() + R"("}
  })");
  std::ostringstream err;
  CHECK(cmd_run(cfg, err) == kExitOk);
  CHECK(fs::exists(csv));
}

TEST_CASE("bench rows are identical under the thread-count variable") {
  const char* bench_cfg = R"({
    "problem": {"type": "synthetic", "seed": 5, "d": 5, "N": 8,
                "rho_x": 0.1, "rho_y": 10.0},
    "stop": {"grad_tol": 1e-7, "max_iters": 20000},
    "solvers": [
      {"type": "alg2-bb"},
      {"type": "alg2-pf"},
      {"type": "gdbb"},
      {"type": "alg1-gda"}
    ],
    "output": {"csv": "OUT"}
  })";
  const fs::path csv_seq = temp_dir() / "threads_seq.csv";
  const fs::path csv_par = temp_dir() / "threads_par.csv";
  std::ostringstream err;
  CHECK(cmd_bench(write_file("threads_seq.json",
                             with_output(bench_cfg, csv_seq)),
                  err) == kExitOk);
  setenv("MINIMAX_THREADS", "4", 1);
  CHECK(cmd_bench(write_file("threads_par.json",
                             with_output(bench_cfg, csv_par)),
                  err) == kExitOk);
  unsetenv("MINIMAX_THREADS");
  CHECK(strip_times(slurp(csv_seq)) == strip_times(slurp(csv_par)));
}

TEST_CASE("gen-data writes a deterministic features-then-label table") {
  const fs::path a = temp_dir() / "gen_a.csv";
  const fs::path b = temp_dir() / "gen_b.csv";
  std::ostringstream err;
  CHECK(cmd_gen_data(1, 2, 3, a, err) == kExitOk);
  CHECK(cmd_gen_data(1, 2, 3, b, err) == kExitOk);
  CHECK(slurp(a) == slurp(b));

  std::istringstream in(slurp(a));
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 2);
  }
  CHECK(rows == 3);

  // Values reproduce the library generator: features first, label last.
  SeededRng rng(1);
  const RobustRegression p = gen_synthetic(rng, 2, 3, 0.0, 3.0);
  std::istringstream again(slurp(a));
  std::getline(again, line);
  std::istringstream first_row(line);
  std::string tok;
  std::getline(first_row, tok, ',');
  CHECK(std::stod(tok) == doctest::Approx(p.W(0, 0)).epsilon(1e-15));
}

TEST_CASE("budget exhaustion maps to exit code 2") {
  const fs::path csv = temp_dir() / "budget.csv";
  const fs::path cfg = write_file("budget.json", R"({
    "problem": {"type": "quadratic",
                "A": [[-0.5]], "B": [[1.0]], "mu": 1.0, "c": [1.0]},
    "stop": {"grad_tol": 1e-9, "max_iters": 3},
    "solver": {"type": "alg1-gda"},
    "output": {"csv": ")" + csv.string() + R"("}
  })");
  std::ostringstream err;
  CHECK(cmd_run(cfg, err) == kExitBudget);
  CHECK(fs::exists(csv));  // the row is still reported
}

TEST_CASE("initial-point fills are honored") {
  const fs::path csv = temp_dir() / "fills.csv";
  const fs::path cfg = write_file("fills.json", R"({
    "problem": {"type": "quadratic",
                "A": [[-0.5]], "B": [[1.0]], "mu": 1.0, "c": [1.0]},
    "stop": {"grad_tol": 1e-16, "max_iters": 0},
    "solver": {"type": "alg1-gda"},
    "x0_fill": -2.0,
    "y0_fill": -2.0,
    "output": {"csv": ")" + csv.string() + R"("}
  })");
  // max_iters rejects 0, so expect a config error proving the field parsed...
  std::ostringstream err;
  CHECK(cmd_run(cfg, err) == kExitConfig);

  const fs::path cfg2 = write_file("fills2.json", R"({
    "problem": {"type": "quadratic",
                "A": [[-0.5]], "B": [[1.0]], "mu": 1.0, "c": [1.0]},
    "stop": {"grad_tol": 1e-6, "max_iters": 10},
    "solver": {"type": "alg1-gda"},
    "x0_fill": -2.0,
    "y0_fill": -2.0,
    "output": {"csv": ")" + csv.string() + R"("}
  })");
  // (-2, -2) is the stationary point, so the run converges instantly.
  CHECK(cmd_run(cfg2, err) == kExitOk);
  std::istringstream in(slurp(csv));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(row.find("alg1-gda,0,") == 0);
}

TEST_CASE("gen-data rejects degenerate shapes") {
  std::ostringstream err;
  CHECK(cmd_gen_data(1, 0, 3, temp_dir() / "bad.csv", err) == kExitConfig);
}

TEST_CASE("verification catches a corrupted gradient and names it") {
  class CorruptedOracle final : public QuadraticOracle {
  public:
    using QuadraticOracle::QuadraticOracle;
    Vec grad_x(const Vec& x, const Vec& y) const override {
      Vec g = QuadraticOracle::grad_x(x, y);
      g[0] += 1e-3;
      return g;
    }
    FullGradient grad(const Vec& x, const Vec& y) const override {
      return {grad_x(x, y), grad_y(x, y)};
    }
  };

  SeededRng rng(7);
  CorruptedOracle oracle(make_random_quadratic(rng, 4, 3));
  VerifyReport report;
  verify_derivative_checks(report, oracle, 2.0 / oracle.problem().mu, rng, 3,
                           "corrupted/");
  bool named = false;
  for (const auto& c : report.checks)
    if (c.name == "corrupted/fd_grad_f") {
      named = true;
      CHECK_FALSE(c.pass);
    }
  CHECK(named);
  CHECK(report.violations() > 0);
  CHECK(verify_exit_code(report) == kExitViolations);
}

TEST_CASE("verification report serializes one record per inequality") {
  VerifyOptions opts;
  opts.fd_points = 2;
  opts.lemma_points = 20;
  opts.quadratic_instances = 3;
  opts.phi_points = 5;
  const VerifyReport report = run_verification(opts);
  CHECK(report.violations() == 0);
  CHECK(verify_exit_code(report) == kExitOk);

  const std::string json = report.to_json();
  for (const char* name :
       {"quadratic/fd_grad_f", "quadratic/grad_y_h_upper",
        "quadratic/grad_x_h_upper", "quadratic/young_cross_upper",
        "quadratic/grad_x_h_lower", "quadratic/descent_inner_y",
        "quadratic/grad_y_h_lower", "robust_regression/fd_phi_grad",
        "robust_regression/descent_inner_y", "quadratic/h_dominates_phi",
        "quadratic/second_order_schur", "transfer/min_to_rm_spot"})
    CHECK(json.find(name) != std::string::npos);
}

#ifdef MINIMAX_CLI_PATH
TEST_CASE("binary smoke: gen-data and exit codes through the real argv") {
  const std::string bin = MINIMAX_CLI_PATH;
  const fs::path out = temp_dir() / "bin_gen.csv";
  const std::string ok_cmd =
      bin + " gen-data --seed 1 --d 2 --N 3 --out " + out.string() +
      " > /dev/null 2>&1";
  const int ok = std::system(ok_cmd.c_str());
  CHECK(WEXITSTATUS(ok) == 0);
  CHECK(fs::exists(out));

  const std::string bad_cmd =
      bin + " run /nonexistent_config.json > /dev/null 2>&1";
  const int bad = std::system(bad_cmd.c_str());
  CHECK(WEXITSTATUS(bad) == kExitConfig);
}
#endif

TEST_CASE("malformed libsvm content exits 1 through the command layer") {
  const fs::path data = write_file("mangled.libsvm", "1 1:1.0\n2 5:zzz\n");
  const fs::path csv = temp_dir() / "mangled.csv";
  const fs::path cfg = write_file("mangled.json", R"({
    "problem": {"type": "libsvm", "path": ")" + data.string() + R"(",
                "rho_x": 0.1, "rho_y": 10.0},
    "solver": {"type": "alg2-bb"},
    "output": {"csv": ")" + csv.string() + R"("}
  })");
  std::ostringstream err;
  CHECK(cmd_run(cfg, err) == kExitConfig);
  CHECK_FALSE(fs::exists(csv));
}
