#pragma once

#include "minimax/problems.hpp"
#include "minimax/solvers.hpp"
#include "minimax/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace minimax {

// Exit codes shared by the CLI commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitViolations = 4;

struct QuadraticProblemSpec {
  std::optional<QuadraticNcsc> explicit_problem;
  // Seeded alternative to explicit matrices.
  std::optional<std::uint64_t> seed;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
};

struct SyntheticProblemSpec {
  std::uint64_t seed = 1;
  Eigen::Index d = 50;
  Eigen::Index n = 75;
  double rho_x = 0.1;
  double rho_y = 10.0;
};

struct LibsvmProblemSpec {
  std::filesystem::path path;
  Eigen::Index target_dim = 0;  // 0 keeps the original dimension
  double rho_x = 1.0;
  double rho_y = 200.0;
  std::uint64_t projection_seed = 1;
};

using ProblemSpec =
    std::variant<QuadraticProblemSpec, SyntheticProblemSpec, LibsvmProblemSpec>;

enum class SolverKind { Alg1Gda, Alg2Bb, Alg2Pf, Ttgda, TtgdaGrid, Gdbb };

const char* to_string(SolverKind k);

/// One solver entry of a run/bench config. Unset optionals fall back to the
/// defaults for the solver kind; mu and beta default to the problem's
/// modulus hint and 2/mu.
struct SolverSpec {
  SolverKind kind = SolverKind::Alg2Bb;
  std::string name;  // CSV "alg" column; defaults to the kind's tag
  std::optional<double> mu;
  std::optional<double> beta;
  std::optional<double> beta0;
  bool beta0_auto = false;  // seed beta0 from the curvature formula
  std::optional<double> c;
  std::optional<std::int64_t> period;
  std::optional<double> gamma;  // gdbb descent factor
  std::optional<double> eta_y;  // ttgda fixed steps
  std::optional<double> eta_x;
  std::vector<double> eta_y_set;  // ttgda-grid
  std::vector<double> theta_set;
  BbVariant variant = BbVariant::BB1;
  std::optional<GradClampParams> clamp;
  LineSearchConfig ls;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<SolverSpec> solvers;
  StopRule stop;
  std::optional<double> x0_fill;
  std::optional<double> y0_fill;
  std::filesystem::path csv_out;
  std::optional<std::filesystem::path> trace_out;
};

/// Parses a JSON experiment document. Throws ConfigError on malformed or
/// inconsistent input.
ExperimentConfig load_config(const std::filesystem::path& path);

/// A materialized problem: the oracle plus the default initial point (origin
/// for quadratic/synthetic, all ones for libsvm).
struct BuiltProblem {
  std::unique_ptr<ProblemOracle> oracle;
  std::optional<QuadraticNcsc> quadratic;
  JointPoint z0;
};

BuiltProblem build_problem(const ProblemSpec& spec);

/// Executes one solver spec on a problem; fills final_phi_grad_norm.
RunReport execute_solver(const SolverSpec& spec, const ProblemOracle& oracle,
                         const StopRule& stop, const JointPoint& z0);

inline constexpr const char* kCsvHeader =
    "alg,iter,f_ev,g_ev,hvp,f,gx_norm,gy_norm,gphi_norm,time_s";

std::string csv_row(const std::string& alg, const RunReport& report);

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& names,
                      const std::vector<RunReport>& reports);

void write_trace_csv(const std::filesystem::path& path,
                     const std::string& alg, const RunReport& report);

int status_exit_code(RunStatus s);

/// run: executes the single configured solver, writes the CSV row (and the
/// optional trace), returns the status exit code.
int cmd_run(const std::filesystem::path& config_path, std::ostream& err);

/// bench: executes every configured solver on the same problem instance and
/// initial point, writing one CSV row per solver in config order. Rows may
/// be computed in parallel (MINIMAX_THREADS); results are identical either
/// way.
int cmd_bench(const std::filesystem::path& config_path, std::ostream& err);

struct VerifyOptions {
  std::uint64_t seed = 1;
  int fd_points = 20;
  int lemma_points = 1000;
  int quadratic_instances = 50;
  int phi_points = 100;
  std::optional<std::filesystem::path> report_out;
};

struct VerifyCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = true;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  int violations() const;
  std::string to_json() const;
};

/// Derivative checks for one oracle against central finite differences,
/// appended to the report under the given name prefix.
void verify_derivative_checks(VerifyReport& report,
                              const ProblemOracle& oracle, double beta,
                              SeededRng& rng, int points,
                              const std::string& prefix);

/// Derivative, gradient-bound, second-order and transfer-bound checks over
/// seeded samples of both benchmark problems.
VerifyReport run_verification(const VerifyOptions& opts);

inline int verify_exit_code(const VerifyReport& report) {
  return report.violations() > 0 ? kExitViolations : kExitOk;
}

/// verify: prints the JSON report, returns 0 iff no violations (else 4).
int cmd_verify(const VerifyOptions& opts, std::ostream& out,
               std::ostream& err);

/// gen-data: writes the synthetic dataset as CSV, one row per sample,
/// features first and the label last. Deterministic per seed.
int cmd_gen_data(std::uint64_t seed, Eigen::Index d, Eigen::Index n,
                 const std::filesystem::path& out, std::ostream& err);

}  // namespace minimax
