#include "minimax/experiment.hpp"

#include "minimax/diagnostics.hpp"
#include "minimax/libsvm.hpp"
#include "minimax/rng.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace minimax {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double resolve_mu(const SolverSpec& spec, const ProblemOracle& oracle,
                  const char* solver) {
  if (spec.mu) return *spec.mu;
  if (auto hint = oracle.mu_hint()) return *hint;
  throw ConfigError(std::string(solver) +
                    ": mu is not known for this problem; set \"mu\" in the "
                    "solver spec or use alg2-pf");
}

int env_thread_count() {
  const char* s = std::getenv("MINIMAX_THREADS");
  if (!s) return 1;
  const int n = std::atoi(s);
  return n > 1 ? n : 1;
}

}  // namespace

const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Alg1Gda: return "alg1-gda";
    case SolverKind::Alg2Bb: return "alg2-bb";
    case SolverKind::Alg2Pf: return "alg2-pf";
    case SolverKind::Ttgda: return "ttgda";
    case SolverKind::TtgdaGrid: return "ttgda-grid";
    case SolverKind::Gdbb: return "gdbb";
  }
  return "unknown";
}

namespace {

SolverKind solver_kind_from(const std::string& s) {
  if (s == "alg1-gda") return SolverKind::Alg1Gda;
  if (s == "alg2-bb") return SolverKind::Alg2Bb;
  if (s == "alg2-pf") return SolverKind::Alg2Pf;
  if (s == "ttgda") return SolverKind::Ttgda;
  if (s == "ttgda-grid") return SolverKind::TtgdaGrid;
  if (s == "gdbb") return SolverKind::Gdbb;
  throw ConfigError("unknown solver type '" + s + "'");
}

Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw ConfigError("matrix fields must be nonempty arrays of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError("ragged matrix rows in config");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(c).get<double>();
  }
  return m;
}

Vec vec_from_json(const json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

ProblemSpec parse_problem(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "quadratic") {
    QuadraticProblemSpec spec;
    if (j.contains("A")) {
      QuadraticNcsc q;
      q.A = mat_from_json(j.at("A"));
      q.B = mat_from_json(j.at("B"));
      q.mu = j.at("mu").get<double>();
      q.c = vec_from_json(j.at("c"));
      spec.explicit_problem = std::move(q);
    } else {
      spec.seed = j.at("seed").get<std::uint64_t>();
      spec.n = j.at("n").get<Eigen::Index>();
      spec.m = j.at("m").get<Eigen::Index>();
    }
    return spec;
  }
  if (type == "synthetic") {
    SyntheticProblemSpec spec;
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.d = j.at("d").get<Eigen::Index>();
    spec.n = j.at("N").get<Eigen::Index>();
    spec.rho_x = j.at("rho_x").get<double>();
    spec.rho_y = j.at("rho_y").get<double>();
    return spec;
  }
  if (type == "libsvm") {
    LibsvmProblemSpec spec;
    spec.path = j.at("path").get<std::string>();
    if (j.contains("target_dim"))
      spec.target_dim = j.at("target_dim").get<Eigen::Index>();
    spec.rho_x = j.at("rho_x").get<double>();
    spec.rho_y = j.at("rho_y").get<double>();
    if (j.contains("projection_seed"))
      spec.projection_seed = j.at("projection_seed").get<std::uint64_t>();
    return spec;
  }
  throw ConfigError("unknown problem type '" + type + "'");
}

void apply_ls_overrides(LineSearchConfig& ls, const json& j) {
  if (j.contains("alpha")) ls.alpha = j.at("alpha").get<double>();
  if (j.contains("gamma_x")) ls.gamma_x = j.at("gamma_x").get<double>();
  if (j.contains("gamma_y")) ls.gamma_y = j.at("gamma_y").get<double>();
  if (j.contains("tau")) ls.tau = j.at("tau").get<double>();
  if (j.contains("eta_min")) {
    ls.eta_min_x = ls.eta_min_y = j.at("eta_min").get<double>();
  }
  if (j.contains("eta_max")) {
    ls.eta_max_x = ls.eta_max_y = j.at("eta_max").get<double>();
  }
  if (j.contains("eta_init_x")) ls.eta_init_x = j.at("eta_init_x").get<double>();
  if (j.contains("eta_init_y")) ls.eta_init_y = j.at("eta_init_y").get<double>();
  if (j.contains("max_backtracks"))
    ls.max_backtracks = j.at("max_backtracks").get<int>();
}

SolverSpec parse_solver(const json& j) {
  SolverSpec spec;
  spec.kind = solver_kind_from(j.at("type").get<std::string>());
  spec.name = j.value("name", std::string(to_string(spec.kind)));
  if (j.contains("mu")) spec.mu = j.at("mu").get<double>();
  if (j.contains("beta")) spec.beta = j.at("beta").get<double>();
  if (j.contains("beta0")) {
    if (j.at("beta0").is_string()) {
      if (j.at("beta0").get<std::string>() != "auto")
        throw ConfigError("beta0 must be a number or \"auto\"");
      spec.beta0_auto = true;
    } else {
      spec.beta0 = j.at("beta0").get<double>();
    }
  }
  if (j.contains("c")) spec.c = j.at("c").get<double>();
  if (j.contains("period")) spec.period = j.at("period").get<std::int64_t>();
  if (j.contains("gamma")) spec.gamma = j.at("gamma").get<double>();
  if (j.contains("eta_y")) spec.eta_y = j.at("eta_y").get<double>();
  if (j.contains("eta_x")) spec.eta_x = j.at("eta_x").get<double>();
  if (j.contains("eta_y_set"))
    spec.eta_y_set = j.at("eta_y_set").get<std::vector<double>>();
  if (j.contains("theta_set"))
    spec.theta_set = j.at("theta_set").get<std::vector<double>>();
  if (j.contains("bb")) {
    const std::string v = j.at("bb").get<std::string>();
    if (v == "BB1")
      spec.variant = BbVariant::BB1;
    else if (v == "BB2")
      spec.variant = BbVariant::BB2;
    else
      throw ConfigError("bb must be \"BB1\" or \"BB2\"");
  }
  if (j.contains("clamp")) {
    GradClampParams cp;
    cp.gamma0 = j.at("clamp").value("gamma0", cp.gamma0);
    cp.gamma1 = j.at("clamp").value("gamma1", cp.gamma1);
    spec.clamp = cp;
  }

  // Per-kind line-search defaults; the paper-tuned nonmonotone settings for
  // the BB variants, monotone for the plain framework.
  switch (spec.kind) {
    case SolverKind::Alg1Gda:
      spec.ls.tau = 1.0;
      break;
    case SolverKind::Alg2Bb:
    case SolverKind::Alg2Pf:
    case SolverKind::Gdbb:
      spec.ls.tau = 1e-3;
      break;
    default:
      break;
  }
  apply_ls_overrides(spec.ls, j);
  return spec;
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }

  try {
    ExperimentConfig cfg;
    cfg.problem = parse_problem(j.at("problem"));
    if (j.contains("solver")) {
      cfg.solvers.push_back(parse_solver(j.at("solver")));
    } else if (j.contains("solvers")) {
      for (const auto& s : j.at("solvers"))
        cfg.solvers.push_back(parse_solver(s));
    }
    if (cfg.solvers.empty())
      throw ConfigError("config needs a \"solver\" or nonempty \"solvers\"");

    if (j.contains("stop")) {
      const auto& s = j.at("stop");
      if (s.contains("grad_tol")) cfg.stop.grad_tol = s.at("grad_tol");
      if (s.contains("max_iters")) cfg.stop.max_iters = s.at("max_iters");
      if (s.contains("max_wall_time"))
        cfg.stop.max_wall_time = s.at("max_wall_time").get<double>();
    }
    cfg.stop.validate();

    if (j.contains("x0_fill")) cfg.x0_fill = j.at("x0_fill").get<double>();
    if (j.contains("y0_fill")) cfg.y0_fill = j.at("y0_fill").get<double>();

    const auto& out = j.at("output");
    cfg.csv_out = out.at("csv").get<std::string>();
    if (out.contains("trace"))
      cfg.trace_out = std::filesystem::path(out.at("trace").get<std::string>());
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError("config field error: " + std::string(e.what()));
  }
}

BuiltProblem build_problem(const ProblemSpec& spec) {
  BuiltProblem built;
  if (const auto* q = std::get_if<QuadraticProblemSpec>(&spec)) {
    QuadraticNcsc problem;
    if (q->explicit_problem) {
      problem = *q->explicit_problem;
    } else {
      if (!q->seed) throw ConfigError("quadratic problem needs matrices or a seed");
      SeededRng rng(*q->seed);
      problem = make_random_quadratic(rng, q->n, q->m);
    }
    built.quadratic = problem;
    auto oracle = std::make_unique<QuadraticOracle>(problem);
    built.z0 = JointPoint(Vec::Zero(oracle->dim_x()), Vec::Zero(oracle->dim_y()));
    built.oracle = std::move(oracle);
    return built;
  }
  if (const auto* s = std::get_if<SyntheticProblemSpec>(&spec)) {
    SeededRng rng(s->seed);
    auto oracle = std::make_unique<RobustRegressionOracle>(
        gen_synthetic(rng, s->d, s->n, s->rho_x, s->rho_y));
    built.z0 = JointPoint(Vec::Zero(oracle->dim_x()), Vec::Zero(oracle->dim_y()));
    built.oracle = std::move(oracle);
    return built;
  }
  const auto& l = std::get<LibsvmProblemSpec>(spec);
  if (!std::filesystem::exists(l.path))
    throw ConfigError("libsvm file does not exist: " + l.path.string());
  LibsvmDataset ds = parse_libsvm(l.path);
  if (ds.n_rows() == 0) throw ConfigError("libsvm dataset is empty");
  SeededRng rng(l.projection_seed);
  const Eigen::Index target = l.target_dim > 0 ? l.target_dim : ds.n_features;
  RobustRegression p;
  p.W = sparse_random_project(ds, target, rng,
                              /*identity_fallback=*/l.target_dim == 0);
  p.v = Eigen::Map<const Vec>(ds.labels.data(),
                              static_cast<Eigen::Index>(ds.labels.size()));
  p.rho_x = l.rho_x;
  p.rho_y = l.rho_y;
  auto oracle = std::make_unique<RobustRegressionOracle>(std::move(p));
  built.z0 = JointPoint(Vec::Ones(oracle->dim_x()), Vec::Ones(oracle->dim_y()));
  built.oracle = std::move(oracle);
  return built;
}

RunReport execute_solver(const SolverSpec& spec, const ProblemOracle& oracle,
                         const StopRule& stop, const JointPoint& z0) {
  RunReport report;
  switch (spec.kind) {
    case SolverKind::Alg1Gda: {
      Alg1Params p;
      p.mu = resolve_mu(spec, oracle, "alg1-gda");
      p.beta = spec.beta.value_or(0.0);
      p.ls = spec.ls;
      GdaDirection dir;
      report = run_alg1(oracle, p, dir, stop, z0);
      break;
    }
    case SolverKind::Alg2Bb:
    case SolverKind::Alg2Pf: {
      Alg2Params p;
      p.c = spec.c.value_or(1.0);
      p.variant = spec.variant;
      p.ls = spec.ls;
      p.clamp = spec.clamp;
      if (spec.kind == SolverKind::Alg2Bb) {
        p.beta_check_period = spec.period.value_or(0);
        if (spec.beta0) {
          p.beta0 = *spec.beta0;
        } else {
          const double mu = resolve_mu(spec, oracle, "alg2-bb");
          p.beta0 = 2.0 / mu;
        }
      } else {
        p.beta_check_period = spec.period.value_or(20);
        p.beta0 = spec.beta0.value_or(1.0);
      }
      if (spec.beta0_auto) {
        SeededRng rng(17);
        const Vec y = Vec::Zero(oracle.dim_y());
        const Vec y_prime = standard_normal_vector(rng, oracle.dim_y());
        p.beta0 = estimate_beta0(oracle, z0.x, y, y_prime);
      }
      report = run_alg2(oracle, p, stop, z0);
      break;
    }
    case SolverKind::Ttgda: {
      if (!spec.eta_y || !spec.eta_x)
        throw ConfigError("ttgda needs eta_y and eta_x");
      report = run_ttgda(oracle, {*spec.eta_y, *spec.eta_x}, stop, z0);
      break;
    }
    case SolverKind::TtgdaGrid: {
      std::vector<double> eta_y_set = spec.eta_y_set;
      std::vector<double> theta_set = spec.theta_set;
      if (eta_y_set.empty()) eta_y_set = {0.001, 0.005, 0.01, 0.05, 0.1};
      if (theta_set.empty()) theta_set = {0.001, 0.01, 0.1};
      report = ttgda_grid_search(oracle, eta_y_set, theta_set, stop, z0);
      break;
    }
    case SolverKind::Gdbb: {
      GdbbParams p;
      p.mu = resolve_mu(spec, oracle, "gdbb");
      p.beta = spec.beta.value_or(0.0);
      p.gamma = spec.gamma.value_or(1e-4);
      p.variant = spec.variant;
      p.ls = spec.ls;
      report = run_gdbb(oracle, p, stop, z0);
      break;
    }
  }

  // Final-point Phi gradient via the inner-maximization oracle. Report-only:
  // not charged to the counters and not part of the solver wall time; its
  // own cost lands in the notes.
  if (all_finite(report.final_x) && all_finite(report.final_y)) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      PhiOracle phi(oracle, PhiOracleConfig{});
      auto [phi_val, y_star] = phi.eval(report.final_x);
      (void)phi_val;
      report.final_phi_grad_norm =
          oracle.grad_x(report.final_x, y_star).norm();
      const double phi_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      if (!report.notes.empty()) report.notes += ",";
      report.notes += "phi_time_s=" + fmt(phi_time);
    } catch (const ConvergenceError&) {
      // leave unset; the CSV records nan
    }
  }
  return report;
}

std::string csv_row(const std::string& alg, const RunReport& r) {
  std::ostringstream os;
  os << alg << ',' << r.iters << ',' << r.counters.f_evals << ','
     << r.counters.g_evals << ',' << r.counters.hvp_evals << ','
     << fmt(r.final_f) << ',' << fmt(r.final_grad_x_norm) << ','
     << fmt(r.final_grad_y_norm) << ','
     << fmt(r.final_phi_grad_norm.value_or(
            std::numeric_limits<double>::quiet_NaN()))
     << ',' << fmt(r.counters.wall_time);
  return os.str();
}

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& names,
                      const std::vector<RunReport>& reports) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write CSV to " + path.string());
  out << kCsvHeader << '\n';
  for (std::size_t i = 0; i < reports.size(); ++i)
    out << csv_row(names[i], reports[i]) << '\n';
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::string& alg, const RunReport& report) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace to " + path.string());
  out << "alg,k,h,H,grad_norm,eta_y,eta_x,beta\n";
  for (const TraceRow& row : report.trace)
    out << alg << ',' << row.k << ',' << fmt(row.h) << ',' << fmt(row.merit)
        << ',' << fmt(row.grad_norm) << ',' << fmt(row.eta_y) << ','
        << fmt(row.eta_x) << ',' << fmt(row.beta) << '\n';
}

int status_exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return kExitOk;
    case RunStatus::IterLimit:
    case RunStatus::TimeLimit: return kExitBudget;
    case RunStatus::Diverged:
    case RunStatus::LineSearchFailed: return kExitDiverged;
  }
  return kExitDiverged;
}

namespace {

JointPoint initial_point(const ExperimentConfig& cfg, const BuiltProblem& bp) {
  Vec x = bp.z0.x;
  Vec y = bp.z0.y;
  if (cfg.x0_fill) x.setConstant(*cfg.x0_fill);
  if (cfg.y0_fill) y.setConstant(*cfg.y0_fill);
  return {std::move(x), std::move(y)};
}

int run_rows(const ExperimentConfig& cfg, std::ostream& err,
             bool single_solver) {
  const BuiltProblem bp = build_problem(cfg.problem);
  const JointPoint z0 = initial_point(cfg, bp);

  std::vector<RunReport> reports(cfg.solvers.size());
  std::vector<std::string> names;
  names.reserve(cfg.solvers.size());
  for (const auto& s : cfg.solvers) names.push_back(s.name);

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.solvers.size()) return;
      try {
        reports[i] = execute_solver(cfg.solvers[i], *bp.oracle, cfg.stop, z0);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int threads =
      std::min<int>(env_thread_count(), static_cast<int>(cfg.solvers.size()));
  if (threads > 1) {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  } else {
    worker();
  }
  if (first_error) std::rethrow_exception(first_error);

  write_report_csv(cfg.csv_out, names, reports);
  if (cfg.trace_out) {
    if (single_solver)
      write_trace_csv(*cfg.trace_out, names[0], reports[0]);
    else
      err << "trace output applies to single-solver runs; ignored\n";
  }

  int exit = kExitOk;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    err << names[i] << ": " << to_string(reports[i].status) << " after "
        << reports[i].iters << " iterations, ||grad f|| = "
        << fmt(std::hypot(reports[i].final_grad_x_norm,
                          reports[i].final_grad_y_norm))
        << "\n";
    exit = std::max(exit, status_exit_code(reports[i].status));
  }
  return exit;
}

}  // namespace

int cmd_run(const std::filesystem::path& config_path, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
    if (cfg.solvers.size() != 1)
      throw ConfigError("run expects exactly one solver; use bench for several");
    return run_rows(cfg, err, /*single_solver=*/true);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_bench(const std::filesystem::path& config_path, std::ostream& err) {
  try {
    const ExperimentConfig cfg = load_config(config_path);
    return run_rows(cfg, err, /*single_solver=*/cfg.solvers.size() == 1);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_gen_data(std::uint64_t seed, Eigen::Index d, Eigen::Index n,
                 const std::filesystem::path& out_path, std::ostream& err) {
  try {
    if (d < 1 || n < 1) throw ConfigError("gen-data: d and N must be >= 1");
    SeededRng rng(seed);
    const RobustRegression p = gen_synthetic(rng, d, n, 0.0, 3.0);
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write dataset to " + out_path.string());
    char buf[48];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < d; ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", p.W(i, c));
        out << buf << ',';
      }
      std::snprintf(buf, sizeof(buf), "%.17g", p.v[i]);
      out << buf << '\n';
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int VerifyReport::violations() const {
  int count = 0;
  for (const auto& c : checks)
    if (!c.pass) ++count;
  return count;
}

std::string VerifyReport::to_json() const {
  json j;
  j["violations"] = violations();
  j["checks"] = json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"lhs", c.lhs},
                           {"rhs", c.rhs},
                           {"slack", c.slack},
                           {"pass", c.pass}});
  }
  return j.dump(2);
}

namespace {

/// Worst-slack aggregation: keeps, per inequality name, the record whose
/// slack is smallest across all sampled points.
class WorstCase {
public:
  void offer(const InequalityRecord& rec) {
    auto it = index_.find(rec.name);
    if (it == index_.end()) {
      index_[rec.name] = records_.size();
      records_.push_back(rec);
    } else if (rec.slack < records_[it->second].slack) {
      records_[it->second] = rec;
    }
  }

  void emit(const std::string& prefix, VerifyReport& out) const {
    for (const auto& rec : records_) {
      VerifyCheck c;
      c.name = prefix + rec.name;
      c.lhs = rec.lhs;
      c.rhs = rec.rhs;
      c.slack = rec.slack;
      c.pass = !rec.violated();
      out.checks.push_back(std::move(c));
    }
  }

private:
  std::vector<InequalityRecord> records_;
  std::map<std::string, std::size_t> index_;
};

JointPoint sample_point(SeededRng& rng, Eigen::Index n, Eigen::Index m,
                        double x_radius) {
  Vec x = standard_normal_vector(rng, n);
  if (x_radius > 0.0) {
    const double nrm = x.norm();
    // Uniform radius inside the cap keeps samples spread over the region.
    x *= rng.next_uniform(0.0, x_radius) / std::max(nrm, 1e-12);
  }
  Vec y = standard_normal_vector(rng, m);
  return {std::move(x), std::move(y)};
}

void check_threshold(VerifyReport& out, const std::string& name, double value,
                     double threshold) {
  VerifyCheck c;
  c.name = name;
  c.lhs = value;
  c.rhs = threshold;
  c.slack = threshold - value;
  c.pass = value <= threshold;
  out.checks.push_back(std::move(c));
}

}  // namespace

void verify_derivative_checks(VerifyReport& report,
                              const ProblemOracle& oracle, double beta,
                              SeededRng& rng, int points,
                              const std::string& prefix) {
  double worst_f = 0.0, worst_h = 0.0, worst_second = 0.0, worst_phi = 0.0;
  RegularizedObjective reg(oracle, beta);
  for (int i = 0; i < points; ++i) {
    const JointPoint z = sample_point(rng, oracle.dim_x(), oracle.dim_y(), 0.0);
    worst_f = std::max(worst_f, fd_check(reg, z, DerivativeCheck::GradF));
    worst_h = std::max(worst_h, fd_check(reg, z, DerivativeCheck::GradH));
    worst_second =
        std::max(worst_second, fd_check(reg, z, DerivativeCheck::YDirSecond));
    worst_phi =
        std::max(worst_phi, fd_check_phi_grad(oracle, z.x, PhiOracleConfig{}));
  }
  check_threshold(report, prefix + "fd_grad_f", worst_f, 1e-6);
  check_threshold(report, prefix + "fd_grad_h", worst_h, 1e-6);
  check_threshold(report, prefix + "fd_y_dir_second", worst_second, 1e-5);
  check_threshold(report, prefix + "fd_phi_grad", worst_phi, 1e-5);
}

VerifyReport run_verification(const VerifyOptions& opts) {
  VerifyReport out;
  SeededRng rng(opts.seed);

  // Two standing instances: a modest quadratic and a small regression
  // problem so the full coordinate sweep of the modulus estimate stays cheap.
  const QuadraticNcsc quad = make_random_quadratic(rng, 6, 4);
  QuadraticOracle quad_oracle(quad);
  const double quad_beta = 2.0 / quad.mu;

  RobustRegression rr = gen_synthetic(rng, 8, 16, 0.1, 10.0);
  RobustRegressionOracle rr_oracle_(rr);
  const double rr_mu = rr.mu();
  const double rr_beta = 2.0 / rr_mu;

  verify_derivative_checks(out, quad_oracle, quad_beta, rng, opts.fd_points,
                           "quadratic/");
  verify_derivative_checks(out, rr_oracle_, rr_beta, rng, opts.fd_points,
                           "robust_regression/");

  // Gradient-bound inequalities sampled pointwise; the regression samples
  // stay inside ||x|| <= 1 where its modulus bound applies.
  {
    WorstCase worst;
    for (int i = 0; i < opts.lemma_points; ++i) {
      const JointPoint z = sample_point(rng, quad.n(), quad.m(), 0.0);
      const double l_hat = estimate_local_lipschitz(quad_oracle, z);
      for (const auto& rec :
           check_point_lemmas(quad_oracle, quad.mu, quad_beta, z, l_hat))
        worst.offer(rec);
    }
    worst.emit("quadratic/", out);
  }
  {
    WorstCase worst;
    for (int i = 0; i < opts.lemma_points; ++i) {
      const JointPoint z =
          sample_point(rng, rr_oracle_.dim_x(), rr_oracle_.dim_y(), 1.0);
      const double l_hat = estimate_local_lipschitz(rr_oracle_, z);
      for (const auto& rec :
           check_point_lemmas(rr_oracle_, rr_mu, rr_beta, z, l_hat))
        worst.offer(rec);
    }
    worst.emit("robust_regression/", out);
  }

  // h_beta dominates Phi with the quadratic margin in ||grad_y f||.
  {
    double worst_slack = std::numeric_limits<double>::infinity();
    double worst_lhs = 0.0, worst_rhs = 0.0;
    PhiOracle phi(quad_oracle, PhiOracleConfig{});
    RegularizedObjective reg(quad_oracle, quad_beta);
    for (int i = 0; i < opts.phi_points; ++i) {
      const JointPoint z = sample_point(rng, quad.n(), quad.m(), 0.0);
      const double h = reg.value(z.x, z.y);
      const double phi_v = phi.eval(z.x).first;
      const double margin = (0.5 * quad_beta - 0.5 / quad.mu) *
                            quad_oracle.grad_y(z.x, z.y).squaredNorm();
      const double lhs = phi_v + margin;
      const double slack = (h - lhs) + 1e-8 * (1.0 + std::abs(h));
      if (slack < worst_slack) {
        worst_slack = slack;
        worst_lhs = lhs;
        worst_rhs = h;
      }
    }
    VerifyCheck c;
    c.name = "quadratic/h_dominates_phi";
    c.lhs = worst_lhs;
    c.rhs = worst_rhs;
    c.slack = worst_slack;
    c.pass = worst_slack >= 0.0;
    out.checks.push_back(std::move(c));
  }

  // Schur-complement identity over random instances.
  {
    double worst_ratio = 0.0;
    for (int i = 0; i < opts.quadratic_instances; ++i) {
      const QuadraticNcsc q = make_random_quadratic(rng, 5, 3);
      const double err = quadratic_second_order_check(q, 2.0 / q.mu);
      worst_ratio = std::max(worst_ratio, err / (1.0 + q.A.norm()));
    }
    check_threshold(out, "quadratic/second_order_schur", worst_ratio, 1e-10);
  }

  // Transfer-bound spot values.
  {
    const TransferBound tb = transfer_bounds(0.1, 2.0, 1.0, 1.0);
    check_threshold(out, "transfer/min_to_rm_spot",
                    std::abs(tb.bound_min_to_rm - 0.3), 1e-12);
    check_threshold(out, "transfer/rm_to_min_spot",
                    std::abs(tb.bound_rm_to_min - std::sqrt(10.0) * 0.1),
                    1e-12);
  }

  if (opts.report_out) {
    std::ofstream f(*opts.report_out);
    if (!f) throw ConfigError("cannot write report to " + opts.report_out->string());
    f << out.to_json();
  }
  return out;
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out,
               std::ostream& err) {
  try {
    const VerifyReport report = run_verification(opts);
    out << report.to_json() << "\n";
    for (const auto& c : report.checks)
      if (!c.pass) err << "violation: " << c.name << " slack=" << c.slack << "\n";
    return verify_exit_code(report);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace minimax
