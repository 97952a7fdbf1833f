#include "minimax/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace minimax {

namespace {

constexpr double kDivergenceRadius = 1e10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool iterate_ok(const Vec& x, const Vec& y) {
  if (!all_finite(x) || !all_finite(y)) return false;
  return std::sqrt(x.squaredNorm() + y.squaredNorm()) <= kDivergenceRadius;
}

/// Bookkeeping shared by all drivers: the trace, step floors, timing, the
/// best-gradient iterate, and the final-point summary. The returned iterate
/// is the visited point with the smallest ||grad f||, matching the
/// min-over-iterations guarantee of the framework; its reporting quantities
/// are never charged to the counters.
struct RunRecorder {
  Clock::time_point t0 = Clock::now();
  std::vector<TraceRow> trace;
  double min_eta_y = std::numeric_limits<double>::infinity();
  double min_eta_x = std::numeric_limits<double>::infinity();
  double best_grad_norm = std::numeric_limits<double>::infinity();
  Vec best_x, best_y;
  FullGradient best_g;

  void begin_iteration(std::int64_t k, double h, double merit,
                       double grad_norm, double beta, const Vec& x,
                       const Vec& y, const FullGradient& g) {
    trace.push_back({k, h, merit, grad_norm, 0.0, 0.0, beta});
    if (std::isfinite(grad_norm) && grad_norm < best_grad_norm) {
      best_grad_norm = grad_norm;
      best_x = x;
      best_y = y;
      best_g = g;
    }
  }

  void accept_steps(double eta_y, double eta_x) {
    trace.back().eta_y = eta_y;
    trace.back().eta_x = eta_x;
    min_eta_y = std::min(min_eta_y, eta_y);
    min_eta_x = std::min(min_eta_x, eta_x);
  }

  RunReport finish(RunStatus status, std::int64_t iters, EvalCounters counters,
                   const ProblemOracle& oracle, const Vec& last_x,
                   const Vec& last_y, const FullGradient& last_g) {
    const bool have_best = best_x.size() > 0;
    const Vec& x = have_best ? best_x : last_x;
    const Vec& y = have_best ? best_y : last_y;
    const FullGradient& g = have_best ? best_g : last_g;

    RunReport r;
    r.status = status;
    r.iters = iters;
    counters.wall_time = seconds_since(t0);
    r.counters = counters;
    r.final_f = iterate_ok(x, y) ? oracle.value(x, y)
                                 : std::numeric_limits<double>::quiet_NaN();
    r.final_grad_x_norm = g.x.norm();
    r.final_grad_y_norm = g.y.norm();
    r.min_eta_y = iters > 0 ? min_eta_y : 0.0;
    r.min_eta_x = iters > 0 ? min_eta_x : 0.0;
    r.final_x = x;
    r.final_y = y;
    r.trace = std::move(trace);
    return r;
  }
};

FullGradient safe_grad(const ProblemOracle& oracle, const Vec& x,
                       const Vec& y) {
  if (!iterate_ok(x, y))
    return {Vec::Constant(x.size(), std::numeric_limits<double>::quiet_NaN()),
            Vec::Constant(y.size(), std::numeric_limits<double>::quiet_NaN())};
  return oracle.grad(x, y);
}

void check_direction(const Vec& d, const Vec& grad_x, double a1, double a2) {
  const double gn2 = grad_x.squaredNorm();
  const double tol = 1e-9 * (1.0 + gn2);
  if (d.norm() > a1 * grad_x.norm() * (1.0 + 1e-9) + tol)
    throw ConfigError("direction provider violated its norm certificate");
  if (d.dot(grad_x) > -a2 * gn2 + tol)
    throw ConfigError("direction provider violated its descent certificate");
}

}  // namespace

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::IterLimit: return "iter-limit";
    case RunStatus::TimeLimit: return "time-limit";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::LineSearchFailed: return "linesearch-failed";
  }
  return "unknown";
}

RunReport run_alg1(const ProblemOracle& oracle, const Alg1Params& params,
                   const DirectionProvider& dir, const StopRule& stop,
                   const JointPoint& z0) {
  if (!(params.mu > 0.0))
    throw ConfigError(
        "run_alg1: strong-concavity modulus mu is required; use the "
        "parameter-free method when mu is unknown");
  const double beta = params.resolved_beta();
  if (!(beta > 1.0 / params.mu))
    throw ConfigError("run_alg1: beta must exceed 1/mu");
  params.ls.validate();
  stop.validate();

  const auto [a1, a2] = dir.constants();
  const double b1 = beta * params.mu - 1.0;
  const double b2 = 0.5 * a2;
  const LineSearchConfig& ls = params.ls;

  RegularizedObjective reg(oracle, beta);
  Vec x = z0.x, y = z0.y;

  RunRecorder rec;
  MeritBundle at_z = reg.value_bundle(x, y);
  double H = at_z.h;

  std::int64_t k = 0;
  RunStatus status = RunStatus::IterLimit;
  FullGradient g;
  while (true) {
    g = safe_grad(oracle, x, y);
    const double grad_norm = g.norm();
    rec.begin_iteration(k, at_z.h, H, grad_norm, beta, x, y, g);
    if (!iterate_ok(x, y) || !std::isfinite(grad_norm)) {
      status = RunStatus::Diverged;
      break;
    }
    if (grad_norm <= stop.grad_tol) {
      status = RunStatus::Converged;
      break;
    }
    if (k >= stop.max_iters) {
      status = RunStatus::IterLimit;
      break;
    }
    if (stop.max_wall_time && seconds_since(rec.t0) > *stop.max_wall_time) {
      status = RunStatus::TimeLimit;
      break;
    }

    try {
      reg.counters().g_evals += 1;  // the full gradient consumed at z_k

      SearchOutcome sy = search_y(reg, x, y, g.y, H, ls.gamma_y * b1,
                                  ls.eta_init_y, ls);
      Vec y_next = y + sy.step * g.y;

      reg.counters().g_evals += 1;
      Vec gx_half = oracle.grad_x(x, y_next);
      Vec d = dir.direction(x, y_next, gx_half);
      check_direction(d, gx_half, a1, a2);

      const double y_term =
          ls.gamma_x * b1 * sy.step * g.y.squaredNorm();
      SearchOutcome sx = search_x(reg, x, y_next, d, gx_half, H, y_term,
                                  ls.gamma_x * b2, ls.eta_init_x, ls);

      x += sx.step * d;
      y = std::move(y_next);
      at_z = std::move(sx.accepted);
      H = zh_average(H, at_z.h, ls.tau);
      rec.accept_steps(sy.step, sx.step);
      ++k;
    } catch (const LineSearchError&) {
      status = RunStatus::LineSearchFailed;
      break;
    } catch (const NumericError&) {
      status = RunStatus::Diverged;
      break;
    }
  }
  return rec.finish(status, k, reg.counters(), oracle, x, y, g);
}

RunReport run_alg2(const ProblemOracle& oracle, const Alg2Params& params,
                   const StopRule& stop, const JointPoint& z0) {
  if (!(params.beta0 > 0.0)) throw ConfigError("run_alg2: beta0 must be > 0");
  if (!(params.c > 0.0)) throw ConfigError("run_alg2: c must be > 0");
  if (params.beta_check_period < 0)
    throw ConfigError("run_alg2: beta_check_period must be >= 0");
  params.ls.validate();
  stop.validate();

  const LineSearchConfig& ls = params.ls;
  const BbBounds bounds_y{ls.eta_min_y, ls.eta_max_y};
  const BbBounds bounds_x{ls.eta_min_x, ls.eta_max_x};

  RegularizedObjective reg(oracle, params.beta0);
  double beta = params.beta0;
  Vec x = z0.x, y = z0.y;

  RunRecorder rec;
  MeritBundle at_z = reg.value_bundle(x, y);
  double F = at_z.f;
  double G = at_z.grad_y_sq;

  std::optional<GradClamp> clamp_y, clamp_x;
  double gamma_cap_sq = 0.0;
  if (params.clamp) {
    const double cap =
        params.clamp->gamma0 * std::sqrt(at_z.grad_y_sq) + params.clamp->gamma1;
    gamma_cap_sq = cap * cap;
    clamp_x = GradClamp{gamma_cap_sq, 0.0};
  }

  BbMemory mem;
  const std::optional<double> mu_hint = oracle.mu_hint();
  std::int64_t curvature_violations = 0;
  std::int64_t k = 0;
  RunStatus status = RunStatus::IterLimit;
  FullGradient g;
  while (true) {
    g = safe_grad(oracle, x, y);
    const double grad_norm = g.norm();
    const bool alive = iterate_ok(x, y) && std::isfinite(grad_norm);
    const bool stop_now =
        !alive || grad_norm <= stop.grad_tol || k >= stop.max_iters ||
        (stop.max_wall_time && seconds_since(rec.t0) > *stop.max_wall_time);

    try {
      if (alive && !stop_now && params.beta_check_period > 0 &&
          k % params.beta_check_period == 0) {
        // Doubling test on <grad_y h_beta, grad_y f>; each evaluation
        // charges one g_eval and one hvp_eval.
        int doublings = 0;
        while (true) {
          reg.counters().g_evals += 1;
          reg.counters().hvp_evals += 1;
          const Vec gy = oracle.grad_y(x, y);
          const SecondOrderAction act = oracle.y_dir_second(x, y, gy);
          const double gy_sq = gy.squaredNorm();
          const double quot = gy.dot(act.yy);
          if (mu_hint && gy_sq > 0.0 && quot > -*mu_hint * gy_sq)
            ++curvature_violations;
          const double inner = gy_sq + beta * quot;
          if (inner <= -params.c * gy_sq) break;
          beta *= 2.0;
          reg.set_beta(beta);
          if (++doublings > 60)
            throw ConfigError(
                "run_alg2: beta doubled 60 times without passing the descent "
                "test; the oracle does not look strongly concave in y");
        }
      }

      const double H = F + 0.5 * beta * G;
      const double h_z = at_z.f + 0.5 * beta * at_z.grad_y_sq;
      const double xi = std::max(H, h_z);
      rec.begin_iteration(k, h_z, H, grad_norm, beta, x, y, g);
      if (!alive) {
        status = RunStatus::Diverged;
        break;
      }
      if (grad_norm <= stop.grad_tol) {
        status = RunStatus::Converged;
        break;
      }
      if (k >= stop.max_iters) {
        status = RunStatus::IterLimit;
        break;
      }
      if (stop.max_wall_time && seconds_since(rec.t0) > *stop.max_wall_time) {
        status = RunStatus::TimeLimit;
        break;
      }

      reg.counters().g_evals += 1;  // full gradient consumed at z_k

      const double eta_y0 = mem.eta_y(y, g.y, params.variant, bounds_y);
      if (params.clamp)
        clamp_y = GradClamp{gamma_cap_sq, ls.gamma_y * (params.c + 1.0) *
                                              g.y.squaredNorm() / beta};
      SearchOutcome sy =
          search_y(reg, x, y, g.y, xi, ls.gamma_y * params.c, eta_y0, ls,
                   clamp_y ? &*clamp_y : nullptr);
      Vec y_next = y + sy.step * g.y;

      reg.counters().g_evals += 1;
      Vec gx_half = oracle.grad_x(x, y_next);
      const double eta_x0 = mem.eta_x(x, gx_half, params.variant, bounds_x);
      mem.store(x, y, g.y, gx_half);

      const double y_term =
          ls.gamma_x * params.c * sy.step * g.y.squaredNorm();
      Vec d = -gx_half;
      SearchOutcome sx =
          search_x(reg, x, y_next, d, gx_half, xi, y_term, 0.5 * ls.gamma_x,
                   eta_x0, ls, clamp_x ? &*clamp_x : nullptr);

      x += sx.step * d;
      y = std::move(y_next);
      at_z = std::move(sx.accepted);
      F = zh_average(F, at_z.f, ls.tau);
      G = zh_average(G, at_z.grad_y_sq, ls.tau);
      rec.accept_steps(sy.step, sx.step);
      ++k;
    } catch (const LineSearchError&) {
      status = RunStatus::LineSearchFailed;
      break;
    } catch (const NumericError&) {
      status = RunStatus::Diverged;
      break;
    }
  }
  RunReport r = rec.finish(status, k, reg.counters(), oracle, x, y, g);
  std::ostringstream note;
  note << "beta_final=" << beta;
  if (curvature_violations > 0)
    note << ",y_curvature_violations=" << curvature_violations;
  r.notes = note.str();
  return r;
}

RunReport run_ttgda(const ProblemOracle& oracle, const TtgdaParams& params,
                    const StopRule& stop, const JointPoint& z0) {
  if (!(params.eta_x > 0.0) || !(params.eta_y > 0.0))
    throw ConfigError("run_ttgda: step sizes must be positive");
  stop.validate();

  EvalCounters counters;
  Vec x = z0.x, y = z0.y;
  RunRecorder rec;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::int64_t k = 0;
  RunStatus status = RunStatus::IterLimit;
  FullGradient g;
  while (true) {
    g = safe_grad(oracle, x, y);
    const double grad_norm = g.norm();
    rec.begin_iteration(k, nan, nan, grad_norm, 0.0, x, y, g);
    if (!iterate_ok(x, y) || !std::isfinite(grad_norm)) {
      status = RunStatus::Diverged;
      break;
    }
    if (grad_norm <= stop.grad_tol) {
      status = RunStatus::Converged;
      break;
    }
    if (k >= stop.max_iters) {
      status = RunStatus::IterLimit;
      break;
    }
    if (stop.max_wall_time && seconds_since(rec.t0) > *stop.max_wall_time) {
      status = RunStatus::TimeLimit;
      break;
    }

    counters.g_evals += 1;
    y += params.eta_y * g.y;
    counters.g_evals += 1;
    x -= params.eta_x * oracle.grad_x(x, y);
    rec.accept_steps(params.eta_y, params.eta_x);
    ++k;
  }
  return rec.finish(status, k, counters, oracle, x, y, g);
}

RunReport run_gdbb(const ProblemOracle& oracle, const GdbbParams& params,
                   const StopRule& stop, const JointPoint& z0) {
  if (!(params.mu > 0.0)) throw ConfigError("run_gdbb: mu is required");
  const double beta = params.resolved_beta();
  if (!(beta > 1.0 / params.mu))
    throw ConfigError("run_gdbb: beta must exceed 1/mu");
  if (!(params.gamma > 0.0 && params.gamma < 1.0))
    throw ConfigError("run_gdbb: gamma must lie in (0,1)");
  params.ls.validate();
  stop.validate();

  const LineSearchConfig& ls = params.ls;
  RegularizedObjective reg(oracle, beta);
  Vec x = z0.x, y = z0.y;

  RunRecorder rec;
  MeritBundle at_z = reg.value_bundle(x, y);
  double H = at_z.h;

  Vec prev_w, prev_gh;
  bool have_prev = false;
  const std::optional<double> mu_hint = oracle.mu_hint();
  std::int64_t curvature_violations = 0;

  std::int64_t k = 0;
  RunStatus status = RunStatus::IterLimit;
  FullGradient g;
  while (true) {
    g = safe_grad(oracle, x, y);
    const double grad_norm = g.norm();
    rec.begin_iteration(k, at_z.h, H, grad_norm, beta, x, y, g);
    if (!iterate_ok(x, y) || !std::isfinite(grad_norm)) {
      status = RunStatus::Diverged;
      break;
    }
    if (grad_norm <= stop.grad_tol) {
      status = RunStatus::Converged;
      break;
    }
    if (k >= stop.max_iters) {
      status = RunStatus::IterLimit;
      break;
    }
    if (stop.max_wall_time && seconds_since(rec.t0) > *stop.max_wall_time) {
      status = RunStatus::TimeLimit;
      break;
    }

    try {
      // grad h_beta at w_k: one gradient plus one second-derivative action.
      reg.counters().g_evals += 1;
      reg.counters().hvp_evals += 1;
      const SecondOrderAction act = oracle.y_dir_second(x, y, g.y);
      if (mu_hint && g.y.squaredNorm() > 0.0 &&
          g.y.dot(act.yy) > -*mu_hint * g.y.squaredNorm())
        ++curvature_violations;
      Vec gh(x.size() + y.size());
      gh.head(x.size()) = g.x + beta * act.xy;
      gh.tail(y.size()) = g.y + beta * act.yy;
      if (!all_finite(gh)) {
        status = RunStatus::Diverged;
        break;
      }

      Vec w(x.size() + y.size());
      w.head(x.size()) = x;
      w.tail(y.size()) = y;

      double eta = ls.eta_max_x;
      if (have_prev)
        eta = bb_step(w - prev_w, gh - prev_gh, params.variant, ls.eta_min_x,
                      ls.eta_max_x);
      prev_w = w;
      prev_gh = gh;
      have_prev = true;

      const double gh_sq = gh.squaredNorm();
      const double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                           (1.0 + std::abs(H));
      MeritBundle accepted{};
      double step = eta;
      bool ok = false;
      for (int j = 0; j < ls.max_backtracks; ++j) {
        accepted = reg.value_bundle(x - step * gh.head(x.size()),
                                    y - step * gh.tail(y.size()));
        if (accepted.h <= H - params.gamma * step * gh_sq + slack) {
          rec.accept_steps(step, step);
          ok = true;
          break;
        }
        step *= ls.alpha;
      }
      if (!ok)
        throw LineSearchError("joint line search exhausted max_backtracks",
                              step / ls.alpha, accepted.h, ls.max_backtracks);

      x -= step * gh.head(x.size());
      y -= step * gh.tail(y.size());
      at_z = std::move(accepted);
      H = zh_average(H, at_z.h, ls.tau);
      ++k;
    } catch (const LineSearchError&) {
      status = RunStatus::LineSearchFailed;
      break;
    } catch (const NumericError&) {
      status = RunStatus::Diverged;
      break;
    }
  }
  RunReport r = rec.finish(status, k, reg.counters(), oracle, x, y, g);
  if (curvature_violations > 0) {
    std::ostringstream note;
    note << "y_curvature_violations=" << curvature_violations;
    r.notes = note.str();
  }
  return r;
}

RunReport ttgda_grid_search(const ProblemOracle& oracle,
                            std::span<const double> eta_y_set,
                            std::span<const double> theta_set,
                            const StopRule& stop, const JointPoint& z0) {
  if (eta_y_set.empty() || theta_set.empty())
    throw ConfigError("ttgda_grid_search: grids must be nonempty");

  std::optional<RunReport> best;
  for (const double eta_y : eta_y_set)
    for (const double theta : theta_set) {
      TtgdaParams p{eta_y, theta * eta_y};
      RunReport r = run_ttgda(oracle, p, stop, z0);
      if (!r.converged()) continue;
      if (!best || r.iters < best->iters) {
        std::ostringstream note;
        note << "eta_y=" << eta_y << ",eta_x=" << p.eta_x;
        r.notes = note.str();
        best = std::move(r);
      }
    }
  if (!best)
    throw ConvergenceError("ttgda_grid_search: no grid combination converged",
                           stop.grad_tol);
  return std::move(*best);
}

double estimate_beta0(const ProblemOracle& oracle, const Vec& x, const Vec& y,
                      const Vec& y_prime) {
  const Vec diff = y_prime - y;
  const double dist_sq = diff.squaredNorm();
  if (!(dist_sq > 0.0))
    throw ConfigError("estimate_beta0: y and y_prime must differ");
  const double denom = 2.0 * (oracle.value(x, y) - oracle.value(x, y_prime) +
                              oracle.grad_y(x, y).dot(diff));
  if (!(denom > 0.0) || !std::isfinite(denom))
    throw ConfigError(
        "estimate_beta0: curvature probe is not strongly concave");
  return dist_sq / denom;
}

}  // namespace minimax
