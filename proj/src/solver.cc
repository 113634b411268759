#include "mapuq/solver.h"

#include <cmath>
#include <functional>
#include <limits>

namespace mapuq {

RealVector soft_threshold(RealVector const &v, Real t) {
  if(!(t >= 0))
    throw std::invalid_argument("soft threshold must be non-negative");
  RealVector out(v.size());
  for(Index i = 0; i < v.size(); ++i) {
    Real const magnitude = std::abs(v[i]) - t;
    out[i] = magnitude > 0 ? std::copysign(magnitude, v[i]) : 0.0;
  }
  return out;
}

AnalysisProx::Outcome AnalysisProx::operator()(RealVector const &v, Real t, int max_iters,
                                               Real tol, RealVector *dual) const {
  Outcome outcome;
  if(t == 0) {
    outcome.value = v;
    outcome.converged = true;
    return outcome;
  }
  auto clip = [t](RealVector w) {
    return w.cwiseMax(-t).cwiseMin(t).eval();
  };
  RealVector w = (dual && dual->size() == dict_.coeff_size()) ? clip(*dual)
                                                               : RealVector::Zero(dict_.coeff_size());
  RealVector z = w;
  Real momentum = 1;
  RealVector u = v - dict_.synthesize(w);
  for(int iter = 1; iter <= std::max(1, max_iters); ++iter) {
    RealVector const u_z = v - dict_.synthesize(z);
    RealVector const w_next = clip(z + dict_.analyze(u_z));
    RealVector const u_next = v - dict_.synthesize(w_next);
    Real const change = (u_next - u).norm();
    Real const momentum_next = 0.5 * (1 + std::sqrt(1 + 4 * momentum * momentum));
    z = w_next + ((momentum - 1) / momentum_next) * (w_next - w);
    momentum = momentum_next;
    w = w_next;
    u = u_next;
    outcome.iterations = iter;
    if(change <= tol * std::max(u.norm(), std::numeric_limits<Real>::min())) {
      outcome.converged = true;
      break;
    }
  }
  if(dual)
    *dual = w;
  outcome.value = std::move(u);
  return outcome;
}

Real variable_op_norm(PosteriorModel const &m, SolverConfig const &cfg) {
  if(cfg.op_norm_sq)
    return *cfg.op_norm_sq;
  return op_norm(m.op(), m.prior_form() == PriorForm::synthesis ? &m.dict() : nullptr,
                 cfg.norm_tol);
}

Real likelihood_lipschitz(PosteriorModel const &m, SolverConfig const &cfg) {
  return variable_op_norm(m, cfg) / (m.sigma() * m.sigma());
}

namespace {

using ProxStep = std::function<RealVector(RealVector const &v, Real threshold, bool &inner_ok)>;

void validate(SolverConfig const &cfg) {
  if(cfg.max_iters < 1)
    throw std::invalid_argument("max_iters must be >= 1");
  if(!(cfg.rel_tol > 0))
    throw std::invalid_argument("rel_tol must be > 0");
  if(!(cfg.step_safety > 0 && cfg.step_safety <= 1))
    throw std::invalid_argument("step_safety must lie in (0, 1]");
  if(cfg.stall_window < 1)
    throw std::invalid_argument("stall_window must be >= 1");
}

// Monotone FISTA with a function-value restart.
MapResult forward_backward(PosteriorModel const &m, SolverConfig const &cfg,
                           std::optional<Point> start, ProxStep const &prox) {
  validate(cfg);
  Real const lipschitz = likelihood_lipschitz(m, cfg);
  if(!(lipschitz > 0) || !std::isfinite(lipschitz))
    throw NumericalError("likelihood gradient has zero or non-finite Lipschitz constant");
  Real const step = cfg.step_safety / lipschitz;
  Real const threshold = step * m.mu();

  MapResult result;
  Point x = start ? m.make_point(start->values) : m.zero_point();
  Real fx = m.objective(x);
  if(!std::isfinite(fx))
    throw NumericalError("objective is not finite at the starting point");
  result.objective_trace.push_back(fx);

  auto forward_backward_step = [&](Point const &from, Point &to, Real &f_to) {
    bool inner_ok = true;
    RealVector const moved = from.values - step * m.likelihood_gradient(from);
    to = Point{m.prior_form(), prox(moved, threshold, inner_ok)};
    if(!inner_ok)
      ++result.inner_unconverged;
    f_to = m.objective(to);
    if(!std::isfinite(f_to))
      throw NumericalError("objective diverged (non-finite); step size too large?");
  };

  Point y = x;
  Real momentum = 1;
  int stalled = 0;
  for(int iter = 1; iter <= cfg.max_iters; ++iter) {
    Point z;
    Real fz;
    forward_backward_step(y, z, fz);
    if(fz > fx) {
      // momentum overshot: restart from the current iterate
      momentum = 1;
      forward_backward_step(x, z, fz);
      if(fz > fx) {
        z = x;
        fz = fx;
      }
    }
    Point const previous = std::move(x);
    Real const f_previous = fx;
    x = std::move(z);
    fx = fz;
    Real const momentum_next = 0.5 * (1 + std::sqrt(1 + 4 * momentum * momentum));
    y = Point{m.prior_form(),
              x.values + ((momentum - 1) / momentum_next) * (x.values - previous.values)};
    momentum = momentum_next;

    result.objective_trace.push_back(fx);
    result.iterations = iter;
    Real const scale = std::max(std::abs(fx), std::numeric_limits<Real>::min());
    stalled = (std::abs(f_previous - fx) / scale < cfg.rel_tol) ? stalled + 1 : 0;
    if(stalled >= cfg.stall_window) {
      result.converged = true;
      break;
    }
  }
  result.objective_value = m.objective(x);
  result.point = std::move(x);
  return result;
}

} // namespace

MapResult solve_map_synthesis(PosteriorModel const &m, SolverConfig const &cfg,
                              std::optional<Point> start) {
  if(m.prior_form() != PriorForm::synthesis)
    throw std::invalid_argument("solve_map_synthesis needs a synthesis model");
  return forward_backward(m, cfg, std::move(start),
                          [](RealVector const &v, Real t, bool &) { return soft_threshold(v, t); });
}

MapResult solve_map_analysis(PosteriorModel const &m, SolverConfig const &cfg,
                             std::optional<Point> start) {
  if(m.prior_form() != PriorForm::analysis)
    throw std::invalid_argument("solve_map_analysis needs an analysis model");
  AnalysisProx const prox(m.dict());
  RealVector dual;
  return forward_backward(m, cfg, std::move(start),
                          [&](RealVector const &v, Real t, bool &inner_ok) {
                            auto outcome = prox(v, t, cfg.inner_iters, cfg.inner_tol, &dual);
                            inner_ok = outcome.converged;
                            return std::move(outcome.value);
                          });
}

MapResult solve_map(PosteriorModel const &m, SolverConfig const &cfg, std::optional<Point> start) {
  return m.prior_form() == PriorForm::analysis ? solve_map_analysis(m, cfg, std::move(start))
                                               : solve_map_synthesis(m, cfg, std::move(start));
}

Real mu_update(Index n, Real prior_value, SolverConfig const &cfg) {
  Real const denominator = prior_value + cfg.beta_hp;
  if(denominator == 0)
    throw NumericalError("mu update has zero denominator f(x) + beta");
  return (static_cast<Real>(n) / cfg.k_hp + cfg.gamma_hp - 1) / denominator;
}

MuSelection select_mu(PosteriorModel const &model_template, SolverConfig const &cfg) {
  if(cfg.mu_select_iters < 1)
    throw std::invalid_argument("mu_select_iters must be >= 1");
  if(!(cfg.initial_mu > 0))
    throw std::invalid_argument("initial mu must be > 0");
  SolverConfig solve_cfg = cfg;
  solve_cfg.op_norm_sq = variable_op_norm(model_template, cfg);

  MuSelection selection;
  Real mu = cfg.initial_mu;
  selection.mu_trace.push_back(mu);
  std::optional<Point> warm;
  Index const n = model_template.variable_size();
  for(int i = 1; i <= cfg.mu_select_iters; ++i) {
    auto const model = model_template.with_mu(mu);
    auto result = solve_map(model, solve_cfg, warm);
    mu = mu_update(n, model.prior(result.point), cfg);
    selection.mu_trace.push_back(mu);
    warm = std::move(result.point);
  }
  selection.mu = mu;
  selection.result = solve_map(model_template.with_mu(mu), solve_cfg);
  return selection;
}

} // namespace mapuq
