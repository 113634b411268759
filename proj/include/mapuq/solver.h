#pragma once

#include <optional>
#include <vector>

#include "mapuq/model.h"

namespace mapuq {

struct SolverConfig {
  int max_iters = 5000;
  //! Stop once the relative objective change stays below this for `stall_window` iterations.
  Real rel_tol = 1e-8;
  int stall_window = 5;
  //! Step size is step_safety / Lipschitz(grad g).
  Real step_safety = 1.0;
  //! Dual iterations for the analysis proximal map, and their relative tolerance.
  int inner_iters = 50;
  Real inner_tol = 1e-8;
  //! Automatic mu selection.
  int mu_select_iters = 10;
  Real initial_mu = 1;
  Real gamma_hp = 1;
  Real beta_hp = 1;
  Real k_hp = 1;
  //! Tolerance of the power method behind the step size.
  Real norm_tol = 1e-10;
  //! ||Phi||^2 (analysis) or ||Phi Psi||^2 (synthesis); estimated when absent.
  std::optional<Real> op_norm_sq;
};

struct MapResult {
  Point point;
  Real objective_value = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<Real> objective_trace;
  //! Outer iterations whose inner dual loop hit inner_iters before inner_tol.
  int inner_unconverged = 0;
};

struct MuSelection {
  Real mu = 0;
  MapResult result;
  std::vector<Real> mu_trace;
};

//! sign(v) * max(|v| - t, 0) componentwise.
RealVector soft_threshold(RealVector const &v, Real t);

//! \brief Proximal map of t * ||Psi^T . ||_1 by accelerated projected gradient on the dual.
//!
//! Solves min_u 1/2 ||u - v||^2 + t ||Psi^T u||_1 through u = v - Psi w with
//! ||w||_inf <= t. The dual step is 1 since every supported dictionary has
//! ||Psi|| = 1. With an orthonormal Psi the first iteration is exact.
class AnalysisProx {
public:
  struct Outcome {
    RealVector value;
    int iterations = 0;
    bool converged = false;
  };

  explicit AnalysisProx(Dictionary const &dict) : dict_(dict) {}

  //! \p dual, when given, is both the warm start and the returned dual iterate.
  Outcome operator()(RealVector const &v, Real t, int max_iters, Real tol,
                     RealVector *dual = nullptr) const;

private:
  Dictionary const &dict_;
};

//! ||Phi||^2 or ||Phi Psi||^2 depending on the prior form (cfg.op_norm_sq when set).
Real variable_op_norm(PosteriorModel const &m, SolverConfig const &cfg);
//! Lipschitz constant of grad g_y for the model's variable.
Real likelihood_lipschitz(PosteriorModel const &m, SolverConfig const &cfg);

MapResult solve_map_synthesis(PosteriorModel const &m, SolverConfig const &cfg,
                              std::optional<Point> start = std::nullopt);
MapResult solve_map_analysis(PosteriorModel const &m, SolverConfig const &cfg,
                             std::optional<Point> start = std::nullopt);
//! Dispatches on the model's prior form.
MapResult solve_map(PosteriorModel const &m, SolverConfig const &cfg,
                    std::optional<Point> start = std::nullopt);

//! One hierarchical-Bayes update: (n/k + gamma - 1) / (f + beta).
Real mu_update(Index n, Real prior_value, SolverConfig const &cfg);

//! \brief Alternates MAP estimation with the mu update starting from cfg.initial_mu.
//!
//! n is the dimension of the inferred variable (pixels for analysis, coefficients
//! for synthesis). Intermediate solves are warm-started; the returned result is
//! a cold-started solve at the final mu, identical to solve_map at that mu.
MuSelection select_mu(PosteriorModel const &model_template, SolverConfig const &cfg);

} // namespace mapuq
