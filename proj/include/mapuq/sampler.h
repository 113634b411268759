#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mapuq/model.h"
#include "mapuq/uq.h"

namespace mapuq {

struct ChainConfig {
  //! Total iterations, burn-in included.
  Index n_samples = 10000;
  Index burn_in = 2000;
  Real step_delta = 1e-4;
  //! Moreau-Yosida parameter; 0 selects step_delta / 2.
  Real my_lambda = 0;
  Index thin = 1;
  std::uint64_t seed = 1;
  //! Dual iterations for the analysis proximal map inside the drift.
  int prox_iters = 10;
  //! Tune step_delta during burn-in towards target_acceptance (fixed afterwards).
  bool adapt_step = false;
  Real target_acceptance = 0.5;

  //! n_samples with the default 20% burn-in.
  static ChainConfig with_samples(Index n_samples);
};

struct ChainResult {
  //! Post burn-in, thinned.
  std::vector<ImageGrid> samples;
  //! Post burn-in acceptance rate.
  Real acceptance_rate = 0;
  Index accepted = 0;
  Index proposed = 0;
  //! Objective at every iteration, burn-in included.
  std::vector<Real> objective_trace;
  Real step_delta = 0;
  std::vector<std::string> warnings;
};

//! \brief Proximal MALA targeting exp(-mu f - g_y).
//!
//! Proposal: x' ~ N(d(x), delta I) with
//! d(x) = x - delta/2 (grad g(x) + (x - prox_{lambda mu f}(x)) / lambda),
//! i.e. a Langevin step along the Moreau-Yosida envelope of the prior plus the
//! exact likelihood gradient, corrected by Metropolis-Hastings. The analysis
//! prox runs a fixed-budget dual loop from zero, so d is a deterministic function
//! of x and the chain is exact. Starts from \p start or the zero point.
ChainResult run_pxmala(PosteriorModel const &m, ChainConfig const &cfg,
                       std::optional<Point> start = std::nullopt);

//! Linear-interpolation quantile of unsorted values (numpy's default, "type 7").
Real empirical_quantile(std::vector<Real> values, Real p);

//! Per region: (alpha/2, 1 - alpha/2) quantiles of the per-sample region mean.
//! Needs at least 50 / alpha samples.
CredibleIntervalMap intervals_from_chain(ChainResult const &res, SuperpixelPartition const &part,
                                         Real alpha);

} // namespace mapuq
