#include "mapuq/sampler.h"

#include <algorithm>
#include <cmath>

#include "mapuq/rng.h"
#include "mapuq/solver.h"

namespace mapuq {

ChainConfig ChainConfig::with_samples(Index n_samples) {
  ChainConfig cfg;
  cfg.n_samples = n_samples;
  cfg.burn_in = n_samples / 5;
  return cfg;
}

namespace {

struct ChainState {
  RealVector values;
  Real potential = 0; // mu f + g
  RealVector drift;
};

class Langevin {
public:
  Langevin(PosteriorModel const &m, ChainConfig const &cfg) : m_(m), cfg_(cfg), prox_(m.dict()) {}

  ChainState evaluate(RealVector values, Real delta) const {
    ChainState s;
    Real const lambda = cfg_.my_lambda > 0 ? cfg_.my_lambda : delta / 2;
    bool const analysis = m_.prior_form() == PriorForm::analysis;
    RealVector const image = analysis ? values : m_.dict().synthesize(values);
    ComplexVector const residual = m_.residual(image);
    Real const sigma_sq = m_.sigma() * m_.sigma();
    RealVector grad = m_.op().adjoint(residual) / sigma_sq;
    if(!analysis)
      grad = m_.dict().analyze(grad);
    Real const prior = analysis ? m_.dict().analyze(values).lpNorm<1>() : values.lpNorm<1>();
    s.potential = m_.mu() * prior + residual.squaredNorm() / (2 * sigma_sq);

    Real const threshold = lambda * m_.mu();
    RealVector const proximal = analysis
                                    ? prox_(values, threshold, cfg_.prox_iters, 1e-12).value
                                    : soft_threshold(values, threshold);
    s.drift = values - (delta / 2) * (grad + (values - proximal) / lambda);
    s.values = std::move(values);
    return s;
  }

private:
  PosteriorModel const &m_;
  ChainConfig const &cfg_;
  AnalysisProx prox_;
};

void validate(ChainConfig const &cfg) {
  if(!(cfg.n_samples > cfg.burn_in && cfg.burn_in >= 0))
    throw std::invalid_argument("chain needs n_samples > burn_in >= 0");
  if(cfg.thin < 1)
    throw std::invalid_argument("thinning must be >= 1");
  if(!(cfg.step_delta > 0))
    throw std::invalid_argument("step_delta must be > 0");
  if(cfg.my_lambda < 0)
    throw std::invalid_argument("my_lambda must be >= 0");
}

} // namespace

ChainResult run_pxmala(PosteriorModel const &m, ChainConfig const &cfg, std::optional<Point> start) {
  validate(cfg);
  Langevin const langevin(m, cfg);
  CounterRng rng(cfg.seed, 2);

  ChainResult out;
  Real delta = cfg.step_delta;
  ChainState current
      = langevin.evaluate(start ? m.make_point(start->values).values : m.zero_point().values, delta);
  if(!std::isfinite(current.potential))
    throw NumericalError("objective is not finite at the chain start");

  Index const dim = current.values.size();
  Index batch_accepted = 0;
  constexpr Index batch = 50;
  out.objective_trace.reserve(cfg.n_samples);
  out.samples.reserve((cfg.n_samples - cfg.burn_in) / cfg.thin + 1);
  RealVector noise(dim);

  for(Index iter = 0; iter < cfg.n_samples; ++iter) {
    for(Index i = 0; i < dim; ++i)
      noise[i] = rng.normal();
    ChainState proposal = langevin.evaluate(current.drift + std::sqrt(delta) * noise, delta);
    Real const forward = (proposal.values - current.drift).squaredNorm();
    Real const backward = (current.values - proposal.drift).squaredNorm();
    Real const log_ratio
        = current.potential - proposal.potential + (forward - backward) / (2 * delta);
    bool const accept = std::isfinite(proposal.potential) && std::log(rng.uniform()) < log_ratio;
    if(accept)
      current = std::move(proposal);

    bool const burning = iter < cfg.burn_in;
    if(burning) {
      batch_accepted += accept;
      if(cfg.adapt_step && (iter + 1) % batch == 0) {
        Real const rate = static_cast<Real>(batch_accepted) / batch;
        delta *= rate > cfg.target_acceptance ? 1.25 : 0.8;
        batch_accepted = 0;
        current = langevin.evaluate(std::move(current.values), delta);
      }
    } else {
      ++out.proposed;
      out.accepted += accept;
      if((iter - cfg.burn_in) % cfg.thin == 0)
        out.samples.push_back(ImageGrid(m.rows(), m.cols(), m.image_of({m.prior_form(), current.values})));
    }
    out.objective_trace.push_back(current.potential);
  }

  out.step_delta = delta;
  out.acceptance_rate = out.proposed ? static_cast<Real>(out.accepted) / out.proposed : 0;
  if(out.acceptance_rate < 0.1 || out.acceptance_rate > 0.9)
    out.warnings.push_back("acceptance rate " + std::to_string(out.acceptance_rate)
                           + " outside [0.1, 0.9]; adjust step_delta");
  return out;
}

Real empirical_quantile(std::vector<Real> values, Real p) {
  if(values.empty())
    throw std::invalid_argument("quantile of an empty sample");
  if(!(p >= 0 && p <= 1))
    throw std::invalid_argument("quantile level must lie in [0, 1]");
  Real const h = static_cast<Real>(values.size() - 1) * p;
  auto const lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  Real const below = values[lo];
  if(lo + 1 >= values.size())
    return below;
  Real const above = *std::min_element(values.begin() + lo + 1, values.end());
  return below + (h - static_cast<Real>(lo)) * (above - below);
}

CredibleIntervalMap intervals_from_chain(ChainResult const &res, SuperpixelPartition const &part,
                                         Real alpha) {
  if(!(alpha > 0 && alpha < 1))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  auto const needed = static_cast<std::size_t>(std::ceil(50 / alpha));
  if(res.samples.size() < needed)
    throw std::invalid_argument("chain has " + std::to_string(res.samples.size())
                                + " samples; at least " + std::to_string(needed)
                                + " are needed for alpha = " + std::to_string(alpha));
  for(auto const &s : res.samples)
    require_dims(s.rows == part.rows && s.cols == part.cols, "chain samples do not match partition");

  CredibleIntervalMap out;
  out.partition = part;
  out.alpha = alpha;
  std::vector<Real> lower(part.size()), upper(part.size());
  std::vector<Real> means(res.samples.size());
  for(Index i = 0; i < part.size(); ++i) {
    auto const &pixels = part.regions[i];
    for(std::size_t s = 0; s < res.samples.size(); ++s) {
      Real total = 0;
      for(auto const pixel : pixels)
        total += res.samples[s].values[pixel];
      means[s] = total / static_cast<Real>(pixels.size());
    }
    lower[i] = empirical_quantile(means, alpha / 2);
    upper[i] = empirical_quantile(means, 1 - alpha / 2);
    out.intervals.push_back({lower[i], upper[i], false, 0});
  }
  out.xi_minus = assemble_regions(part, lower);
  out.xi_plus = assemble_regions(part, upper);
  return out;
}

} // namespace mapuq
