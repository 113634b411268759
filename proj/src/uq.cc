#include "mapuq/uq.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace mapuq {

Real hpd_gamma(Real objective_at_map, Index n_dim, Real alpha) {
  if(!(alpha > 0 && alpha < 1))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  auto const n = static_cast<Real>(n_dim);
  return objective_at_map + std::sqrt(16 * std::log(3 / alpha)) * std::sqrt(n) + n;
}

HpdThreshold hpd_threshold(PosteriorModel const &m, MapResult const &map_res, Real alpha) {
  HpdThreshold th;
  th.alpha = alpha;
  th.objective_at_map = map_res.objective_value;
  th.n_dim = m.variable_size();
  th.gamma_prime = hpd_gamma(th.objective_at_map, th.n_dim, alpha);
  return th;
}

bool in_hpd(PosteriorModel const &m, ImageGrid const &x, HpdThreshold const &th) {
  return image_objective(m, x) <= th.gamma_prime;
}

SuperpixelPartition partition_grid(Index rows, Index cols, Index scale) {
  require_dims(rows >= 1 && cols >= 1, "grid dimensions must be positive");
  if(scale < 1)
    throw std::invalid_argument("superpixel scale must be >= 1");
  SuperpixelPartition part;
  part.rows = rows;
  part.cols = cols;
  part.scale = scale;
  part.tiles_down = (rows + scale - 1) / scale;
  part.tiles_across = (cols + scale - 1) / scale;
  part.regions.reserve(part.tiles_down * part.tiles_across);
  for(Index tr = 0; tr < part.tiles_down; ++tr)
    for(Index tc = 0; tc < part.tiles_across; ++tc) {
      std::vector<Index> region;
      for(Index r = tr * scale; r < std::min(rows, (tr + 1) * scale); ++r)
        for(Index c = tc * scale; c < std::min(cols, (tc + 1) * scale); ++c)
          region.push_back(r * cols + c);
      part.regions.push_back(std::move(region));
    }
  return part;
}

RegionObjective::RegionObjective(PosteriorModel const &m, RealVector const &map_image,
                                 std::vector<Index> const &region, int refresh_every)
    : model_(m), map_image_(map_image), region_(region), refresh_every_(refresh_every) {
  require_dims(map_image.size() == m.op().image_size(), "MAP image does not match model");
  RealVector base = map_image;
  RealVector indicator = RealVector::Zero(map_image.size());
  for(auto const pixel : region) {
    base[pixel] = 0;
    indicator[pixel] = 1;
  }
  Dictionary const &dict = m.dict();
  RealVector const c0 = dict.analyze(base);
  RealVector const c1 = dict.analyze(indicator);
  for(Index j = 0; j < c0.size(); ++j) {
    if(c1[j] != 0) {
      base_coeffs_.push_back(c0[j]);
      region_coeffs_.push_back(c1[j]);
    } else {
      constant_l1_ += std::abs(c0[j]);
    }
  }
  // synthesis models see the image through Psi Psi^T
  bool const synthesis = m.prior_form() == PriorForm::synthesis;
  ComplexVector const r0 = m.residual(synthesis ? dict.synthesize(c0) : base);
  ComplexVector const p = m.op().apply(synthesis ? dict.synthesize(c1) : indicator);
  residual_sq_ = r0.squaredNorm();
  residual_cross_ = r0.dot(p).real();
  direction_sq_ = p.squaredNorm();
}

Real RegionObjective::operator()(Real xi) {
  ++evaluations_;
  if(refresh_every_ > 0 && evaluations_ % refresh_every_ == 0)
    return full(xi);
  Real l1 = constant_l1_;
  for(std::size_t j = 0; j < base_coeffs_.size(); ++j)
    l1 += std::abs(base_coeffs_[j] + xi * region_coeffs_[j]);
  Real const sigma = model_.sigma();
  Real const data
      = std::max(0.0, residual_sq_ + 2 * xi * residual_cross_ + xi * xi * direction_sq_)
        / (2 * sigma * sigma);
  return model_.mu() * l1 + data;
}

Real RegionObjective::full(Real xi) const {
  RealVector image = map_image_;
  for(auto const pixel : region_)
    image[pixel] = xi;
  return model_.objective(model_.point_of(image));
}

namespace {

// Shrinks [feasible, infeasible] (in either order) to width <= tol; returns the feasible end.
Real bisect(RegionObjective &phi, Real gamma, Real feasible, Real infeasible, Real tol) {
  while(std::abs(infeasible - feasible) > tol) {
    Real const mid = 0.5 * (feasible + infeasible);
    if(mid == feasible || mid == infeasible)
      break;
    (phi(mid) <= gamma ? feasible : infeasible) = mid;
  }
  return feasible;
}

// Minimiser of a convex function on [lo, hi] by golden-section search.
Real golden_minimise(RegionObjective &phi, Real lo, Real hi, Real tol) {
  Real const ratio = 1 / std::numbers::phi;
  Real a = hi - ratio * (hi - lo), b = lo + ratio * (hi - lo);
  Real fa = phi(a), fb = phi(b);
  while(hi - lo > tol) {
    if(fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - ratio * (hi - lo);
      fa = phi(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + ratio * (hi - lo);
      fb = phi(b);
    }
  }
  return fa <= fb ? a : b;
}

constexpr int max_doublings = 60;

} // namespace

LocalInterval local_interval(PosteriorModel const &m, MapResult const &map_res,
                             HpdThreshold const &th, SuperpixelPartition const &part, Index region,
                             Real tol) {
  if(region < 0 || region >= part.size())
    throw std::out_of_range("region index " + std::to_string(region) + " out of range");
  if(!(tol > 0))
    throw std::invalid_argument("interval tolerance must be > 0");
  require_dims(part.rows == m.rows() && part.cols == m.cols(), "partition does not match model");

  RealVector const map_image = m.image_of(map_res.point);
  auto const &pixels = part.regions[region];
  RegionObjective phi(m, map_image, pixels);
  Real const gamma = th.gamma_prime;

  Real mean = 0;
  for(auto const pixel : pixels)
    mean += map_image[pixel];
  mean /= static_cast<Real>(pixels.size());
  Real const range = std::max(map_image.maxCoeff() - map_image.minCoeff(), tol);

  LocalInterval out;
  Real inside = std::max(mean, 0.0);
  if(phi(inside) > gamma) {
    // the plug-in value is infeasible: look for the minimiser of phi on [0, inf)
    Real hi = inside + range;
    int k = 0;
    while(phi(2 * hi) < phi(hi)) {
      hi *= 2;
      if(++k > max_doublings)
        throw NumericalError("could not bracket the minimum of the region objective");
    }
    inside = golden_minimise(phi, 0, 2 * hi, tol);
    if(phi(inside) > gamma && phi(0) > gamma) {
      out.empty = true;
      out.evaluations = phi.evaluations();
      return out;
    }
    if(phi(inside) > gamma)
      inside = 0;
  }

  out.lower = phi(0) <= gamma ? 0 : bisect(phi, gamma, inside, 0, tol);

  Real step = range;
  int doublings = 0;
  while(phi(inside + step) <= gamma) {
    step *= 2;
    if(++doublings > max_doublings)
      throw NumericalError("upper credible bound did not bracket after 60 doublings");
  }
  out.upper = bisect(phi, gamma, inside, inside + step, tol);
  out.evaluations = phi.evaluations();
  return out;
}

ImageGrid assemble_regions(SuperpixelPartition const &part, std::vector<Real> const &values) {
  require_dims(static_cast<Index>(values.size()) == part.size(), "one value per region expected");
  ImageGrid grid(part.rows, part.cols);
  for(Index i = 0; i < part.size(); ++i)
    for(auto const pixel : part.regions[i])
      grid.values[pixel] = values[i];
  return grid;
}

ImageGrid CredibleIntervalMap::length() const {
  return ImageGrid(xi_plus.rows, xi_plus.cols, xi_plus.values - xi_minus.values);
}

Real CredibleIntervalMap::mean_length() const {
  Real total = 0;
  Index count = 0;
  for(Index i = 0; i < partition.size(); ++i) {
    if(intervals[i].empty)
      continue;
    total += intervals[i].length() * static_cast<Real>(partition.regions[i].size());
    count += static_cast<Index>(partition.regions[i].size());
  }
  return count ? total / static_cast<Real>(count) : std::numeric_limits<Real>::quiet_NaN();
}

Real default_interval_tol(RealVector const &image) {
  Real const range = image.size() ? image.maxCoeff() - image.minCoeff() : 0;
  return 1e-4 * (range > 0 ? range : 1);
}

CredibleIntervalMap credible_map(PosteriorModel const &m, MapResult const &map_res,
                                 HpdThreshold const &th, SuperpixelPartition const &part, Real tol,
                                 int threads) {
  std::vector<LocalInterval> intervals(part.size());
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for(Index i = next++; i < part.size(); i = next++) {
      try {
        intervals[i] = local_interval(m, map_res, th, part, i, tol);
      } catch(...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if(!failure)
          failure = std::current_exception();
        next = part.size();
      }
    }
  };
  int const workers = std::max(1, std::min<int>(threads, static_cast<int>(part.size())));
  if(workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for(int t = 0; t < workers; ++t)
      pool.emplace_back(worker);
  }
  if(failure)
    std::rethrow_exception(failure);

  CredibleIntervalMap out;
  out.partition = part;
  out.alpha = th.alpha;
  std::vector<Real> lower(part.size()), upper(part.size());
  Real const nan = std::numeric_limits<Real>::quiet_NaN();
  for(Index i = 0; i < part.size(); ++i) {
    lower[i] = intervals[i].empty ? nan : intervals[i].lower;
    upper[i] = intervals[i].empty ? nan : intervals[i].upper;
    if(intervals[i].empty)
      out.empty_regions.push_back(i);
  }
  out.xi_minus = assemble_regions(part, lower);
  out.xi_plus = assemble_regions(part, upper);
  out.intervals = std::move(intervals);
  return out;
}

} // namespace mapuq
