#pragma once

#include <vector>

#include "mapuq/model.h"
#include "mapuq/solver.h"

namespace mapuq {

//! Approximate HPD level-set threshold for credibility 1 - alpha.
struct HpdThreshold {
  Real alpha = 0.01;
  Real gamma_prime = 0;
  Real objective_at_map = 0;
  Index n_dim = 0;
};

//! objective + sqrt(16 log(3 / alpha)) sqrt(n) + n.
Real hpd_gamma(Real objective_at_map, Index n_dim, Real alpha);

//! n_dim is the dimension of the model variable (N analysis, L synthesis).
HpdThreshold hpd_threshold(PosteriorModel const &m, MapResult const &map_res, Real alpha);

//! objective(m, x) <= gamma'; synthesis models evaluate at a = Psi^T x.
bool in_hpd(PosteriorModel const &m, ImageGrid const &x, HpdThreshold const &th);

//! Disjoint scale x scale tiles in raster order, ragged at the right/bottom edges.
struct SuperpixelPartition {
  Index rows = 0;
  Index cols = 0;
  Index scale = 1;
  Index tiles_down = 0;
  Index tiles_across = 0;
  std::vector<std::vector<Index>> regions;

  Index size() const { return static_cast<Index>(regions.size()); }
  //! Top-left pixel of region i.
  Index region_row(Index i) const { return (i / tiles_across) * scale; }
  Index region_col(Index i) const { return (i % tiles_across) * scale; }
};

SuperpixelPartition partition_grid(Index rows, Index cols, Index scale);

//! \brief phi(xi): objective of the MAP image with region i replaced by the constant xi.
//!
//! The modified image is affine in xi, so phi(xi) = mu ||c0 + xi c1||_1 + quadratic(xi)
//! and each evaluation costs O(support of c1). Every `refresh_every`-th call is a
//! full model evaluation instead, which bounds drift from the affine form.
class RegionObjective {
public:
  RegionObjective(PosteriorModel const &m, RealVector const &map_image,
                  std::vector<Index> const &region, int refresh_every = 32);

  Real operator()(Real xi);
  //! Direct model evaluation, bypassing the affine form.
  Real full(Real xi) const;
  int evaluations() const { return evaluations_; }

private:
  PosteriorModel const &model_;
  RealVector const &map_image_;
  std::vector<Index> const &region_;
  int refresh_every_;
  int evaluations_ = 0;

  Real constant_l1_ = 0;
  std::vector<Real> base_coeffs_;
  std::vector<Real> region_coeffs_;
  Real residual_sq_ = 0;
  Real residual_cross_ = 0;
  Real direction_sq_ = 0;
};

//! Endpoints of {xi >= 0 : phi(xi) <= gamma'}; `empty` marks an infeasible region.
struct LocalInterval {
  Real lower = 0;
  Real upper = 0;
  bool empty = false;
  int evaluations = 0;
  Real length() const { return empty ? 0 : upper - lower; }
};

//! Bisection to absolute tolerance tol. Endpoints are always feasible.
LocalInterval local_interval(PosteriorModel const &m, MapResult const &map_res,
                             HpdThreshold const &th, SuperpixelPartition const &part,
                             Index region, Real tol);

struct CredibleIntervalMap {
  ImageGrid xi_minus;
  ImageGrid xi_plus;
  SuperpixelPartition partition;
  Real alpha = 0;
  std::vector<LocalInterval> intervals;
  //! Regions without any feasible xi; their pixels hold NaN in both grids.
  std::vector<Index> empty_regions;

  ImageGrid length() const;
  Real mean_length() const;
};

//! 1e-4 times the dynamic range of the image (or 1e-4 for a flat image).
Real default_interval_tol(RealVector const &image);

//! Computes every region, fanning out over \p threads workers; the result does
//! not depend on the thread count.
CredibleIntervalMap credible_map(PosteriorModel const &m, MapResult const &map_res,
                                 HpdThreshold const &th, SuperpixelPartition const &part, Real tol,
                                 int threads = 1);

//! Writes each region's value into its pixels.
ImageGrid assemble_regions(SuperpixelPartition const &part, std::vector<Real> const &values);

} // namespace mapuq
