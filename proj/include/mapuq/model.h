#pragma once

#include <string>

#include "mapuq/dictionaries.h"
#include "mapuq/linops.h"
#include "mapuq/types.h"

namespace mapuq {

enum class PriorForm { analysis, synthesis };

std::string to_string(PriorForm form);
PriorForm prior_form_from_string(std::string const &name);

//! Variable of the posterior: an image (analysis) or coefficients (synthesis).
struct Point {
  PriorForm form = PriorForm::analysis;
  RealVector values;
};

//! \brief Gaussian likelihood with an l1 analysis or synthesis prior.
//!
//! g_y(x) = ||y - Phi x||_2^2 / (2 sigma^2), f(x) = ||Psi^T x||_1 (analysis) or
//! f(a) = ||a||_1 with x = Psi a (synthesis). Immutable; all methods are const.
class PosteriorModel {
public:
  //! Only the quadratic likelihood (q = 2) and the l1 prior (s = 1) are supported.
  PosteriorModel(ForwardOp op, Dictionary dict, PriorForm form, Real mu, MeasurementVector y,
                 int likelihood_exponent = 2, int prior_exponent = 1);

  ForwardOp const &op() const { return op_; }
  Dictionary const &dict() const { return dict_; }
  PriorForm prior_form() const { return form_; }
  Real mu() const { return mu_; }
  Real sigma() const { return y_.sigma; }
  MeasurementVector const &measurement() const { return y_; }
  Index rows() const { return op_.rows(); }
  Index cols() const { return op_.cols(); }
  //! Dimension of the inferred variable: N (analysis) or L (synthesis).
  Index variable_size() const;

  PosteriorModel with_mu(Real mu) const;

  Point zero_point() const;
  Point make_point(RealVector values) const;
  //! x itself, or Psi a.
  RealVector image_of(Point const &p) const;
  //! Canonical variable for an image: x itself, or a = Psi^T x.
  Point point_of(RealVector const &image) const;

  Real likelihood(Point const &p) const;
  Real prior(Point const &p) const;
  Real objective(Point const &p) const { return mu_ * prior(p) + likelihood(p); }
  //! Gradient of g_y with respect to the variable of \p p.
  RealVector likelihood_gradient(Point const &p) const;

  //! g_y for a flattened image, skipping the synthesis mapping.
  Real likelihood_of_image(RealVector const &image) const;
  ComplexVector residual(RealVector const &image) const;

private:
  void check(Point const &p) const;

  ForwardOp op_;
  Dictionary dict_;
  PriorForm form_;
  Real mu_;
  MeasurementVector y_;
};

Real likelihood_g(PosteriorModel const &m, Point const &p);
Real prior_f(PosteriorModel const &m, Point const &p);
Real objective(PosteriorModel const &m, Point const &p);
ImageGrid point_to_image(PosteriorModel const &m, Point const &p);
//! Objective of an image under the model; synthesis models use a = Psi^T x.
Real image_objective(PosteriorModel const &m, ImageGrid const &x);

} // namespace mapuq
