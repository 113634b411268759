#include "mapuq/model.h"

#include <cmath>

namespace mapuq {

std::string to_string(PriorForm form) {
  return form == PriorForm::analysis ? "analysis" : "synthesis";
}

PriorForm prior_form_from_string(std::string const &name) {
  if(name == "analysis")
    return PriorForm::analysis;
  if(name == "synthesis")
    return PriorForm::synthesis;
  throw std::invalid_argument("unknown prior form '" + name + "'");
}

PosteriorModel::PosteriorModel(ForwardOp op, Dictionary dict, PriorForm form, Real mu,
                               MeasurementVector y, int likelihood_exponent, int prior_exponent)
    : op_(std::move(op)), dict_(std::move(dict)), form_(form), mu_(mu), y_(std::move(y)) {
  if(likelihood_exponent != 2)
    throw std::invalid_argument("only the quadratic likelihood (q = 2) is supported");
  if(prior_exponent != 1)
    throw std::invalid_argument("only the l1 prior (s = 1) is supported");
  if(!(mu_ >= 0) || !std::isfinite(mu_))
    throw std::invalid_argument("regularisation parameter mu must be finite and >= 0");
  if(!(y_.sigma > 0) || !std::isfinite(y_.sigma))
    throw std::invalid_argument("noise sigma must be finite and > 0");
  require_dims(dict_.rows() == op_.rows() && dict_.cols() == op_.cols(),
               "dictionary and operator dimensions differ");
  require_dims(y_.size() == op_.measurement_size(),
               "measurement length " + std::to_string(y_.size()) + " does not match operator ("
                   + std::to_string(op_.measurement_size()) + ")");
}

Index PosteriorModel::variable_size() const {
  return form_ == PriorForm::analysis ? op_.image_size() : dict_.coeff_size();
}

PosteriorModel PosteriorModel::with_mu(Real mu) const {
  PosteriorModel copy = *this;
  if(!(mu >= 0) || !std::isfinite(mu))
    throw std::invalid_argument("regularisation parameter mu must be finite and >= 0");
  copy.mu_ = mu;
  return copy;
}

Point PosteriorModel::zero_point() const { return {form_, RealVector::Zero(variable_size())}; }

Point PosteriorModel::make_point(RealVector values) const {
  Point p{form_, std::move(values)};
  check(p);
  return p;
}

void PosteriorModel::check(Point const &p) const {
  require_dims(p.form == form_, "point form does not match model prior form");
  require_dims(p.values.size() == variable_size(),
               "point has length " + std::to_string(p.values.size()) + ", expected "
                   + std::to_string(variable_size()));
}

RealVector PosteriorModel::image_of(Point const &p) const {
  check(p);
  return form_ == PriorForm::analysis ? p.values : dict_.synthesize(p.values);
}

Point PosteriorModel::point_of(RealVector const &image) const {
  require_dims(image.size() == op_.image_size(), "image size does not match model");
  return {form_, form_ == PriorForm::analysis ? image : dict_.analyze(image)};
}

ComplexVector PosteriorModel::residual(RealVector const &image) const {
  return (op_.apply(image) - y_.values).eval();
}

Real PosteriorModel::likelihood_of_image(RealVector const &image) const {
  return residual(image).squaredNorm() / (2 * y_.sigma * y_.sigma);
}

Real PosteriorModel::likelihood(Point const &p) const { return likelihood_of_image(image_of(p)); }

Real PosteriorModel::prior(Point const &p) const {
  check(p);
  return form_ == PriorForm::analysis ? dict_.analyze(p.values).lpNorm<1>()
                                      : p.values.lpNorm<1>();
}

RealVector PosteriorModel::likelihood_gradient(Point const &p) const {
  RealVector const image = image_of(p);
  RealVector grad = op_.adjoint(op_.apply(image) - y_.values) / (y_.sigma * y_.sigma);
  return form_ == PriorForm::analysis ? grad : dict_.analyze(grad);
}

Real likelihood_g(PosteriorModel const &m, Point const &p) { return m.likelihood(p); }
Real prior_f(PosteriorModel const &m, Point const &p) { return m.prior(p); }
Real objective(PosteriorModel const &m, Point const &p) { return m.objective(p); }

ImageGrid point_to_image(PosteriorModel const &m, Point const &p) {
  return ImageGrid(m.rows(), m.cols(), m.image_of(p));
}

Real image_objective(PosteriorModel const &m, ImageGrid const &x) {
  require_dims(x.rows == m.rows() && x.cols == m.cols(), "image grid does not match model");
  return m.objective(m.point_of(x.values));
}

} // namespace mapuq
