#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace mapuq {

using Real = double;
using Complex = std::complex<double>;
using Index = Eigen::Index;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

//! Raised when array sizes or grid shapes do not agree.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

//! Raised on divergence, non-convergence or an empty credible interval.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Raised on unreadable, unwritable or malformed files.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Real image on a rows x cols grid, stored row-major.
struct ImageGrid {
  Index rows = 0;
  Index cols = 0;
  RealVector values;

  ImageGrid() = default;
  ImageGrid(Index rows, Index cols);
  ImageGrid(Index rows, Index cols, RealVector values);

  static ImageGrid zeros(Index rows, Index cols) { return ImageGrid(rows, cols); }
  static ImageGrid constant(Index rows, Index cols, Real value);

  Index size() const { return rows * cols; }
  Real &operator()(Index r, Index c) { return values[r * cols + c]; }
  Real operator()(Index r, Index c) const { return values[r * cols + c]; }
  bool same_shape(ImageGrid const &other) const {
    return rows == other.rows && cols == other.cols;
  }
};

//! Complex observation y together with the noise standard deviation.
struct MeasurementVector {
  ComplexVector values;
  Real sigma = 1;

  Index size() const { return values.size(); }
};

//! Throws DimensionError with `what` when `ok` is false.
inline void require_dims(bool ok, std::string const &what) {
  if(!ok)
    throw DimensionError(what);
}

} // namespace mapuq
