#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mapuq/types.h"

namespace mapuq {

class Dictionary;

enum class OperatorKind { identity, masked_fourier, convolution };

std::string to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(std::string const &name);

//! \brief Linear measurement operator Phi: R^N -> C^M.
//!
//! Fourier-based kinds use the unitary 2-D DFT (1/sqrt(N) both ways). The
//! adjoint returns the real part of Phi^H v, i.e. the adjoint with respect to
//! the real inner product Re<u, v>, which is what gradients of the data term need.
//! Instances are immutable and safe to share between threads.
class ForwardOp {
public:
  static ForwardOp identity(Index rows, Index cols);
  //! \p mask holds flattened (row-major) frequency indices; sorted on construction.
  static ForwardOp masked_fourier(Index rows, Index cols, std::vector<Index> mask);
  //! Periodic convolution; the kernel origin is its centre element (kr/2, kc/2).
  static ForwardOp convolution(Index rows, Index cols, ImageGrid kernel);

  OperatorKind kind() const { return kind_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index image_size() const { return rows_ * cols_; }
  Index measurement_size() const;
  std::vector<Index> const &mask() const { return mask_; }
  ImageGrid const &kernel() const { return kernel_; }

  //! Phi x on a flattened row-major image.
  ComplexVector apply(RealVector const &x) const;
  //! Re(Phi^H v) as a flattened image.
  RealVector adjoint(ComplexVector const &v) const;

private:
  ForwardOp(OperatorKind kind, Index rows, Index cols);

  OperatorKind kind_;
  Index rows_;
  Index cols_;
  std::vector<Index> mask_;
  ImageGrid kernel_;
  ComplexVector kernel_spectrum_;
};

ComplexVector apply(ForwardOp const &op, ImageGrid const &x);
ImageGrid adjoint(ForwardOp const &op, ComplexVector const &v);

//! Power-method estimate of ||Phi Psi||^2 (or ||Phi||^2 without a dictionary).
//! Throws NumericalError when the relative change does not drop below tol.
Real op_norm(ForwardOp const &op, Dictionary const *dict, Real tol, int max_iters = 1000);

//! Uniform random mask of ceil(m_fraction * N) frequencies that always keeps DC.
ForwardOp make_masked_fourier(Index rows, Index cols, Real m_fraction, std::uint64_t seed);

//! Noise level from the peak amplitude: ||x||_inf * 10^(-snr/20).
Real noise_sigma(ImageGrid const &x, Real input_snr_db);

//! y = Phi x + n with circular complex Gaussian n of total variance sigma^2.
MeasurementVector simulate_observation(ForwardOp const &op, ImageGrid const &x,
                                       Real input_snr_db, std::uint64_t seed);

namespace fft {
//! Unitary 2-D DFT of a row-major rows x cols array.
ComplexVector forward(ComplexVector const &x, Index rows, Index cols);
//! Inverse of forward().
ComplexVector inverse(ComplexVector const &x, Index rows, Index cols);
} // namespace fft

} // namespace mapuq
