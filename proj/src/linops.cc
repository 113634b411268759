#include "mapuq/linops.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include <fftw3.h>

#include "mapuq/dictionaries.h"
#include "mapuq/rng.h"

namespace mapuq {

namespace fft {
namespace {

// FFTW planning is not thread-safe, execution on new arrays is. Plans are
// created once per shape and kept for the lifetime of the process.
fftw_plan cached_plan(Index rows, Index cols, int sign) {
  static std::mutex mutex;
  static std::map<std::tuple<Index, Index, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto const key = std::make_tuple(rows, cols, sign);
  auto found = plans.find(key);
  if(found != plans.end())
    return found->second;
  auto *in = fftw_alloc_complex(rows * cols);
  auto *out = fftw_alloc_complex(rows * cols);
  auto plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), in, out, sign,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  if(!plan)
    throw NumericalError("FFTW could not create a plan");
  plans.emplace(key, plan);
  return plan;
}

ComplexVector transform(ComplexVector const &x, Index rows, Index cols, int sign) {
  require_dims(x.size() == rows * cols, "FFT input size does not match grid");
  ComplexVector in = x;
  ComplexVector out(x.size());
  fftw_execute_dft(cached_plan(rows, cols, sign), reinterpret_cast<fftw_complex *>(in.data()),
                   reinterpret_cast<fftw_complex *>(out.data()));
  out /= std::sqrt(static_cast<Real>(rows * cols));
  return out;
}

} // namespace

ComplexVector forward(ComplexVector const &x, Index rows, Index cols) {
  return transform(x, rows, cols, FFTW_FORWARD);
}

ComplexVector inverse(ComplexVector const &x, Index rows, Index cols) {
  return transform(x, rows, cols, FFTW_BACKWARD);
}

} // namespace fft

std::string to_string(OperatorKind kind) {
  switch(kind) {
  case OperatorKind::identity: return "identity";
  case OperatorKind::masked_fourier: return "masked_fourier";
  case OperatorKind::convolution: return "convolution";
  }
  return {};
}

OperatorKind operator_kind_from_string(std::string const &name) {
  if(name == "identity")
    return OperatorKind::identity;
  if(name == "masked_fourier")
    return OperatorKind::masked_fourier;
  if(name == "convolution")
    return OperatorKind::convolution;
  throw std::invalid_argument("unknown operator kind '" + name + "'");
}

ForwardOp::ForwardOp(OperatorKind kind, Index rows, Index cols)
    : kind_(kind), rows_(rows), cols_(cols) {
  require_dims(rows >= 1 && cols >= 1, "operator dimensions must be positive");
}

ForwardOp ForwardOp::identity(Index rows, Index cols) {
  return ForwardOp(OperatorKind::identity, rows, cols);
}

ForwardOp ForwardOp::masked_fourier(Index rows, Index cols, std::vector<Index> mask) {
  ForwardOp op(OperatorKind::masked_fourier, rows, cols);
  std::sort(mask.begin(), mask.end());
  require_dims(!mask.empty(), "mask must retain at least one frequency");
  require_dims(std::adjacent_find(mask.begin(), mask.end()) == mask.end(),
               "mask indices must be unique");
  require_dims(mask.front() >= 0 && mask.back() < rows * cols, "mask index out of range");
  op.mask_ = std::move(mask);
  return op;
}

ForwardOp ForwardOp::convolution(Index rows, Index cols, ImageGrid kernel) {
  ForwardOp op(OperatorKind::convolution, rows, cols);
  require_dims(kernel.rows <= rows && kernel.cols <= cols, "kernel larger than image");
  ComplexVector padded = ComplexVector::Zero(rows * cols);
  Index const cr = kernel.rows / 2, cc = kernel.cols / 2;
  for(Index r = 0; r < kernel.rows; ++r)
    for(Index c = 0; c < kernel.cols; ++c) {
      Index const pr = ((r - cr) % rows + rows) % rows;
      Index const pc = ((c - cc) % cols + cols) % cols;
      padded[pr * cols + pc] += kernel(r, c);
    }
  // unnormalised DFT of the kernel: circular convolution is diagonal with these entries
  op.kernel_spectrum_ = fft::forward(padded, rows, cols) * std::sqrt(static_cast<Real>(rows * cols));
  op.kernel_ = std::move(kernel);
  return op;
}

Index ForwardOp::measurement_size() const {
  return kind_ == OperatorKind::masked_fourier ? static_cast<Index>(mask_.size()) : image_size();
}

ComplexVector ForwardOp::apply(RealVector const &x) const {
  require_dims(x.size() == image_size(), "operator applied to image of " + std::to_string(x.size())
                                             + " pixels, expected "
                                             + std::to_string(image_size()));
  switch(kind_) {
  case OperatorKind::identity: return x.cast<Complex>();
  case OperatorKind::masked_fourier: {
    ComplexVector const spectrum = fft::forward(x.cast<Complex>(), rows_, cols_);
    ComplexVector out(mask_.size());
    for(std::size_t j = 0; j < mask_.size(); ++j)
      out[j] = spectrum[mask_[j]];
    return out;
  }
  case OperatorKind::convolution: {
    ComplexVector spectrum = fft::forward(x.cast<Complex>(), rows_, cols_);
    spectrum.array() *= kernel_spectrum_.array();
    return fft::inverse(spectrum, rows_, cols_);
  }
  }
  return {};
}

RealVector ForwardOp::adjoint(ComplexVector const &v) const {
  require_dims(v.size() == measurement_size(), "adjoint applied to vector of length "
                                                   + std::to_string(v.size()) + ", expected "
                                                   + std::to_string(measurement_size()));
  switch(kind_) {
  case OperatorKind::identity: return v.real();
  case OperatorKind::masked_fourier: {
    ComplexVector spectrum = ComplexVector::Zero(image_size());
    for(std::size_t j = 0; j < mask_.size(); ++j)
      spectrum[mask_[j]] = v[j];
    return fft::inverse(spectrum, rows_, cols_).real();
  }
  case OperatorKind::convolution: {
    ComplexVector spectrum = fft::forward(v, rows_, cols_);
    spectrum.array() *= kernel_spectrum_.array().conjugate();
    return fft::inverse(spectrum, rows_, cols_).real();
  }
  }
  return {};
}

ComplexVector apply(ForwardOp const &op, ImageGrid const &x) {
  require_dims(x.rows == op.rows() && x.cols == op.cols(), "image grid does not match operator");
  return op.apply(x.values);
}

ImageGrid adjoint(ForwardOp const &op, ComplexVector const &v) {
  return ImageGrid(op.rows(), op.cols(), op.adjoint(v));
}

Real op_norm(ForwardOp const &op, Dictionary const *dict, Real tol, int max_iters) {
  if(!(tol > 0))
    throw std::invalid_argument("op_norm tolerance must be positive");
  if(dict)
    require_dims(dict->rows() == op.rows() && dict->cols() == op.cols(),
                 "dictionary does not match operator");
  Index const n = dict ? dict->coeff_size() : op.image_size();
  auto normal_op = [&](RealVector const &v) -> RealVector {
    if(!dict)
      return op.adjoint(op.apply(v));
    return dict->analyze(op.adjoint(op.apply(dict->synthesize(v))));
  };

  CounterRng rng(0x5eed);
  RealVector v(n);
  for(Index i = 0; i < n; ++i)
    v[i] = rng.normal();
  v.normalize();

  Real estimate = 0;
  for(int iter = 0; iter < max_iters; ++iter) {
    RealVector w = normal_op(v);
    Real const next = w.norm();
    if(next == 0)
      return 0;
    if(iter > 0 && std::abs(next - estimate) < tol * next)
      return next;
    estimate = next;
    v = w / next;
  }
  throw NumericalError("power method did not converge in " + std::to_string(max_iters)
                       + " iterations");
}

ForwardOp make_masked_fourier(Index rows, Index cols, Real m_fraction, std::uint64_t seed) {
  if(!(m_fraction > 0 && m_fraction <= 1))
    throw std::invalid_argument("m_fraction must lie in (0, 1]");
  Index const n = rows * cols;
  // the small offset keeps exact products such as 0.1 * 100 from rounding up
  auto count = static_cast<Index>(std::ceil(m_fraction * static_cast<Real>(n) - 1e-9));
  count = std::clamp<Index>(count, 1, n);

  std::vector<Index> pool(n - 1);
  std::iota(pool.begin(), pool.end(), Index{1});
  CounterRng rng(seed, 0);
  std::vector<Index> mask{0};
  mask.reserve(count);
  for(Index i = 0; i + 1 < count; ++i) {
    auto const j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - 1 - i)));
    std::swap(pool[i], pool[j]);
    mask.push_back(pool[i]);
  }
  return ForwardOp::masked_fourier(rows, cols, std::move(mask));
}

Real noise_sigma(ImageGrid const &x, Real input_snr_db) {
  if(!std::isfinite(input_snr_db))
    throw std::invalid_argument("input SNR must be finite");
  Real const peak = x.values.cwiseAbs().maxCoeff();
  if(peak == 0)
    throw std::invalid_argument("cannot derive a noise level from an all-zero image");
  return peak * std::pow(10.0, -input_snr_db / 20.0);
}

MeasurementVector simulate_observation(ForwardOp const &op, ImageGrid const &x,
                                       Real input_snr_db, std::uint64_t seed) {
  MeasurementVector y;
  y.sigma = noise_sigma(x, input_snr_db);
  y.values = apply(op, x);
  CounterRng rng(seed, 1);
  Real const component_sd = y.sigma / std::sqrt(2.0);
  for(Index j = 0; j < y.values.size(); ++j) {
    Real const re = rng.normal();
    Real const im = rng.normal();
    y.values[j] += component_sd * Complex(re, im);
  }
  return y;
}

} // namespace mapuq
