#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unistd.h>

#include "mapuq/dictionaries.h"
#include "mapuq/linops.h"
#include "mapuq/model.h"
#include "mapuq/rng.h"

namespace mapuq::test {

inline RealVector random_vector(Index n, std::uint64_t seed, std::uint64_t stream = 99) {
  CounterRng rng(seed, stream);
  RealVector v(n);
  for(Index i = 0; i < n; ++i)
    v[i] = rng.normal();
  return v;
}

inline ComplexVector random_complex(Index n, std::uint64_t seed) {
  CounterRng rng(seed, 98);
  ComplexVector v(n);
  for(Index i = 0; i < n; ++i)
    v[i] = Complex(rng.normal(), rng.normal());
  return v;
}

inline Real relative_error(RealVector const &a, RealVector const &b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

//! Real inner product on C^M seen as R^{2M}.
inline Real real_dot(ComplexVector const &a, ComplexVector const &b) { return a.dot(b).real(); }

//! Unitary 2-D DFT matrix, row k = (kr, kc), column n = (nr, nc), row-major flattening.
inline Eigen::MatrixXcd dense_dft(Index rows, Index cols) {
  Index const n = rows * cols;
  Eigen::MatrixXcd f(n, n);
  Real const scale = 1 / std::sqrt(static_cast<Real>(n));
  for(Index k = 0; k < n; ++k)
    for(Index j = 0; j < n; ++j) {
      Real const phase = -2 * std::numbers::pi
                         * (static_cast<Real>((k / cols) * (j / cols)) / static_cast<Real>(rows)
                            + static_cast<Real>((k % cols) * (j % cols)) / static_cast<Real>(cols));
      f(k, j) = std::polar(scale, phase);
    }
  return f;
}

//! Columns are apply(e_j) for the operator's image basis.
inline Eigen::MatrixXcd dense_operator(ForwardOp const &op) {
  Eigen::MatrixXcd a(op.measurement_size(), op.image_size());
  for(Index j = 0; j < op.image_size(); ++j) {
    RealVector e = RealVector::Zero(op.image_size());
    e[j] = 1;
    a.col(j) = op.apply(e);
  }
  return a;
}

inline Eigen::MatrixXd dense_synthesis(Dictionary const &d) {
  Eigen::MatrixXd psi(d.image_size(), d.coeff_size());
  for(Index j = 0; j < d.coeff_size(); ++j) {
    RealVector e = RealVector::Zero(d.coeff_size());
    e[j] = 1;
    psi.col(j) = d.synthesize(e);
  }
  return psi;
}

//! Small deterministic test image: a few Gaussian bumps, peak 1.
inline ImageGrid bumps(Index rows, Index cols, std::uint64_t seed, int count = 4, Real width = 1.5) {
  CounterRng rng(seed, 5);
  ImageGrid x(rows, cols);
  for(int k = 0; k < count; ++k) {
    Real const cr = rng.uniform() * static_cast<Real>(rows);
    Real const cc = rng.uniform() * static_cast<Real>(cols);
    Real const a = 0.5 + 0.5 * rng.uniform();
    for(Index r = 0; r < rows; ++r)
      for(Index c = 0; c < cols; ++c) {
        Real const dr = static_cast<Real>(r) - cr, dc = static_cast<Real>(c) - cc;
        x(r, c) += a * std::exp(-(dr * dr + dc * dc) / (2 * width * width));
      }
  }
  x.values /= x.values.maxCoeff();
  return x;
}

//! Masked-Fourier model of bumps() with the usual simulation conventions.
inline PosteriorModel fourier_model(Index n, Real m_fraction, std::string const &dict, int levels,
                                    PriorForm form, Real mu, std::uint64_t seed,
                                    Real snr_db = 30) {
  auto const x = bumps(n, n, seed);
  auto op = make_masked_fourier(n, n, m_fraction, seed);
  auto y = simulate_observation(op, x, snr_db, seed);
  return PosteriorModel(std::move(op), make_dictionary(dict, n, n, levels), form, mu, std::move(y));
}

//! Fresh empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(std::string const &tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path()
             / ("mapuq_test_" + tag + "_" + std::to_string(::getpid()) + "_"
                + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

//! Batch-means standard error of the mean of a correlated series.
inline Real batch_means_se(std::vector<Real> const &series, Index batches = 50) {
  Index const per = static_cast<Index>(series.size()) / batches;
  std::vector<Real> means(batches, 0);
  for(Index b = 0; b < batches; ++b) {
    for(Index i = 0; i < per; ++i)
      means[b] += series[b * per + i];
    means[b] /= static_cast<Real>(per);
  }
  Real mean = 0;
  for(auto m : means)
    mean += m;
  mean /= static_cast<Real>(batches);
  Real var = 0;
  for(auto m : means)
    var += (m - mean) * (m - mean);
  var /= static_cast<Real>(batches - 1);
  return std::sqrt(var / static_cast<Real>(batches));
}

} // namespace mapuq::test
