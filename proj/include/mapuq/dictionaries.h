#pragma once

#include <span>
#include <string>
#include <vector>

#include "mapuq/types.h"

namespace mapuq {

enum class DictionaryKind { daubechies, dirac, concatenation };

//! Orthonormal Daubechies scaling filter with \p order vanishing moments (1..8).
//! Length 2*order, sum sqrt(2), unit norm.
std::span<Real const> daubechies_filter(int order);

//! \brief Sparsifying dictionary Psi with synthesis (Psi a) and analysis (Psi^T x).
//!
//! Daubechies bases are separable periodic Mallat transforms over `levels`
//! levels. Coefficients are ordered as: coarsest approximation block, then for
//! each level from coarsest to finest the HL, LH and HH blocks, each block
//! row-major. HL is high-pass along columns and low-pass along rows, LH the
//! reverse. A concatenation of b bases stacks the per-basis coefficient vectors
//! in order and scales every block by 1/sqrt(b), so Psi Psi^T = I.
class Dictionary {
public:
  static Dictionary daubechies(int order, int levels, Index rows, Index cols);
  static Dictionary dirac(Index rows, Index cols);
  static Dictionary concatenation(std::vector<Dictionary> parts);

  DictionaryKind kind() const { return kind_; }
  int order() const { return order_; }
  int levels() const { return levels_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index image_size() const { return rows_ * cols_; }
  Index coeff_size() const { return coeff_size_; }
  Real normalization() const { return normalization_; }
  std::vector<Dictionary> const &parts() const { return parts_; }
  //! Daubechies or Dirac: Psi^T Psi = Psi Psi^T = I.
  bool is_orthonormal() const { return kind_ != DictionaryKind::concatenation; }
  //! Short identifier such as "db8", "dirac", "sara" or "concat(db1,dirac)".
  std::string name() const;

  RealVector synthesize(RealVector const &coeffs) const;
  RealVector analyze(RealVector const &image) const;

private:
  Dictionary() = default;
  void analyze_wavelet(Real const *image, Real *coeffs) const;
  void synthesize_wavelet(Real const *coeffs, Real *image) const;

  DictionaryKind kind_ = DictionaryKind::dirac;
  int order_ = 0;
  int levels_ = 0;
  Index rows_ = 0;
  Index cols_ = 0;
  Index coeff_size_ = 0;
  Real normalization_ = 1;
  std::vector<Dictionary> parts_;
  //! coefficient position -> position in the in-place Mallat layout
  std::vector<Index> layout_;
};

//! Coefficients a with the identifier of the dictionary that produced them.
struct CoeffVector {
  RealVector values;
  std::string dict_id;
};

ImageGrid synthesize(Dictionary const &dict, CoeffVector const &a);
CoeffVector analyze(Dictionary const &dict, ImageGrid const &x);

//! DB1..DB8 plus Dirac, each basis weighted by 1/3.
Dictionary make_sara(Index rows, Index cols, int levels);

//! "db1".."db8", "dirac" or "sara".
Dictionary make_dictionary(std::string const &spec, Index rows, Index cols, int levels);

} // namespace mapuq
