#include "mapuq/dictionaries.h"

#include <cmath>
#include <numeric>

#include "daubechies_filters.h"

namespace mapuq {

namespace {

std::span<Real const> filter_table(int order) {
  switch(order) {
  case 1: return detail::db1_filter;
  case 2: return detail::db2_filter;
  case 3: return detail::db3_filter;
  case 4: return detail::db4_filter;
  case 5: return detail::db5_filter;
  case 6: return detail::db6_filter;
  case 7: return detail::db7_filter;
  case 8: return detail::db8_filter;
  default: throw std::invalid_argument("Daubechies order must be in [1, 8]");
  }
}

// High-pass partner g[n] = (-1)^n h[F-1-n].
std::vector<Real> quadrature_mirror(std::span<Real const> low) {
  auto const F = low.size();
  std::vector<Real> high(F);
  for(std::size_t n = 0; n < F; ++n)
    high[n] = (n % 2 == 0 ? 1.0 : -1.0) * low[F - 1 - n];
  return high;
}

// One periodic analysis step on x[0..len) into approx/detail of length len/2.
// `ext` is scratch of size >= len + F.
void dwt_step(Real const *x, Index len, std::span<Real const> low, std::vector<Real> const &high,
              Real *approx, Real *detail, std::vector<Real> &ext) {
  auto const F = static_cast<Index>(low.size());
  std::copy(x, x + len, ext.begin());
  for(Index j = len; j < len + F; ++j)
    ext[j] = ext[j - len];
  for(Index k = 0; k < len / 2; ++k) {
    Real const *window = ext.data() + 2 * k;
    Real a = 0, d = 0;
    for(Index n = 0; n < F; ++n) {
      a += low[n] * window[n];
      d += high[n] * window[n];
    }
    approx[k] = a;
    detail[k] = d;
  }
}

// Transpose of dwt_step; writes x[0..len).
void idwt_step(Real const *approx, Real const *detail, Index len, std::span<Real const> low,
               std::vector<Real> const &high, Real *x, std::vector<Real> &ext) {
  auto const F = static_cast<Index>(low.size());
  std::fill(ext.begin(), ext.begin() + len + F, 0.0);
  for(Index k = 0; k < len / 2; ++k) {
    Real *window = ext.data() + 2 * k;
    for(Index n = 0; n < F; ++n)
      window[n] += low[n] * approx[k] + high[n] * detail[k];
  }
  for(Index j = len + F - 1; j >= len; --j)
    ext[j - len] += ext[j];
  std::copy(ext.begin(), ext.begin() + len, x);
}

} // namespace

std::span<Real const> daubechies_filter(int order) { return filter_table(order); }

Dictionary Dictionary::daubechies(int order, int levels, Index rows, Index cols) {
  filter_table(order);
  if(levels < 1)
    throw std::invalid_argument("wavelet levels must be >= 1");
  Index const block = Index{1} << levels;
  if(rows < 1 || cols < 1 || rows % block != 0 || cols % block != 0)
    throw DimensionError("image dimensions " + std::to_string(rows) + "x" + std::to_string(cols)
                         + " not divisible by 2^" + std::to_string(levels));
  Dictionary d;
  d.kind_ = DictionaryKind::daubechies;
  d.order_ = order;
  d.levels_ = levels;
  d.rows_ = rows;
  d.cols_ = cols;
  d.coeff_size_ = rows * cols;

  d.layout_.reserve(rows * cols);
  auto push_block = [&](Index r0, Index c0, Index nr, Index nc) {
    for(Index r = r0; r < r0 + nr; ++r)
      for(Index c = c0; c < c0 + nc; ++c)
        d.layout_.push_back(r * cols + c);
  };
  Index const coarse_r = rows >> levels, coarse_c = cols >> levels;
  push_block(0, 0, coarse_r, coarse_c);
  for(int level = levels; level >= 1; --level) {
    Index const nr = rows >> level, nc = cols >> level;
    push_block(0, nc, nr, nc);  // HL
    push_block(nr, 0, nr, nc);  // LH
    push_block(nr, nc, nr, nc); // HH
  }
  return d;
}

Dictionary Dictionary::dirac(Index rows, Index cols) {
  if(rows < 1 || cols < 1)
    throw DimensionError("image dimensions must be positive");
  Dictionary d;
  d.kind_ = DictionaryKind::dirac;
  d.rows_ = rows;
  d.cols_ = cols;
  d.coeff_size_ = rows * cols;
  return d;
}

Dictionary Dictionary::concatenation(std::vector<Dictionary> parts) {
  if(parts.empty())
    throw std::invalid_argument("concatenation needs at least one basis");
  Dictionary d;
  d.kind_ = DictionaryKind::concatenation;
  d.rows_ = parts.front().rows();
  d.cols_ = parts.front().cols();
  for(auto const &p : parts) {
    require_dims(p.rows() == d.rows_ && p.cols() == d.cols_,
                 "concatenated bases must share image dimensions");
    if(!p.is_orthonormal())
      throw std::invalid_argument("nested concatenations are not supported");
    d.coeff_size_ += p.coeff_size();
    d.levels_ = std::max(d.levels_, p.levels());
  }
  d.normalization_ = 1.0 / std::sqrt(static_cast<Real>(parts.size()));
  d.parts_ = std::move(parts);
  return d;
}

std::string Dictionary::name() const {
  switch(kind_) {
  case DictionaryKind::daubechies: return "db" + std::to_string(order_);
  case DictionaryKind::dirac: return "dirac";
  case DictionaryKind::concatenation: {
    bool sara = parts_.size() == 9;
    for(std::size_t i = 0; sara && i < 8; ++i)
      sara = parts_[i].kind() == DictionaryKind::daubechies && parts_[i].order() == int(i) + 1
             && parts_[i].levels() == parts_[0].levels();
    if(sara && parts_[8].kind() == DictionaryKind::dirac)
      return "sara";
    std::string out = "concat(";
    for(std::size_t i = 0; i < parts_.size(); ++i)
      out += (i ? "," : "") + parts_[i].name();
    return out + ")";
  }
  }
  return {};
}

void Dictionary::analyze_wavelet(Real const *image, Real *coeffs) const {
  auto const low = filter_table(order_);
  auto const high = quadrature_mirror(low);
  Index const F = static_cast<Index>(low.size());
  std::vector<Real> work(image, image + rows_ * cols_);
  std::vector<Real> line(std::max(rows_, cols_)), out(std::max(rows_, cols_));
  std::vector<Real> ext(std::max(rows_, cols_) + F);

  Index nr = rows_, nc = cols_;
  for(int level = 0; level < levels_; ++level) {
    for(Index r = 0; r < nr; ++r) {
      Real *row = work.data() + r * cols_;
      std::copy(row, row + nc, line.begin());
      dwt_step(line.data(), nc, low, high, row, row + nc / 2, ext);
    }
    for(Index c = 0; c < nc; ++c) {
      for(Index r = 0; r < nr; ++r)
        line[r] = work[r * cols_ + c];
      dwt_step(line.data(), nr, low, high, out.data(), out.data() + nr / 2, ext);
      for(Index r = 0; r < nr; ++r)
        work[r * cols_ + c] = out[r];
    }
    nr /= 2;
    nc /= 2;
  }
  for(std::size_t k = 0; k < layout_.size(); ++k)
    coeffs[k] = work[layout_[k]];
}

void Dictionary::synthesize_wavelet(Real const *coeffs, Real *image) const {
  auto const low = filter_table(order_);
  auto const high = quadrature_mirror(low);
  Index const F = static_cast<Index>(low.size());
  std::vector<Real> work(rows_ * cols_);
  for(std::size_t k = 0; k < layout_.size(); ++k)
    work[layout_[k]] = coeffs[k];
  std::vector<Real> line(std::max(rows_, cols_)), out(std::max(rows_, cols_));
  std::vector<Real> ext(std::max(rows_, cols_) + F);

  for(int level = levels_ - 1; level >= 0; --level) {
    Index const nr = rows_ >> level, nc = cols_ >> level;
    for(Index c = 0; c < nc; ++c) {
      for(Index r = 0; r < nr; ++r)
        line[r] = work[r * cols_ + c];
      idwt_step(line.data(), line.data() + nr / 2, nr, low, high, out.data(), ext);
      for(Index r = 0; r < nr; ++r)
        work[r * cols_ + c] = out[r];
    }
    for(Index r = 0; r < nr; ++r) {
      Real *row = work.data() + r * cols_;
      std::copy(row, row + nc, line.begin());
      idwt_step(line.data(), line.data() + nc / 2, nc, low, high, row, ext);
    }
  }
  std::copy(work.begin(), work.end(), image);
}

RealVector Dictionary::synthesize(RealVector const &coeffs) const {
  require_dims(coeffs.size() == coeff_size_, "coefficient vector has length "
                                                 + std::to_string(coeffs.size()) + ", expected "
                                                 + std::to_string(coeff_size_));
  RealVector image(image_size());
  switch(kind_) {
  case DictionaryKind::dirac: image = coeffs; break;
  case DictionaryKind::daubechies: synthesize_wavelet(coeffs.data(), image.data()); break;
  case DictionaryKind::concatenation: {
    image.setZero();
    RealVector part_image(image_size());
    Index offset = 0;
    for(auto const &part : parts_) {
      part_image = part.synthesize(coeffs.segment(offset, part.coeff_size()));
      image += part_image;
      offset += part.coeff_size();
    }
    image *= normalization_;
    break;
  }
  }
  return image;
}

RealVector Dictionary::analyze(RealVector const &image) const {
  require_dims(image.size() == image_size(), "image has " + std::to_string(image.size())
                                                 + " pixels, expected "
                                                 + std::to_string(image_size()));
  RealVector coeffs(coeff_size_);
  switch(kind_) {
  case DictionaryKind::dirac: coeffs = image; break;
  case DictionaryKind::daubechies: analyze_wavelet(image.data(), coeffs.data()); break;
  case DictionaryKind::concatenation: {
    Index offset = 0;
    for(auto const &part : parts_) {
      coeffs.segment(offset, part.coeff_size()) = normalization_ * part.analyze(image);
      offset += part.coeff_size();
    }
    break;
  }
  }
  return coeffs;
}

ImageGrid synthesize(Dictionary const &dict, CoeffVector const &a) {
  return ImageGrid(dict.rows(), dict.cols(), dict.synthesize(a.values));
}

CoeffVector analyze(Dictionary const &dict, ImageGrid const &x) {
  require_dims(x.rows == dict.rows() && x.cols == dict.cols(),
               "image grid does not match dictionary dimensions");
  return {dict.analyze(x.values), dict.name()};
}

Dictionary make_sara(Index rows, Index cols, int levels) {
  std::vector<Dictionary> bases;
  bases.reserve(9);
  for(int order = 1; order <= 8; ++order)
    bases.push_back(Dictionary::daubechies(order, levels, rows, cols));
  bases.push_back(Dictionary::dirac(rows, cols));
  return Dictionary::concatenation(std::move(bases));
}

Dictionary make_dictionary(std::string const &spec, Index rows, Index cols, int levels) {
  if(spec == "sara")
    return make_sara(rows, cols, levels);
  if(spec == "dirac")
    return Dictionary::dirac(rows, cols);
  if(spec.size() == 3 && spec.starts_with("db") && spec[2] >= '1' && spec[2] <= '8')
    return Dictionary::daubechies(spec[2] - '0', levels, rows, cols);
  throw std::invalid_argument("unknown dictionary '" + spec + "' (expected db1..db8, dirac, sara)");
}

} // namespace mapuq
