#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mapuq/linops.h"
#include "mapuq/model.h"
#include "mapuq/types.h"

namespace mapuq::io {

//! \brief Contents of a UQGRID v1 file.
//!
//! Layout: the ASCII line "UQGRID v1", then "<rows> <cols> <channels>", then
//! rows*cols*channels little-endian IEEE-754 doubles, row-major. Channel 2 files
//! interleave real and imaginary parts.
struct Grid {
  Index rows = 0;
  Index cols = 0;
  int channels = 1;
  std::vector<double> data;
};

Grid read_grid(std::filesystem::path const &path);
void write_grid(std::filesystem::path const &path, Grid const &grid);

void write_image(std::filesystem::path const &path, ImageGrid const &image);
//! UQGRID (one channel) or binary/ASCII PGM with 8- or 16-bit samples scaled to [0, 1].
ImageGrid read_image(std::filesystem::path const &path);

//! Complex vector as an M x 1 two-channel grid.
void write_complex(std::filesystem::path const &path, ComplexVector const &values);
ComplexVector read_complex(std::filesystem::path const &path);
//! Real vector (e.g. coefficients) as an L x 1 one-channel grid.
void write_real(std::filesystem::path const &path, RealVector const &values);
RealVector read_real(std::filesystem::path const &path);

//! Mask file: "UQMASK v1 <rows> <cols>" followed by one index per line.
struct MaskFile {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> indices;
};
MaskFile read_mask(std::filesystem::path const &path);
void write_mask(std::filesystem::path const &path, MaskFile const &mask);

//! Shortest decimal string that parses back to exactly \p value.
std::string format_real(double value);
double parse_real(std::string const &text);

//! Ordered `key = value` lines; '#' starts a comment.
class KeyValueFile {
public:
  static KeyValueFile read(std::filesystem::path const &path);
  void write(std::filesystem::path const &path) const;

  void set(std::string const &key, std::string value);
  bool has(std::string const &key) const;
  std::string const &get(std::string const &key) const;
  std::string get_or(std::string const &key, std::string fallback) const;
  std::vector<std::pair<std::string, std::string>> const &entries() const { return entries_; }

private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

//! Flat description of a posterior model; relative paths are resolved against
//! the directory of the file they were read from.
struct ModelConfig {
  Index rows = 0;
  Index cols = 0;
  OperatorKind op = OperatorKind::masked_fourier;
  std::filesystem::path mask;
  std::filesystem::path kernel;
  std::filesystem::path measurement;
  Real sigma = 1;
  std::string dictionary = "sara";
  int levels = 4;
  PriorForm prior = PriorForm::analysis;
  //! Empty means "select automatically".
  std::optional<Real> mu;
};

ModelConfig read_model_config(std::filesystem::path const &path);
//! Paths are written relative to the config file's directory when possible.
void write_model_config(std::filesystem::path const &path, ModelConfig const &cfg);

ForwardOp load_operator(ModelConfig const &cfg);
//! Builds the model; \p mu overrides the configured value.
PosteriorModel load_model(ModelConfig const &cfg, std::optional<Real> mu = std::nullopt);

//! Rows of numbers written with format_real, with a header line.
void write_csv(std::filesystem::path const &path, std::vector<std::string> const &header,
               std::vector<std::vector<double>> const &rows);
std::vector<std::vector<double>> read_csv(std::filesystem::path const &path);

} // namespace mapuq::io
