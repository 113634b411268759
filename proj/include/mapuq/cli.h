#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mapuq/types.h"

namespace mapuq::cli {

enum ExitCode : int { success = 0, usage_error = 2, numerical_failure = 3, io_failure = 4 };

enum class PhantomKind { point_sources, blobs };

//! Non-negative synthetic image normalised to a peak of exactly 1.
//! \p count <= 0 picks the default (8 point sources or 5 blobs).
ImageGrid make_phantom(Index rows, Index cols, PhantomKind kind, std::uint64_t seed, int count = 0);

//! 20 log10(||truth|| / ||truth - estimate||).
Real reconstruction_snr(ImageGrid const &truth, ImageGrid const &estimate);

//! Mean over pixels of |a - b| / (max(truth) - min(truth)).
Real interval_length_error(ImageGrid const &map_length, ImageGrid const &chain_length,
                           ImageGrid const &truth);

//! Runs one subcommand; \p args excludes the program name.
int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err);

} // namespace mapuq::cli
