#include "mapuq/types.h"

namespace mapuq {

ImageGrid::ImageGrid(Index rows, Index cols)
    : rows(rows), cols(cols), values(RealVector::Zero(rows * cols)) {
  require_dims(rows >= 1 && cols >= 1, "image grid must have positive dimensions");
}

ImageGrid::ImageGrid(Index rows, Index cols, RealVector values)
    : rows(rows), cols(cols), values(std::move(values)) {
  require_dims(rows >= 1 && cols >= 1, "image grid must have positive dimensions");
  require_dims(this->values.size() == rows * cols,
               "image grid has " + std::to_string(this->values.size()) + " values, expected "
                   + std::to_string(rows * cols));
}

ImageGrid ImageGrid::constant(Index rows, Index cols, Real value) {
  return ImageGrid(rows, cols, RealVector::Constant(rows * cols, value));
}

} // namespace mapuq
