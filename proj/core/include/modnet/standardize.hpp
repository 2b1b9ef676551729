#pragma once

#include "modnet/types.hpp"

namespace modnet {

// Mean-center each column and divide by its sample SD (divisor n-1).
// Throws DataError for a zero-variance column, naming the column.
StandardizedData standardize(const RawData& data);

// Back-transform to original units using the stored means/sds.
Eigen::MatrixXd unstandardize(const StandardizedData& data);

}  // namespace modnet
