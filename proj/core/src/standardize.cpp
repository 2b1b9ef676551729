#include "modnet/standardize.hpp"

#include <cmath>

namespace modnet {

StandardizedData standardize(const RawData& data) {
  data.validate();
  const int n = data.n(), p = data.p();
  StandardizedData out;
  out.values.resize(n, p);
  out.means.resize(p);
  out.sds.resize(p);
  for (int j = 0; j < p; ++j) {
    const double mean = data.values.col(j).mean();
    const double ss = (data.values.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / (n - 1));
    if (!(sd > 0.0))
      throw DataError("zero variance, column " + std::to_string(j + 1));
    out.means(j) = mean;
    out.sds(j) = sd;
    out.values.col(j) = (data.values.col(j).array() - mean) / sd;
  }
  return out;
}

Eigen::MatrixXd unstandardize(const StandardizedData& data) {
  Eigen::MatrixXd out = data.values;
  for (int j = 0; j < data.p(); ++j)
    out.col(j) = out.col(j).array() * data.sds(j) + data.means(j);
  return out;
}

}  // namespace modnet
