#include "modnet/types.hpp"

#include <cmath>

namespace modnet {

void RawData::validate() const {
  const int rows = n(), cols = p();
  if (rows < 2) throw DataError("need at least 2 rows, got " + std::to_string(rows));
  if (cols < 3) throw DataError("need at least 3 columns, got " + std::to_string(cols));
  if (!column_names.empty() && static_cast<int>(column_names.size()) != cols)
    throw DataError("column name count does not match column count");
  for (int j = 0; j < cols; ++j) {
    double mean = 0.0;
    for (int i = 0; i < rows; ++i) {
      const double v = values(i, j);
      if (!std::isfinite(v))
        throw DataError("non-finite entry at row " + std::to_string(i + 1) +
                        ", column " + std::to_string(j + 1));
      mean += v;
    }
    mean /= rows;
    double ss = 0.0;
    for (int i = 0; i < rows; ++i) {
      const double d = values(i, j) - mean;
      ss += d * d;
    }
    if (ss <= 0.0)
      throw DataError("zero variance, column " + std::to_string(j + 1));
  }
}

std::pair<long, long> count_terms(int p, const ModeratorSet& mods) {
  if (p < 3) throw DataError("count_terms requires p >= 3");
  long pairwise = 0, threeway = 0;
  for (int i = 1; i <= p; ++i)
    for (int j = i + 1; j <= p; ++j) {
      ++pairwise;
      for (int q = j + 1; q <= p; ++q)
        if (mods.admits(i, j, q)) ++threeway;
    }
  return {pairwise, threeway};
}

long nodewise_param_count(int p, const ModeratorSet& mods, int s) {
  if (s < 1 || s > p)
    throw DataError("node index out of range: " + std::to_string(s));
  long count = p - 1;  // main effects X_j, j != s
  for (int i = 1; i <= p; ++i) {
    if (i == s) continue;
    for (int j = i + 1; j <= p; ++j) {
      if (j == s) continue;
      if (mods.admits(i, j, s)) ++count;
    }
  }
  return count;
}

}  // namespace modnet
