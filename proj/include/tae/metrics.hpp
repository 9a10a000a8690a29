#pragma once

#include "tae/common.hpp"

#include <vector>

namespace tae {

struct ContingencyTable {
  Eigen::MatrixXi counts;        // distinct labels of a x distinct labels of b
  std::vector<long> row_totals;
  std::vector<long> col_totals;
  long total = 0;
};

ContingencyTable contingency_table(const std::vector<int>& a, const std::vector<int>& b);

/// Pair-counting Adjusted Rand Index. When the chance-corrected denominator
/// vanishes the two partitions are necessarily identical (both a single
/// cluster or both all singletons) and the result is 1.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// Mean of squared entry-wise differences.
double mse(const Matrix& truth, const Matrix& predicted);

/// Highest fraction of matching labels over all relabelings of `predicted`.
/// Exhaustive, so k is limited to 8.
double best_label_permutation_accuracy(const std::vector<int>& truth,
                                       const std::vector<int>& predicted, int k);

}  // namespace tae
