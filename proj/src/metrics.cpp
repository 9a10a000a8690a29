#include "tae/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace tae {

namespace {

std::vector<int> compact(const std::vector<int>& labels, int& distinct) {
  std::map<int, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids.try_emplace(l, static_cast<int>(ids.size())).first->second);
  distinct = static_cast<int>(ids.size());
  return out;
}

double choose2(double x) { return 0.5 * x * (x - 1.0); }

}  // namespace

ContingencyTable contingency_table(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("label vector length", static_cast<Eigen::Index>(a.size()),
                            static_cast<Eigen::Index>(b.size()));
  int ka = 0, kb = 0;
  const auto ca = compact(a, ka);
  const auto cb = compact(b, kb);
  ContingencyTable t;
  t.counts = Eigen::MatrixXi::Zero(ka, kb);
  t.row_totals.assign(static_cast<std::size_t>(ka), 0);
  t.col_totals.assign(static_cast<std::size_t>(kb), 0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    ++t.counts(ca[i], cb[i]);
    ++t.row_totals[static_cast<std::size_t>(ca[i])];
    ++t.col_totals[static_cast<std::size_t>(cb[i])];
  }
  t.total = static_cast<long>(a.size());
  return t;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("label vector length", static_cast<Eigen::Index>(a.size()),
                            static_cast<Eigen::Index>(b.size()));
  if (a.size() < 2) throw InputError("adjusted_rand_index needs at least two samples");
  const auto t = contingency_table(a, b);
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (Eigen::Index r = 0; r < t.counts.rows(); ++r)
    for (Eigen::Index c = 0; c < t.counts.cols(); ++c) index += choose2(t.counts(r, c));
  for (long v : t.row_totals) sum_rows += choose2(static_cast<double>(v));
  for (long v : t.col_totals) sum_cols += choose2(static_cast<double>(v));
  const double expected = sum_rows * sum_cols / choose2(static_cast<double>(t.total));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

double mse(const Matrix& truth, const Matrix& predicted) {
  expect_dim("rows", truth.rows(), predicted.rows());
  expect_dim("columns", truth.cols(), predicted.cols());
  if (truth.size() == 0) return 0.0;
  return (truth - predicted).squaredNorm() / static_cast<double>(truth.size());
}

double best_label_permutation_accuracy(const std::vector<int>& truth,
                                       const std::vector<int>& predicted, int k) {
  if (truth.size() != predicted.size())
    throw DimensionMismatch("label vector length", static_cast<Eigen::Index>(truth.size()),
                            static_cast<Eigen::Index>(predicted.size()));
  if (k > 8) throw InputError("permutation search limited to k <= 8; use adjusted_rand_index");
  if (truth.empty()) return 1.0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (truth[i] < 0 || truth[i] >= k || predicted[i] < 0 || predicted[i] >= k)
      throw InputError("label outside [0, k)");
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(k, k);
  for (std::size_t i = 0; i < truth.size(); ++i) ++counts(predicted[i], truth[i]);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  long best = 0;
  do {
    long hits = 0;
    for (int p = 0; p < k; ++p) hits += counts(p, perm[static_cast<std::size_t>(p)]);
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

}  // namespace tae
