#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace tae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// n x d, one sample per row.
using DataMatrix = Matrix;
// k x n, column i is the cluster distribution of sample i.
using AssignmentMatrix = Matrix;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of two operands disagree along a named axis.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& axis, Eigen::Index expected,
                    Eigen::Index actual)
      : Error("dimension mismatch on " + axis + ": expected " +
              std::to_string(expected) + ", got " + std::to_string(actual)),
        axis_(axis) {}
  const std::string& axis() const { return axis_; }

 private:
  std::string axis_;
};

class EmptyCluster : public Error {
 public:
  explicit EmptyCluster(Eigen::Index cluster)
      : Error("cluster " + std::to_string(cluster) + " has no assigned mass"),
        cluster_(cluster) {}
  Eigen::Index cluster() const { return cluster_; }

 private:
  Eigen::Index cluster_;
};

class NumericalDivergence : public Error {
 public:
  NumericalDivergence(Eigen::Index cluster, const std::string& what)
      : Error("numerical divergence in cluster " + std::to_string(cluster) +
              ": " + what),
        cluster_(cluster) {}
  Eigen::Index cluster() const { return cluster_; }

 private:
  Eigen::Index cluster_;
};

// Malformed user input: files, specs, flags.
class InputError : public Error {
 public:
  using Error::Error;
};

inline void expect_dim(const std::string& axis, Eigen::Index expected,
                       Eigen::Index actual) {
  if (expected != actual) throw DimensionMismatch(axis, expected, actual);
}

// Non-fatal diagnostics (degenerate inputs, out-of-range hyperparameters).
// Default sink writes "warning: <msg>" to stderr.
using WarningSink = std::function<void(const std::string&)>;
// Returns the previously installed sink.
WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

// Index of the smallest entry; ties go to the lowest index.
inline Eigen::Index argmin_lowest(const Eigen::Ref<const Vector>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < v.size(); ++j)
    if (v[j] < v[best]) best = j;
  return best;
}

}  // namespace tae
