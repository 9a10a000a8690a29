#pragma once

#include "tae/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tae {

struct PlantedCluster {
  Vector mean;
  double angle_deg = 0.0;  // major axis direction in the plane of the first two features
  double std_major = 1.0;
  double std_minor = 1.0;  // every direction orthogonal to the major axis
};

struct PlantedSpec {
  int n_per_cluster = 100;
  Eigen::Index d = 2;
  std::vector<PlantedCluster> clusters;
  std::uint64_t seed = 0;

  Eigen::Index k() const { return static_cast<Eigen::Index>(clusters.size()); }
};

struct LabeledData {
  DataMatrix X;
  std::vector<int> labels;  // empty when unlabeled
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;  // label id -> original value
  std::size_t dropped_rows = 0;

  bool has_labels() const { return !labels.empty(); }
};

void validate_spec(const PlantedSpec& spec);

// JSON: {k, n_per_cluster, d, clusters: [{mean, angle_deg, std_major, std_minor}], seed}
PlantedSpec parse_planted_spec(const std::string& json_text);
PlantedSpec load_planted_spec(const std::string& path);
std::string planted_spec_to_json(const PlantedSpec& spec);

/// Samples n_per_cluster points per cluster, clusters in order, labels 0..k-1.
LabeledData generate_planted(const PlantedSpec& spec);

// Built-in planted configurations.
PlantedSpec separated_blobs_spec(std::uint64_t seed);     // two isotropic blobs at (+-5, 0)
PlantedSpec crossing_clusters_spec(std::uint64_t seed);   // elongated clusters crossing at angles
PlantedSpec three_anisotropic_spec(std::uint64_t seed);   // three separated elongated clusters
PlantedSpec nested_clusters_spec(std::uint64_t seed);     // two clusters sharing a mean
std::optional<PlantedSpec> preset_spec(const std::string& name, std::uint64_t seed);
std::vector<std::string> preset_names();

/// Comma-separated, header row, '.' decimal point. Rows with an empty or "NA"
/// cell among the selected columns are dropped and counted. An empty
/// `feature_cols` selects every column except the label column.
LabeledData load_csv(const std::string& path, const std::vector<std::string>& feature_cols = {},
                     const std::optional<std::string>& label_col = std::nullopt);
LabeledData read_csv(std::istream& in, const std::vector<std::string>& feature_cols = {},
                     const std::optional<std::string>& label_col = std::nullopt);

/// Features with full round-trip precision plus a trailing "label" column when
/// labels are present.
void write_csv(std::ostream& out, const LabeledData& data);
void save_csv(const std::string& path, const LabeledData& data);

struct ZScore {
  DataMatrix X;
  Vector mean;
  Vector stddev;  // population standard deviation
};

ZScore zscore_normalize(const DataMatrix& X, const std::vector<std::string>& names = {});
DataMatrix zscore_inverse(const DataMatrix& Z, const Vector& mean, const Vector& stddev);

DataMatrix corrupt_gaussian(const DataMatrix& X, double sigma, std::uint64_t seed);

struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

/// Seeded shuffle, first round(train_fraction * n) indices go to train.
Split train_test_split(Eigen::Index n, double train_fraction, std::uint64_t seed);
DataMatrix select_rows(const DataMatrix& X, const std::vector<Eigen::Index>& rows);
std::vector<int> select_labels(const std::vector<int>& labels,
                               const std::vector<Eigen::Index>& rows);

}  // namespace tae
