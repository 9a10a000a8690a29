#pragma once

#include "tae/linear_tae.hpp"
#include "tae/mlp_tae.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tae::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kInputError = 2,
  kDivergence = 3,
  kUnsupported = 4,
};

inline constexpr const char* kRngTag = "mt19937_64/u53/box-muller v1";

struct DataOptions {
  std::string path;
  std::vector<std::string> features;  // empty: every column except the label
  std::string label_col;              // empty: use a "label" column when present
  bool normalize = false;
};

struct GenOptions {
  std::string spec_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct TrainOptions {
  DataOptions data;
  Eigen::Index k = 2;
  Eigen::Index latent = 1;
  double lambda = 0.1;
  int epochs = 300;
  double lr = 0.1;
  double s_lr = 1.0;
  std::string s_update = "lloyd";
  std::string arch = "linear";
  Eigen::Index hidden = 0;
  std::string activation = "relu";
  std::uint64_t seed = 0;
  int restarts = 1;
  double tol = 1e-8;
  std::string out;
  std::string report;
};

struct ClusterOptions {
  DataOptions data;
  std::string model;
  std::string out;  // empty: stdout
};

struct DenoiseOptions {
  DataOptions data;
  double noise_sigma = 0.3;
  double train_fraction = 0.8;
  Eigen::Index k = 2;
  Eigen::Index latent = 1;
  double lambda = 0.1;
  int epochs = 300;
  double lr = 0.1;
  std::string s_update = "lloyd";
  std::uint64_t seed = 0;
  int restarts = 1;
  std::string model_out;
  std::string report;
};

struct VerifyOptions {
  DataOptions data;
  std::string model;
  std::string report;  // empty: stdout
};

nlohmann::json to_json(const DataOptions& o);
DataOptions data_options_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainOptions& o);
TrainOptions train_options_from_json(const nlohmann::json& j);

TrainConfig make_train_config(const TrainOptions& o);

int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err);
int cmd_cluster(const ClusterOptions& o, std::ostream& out, std::ostream& err);
int cmd_denoise(const DenoiseOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err);

}  // namespace tae::cli
