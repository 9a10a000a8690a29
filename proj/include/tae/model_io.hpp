#pragma once

#include "tae/linear_tae.hpp"
#include "tae/mlp_tae.hpp"
#include "tae/spectral.hpp"

#include <json.hpp>

#include <string>
#include <variant>

namespace tae {

inline constexpr int kModelFormatVersion = 1;

// {version, arch: "linear", k, d, h, lambda, seed, s_update,
//  clusters: [{U, V, C}]} with matrices as flat row-major arrays.
nlohmann::json to_json(const TAEModel& model);
TAEModel linear_model_from_json(const nlohmann::json& doc);

// Same envelope with arch: "mlp" and an "mlp" block
// {hidden, activation, layers: [[rows, cols] for W1..W4]}; clusters carry
// C, W1, b1, W2, b2, W3, b3, W4, b4.
nlohmann::json to_json(const TensorizedMLP& model);
TensorizedMLP mlp_model_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const SpectralReport& report);

using AnyModel = std::variant<TAEModel, TensorizedMLP>;
AnyModel model_from_json(const nlohmann::json& doc);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& doc);

nlohmann::json matrix_to_json(const Matrix& m);  // row-major flat array
Matrix matrix_from_json(const nlohmann::json& a, Eigen::Index rows, Eigen::Index cols);

}  // namespace tae
