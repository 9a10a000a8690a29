#include "tae/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace tae {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  return a;
}

Matrix matrix_from_json(const json& a, Eigen::Index rows, Eigen::Index cols) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != rows * cols)
    throw InputError("expected a flat array of " + std::to_string(rows * cols) + " numbers");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = a.at(static_cast<std::size_t>(r * cols + c)).get<double>();
  return m;
}

namespace {

Vector vector_from_json(const json& a, Eigen::Index size) {
  return matrix_from_json(a, size, 1).col(0);
}

void check_version(const json& doc) {
  const int version = doc.value("version", 0);
  if (version != kModelFormatVersion)
    throw InputError("unsupported model format version " + std::to_string(version));
}

std::string arch_of(const json& doc) {
  if (!doc.contains("arch")) return "linear";
  const auto& a = doc.at("arch");
  return a.is_string() ? a.get<std::string>() : a.at("type").get<std::string>();
}

}  // namespace

json to_json(const TAEModel& model) {
  validate_model(model);
  json doc;
  doc["version"] = kModelFormatVersion;
  doc["arch"] = "linear";
  doc["k"] = model.k();
  doc["d"] = model.d();
  doc["h"] = model.h();
  doc["lambda"] = model.lambda;
  doc["seed"] = model.seed;
  doc["s_update"] = to_string(model.s_update);
  doc["clusters"] = json::array();
  for (const auto& cl : model.clusters)
    doc["clusters"].push_back(
        {{"U", matrix_to_json(cl.U)}, {"V", matrix_to_json(cl.V)}, {"C", matrix_to_json(cl.C)}});
  return doc;
}

TAEModel linear_model_from_json(const json& doc) {
  try {
    check_version(doc);
    if (arch_of(doc) != "linear") throw InputError("model is not a linear TAE");
    TAEModel model;
    const auto k = doc.at("k").get<Eigen::Index>();
    const auto d = doc.at("d").get<Eigen::Index>();
    const auto h = doc.at("h").get<Eigen::Index>();
    model.lambda = doc.at("lambda").get<double>();
    model.seed = doc.value("seed", std::uint64_t{0});
    model.s_update = parse_s_update(doc.value("s_update", std::string("lloyd")));
    const auto& clusters = doc.at("clusters");
    expect_dim("serialized cluster count", k, static_cast<Eigen::Index>(clusters.size()));
    for (const auto& c : clusters) {
      ClusterLinearAE ae;
      ae.U = matrix_from_json(c.at("U"), h, d);
      ae.V = matrix_from_json(c.at("V"), d, h);
      ae.C = vector_from_json(c.at("C"), d);
      model.clusters.push_back(std::move(ae));
    }
    validate_model(model);
    return model;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  }
}

json to_json(const TensorizedMLP& model) {
  validate_model(model);
  json doc;
  doc["version"] = kModelFormatVersion;
  doc["arch"] = "mlp";
  const auto& first = model.clusters.front();
  doc["mlp"] = {{"hidden", model.m()},
                {"activation", to_string(first.activation)},
                {"layers", {{first.W1.rows(), first.W1.cols()},
                            {first.W2.rows(), first.W2.cols()},
                            {first.W3.rows(), first.W3.cols()},
                            {first.W4.rows(), first.W4.cols()}}}};
  doc["k"] = model.k();
  doc["d"] = model.d();
  doc["h"] = model.h();
  doc["lambda"] = model.lambda;
  doc["seed"] = model.seed;
  doc["s_update"] = to_string(model.s_update);
  doc["clusters"] = json::array();
  for (std::size_t j = 0; j < model.clusters.size(); ++j) {
    const auto& ae = model.clusters[j];
    doc["clusters"].push_back({{"C", matrix_to_json(model.centers[j])},
                               {"W1", matrix_to_json(ae.W1)},
                               {"b1", matrix_to_json(ae.b1)},
                               {"W2", matrix_to_json(ae.W2)},
                               {"b2", matrix_to_json(ae.b2)},
                               {"W3", matrix_to_json(ae.W3)},
                               {"b3", matrix_to_json(ae.b3)},
                               {"W4", matrix_to_json(ae.W4)},
                               {"b4", matrix_to_json(ae.b4)}});
  }
  return doc;
}

TensorizedMLP mlp_model_from_json(const json& doc) {
  try {
    check_version(doc);
    if (arch_of(doc) != "mlp") throw InputError("model is not an MLP TAE");
    TensorizedMLP model;
    const auto k = doc.at("k").get<Eigen::Index>();
    const auto d = doc.at("d").get<Eigen::Index>();
    const auto h = doc.at("h").get<Eigen::Index>();
    const auto& block = doc.at("mlp");
    const auto m = block.at("hidden").get<Eigen::Index>();
    const Activation act = parse_activation(block.at("activation").get<std::string>());
    model.lambda = doc.at("lambda").get<double>();
    model.seed = doc.value("seed", std::uint64_t{0});
    model.s_update = parse_s_update(doc.value("s_update", std::string("lloyd")));
    const auto& clusters = doc.at("clusters");
    expect_dim("serialized cluster count", k, static_cast<Eigen::Index>(clusters.size()));
    for (const auto& c : clusters) {
      MLPAutoencoder ae;
      ae.activation = act;
      ae.W1 = matrix_from_json(c.at("W1"), m, d);
      ae.b1 = vector_from_json(c.at("b1"), m);
      ae.W2 = matrix_from_json(c.at("W2"), h, m);
      ae.b2 = vector_from_json(c.at("b2"), h);
      ae.W3 = matrix_from_json(c.at("W3"), m, h);
      ae.b3 = vector_from_json(c.at("b3"), m);
      ae.W4 = matrix_from_json(c.at("W4"), d, m);
      ae.b4 = vector_from_json(c.at("b4"), d);
      model.clusters.push_back(std::move(ae));
      model.centers.push_back(vector_from_json(c.at("C"), d));
    }
    validate_model(model);
    return model;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  }
}

AnyModel model_from_json(const json& doc) {
  std::string arch;
  try {
    arch = arch_of(doc);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  }
  if (arch == "linear") return linear_model_from_json(doc);
  if (arch == "mlp") return mlp_model_from_json(doc);
  throw InputError("unknown model architecture '" + arch + "'");
}

json to_json(const SpectralReport& report) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json doc;
  doc["pass"] = report.pass;
  doc["s_binariness"] = report.s_binariness;
  doc["thresholds"] = {{"s_binariness", report.thresholds.s_binariness},
                       {"center_residual", report.thresholds.center_residual},
                       {"tie_residual", report.thresholds.tie_residual},
                       {"orthonormality_residual", report.thresholds.orthonormality_residual},
                       {"subspace_angle", report.thresholds.subspace_angle}};
  doc["clusters"] = json::array();
  for (const auto& c : report.clusters) {
    json e;
    e["empty"] = c.empty;
    e["mass"] = c.mass;
    e["s_binariness"] = c.s_binariness;
    e["center_residual"] = finite_or_null(c.center_residual);
    e["tie_residual"] = finite_or_null(c.tie_residual);
    e["orthonormality_residual"] = finite_or_null(c.orthonormality_residual);
    e["subspace_angle"] = finite_or_null(c.subspace_angle);
    e["eigenvalues"] = std::vector<double>(c.eigenvalues.data(),
                                           c.eigenvalues.data() + c.eigenvalues.size());
    doc["clusters"].push_back(std::move(e));
  }
  return doc;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "': JSON parse error at byte " + std::to_string(e.byte));
  }
}

void save_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace tae
