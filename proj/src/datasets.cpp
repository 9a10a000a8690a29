#include "tae/datasets.hpp"

#include "tae/rng.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace tae {

using nlohmann::json;

void validate_spec(const PlantedSpec& spec) {
  if (spec.clusters.empty()) throw InputError("planted spec needs at least one cluster");
  if (spec.n_per_cluster < 1) throw InputError("n_per_cluster must be >= 1");
  if (spec.d < 1) throw InputError("d must be >= 1");
  for (std::size_t j = 0; j < spec.clusters.size(); ++j) {
    const auto& c = spec.clusters[j];
    if (c.mean.size() != spec.d)
      throw InputError("cluster " + std::to_string(j) + ": mean has " +
                       std::to_string(c.mean.size()) + " entries, expected d=" +
                       std::to_string(spec.d));
    if (!(c.std_major > 0.0) || !(c.std_minor > 0.0))
      throw InputError("cluster " + std::to_string(j) + ": standard deviations must be > 0");
  }
}

PlantedSpec parse_planted_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError("planted spec: JSON parse error at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  PlantedSpec spec;
  try {
    spec.n_per_cluster = doc.at("n_per_cluster").get<int>();
    spec.d = doc.at("d").get<Eigen::Index>();
    spec.seed = doc.value("seed", std::uint64_t{0});
    for (const auto& c : doc.at("clusters")) {
      PlantedCluster pc;
      const auto mean = c.at("mean").get<std::vector<double>>();
      pc.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
      pc.angle_deg = c.value("angle_deg", 0.0);
      pc.std_major = c.at("std_major").get<double>();
      pc.std_minor = c.at("std_minor").get<double>();
      spec.clusters.push_back(std::move(pc));
    }
    if (doc.contains("k") && doc.at("k").get<Eigen::Index>() != spec.k())
      throw InputError("planted spec: k=" + std::to_string(doc.at("k").get<long>()) +
                       " but " + std::to_string(spec.k()) + " clusters listed");
  } catch (const json::exception& e) {
    throw InputError(std::string("planted spec: ") + e.what());
  }
  validate_spec(spec);
  return spec;
}

PlantedSpec load_planted_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open planted spec '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_planted_spec(buf.str());
}

std::string planted_spec_to_json(const PlantedSpec& spec) {
  json doc;
  doc["k"] = spec.k();
  doc["n_per_cluster"] = spec.n_per_cluster;
  doc["d"] = spec.d;
  doc["seed"] = spec.seed;
  doc["clusters"] = json::array();
  for (const auto& c : spec.clusters)
    doc["clusters"].push_back({{"mean", std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size())},
                               {"angle_deg", c.angle_deg},
                               {"std_major", c.std_major},
                               {"std_minor", c.std_minor}});
  return doc.dump(2);
}

LabeledData generate_planted(const PlantedSpec& spec) {
  validate_spec(spec);
  const Eigen::Index d = spec.d, n = spec.k() * spec.n_per_cluster;
  Rng rng(spec.seed);
  LabeledData out;
  out.X.resize(n, d);
  out.labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < d; ++j) out.feature_names.push_back("x" + std::to_string(j));
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
    const auto& cl = spec.clusters[c];
    out.label_names.push_back(std::to_string(c));
    const double theta = cl.angle_deg * std::numbers::pi / 180.0;
    Vector axis = Vector::Zero(d), perp = Vector::Zero(d);
    axis[0] = d >= 2 ? std::cos(theta) : 1.0;
    if (d >= 2) {
      axis[1] = std::sin(theta);
      perp[0] = -std::sin(theta);
      perp[1] = std::cos(theta);
    }
    for (int p = 0; p < spec.n_per_cluster; ++p, ++row) {
      Vector x = cl.mean + cl.std_major * rng.normal() * axis;
      if (d >= 2) x += cl.std_minor * rng.normal() * perp;
      for (Eigen::Index e = 2; e < d; ++e) x[e] += cl.std_minor * rng.normal();
      out.X.row(row) = x.transpose();
      out.labels.push_back(static_cast<int>(c));
    }
  }
  return out;
}

namespace {

PlantedCluster cluster2d(double mx, double my, double angle, double major, double minor) {
  PlantedCluster c;
  c.mean = Vector(2);
  c.mean << mx, my;
  c.angle_deg = angle;
  c.std_major = major;
  c.std_minor = minor;
  return c;
}

}  // namespace

PlantedSpec separated_blobs_spec(std::uint64_t seed) {
  PlantedSpec s;
  s.n_per_cluster = 100;
  s.d = 2;
  s.seed = seed;
  s.clusters = {cluster2d(-5, 0, 0, 0.1, 0.1), cluster2d(5, 0, 0, 0.1, 0.1)};
  return s;
}

PlantedSpec crossing_clusters_spec(std::uint64_t seed) {
  PlantedSpec s;
  s.n_per_cluster = 150;
  s.d = 2;
  s.seed = seed;
  s.clusters = {cluster2d(0, 0, 30, 3.0, 0.05), cluster2d(0, 0, -30, 3.0, 0.05)};
  return s;
}

PlantedSpec three_anisotropic_spec(std::uint64_t seed) {
  PlantedSpec s;
  s.n_per_cluster = 200;
  s.d = 2;
  s.seed = seed;
  s.clusters = {cluster2d(-8, 0, 60, 2.0, 0.3), cluster2d(8, 0, -20, 2.0, 0.3),
                cluster2d(0, 10, 10, 2.0, 0.3)};
  return s;
}

PlantedSpec nested_clusters_spec(std::uint64_t seed) {
  PlantedSpec s;
  s.n_per_cluster = 150;
  s.d = 2;
  s.seed = seed;
  s.clusters = {cluster2d(0, 0, 0, 3.0, 0.05), cluster2d(0, 0, 90, 3.0, 0.05)};
  return s;
}

std::optional<PlantedSpec> preset_spec(const std::string& name, std::uint64_t seed) {
  if (name == "blobs") return separated_blobs_spec(seed);
  if (name == "crossing") return crossing_clusters_spec(seed);
  if (name == "three") return three_anisotropic_spec(seed);
  if (name == "nested") return nested_clusters_spec(seed);
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"blobs", "crossing", "three", "nested"}; }

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "NA" || cell == "NaN"; }

}  // namespace

LabeledData read_csv(std::istream& in, const std::vector<std::string>& feature_cols,
                     const std::optional<std::string>& label_col) {
  LabeledData out;
  std::string line;
  if (!std::getline(in, line)) {
    out.X.resize(0, static_cast<Eigen::Index>(feature_cols.size()));
    out.feature_names = feature_cols;
    return out;
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header;
  for (auto& h : split_csv_line(line)) header.push_back(trim(h));

  auto column_of = [&](const std::string& name) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    throw InputError("CSV column '" + name + "' not found");
  };

  std::optional<std::size_t> label_index;
  if (label_col) label_index = column_of(*label_col);
  std::vector<std::size_t> feature_index;
  if (feature_cols.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (!label_index || c != *label_index) {
        feature_index.push_back(c);
        out.feature_names.push_back(header[c]);
      }
  } else {
    for (const auto& name : feature_cols) feature_index.push_back(column_of(name));
    out.feature_names = feature_cols;
  }

  std::vector<std::vector<double>> rows;
  std::map<std::string, int> label_ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    auto cell_at = [&](std::size_t c) { return c < cells.size() ? trim(cells[c]) : std::string{}; };
    bool missing = false;
    for (std::size_t c : feature_index) missing = missing || is_missing(cell_at(c));
    if (label_index) missing = missing || is_missing(cell_at(*label_index));
    if (missing) {
      ++out.dropped_rows;
      continue;
    }
    std::vector<double> values;
    for (std::size_t c : feature_index) {
      const std::string cell = cell_at(c);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw InputError("non-numeric value '" + cell + "' at line " + std::to_string(line_no) +
                         ", column '" + header[c] + "'");
      values.push_back(v);
    }
    rows.push_back(std::move(values));
    if (label_index) {
      const std::string lab = cell_at(*label_index);
      auto [it, fresh] = label_ids.try_emplace(lab, static_cast<int>(label_ids.size()));
      if (fresh) out.label_names.push_back(lab);
      out.labels.push_back(it->second);
    }
  }
  out.X.resize(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(feature_index.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < feature_index.size(); ++c)
      out.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return out;
}

LabeledData load_csv(const std::string& path, const std::vector<std::string>& feature_cols,
                     const std::optional<std::string>& label_col) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open CSV file '" + path + "'");
  return read_csv(in, feature_cols, label_col);
}

void write_csv(std::ostream& out, const LabeledData& data) {
  std::vector<std::string> names = data.feature_names;
  for (auto j = static_cast<Eigen::Index>(names.size()); j < data.X.cols(); ++j)
    names.push_back("x" + std::to_string(j));
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  if (data.has_labels()) out << ",label";
  out << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) out << (j ? "," : "") << data.X(i, j);
    if (data.has_labels()) out << ',' << data.labels[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

void save_csv(const std::string& path, const LabeledData& data) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write CSV file '" + path + "'");
  write_csv(out, data);
}

ZScore zscore_normalize(const DataMatrix& X, const std::vector<std::string>& names) {
  if (X.rows() < 1) throw InputError("cannot normalize an empty dataset");
  ZScore z;
  z.mean = X.colwise().mean().transpose();
  const DataMatrix centered = X.rowwise() - z.mean.transpose();
  z.stddev = (centered.colwise().squaredNorm() / static_cast<double>(X.rows())).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    if (!(z.stddev[j] > 0.0))
      throw InputError("column '" +
                       (j < static_cast<Eigen::Index>(names.size()) ? names[static_cast<std::size_t>(j)]
                                                                    : std::to_string(j)) +
                       "' has zero variance");
  z.X = centered.array().rowwise() / z.stddev.transpose().array();
  return z;
}

DataMatrix zscore_inverse(const DataMatrix& Z, const Vector& mean, const Vector& stddev) {
  expect_dim("features", mean.size(), Z.cols());
  expect_dim("features", stddev.size(), Z.cols());
  DataMatrix X = Z.array().rowwise() * stddev.transpose().array();
  return X.rowwise() + mean.transpose();
}

DataMatrix corrupt_gaussian(const DataMatrix& X, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InputError("noise sigma must be >= 0");
  if (sigma == 0.0) return X;
  Rng rng(seed);
  DataMatrix out = X;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += sigma * rng.normal();
  return out;
}

Split train_test_split(Eigen::Index n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
    throw InputError("train fraction must lie in [0, 1]");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
  const auto cut = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(cut));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(cut), idx.end());
  return s;
}

DataMatrix select_rows(const DataMatrix& X, const std::vector<Eigen::Index>& rows) {
  DataMatrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);
  return out;
}

std::vector<int> select_labels(const std::vector<int>& labels, const std::vector<Eigen::Index>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(labels[static_cast<std::size_t>(r)]);
  return out;
}

}  // namespace tae
