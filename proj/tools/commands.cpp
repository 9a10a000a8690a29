#include "commands.hpp"

#include "tae/baselines.hpp"
#include "tae/datasets.hpp"
#include "tae/metrics.hpp"
#include "tae/model_io.hpp"
#include "tae/spectral.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tae::cli {

using nlohmann::json;

namespace {

bool header_has(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) return false;
  std::stringstream cells(line);
  std::string cell;
  while (std::getline(cells, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r\"");
    const auto e = cell.find_last_not_of(" \t\r\"");
    if (b != std::string::npos && cell.substr(b, e - b + 1) == name) return true;
  }
  return false;
}

LabeledData load_data(const DataOptions& o) {
  std::optional<std::string> label;
  if (!o.label_col.empty())
    label = o.label_col;
  else if (header_has(o.path, "label"))
    label = "label";
  LabeledData data = load_csv(o.path, o.features, label);
  if (data.dropped_rows > 0)
    warn("dropped " + std::to_string(data.dropped_rows) + " rows with missing values");
  if (o.normalize && data.X.rows() > 0) data.X = zscore_normalize(data.X, data.feature_names).X;
  return data;
}

json trace_json(const std::vector<double>& trace) {
  json a = json::array();
  for (double v : trace) a.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  return a;
}

// Records every epoch of every restart so a diverging run can still be dumped.
struct TraceRecorder {
  std::vector<std::vector<double>> runs;
  void operator()(int epoch, double loss) {
    if (epoch == 0 || runs.empty()) runs.emplace_back();
    runs.back().push_back(loss);
  }
  json to_json() const {
    json a = json::array();
    for (const auto& r : runs) a.push_back(trace_json(r));
    return a;
  }
};

std::string trace_path_for(const TrainOptions& o) {
  const std::string base = !o.report.empty() ? o.report : !o.out.empty() ? o.out : "tae_run";
  return base + ".trace.json";
}

void write_or_print(const std::string& path, const json& doc, std::ostream& out) {
  if (path.empty())
    out << doc.dump(2) << '\n';
  else
    save_json_file(path, doc);
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalDivergence& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

class WarningScope {
 public:
  explicit WarningScope(std::ostream& err)
      : previous_(set_warning_sink(
            [&err](const std::string& m) { err << "warning: " << m << '\n'; })) {}
  ~WarningScope() { set_warning_sink(std::move(previous_)); }

 private:
  WarningSink previous_;
};

}  // namespace

json to_json(const DataOptions& o) {
  return {{"path", o.path}, {"features", o.features}, {"label_col", o.label_col},
          {"normalize", o.normalize}};
}

DataOptions data_options_from_json(const json& j) {
  DataOptions o;
  o.path = j.at("path").get<std::string>();
  o.features = j.value("features", std::vector<std::string>{});
  o.label_col = j.value("label_col", std::string{});
  o.normalize = j.value("normalize", false);
  return o;
}

json to_json(const TrainOptions& o) {
  return {{"data", to_json(o.data)},   {"k", o.k},
          {"latent", o.latent},        {"lambda", o.lambda},
          {"epochs", o.epochs},        {"lr", o.lr},
          {"s_lr", o.s_lr},            {"s_update", o.s_update},
          {"arch", o.arch},            {"hidden", o.hidden},
          {"activation", o.activation}, {"seed", o.seed},
          {"restarts", o.restarts},    {"tol", o.tol}};
}

TrainOptions train_options_from_json(const json& j) {
  TrainOptions o;
  o.data = data_options_from_json(j.at("data"));
  o.k = j.value("k", o.k);
  o.latent = j.value("latent", o.latent);
  o.lambda = j.value("lambda", o.lambda);
  o.epochs = j.value("epochs", o.epochs);
  o.lr = j.value("lr", o.lr);
  o.s_lr = j.value("s_lr", o.s_lr);
  o.s_update = j.value("s_update", o.s_update);
  o.arch = j.value("arch", o.arch);
  o.hidden = j.value("hidden", o.hidden);
  o.activation = j.value("activation", o.activation);
  o.seed = j.value("seed", o.seed);
  o.restarts = j.value("restarts", o.restarts);
  o.tol = j.value("tol", o.tol);
  return o;
}

TrainConfig make_train_config(const TrainOptions& o) {
  TrainConfig c;
  c.epochs = o.epochs;
  c.learning_rate = o.lr;
  c.s_learning_rate = o.s_lr;
  c.lambda = o.lambda;
  c.latent_dim = o.latent;
  c.s_update = parse_s_update(o.s_update);
  c.seed = o.seed;
  c.tol = o.tol;
  c.restarts = o.restarts;
  return c;
}

int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
  WarningScope scope(err);
  return guarded(err, [&] {
    PlantedSpec spec;
    if (!o.spec_path.empty()) {
      spec = load_planted_spec(o.spec_path);
    } else {
      auto preset = preset_spec(o.preset, o.seed.value_or(0));
      if (!preset) throw InputError("unknown preset '" + o.preset + "'");
      spec = *preset;
    }
    if (o.seed) spec.seed = *o.seed;
    const LabeledData data = generate_planted(spec);
    if (o.out.empty())
      write_csv(out, data);
    else
      save_csv(o.out, data);
    return static_cast<int>(kOk);
  });
}

int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  WarningScope scope(err);
  TraceRecorder recorder;
  const int code = guarded(err, [&] {
    const auto start = std::chrono::steady_clock::now();
    const LabeledData data = load_data(o.data);
    TrainConfig config = make_train_config(o);
    validate_config(config);
    if (const auto w = lambda_range_warning(o.lambda); !w.empty()) warn(w);
    config.observer = [&recorder](int epoch, double loss) { recorder(epoch, loss); };

    json record;
    record["command"] = "train";
    record["config"] = to_json(o);
    record["seed"] = o.seed;
    record["rng"] = kRngTag;
    record["n"] = data.X.rows();
    record["d"] = data.X.cols();

    std::vector<int> labels;
    DataMatrix recon;
    json model_doc;
    if (o.arch == "linear") {
      const TrainResult r = train(data.X, o.k, config);
      labels = hard_labels(r.S);
      recon = reconstruct_all(data.X, r.model);
      model_doc = to_json(r.model);
      record["loss_trace"] = trace_json(r.loss_trace);
      record["epochs_run"] = r.epochs_run;
      record["converged"] = r.converged;
      record["reseeds"] = r.reseeds;
      const SpectralReport report = verify_tae_optimum(data.X, r.S, r.model);
      record["spectral_report"] = to_json(report);
    } else if (o.arch == "mlp") {
      MLPTrainConfig mc;
      mc.base = config;
      mc.hidden = o.hidden;
      mc.activation = parse_activation(o.activation);
      const MLPTrainResult r = train_mlp(data.X, o.k, mc);
      labels = hard_labels(r.S);
      recon = mlp_reconstruct_all(data.X, r.model);
      model_doc = to_json(r.model);
      record["loss_trace"] = trace_json(r.loss_trace);
      record["epochs_run"] = r.epochs_run;
      record["converged"] = r.converged;
      record["reseeds"] = r.reseeds;
      record["spectral_report"] = nullptr;
    } else {
      throw InputError("unknown --arch '" + o.arch + "' (expected linear or mlp)");
    }
    record["final_loss"] = record["loss_trace"].back();

    json metrics;
    metrics["ari"] = data.has_labels() && data.X.rows() >= 2
                         ? json(adjusted_rand_index(data.labels, labels))
                         : json(nullptr);
    metrics["mse"] = mse(data.X, recon);
    record["metrics"] = metrics;
    record["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!o.out.empty()) save_json_file(o.out, model_doc);
    write_or_print(o.report, record, out);
    return static_cast<int>(kOk);
  });
  if (code == kDivergence) {
    const std::string path = trace_path_for(o);
    json trace{{"command", "train"}, {"config", to_json(o)}, {"runs", recorder.to_json()}};
    try {
      save_json_file(path, trace);
      err << "loss trace written to " << path << '\n';
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
    }
  }
  return code;
}

int cmd_cluster(const ClusterOptions& o, std::ostream& out, std::ostream& err) {
  WarningScope scope(err);
  return guarded(err, [&] {
    const AnyModel model = model_from_json(load_json_file(o.model));
    const LabeledData data = load_data(o.data);
    std::ostringstream text;
    if (data.X.rows() > 0) {
      const Eigen::Index d = std::visit([](const auto& m) { return m.d(); }, model);
      expect_dim("features", d, data.X.cols());
      text << "cluster\n";
      for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
        const Vector x = data.X.row(i).transpose();
        const Assignment a = std::holds_alternative<TAEModel>(model)
                                 ? assign_new_point(x, std::get<TAEModel>(model))
                                 : mlp_assign_new_point(x, std::get<TensorizedMLP>(model));
        text << a.cluster << '\n';
      }
    }
    if (o.out.empty()) {
      out << text.str();
    } else {
      std::ofstream file(o.out);
      if (!file) throw InputError("cannot write '" + o.out + "'");
      file << text.str();
    }
    return static_cast<int>(kOk);
  });
}

int cmd_denoise(const DenoiseOptions& o, std::ostream& out, std::ostream& err) {
  WarningScope scope(err);
  return guarded(err, [&] {
    const LabeledData data = load_data(o.data);
    if (o.noise_sigma < 0.0) throw InputError("--noise-sigma must be >= 0");
    const std::uint64_t noise_seed = o.seed;
    const std::uint64_t split_seed = o.seed + 1;
    const DataMatrix noisy = corrupt_gaussian(data.X, o.noise_sigma, noise_seed);
    const Split split = train_test_split(data.X.rows(), o.train_fraction, split_seed);
    if (split.test.empty() || split.train.empty())
      throw InputError("train/test split leaves an empty side");
    const DataMatrix train_noisy = select_rows(noisy, split.train);
    const DataMatrix test_noisy = select_rows(noisy, split.test);
    const DataMatrix test_clean = select_rows(data.X, split.test);

    TrainConfig config;
    config.epochs = o.epochs;
    config.learning_rate = o.lr;
    config.lambda = o.lambda;
    config.latent_dim = o.latent;
    config.s_update = parse_s_update(o.s_update);
    config.seed = o.seed;
    config.restarts = o.restarts;
    if (const auto w = lambda_range_warning(o.lambda); !w.empty()) warn(w);

    const TrainResult tae = train(train_noisy, o.k, config);
    const LinearAEResult ae = train_linear_ae(train_noisy, o.latent, o.lambda, config);
    const double mse_tae = mse(test_clean, reconstruct_all(test_noisy, tae.model));
    const double mse_ae = mse(test_clean, linear_ae_reconstruct(ae.model, test_noisy));

    json record;
    record["command"] = "denoise";
    record["config"] = {{"data", to_json(o.data)},
                        {"noise_sigma", o.noise_sigma},
                        {"train_fraction", o.train_fraction},
                        {"k", o.k},
                        {"latent", o.latent},
                        {"lambda", o.lambda},
                        {"epochs", o.epochs},
                        {"lr", o.lr},
                        {"s_update", o.s_update},
                        {"restarts", o.restarts}};
    record["seed"] = o.seed;
    record["noise_seed"] = noise_seed;
    record["split_seed"] = split_seed;
    record["rng"] = kRngTag;
    record["n_train"] = split.train.size();
    record["n_test"] = split.test.size();
    record["mse_tae"] = mse_tae;
    record["mse_ae"] = mse_ae;
    record["tae_loss_trace"] = trace_json(tae.loss_trace);
    if (!o.model_out.empty()) save_json_file(o.model_out, to_json(tae.model));
    write_or_print(o.report, record, out);
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  WarningScope scope(err);
  return guarded(err, [&] {
    const AnyModel any = model_from_json(load_json_file(o.model));
    if (!std::holds_alternative<TAEModel>(any)) {
      err << "error: optimality check supports linear models only\n";
      return static_cast<int>(kUnsupported);
    }
    const TAEModel& model = std::get<TAEModel>(any);
    const LabeledData data = load_data(o.data);
    if (data.X.rows() == 0) throw InputError("no data rows to verify against");
    expect_dim("features", model.d(), data.X.cols());
    const AssignmentMatrix S = s_update_lloyd(data.X, model);
    const SpectralReport report = verify_tae_optimum(data.X, S, model);
    write_or_print(o.report, to_json(report), out);
    return static_cast<int>(report.pass ? kOk : kVerifyFailed);
  });
}

}  // namespace tae::cli
