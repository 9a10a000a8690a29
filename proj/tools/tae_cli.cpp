#include "commands.hpp"

#include "tae/datasets.hpp"
#include "tae/model_io.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_data_flags(CLI::App* cmd, tae::cli::DataOptions& d, const std::string& flag) {
  cmd->add_option(flag, d.path, "input CSV (header row, comma separated)")->required();
  cmd->add_option("--features", d.features, "feature columns (default: all but the label)")
      ->delimiter(',');
  cmd->add_option("--label-col", d.label_col, "label column (default: 'label' if present)");
  cmd->add_flag("--normalize", d.normalize, "z-score every feature column");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace tae::cli;
  CLI::App app{"Tensorized autoencoders with k-means regularization"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate planted clusters as CSV");
  auto* spec_opt = gen_cmd->add_option("--spec", gen.spec_path, "planted spec JSON");
  auto* preset_opt = gen_cmd->add_option("--preset", gen.preset, "built-in spec")
                         ->check(CLI::IsMember(tae::preset_names()));
  spec_opt->excludes(preset_opt);
  gen_cmd->add_option("--seed", gen.seed, "override the spec seed");
  gen_cmd->add_option("--out", gen.out, "output CSV (default: stdout)");

  TrainOptions train;
  std::string replay;
  auto* train_cmd = app.add_subcommand("train", "train a tensorized autoencoder");
  add_data_flags(train_cmd, train.data, "--data");
  train_cmd->add_option("--k", train.k, "number of clusters")->check(CLI::PositiveNumber);
  train_cmd->add_option("--latent", train.latent, "latent dimension h")->check(CLI::PositiveNumber);
  train_cmd->add_option("--lambda", train.lambda, "latent penalty weight");
  train_cmd->add_option("--epochs", train.epochs, "epoch cap (0 keeps the initialization)");
  train_cmd->add_option("--lr", train.lr, "weight learning rate");
  train_cmd->add_option("--s-lr", train.s_lr, "assignment step for --s-update pgd");
  train_cmd->add_option("--s-update", train.s_update)->check(CLI::IsMember({"lloyd", "pgd"}));
  train_cmd->add_option("--arch", train.arch)->check(CLI::IsMember({"linear", "mlp"}));
  train_cmd->add_option("--hidden", train.hidden, "MLP hidden width (default 2d)");
  train_cmd->add_option("--activation", train.activation)
      ->check(CLI::IsMember({"relu", "tanh", "identity"}));
  train_cmd->add_option("--seed", train.seed);
  train_cmd->add_option("--restarts", train.restarts)->check(CLI::PositiveNumber);
  train_cmd->add_option("--tol", train.tol, "relative loss-change stopping threshold");
  train_cmd->add_option("--out", train.out, "model JSON");
  train_cmd->add_option("--report", train.report, "run record JSON (default: stdout)");
  train_cmd->add_option("--replay", replay, "rerun the config stored in a run record");
  train_cmd->get_option("--data")->required(false);

  ClusterOptions cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "assign rows to clusters of a model");
  add_data_flags(cluster_cmd, cluster.data, "--data");
  cluster_cmd->add_option("--model", cluster.model)->required();
  cluster_cmd->add_option("--out", cluster.out, "labels CSV (default: stdout)");

  DenoiseOptions denoise;
  auto* denoise_cmd = app.add_subcommand("denoise", "held-out denoising, TAE vs single AE");
  add_data_flags(denoise_cmd, denoise.data, "--data-clean");
  denoise_cmd->add_option("--noise-sigma", denoise.noise_sigma);
  denoise_cmd->add_option("--train-fraction", denoise.train_fraction)
      ->check(CLI::Range(0.0, 1.0));
  denoise_cmd->add_option("--k", denoise.k)->check(CLI::PositiveNumber);
  denoise_cmd->add_option("--latent", denoise.latent)->check(CLI::PositiveNumber);
  denoise_cmd->add_option("--lambda", denoise.lambda);
  denoise_cmd->add_option("--epochs", denoise.epochs);
  denoise_cmd->add_option("--lr", denoise.lr);
  denoise_cmd->add_option("--s-update", denoise.s_update)->check(CLI::IsMember({"lloyd", "pgd"}));
  denoise_cmd->add_option("--seed", denoise.seed);
  denoise_cmd->add_option("--restarts", denoise.restarts)->check(CLI::PositiveNumber);
  denoise_cmd->add_option("--model-out", denoise.model_out);
  denoise_cmd->add_option("--report", denoise.report, "report JSON (default: stdout)");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "check a linear model for optimality");
  add_data_flags(verify_cmd, verify.data, "--data");
  verify_cmd->add_option("--model", verify.model)->required();
  verify_cmd->add_option("--report", verify.report, "report JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  if (*gen_cmd) {
    if (gen.spec_path.empty() && gen.preset.empty()) {
      std::cerr << "error: gen needs --spec or --preset\n";
      return kInputError;
    }
    return cmd_gen(gen, std::cout, std::cerr);
  }
  if (*train_cmd) {
    if (!replay.empty()) {
      try {
        const auto record = tae::load_json_file(replay);
        const std::string out = train.out, report = train.report;
        train = train_options_from_json(record.at("config"));
        train.out = out;
        train.report = report;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
      }
    } else if (train.data.path.empty()) {
      std::cerr << "error: train needs --data or --replay\n";
      return kInputError;
    }
    return cmd_train(train, std::cout, std::cerr);
  }
  if (*cluster_cmd) return cmd_cluster(cluster, std::cout, std::cerr);
  if (*denoise_cmd) return cmd_denoise(denoise, std::cout, std::cerr);
  return cmd_verify(verify, std::cout, std::cerr);
}
