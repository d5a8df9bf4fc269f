// Command-line front end for the fairness-aware multitask pipeline.
//
// Exit codes: 0 success, 1 runtime failure (I/O, numerics), 2 usage or
// configuration error (bad flags, malformed config, missing inputs).

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fairmtl/fairmtl.hpp>

namespace {

struct CliArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // --set key=value, repeatable
  fairmtl::CommandOptions opts;
};

void add_common_flags(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "key = value config file");
  cmd->add_option("--set", args.overrides, "override a config key (key=value)")
      ->take_all();
  cmd->add_option("--out-dir", args.opts.out_dir, "output directory (default: out)");
  cmd->add_option("--seed", args.opts.seed, "RNG seed (overrides config)");
}

fairmtl::CommandOptions resolve(CliArgs& args) {
  if (!args.config_path.empty()) {
    args.opts.config = fairmtl::Config::from_file(args.config_path);
  }
  for (const std::string& kv : args.overrides) {
    args.opts.config.apply_override(kv);
  }
  return args.opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairness-aware multitask text classification pipeline"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  CliArgs args;

  CLI::App* generate = app.add_subcommand("generate", "write synthetic corpora");
  add_common_flags(generate, args);

  CLI::App* train_dialect =
      app.add_subcommand("train-dialect", "train the dialect classifier");
  add_common_flags(train_dialect, args);
  std::string regime;
  train_dialect->add_option("--regime", regime, "weighted or subsampled");

  CLI::App* augment_cmd =
      app.add_subcommand("augment", "fill missing dialect labels from a model");
  add_common_flags(augment_cmd, args);
  augment_cmd->add_flag("--overwrite-dialect", args.opts.overwrite_dialect,
                        "replace existing dialect labels too");

  CLI::App* train_bias = app.add_subcommand("train-bias", "train a bias-aspect model");
  add_common_flags(train_bias, args);
  std::string mode;
  train_bias->add_option(
      "--mode", mode, "singletask, singletask+aae, multitask, or multitask+aae");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score models and write reports");
  add_common_flags(evaluate, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!regime.empty()) args.opts.regime = regime;
    if (!mode.empty()) args.opts.mode = mode;
    const fairmtl::CommandOptions opts = resolve(args);
    if (generate->parsed()) {
      fairmtl::cmd_generate(opts);
    } else if (train_dialect->parsed()) {
      fairmtl::cmd_train_dialect(opts);
    } else if (augment_cmd->parsed()) {
      fairmtl::cmd_augment(opts);
    } else if (train_bias->parsed()) {
      fairmtl::cmd_train_bias(opts);
    } else if (evaluate->parsed()) {
      fairmtl::cmd_evaluate(opts);
    }
  } catch (const fairmtl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
