#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recalnet/commands.hpp"
#include "recalnet/model.hpp"
#include "recalnet/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"centroid-recalibration classifier: data generation, training, "
               "evaluation, and merge-strategy ablations"};
  app.set_version_flag("--version", recalnet::kVersion);
  app.require_subcommand(1);

  std::string spec_path, config_path, checkpoint_path, data_path, report_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> variants = recalnet::merge_names();
  std::size_t seeds = 1;

  CLI::App* gen = app.add_subcommand("gen-data", "Generate the four CSV splits from a spec");
  gen->add_option("--spec", spec_path, "dataset spec file")->required();
  gen->add_option("--out", out_dir, "output directory")->required();

  CLI::App* train = app.add_subcommand("train", "Train a model and report metrics");
  train->add_option("--config", config_path, "run config file")->required();
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_option("--seed", seed, "override the config's seed");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a CSV dataset");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  eval->add_option("--data", data_path, "CSV dataset")->required();
  eval->add_option("--report", report_path, "metrics report output path")->required();

  CLI::App* ablate = app.add_subcommand("ablate", "Sweep merge variants over several seeds");
  ablate->add_option("--config", config_path, "run config file")->required();
  ablate->add_option("--variants", variants, "merge variants to sweep")
      ->delimiter(',')
      ->capture_default_str();
  ablate->add_option("--seeds", seeds, "number of consecutive seeds per variant")
      ->capture_default_str();
  ablate->add_option("--out", out_dir, "output directory")->required();

  CLI::App* dump = app.add_subcommand("dump-centroids", "Print a checkpoint's centroid table");
  dump->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) return recalnet::cmd_gen_data(spec_path, out_dir);
  if (train->parsed()) return recalnet::cmd_train(config_path, out_dir, seed);
  if (eval->parsed()) return recalnet::cmd_eval(checkpoint_path, data_path, report_path);
  if (ablate->parsed()) return recalnet::cmd_ablate(config_path, variants, seeds, out_dir);
  if (dump->parsed()) return recalnet::cmd_dump_centroids(checkpoint_path);
  return 1;
}
