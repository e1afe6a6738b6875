#include "recalnet/commands.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "serialize.hpp"
#include "recalnet/checkpoint.hpp"
#include "recalnet/config.hpp"
#include "recalnet/errors.hpp"
#include "recalnet/trainer.hpp"
#include "recalnet/version.hpp"

namespace recalnet {

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw ConfigError("failed while writing " + path.string());
}

void write_doc(const fs::path& path, const json& doc) { write_text(path, doc.dump(1) + "\n"); }

template <class Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

json epoch_records_to_json(const TrainRecord& record) {
  json epochs = json::array();
  for (const EpochRecord& er : record.epochs) {
    epochs.push_back(json{{"epoch", er.epoch},
                          {"train_loss", er.train_loss},
                          {"lr", er.lr},
                          {"epoch_stamp", er.epoch_stamp},
                          {"val", metrics_report_to_json(er.val)}});
  }
  return epochs;
}

std::string relative_to(const std::string& path, const fs::path& base) {
  std::error_code ec;
  fs::path rel = fs::relative(path, base, ec);
  return ec ? path : rel.generic_string();
}

struct RunOutputs {
  TrainRecord record;
  MetricsReport val, testI, testII;
};

/// Trains one configuration and evaluates its selected checkpoint on all
/// three held-out splits.
RunOutputs run_training(const TrainConfig& train, const DataSplits& splits,
                        const std::string& checkpoint_dir) {
  RunOutputs out;
  out.record = fit(train, splits, checkpoint_dir);
  Checkpoint selected = load_checkpoint(out.record.selected_checkpoint);
  out.val = evaluate(selected, splits.val);
  out.testI = evaluate(selected, splits.testI);
  out.testII = evaluate(selected, splits.testII);
  return out;
}

json run_report_doc(const RunConfig& config, const RunOutputs& run, const fs::path& out_dir) {
  json checkpoints = json::array();
  for (const std::string& p : run.record.checkpoint_paths) {
    checkpoints.push_back(relative_to(p, out_dir));
  }
  return json{
      {"format_version", kFormatVersion},
      {"artifact_version", kVersion},
      {"seed", config.train.seed},
      {"config", run_config_to_json(config)},
      {"train",
       {{"selected_epoch", run.record.selected_epoch},
        {"selected_metric", run.record.selected_metric},
        {"selection", config.train.selection},
        {"selected_checkpoint", relative_to(run.record.selected_checkpoint, out_dir)},
        {"final_checkpoint", relative_to(run.record.final_checkpoint, out_dir)},
        {"checkpoints", std::move(checkpoints)},
        {"epochs", epoch_records_to_json(run.record)}}},
      {"metrics",
       {{"val", metrics_report_to_json(run.val)},
        {"testI", metrics_report_to_json(run.testI)},
        {"testII", metrics_report_to_json(run.testII)},
        {"drop_testI_to_testII", run.testI.accuracy - run.testII.accuracy}}},
  };
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// Mean and sample standard deviation (sd = 0 for a single value).
MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

json mean_sd_to_json(const MeanSd& ms) { return json{{"mean", ms.mean}, {"sd", ms.sd}}; }

json aggregate_metric(const std::vector<MetricsReport>& reports,
                      double MetricsReport::*field) {
  std::vector<double> xs;
  xs.reserve(reports.size());
  for (const MetricsReport& r : reports) xs.push_back(r.*field);
  return mean_sd_to_json(mean_sd(xs));
}

json aggregate_split(const std::vector<MetricsReport>& reports) {
  return json{{"accuracy", aggregate_metric(reports, &MetricsReport::accuracy)},
              {"precision_macro", aggregate_metric(reports, &MetricsReport::precision_macro)},
              {"recall_macro", aggregate_metric(reports, &MetricsReport::recall_macro)},
              {"f1_macro", aggregate_metric(reports, &MetricsReport::f1_macro)},
              {"kappa_quadratic", aggregate_metric(reports, &MetricsReport::kappa_quadratic)}};
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

int cmd_gen_data(const std::string& spec_path, const std::string& out_dir) {
  return guarded([&] {
    DatasetSpec spec = load_dataset_spec(spec_path);
    DataSplits splits = gen_synthetic(spec);
    fs::create_directories(out_dir);
    json files = json::object();
    for (std::size_t i = 0; i < 4; ++i) {
      std::string name = std::string(kSplitNames[i]) + ".csv";
      save_csv(splits[i], (fs::path(out_dir) / name).string());
      files[kSplitNames[i]] = name;
    }
    write_doc(fs::path(out_dir) / "manifest.json",
              json{{"format_version", kFormatVersion},
                   {"artifact_version", kVersion},
                   {"spec", dataset_spec_to_json(spec)},
                   {"files", std::move(files)}});
  });
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
  return guarded([&] {
    auto started = clock_type::now();
    RunConfig config = load_run_config(config_path);
    if (seed_override) {
      config.train.seed = *seed_override;
      config.train.model.seed = *seed_override;
    }
    std::string config_dir = fs::path(config_path).parent_path().string();
    DataSplits splits = resolve_data(config.data, config_dir);

    fs::path out(out_dir);
    auto fit_started = clock_type::now();
    RunOutputs run = run_training(config.train, splits, (out / "checkpoints").string());
    double fit_seconds = seconds_since(fit_started);

    write_doc(out / "report.json", run_report_doc(config, run, out));
    write_doc(out / "timings.json",
              json{{"format_version", kFormatVersion},
                   {"wall_clock_seconds",
                    {{"total", seconds_since(started)}, {"fit_and_eval", fit_seconds}}}});
  });
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& report_path) {
  return guarded([&] {
    Checkpoint ck = load_checkpoint(checkpoint_path);
    Dataset data = load_csv(data_path);
    MetricsReport report = evaluate(ck, data);
    json doc = metrics_report_to_json(report);
    doc["format_version"] = kFormatVersion;
    write_doc(report_path, doc);
  });
}

int cmd_ablate(const std::string& config_path, const std::vector<std::string>& variants,
               std::size_t seeds, const std::string& out_dir) {
  return guarded([&] {
    if (variants.empty()) throw ConfigError("ablate: variant list is empty");
    for (const std::string& v : variants) merge_from_string(v);  // rejects unknown names
    if (seeds < 1) throw ConfigError("ablate: seeds must be >= 1");

    auto started = clock_type::now();
    RunConfig config = load_run_config(config_path);
    std::string config_dir = fs::path(config_path).parent_path().string();
    DataSplits splits = resolve_data(config.data, config_dir);
    fs::path out(out_dir);

    std::vector<std::uint64_t> seed_list;
    for (std::size_t s = 0; s < seeds; ++s) seed_list.push_back(config.train.seed + s);

    json table = json::object();
    std::vector<std::pair<std::string, double>> drop_means;
    std::string best_variant;
    double best_drop = 0.0;
    for (const std::string& variant : variants) {
      std::vector<MetricsReport> testI_reports, testII_reports;
      std::vector<double> drops;
      for (std::size_t s = 0; s < seeds; ++s) {
        RunConfig run_config = config;
        run_config.train.model.merge = merge_from_string(variant);
        run_config.train.seed = seed_list[s];
        run_config.train.model.seed = seed_list[s];

        fs::path run_dir = out / variant / ("seed_" + std::to_string(seed_list[s]));
        RunOutputs run =
            run_training(run_config.train, splits, (run_dir / "checkpoints").string());
        write_doc(run_dir / "report.json", run_report_doc(run_config, run, run_dir));

        testI_reports.push_back(run.testI);
        testII_reports.push_back(run.testII);
        drops.push_back(run.testI.accuracy - run.testII.accuracy);
      }
      MeanSd drop = mean_sd(drops);
      drop_means.emplace_back(variant, drop.mean);
      table[variant] = json{{"testI", aggregate_split(testI_reports)},
                            {"testII", aggregate_split(testII_reports)},
                            {"drop_testI_to_testII", mean_sd_to_json(drop)}};
      if (best_variant.empty() || drop.mean < best_drop) {
        best_variant = variant;
        best_drop = drop.mean;
      }
    }

    write_doc(out / "ablation.json",
              json{{"format_version", kFormatVersion},
                   {"artifact_version", kVersion},
                   {"config", run_config_to_json(config)},
                   {"seeds", seed_list},
                   {"variants", std::move(table)},
                   {"smallest_mean_drop", best_variant}});
    write_doc(out / "timings.json",
              json{{"format_version", kFormatVersion},
                   {"wall_clock_seconds", {{"total", seconds_since(started)}}}});

    // Informational ranking; the directional claim is reported, never asserted.
    for (const auto& [variant, mean_drop] : drop_means) {
      std::cout << variant << ": mean accuracy drop testI->testII = " << format_double(mean_drop)
                << "\n";
    }
    std::cout << "smallest mean drop: " << best_variant << "\n";
  });
}

int cmd_dump_centroids(const std::string& checkpoint_path) {
  return guarded([&] {
    Checkpoint ck = load_checkpoint(checkpoint_path);
    const CentroidTable& table = ck.centroids;
    std::cout << "classes: " << table.classes() << "  dim: " << table.dim()
              << "  epoch_stamp: " << table.epoch_stamp()
              << "  frozen: " << (table.is_frozen() ? "true" : "false") << "\n";
    std::cout << "class count centroid\n";
    for (std::size_t j = 0; j < table.classes(); ++j) {
      std::cout << j << " " << table.counts()[j];
      for (std::size_t i = 0; i < table.dim(); ++i) {
        std::cout << " " << format_double(table.centroids().at(j, i));
      }
      std::cout << "\n";
    }
  });
}

}  // namespace recalnet
