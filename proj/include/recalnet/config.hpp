#pragma once

#include <optional>
#include <string>

#include "recalnet/data.hpp"
#include "recalnet/trainer.hpp"

namespace recalnet {

/// Where a run's data comes from: exactly one of an inline generation
/// spec, a path to a spec file, or a directory of split CSVs
/// (train/val/testI/testII.csv). Relative paths resolve against the
/// config file's directory.
struct DataRef {
  std::optional<DatasetSpec> spec;
  std::string spec_path;
  std::string dir;
};

struct RunConfig {
  TrainConfig train;
  DataRef data;
};

/// Strict parses: unknown keys, missing required keys, or a bad
/// format_version are rejected with the offending location named.
RunConfig parse_run_config(const std::string& text, const std::string& origin);
RunConfig load_run_config(const std::string& path);
DatasetSpec parse_dataset_spec(const std::string& text, const std::string& origin);
DatasetSpec load_dataset_spec(const std::string& path);

/// Materializes the four splits a config refers to.
DataSplits resolve_data(const DataRef& ref, const std::string& config_dir);

/// Canonical serializations (sorted keys, shortest round-trip numbers) —
/// byte-stable for identical values.
std::string dataset_spec_to_text(const DatasetSpec& spec);
std::string run_config_to_text(const RunConfig& config);

}  // namespace recalnet
