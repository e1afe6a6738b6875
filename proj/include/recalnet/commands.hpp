#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace recalnet {

/// CLI entry points. Each returns a process exit code: 0 only when every
/// declared output was fully written; failures print a diagnostic chain
/// to stderr. All commands are deterministic given their arguments —
/// rerunning produces byte-identical documents (timing sidecars excepted).

/// Realizes a generation spec into train/val/testI/testII CSVs plus a
/// manifest echoing the spec.
int cmd_gen_data(const std::string& spec_path, const std::string& out_dir);

/// Trains per a run config, then evaluates the selected checkpoint on
/// val/testI/testII; writes checkpoints, report.json, and timings.json.
int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override);

/// Evaluates a checkpoint against a CSV dataset; writes a metrics report.
int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& report_path);

/// Trains each merge variant on consecutive seeds and writes a
/// consolidated table with per-variant mean/sd metrics on testI and
/// testII plus the testI-to-testII accuracy drop.
int cmd_ablate(const std::string& config_path, const std::vector<std::string>& variants,
               std::size_t seeds, const std::string& out_dir);

/// Prints a checkpoint's centroid table, one class per row.
int cmd_dump_centroids(const std::string& checkpoint_path);

}  // namespace recalnet
