#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "recalnet/centroids.hpp"
#include "recalnet/checkpoint.hpp"
#include "recalnet/data.hpp"
#include "recalnet/metrics.hpp"
#include "recalnet/model.hpp"
#include "recalnet/optim.hpp"

namespace recalnet {

struct TrainConfig {
  ModelConfig model;
  ScheduleConfig schedule;
  AdamConfig adam;
  std::size_t batch_size = 32;
  std::string selection = "accuracy";  // accuracy | f1_macro | kappa_quadratic
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double lr = 0.0;
  /// Centroid-table stamp every batch of this epoch read (pre-finalize).
  std::uint64_t epoch_stamp = 0;
  MetricsReport val;
};

struct TrainRecord {
  std::vector<EpochRecord> epochs;
  std::size_t selected_epoch = 0;
  double selected_metric = 0.0;
  std::vector<std::string> checkpoint_paths;
  std::string selected_checkpoint;
  std::string final_checkpoint;
};

/// Fired after each training batch, before the optimizer state is
/// observable elsewhere; exposes the detached embeddings that were
/// accumulated and the table stamp the forward pass read.
struct BatchEvent {
  std::size_t index;
  const Tensor& embeddings;
  const std::vector<std::size_t>& labels;
  std::uint64_t epoch_stamp;
  double loss;
};
using BatchObserver = std::function<void(const BatchEvent&)>;

/// One pass over the batches: forward with the current (pre-epoch)
/// centroids, cross-entropy, backward, optimizer step, and accumulation of
/// detached embeddings; finalizes the table after the last batch. A failed
/// batch discards the epoch's accumulation before rethrowing, leaving the
/// table as it was at epoch start. Returns the sample-weighted mean loss.
double run_epoch(ModelParams& params, const ModelConfig& config, CentroidTable& table,
                 const std::vector<Batch>& train_batches, Adam& opt, double lr,
                 const BatchObserver& observer = {});

/// Metrics of params on a dataset under a frozen copy of the table; never
/// mutates anything it is given.
MetricsReport evaluate_split(const ModelParams& params, const ModelConfig& config,
                             const CentroidTable& table, const Dataset& data);

/// Full training: schedule.epochs epochs over the train split, validation
/// after every epoch, selection by the configured metric (ties keep the
/// earliest epoch). Writes a checkpoint into out_dir per improvement plus
/// final.json; each checkpoint carries the centroid table that produced
/// its validation score.
TrainRecord fit(const TrainConfig& config, const DataSplits& splits, const std::string& out_dir);

/// Evaluates a loaded checkpoint on a dataset; the checkpoint is
/// untouched and repeated calls return identical reports.
MetricsReport evaluate(const Checkpoint& ck, const Dataset& data);

/// Order-fixed FNV-1a digest over every parameter and centroid scalar,
/// counts, freeze flag, and stamp; bit-identical state, identical digest.
std::uint64_t state_checksum(const ModelParams& params, const CentroidTable& table);

/// Reads the selection metric out of a report; unknown names are rejected.
double selection_value(const MetricsReport& report, const std::string& metric);

}  // namespace recalnet
