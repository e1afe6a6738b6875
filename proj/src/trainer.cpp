#include "recalnet/trainer.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <limits>

#include "recalnet/errors.hpp"
#include "recalnet/rng.hpp"

namespace recalnet {

namespace {

std::uint64_t epoch_shuffle_seed(std::uint64_t run_seed, std::size_t epoch) {
  return mix64(run_seed) ^ mix64(static_cast<std::uint64_t>(epoch) + 1);
}

void feed_bytes(std::uint64_t& h, const void* p, std::size_t n) {
  const unsigned char* bytes = static_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

void feed_tensor(std::uint64_t& h, const Tensor& t) {
  for (std::size_t e : t.shape) {
    std::uint64_t v = e;
    feed_bytes(h, &v, sizeof(v));
  }
  if (!t.data.empty()) feed_bytes(h, t.data.data(), t.data.size() * sizeof(double));
}

std::string checkpoint_name(std::size_t epoch) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "epoch_%04zu.json", epoch);
  return buf;
}

Checkpoint assemble_checkpoint(const TrainConfig& cfg, const ModelParams& params,
                               const CentroidTable& table, const Adam& opt,
                               std::size_t epochs_completed) {
  Checkpoint ck;
  ck.config = cfg.model;
  ck.params = params;
  ck.centroids = table;
  ck.adam_config = cfg.adam;
  ck.adam_m = opt.m();
  ck.adam_v = opt.v();
  ck.adam_t = opt.t();
  ck.schedule = cfg.schedule;
  ck.epochs_completed = epochs_completed;
  ck.rng_state = cfg.seed;
  return ck;
}

}  // namespace

void TrainConfig::validate() const {
  model.validate();
  schedule.validate();
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  MetricsReport probe;
  selection_value(probe, selection);  // rejects unknown metric names
}

double selection_value(const MetricsReport& report, const std::string& metric) {
  if (metric == "accuracy") return report.accuracy;
  if (metric == "f1_macro") return report.f1_macro;
  if (metric == "kappa_quadratic") return report.kappa_quadratic;
  throw ConfigError("unknown selection metric '" + metric +
                    "' (expected accuracy, f1_macro, or kappa_quadratic)");
}

double run_epoch(ModelParams& params, const ModelConfig& config, CentroidTable& table,
                 const std::vector<Batch>& train_batches, Adam& opt, double lr,
                 const BatchObserver& observer) {
  if (table.is_frozen()) throw FreezeViolation("run_epoch called with a frozen centroid table");

  // The optimizer's slots must be exactly the parameters the forward pass
  // binds; a recal block that the merge strategy never exercises would
  // silently desynchronize the two, so reject it up front.
  std::vector<Tensor*> param_ptrs;
  {
    std::size_t slot = 0;
    bool aligned = true;
    params.for_each([&](const std::string& name, Tensor& t) {
      if (slot >= opt.names().size() || opt.names()[slot] != name) aligned = false;
      param_ptrs.push_back(&t);
      ++slot;
    });
    if (!aligned || slot != opt.names().size()) {
      throw ConfigError("optimizer slots do not match the model's parameter set");
    }
    if (config.merge == Merge::backbone_only && params.recal) {
      throw ConfigError("backbone_only training must not carry recalibration parameters");
    }
  }

  double loss_sum = 0.0;
  std::size_t sample_count = 0;
  try {
    for (std::size_t b = 0; b < train_batches.size(); ++b) {
      const Batch& batch = train_batches[b];
      std::uint64_t stamp = table.epoch_stamp();

      Graph g;
      GraphForward fwd =
          build_forward(g, batch.features, params, config, table.centroids(), /*trainable=*/true);
      NodeId loss_node = g.cross_entropy(fwd.logits, batch.labels);
      double loss = g.value(loss_node).data[0];
      GradMap grads = g.backward(loss_node);

      std::vector<const Tensor*> grad_ptrs;
      grad_ptrs.reserve(fwd.param_ids.size());
      for (NodeId id : fwd.param_ids) grad_ptrs.push_back(&grads.at(id));

      const Tensor detached = g.value(fwd.embeddings);
      table.accumulate(detached, batch.labels);
      opt.step(param_ptrs, grad_ptrs, lr);

      loss_sum += loss * static_cast<double>(batch.labels.size());
      sample_count += batch.labels.size();
      if (observer) observer(BatchEvent{b, detached, batch.labels, stamp, loss});
    }
  } catch (...) {
    table.discard_epoch();
    throw;
  }
  table.finalize_epoch();
  return sample_count == 0 ? 0.0 : loss_sum / static_cast<double>(sample_count);
}

MetricsReport evaluate_split(const ModelParams& params, const ModelConfig& config,
                             const CentroidTable& table, const Dataset& data) {
  if (data.features.cols() != config.d_in) {
    throw ConfigError("dataset '" + data.split + "' has " + std::to_string(data.features.cols()) +
                      " features, model expects " + std::to_string(config.d_in));
  }
  CentroidTable frozen = table;
  frozen.freeze();

  std::vector<std::size_t> preds;
  preds.reserve(data.labels.size());
  for (const Batch& batch : batches(data, 256, 0, /*shuffle=*/false)) {
    ForwardResult out = model_forward(batch.features, params, config, frozen.centroids());
    for (std::size_t p : predict(out.logits)) preds.push_back(p);
  }
  return full_report(confusion(preds, data.labels, config.M));
}

TrainRecord fit(const TrainConfig& config, const DataSplits& splits, const std::string& out_dir) {
  config.validate();
  if (splits.train.labels.empty() || splits.val.labels.empty()) {
    throw ConfigError("fit needs nonempty train and val splits");
  }
  if (splits.train.features.cols() != config.model.d_in) {
    throw ConfigError("train split has " + std::to_string(splits.train.features.cols()) +
                      " features, model expects " + std::to_string(config.model.d_in));
  }
  std::filesystem::create_directories(out_dir);

  ModelConfig model_config = config.model;
  ModelParams params = init_params(model_config);
  std::vector<std::string> names;
  std::vector<Tensor> like;
  params.for_each([&](const std::string& name, Tensor& t) {
    names.push_back(name);
    like.push_back(t);
  });
  Adam opt(std::move(names), like, config.adam);
  CentroidTable table(model_config.M, model_config.D);

  TrainRecord record;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < config.schedule.epochs; ++epoch) {
    double lr = lr_at(config.schedule, epoch);
    std::uint64_t stamp = table.epoch_stamp();
    std::vector<Batch> train_batches =
        batches(splits.train, config.batch_size, epoch_shuffle_seed(config.seed, epoch), true);
    double train_loss = run_epoch(params, model_config, table, train_batches, opt, lr);
    MetricsReport val = evaluate_split(params, model_config, table, splits.val);
    double metric = selection_value(val, config.selection);

    record.epochs.push_back(EpochRecord{epoch, train_loss, lr, stamp, val});
    if (metric > best) {
      best = metric;
      record.selected_epoch = epoch;
      record.selected_metric = metric;
      std::string path = (std::filesystem::path(out_dir) / checkpoint_name(epoch)).string();
      save_checkpoint(assemble_checkpoint(config, params, table, opt, epoch + 1), path);
      record.checkpoint_paths.push_back(path);
      record.selected_checkpoint = path;
    }
  }

  std::string final_path = (std::filesystem::path(out_dir) / "final.json").string();
  save_checkpoint(assemble_checkpoint(config, params, table, opt, config.schedule.epochs),
                  final_path);
  record.checkpoint_paths.push_back(final_path);
  record.final_checkpoint = final_path;
  return record;
}

MetricsReport evaluate(const Checkpoint& ck, const Dataset& data) {
  if (data.features.cols() != ck.config.d_in) {
    throw ConfigError("dataset '" + data.split + "' has " + std::to_string(data.features.cols()) +
                      " features, checkpoint expects " + std::to_string(ck.config.d_in));
  }
  return evaluate_split(ck.params, ck.config, ck.centroids, data);
}

std::uint64_t state_checksum(const ModelParams& params, const CentroidTable& table) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  params.for_each([&](const std::string& name, const Tensor& t) {
    feed_bytes(h, name.data(), name.size());
    feed_tensor(h, t);
  });
  feed_tensor(h, table.centroids());
  feed_tensor(h, table.accum());
  for (std::uint64_t c : table.counts()) feed_bytes(h, &c, sizeof(c));
  std::uint64_t frozen = table.is_frozen() ? 1 : 0;
  feed_bytes(h, &frozen, sizeof(frozen));
  std::uint64_t stamp = table.epoch_stamp();
  feed_bytes(h, &stamp, sizeof(stamp));
  return h;
}

}  // namespace recalnet
