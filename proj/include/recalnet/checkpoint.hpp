#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recalnet/centroids.hpp"
#include "recalnet/model.hpp"
#include "recalnet/optim.hpp"

namespace recalnet {

/// Complete training state: everything needed to resume or evaluate.
/// Serialized as a self-describing versioned document; every stored
/// scalar survives a save/load round trip bit-exactly.
struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  CentroidTable centroids;

  AdamConfig adam_config;
  std::vector<Tensor> adam_m, adam_v;  // canonical parameter order
  std::uint64_t adam_t = 0;

  ScheduleConfig schedule;
  std::uint64_t epochs_completed = 0;
  std::uint64_t rng_state = 0;  // the run's master seed
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace recalnet
