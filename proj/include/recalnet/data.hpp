#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "recalnet/tensor.hpp"

namespace recalnet {

/// Recipe for a four-split synthetic dataset: per-class isotropic
/// Gaussians, with testII drawn from a shifted law (mean offset delta,
/// spread multiplier gamma) to emulate acquisition drift.
struct DatasetSpec {
  std::size_t d_in = 0;
  std::size_t M = 0;
  std::vector<std::vector<double>> means;  // M rows of length d_in
  std::vector<double> sigma;               // per class, > 0
  /// Per-class sample counts for train, val, testI, testII (each length M).
  std::array<std::vector<std::size_t>, 4> counts;
  std::vector<double> delta;  // length d_in; applied to testII means only
  double gamma = 1.0;         // testII spread multiplier
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

inline constexpr std::array<const char*, 4> kSplitNames = {"train", "val", "testI", "testII"};

struct Dataset {
  Tensor features;  // N x d_in
  std::vector<std::size_t> labels;
  std::string split;
};

struct DataSplits {
  Dataset train, val, testI, testII;

  const Dataset& operator[](std::size_t i) const {
    const Dataset* all[] = {&train, &val, &testI, &testII};
    return *all[i];
  }
  Dataset& operator[](std::size_t i) {
    Dataset* all[] = {&train, &val, &testI, &testII};
    return *all[i];
  }
};

/// Realizes the spec. Each split draws from its own named RNG stream, so
/// changing one split's counts leaves the others bit-identical. Samples
/// are emitted class by class; shuffling is the batcher's job.
DataSplits gen_synthetic(const DatasetSpec& spec);

/// CSV with header f0,...,f{d_in-1},label; values in shortest round-trip
/// decimal form, so save/load is bit-exact. The dataset's split tag is
/// taken from the file's stem on load.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& dataset, const std::string& path);

struct Batch {
  Tensor features;
  std::vector<std::size_t> labels;
};

/// Splits a dataset into consecutive batches, optionally through a seeded
/// permutation; the final short batch is kept. Same seed, same sequence.
std::vector<Batch> batches(const Dataset& dataset, std::size_t batch_size, std::uint64_t seed,
                           bool shuffle);

}  // namespace recalnet
