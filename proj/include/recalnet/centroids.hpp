#pragma once

#include <cstdint>
#include <vector>

#include "recalnet/tensor.hpp"

namespace recalnet {

/// Per-class centroid embeddings with epoch accumulation state. Centroids
/// start at zero, stay fixed for the duration of an epoch while detached
/// embeddings are summed per class, and are replaced by the per-class
/// averages at finalize_epoch (classes unseen that epoch keep their
/// previous centroid). Freezing makes the table permanently read-only —
/// the inference contract.
class CentroidTable {
 public:
  CentroidTable() = default;
  CentroidTable(std::size_t classes, std::size_t dim);
  static CentroidTable from_state(Tensor e_c, Tensor accum, std::vector<std::uint64_t> counts,
                                  bool frozen, std::uint64_t epoch_stamp);

  std::size_t classes() const { return e_c_.rank() == 2 ? e_c_.rows() : 0; }
  std::size_t dim() const { return e_c_.rank() == 2 ? e_c_.cols() : 0; }
  const Tensor& centroids() const { return e_c_; }
  const Tensor& accum() const { return accum_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  bool is_frozen() const { return frozen_; }
  std::uint64_t epoch_stamp() const { return epoch_stamp_; }

  /// Adds each embedding row into its class's running sum and bumps that
  /// class's count. Current centroids are untouched.
  void accumulate(const Tensor& embeddings, const std::vector<std::size_t>& labels);

  /// Replaces each centroid that saw samples with its accumulated mean,
  /// retains the rest, clears accumulation state, and bumps epoch_stamp.
  void finalize_epoch();

  /// Clears accumulation state without touching centroids or the stamp;
  /// used to abort an epoch atomically after a failed batch.
  void discard_epoch();

  void freeze();

 private:
  void require_mutable(const char* op) const;

  Tensor e_c_;
  Tensor accum_;
  std::vector<std::uint64_t> counts_;
  bool frozen_ = false;
  std::uint64_t epoch_stamp_ = 0;
};

}  // namespace recalnet
