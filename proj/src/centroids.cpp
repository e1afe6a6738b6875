#include "recalnet/centroids.hpp"

#include <stdexcept>
#include <string>

#include "recalnet/errors.hpp"

namespace recalnet {

CentroidTable::CentroidTable(std::size_t classes, std::size_t dim)
    : e_c_(Tensor::zeros(classes, dim)),
      accum_(Tensor::zeros(classes, dim)),
      counts_(classes, 0) {
  if (classes == 0 || dim == 0) {
    throw std::invalid_argument("centroid table needs at least one class and one dimension");
  }
}

CentroidTable CentroidTable::from_state(Tensor e_c, Tensor accum, std::vector<std::uint64_t> counts,
                                        bool frozen, std::uint64_t epoch_stamp) {
  if (e_c.rank() != 2 || !e_c.same_shape(accum) || counts.size() != e_c.rows()) {
    throw std::invalid_argument("inconsistent centroid state: centroids " + shape_str(e_c) +
                                ", accum " + shape_str(accum) + ", " +
                                std::to_string(counts.size()) + " counts");
  }
  CentroidTable t;
  t.e_c_ = std::move(e_c);
  t.accum_ = std::move(accum);
  t.counts_ = std::move(counts);
  t.frozen_ = frozen;
  t.epoch_stamp_ = epoch_stamp;
  return t;
}

void CentroidTable::require_mutable(const char* op) const {
  if (frozen_) {
    throw FreezeViolation(std::string(op) + " called on a frozen centroid table");
  }
}

void CentroidTable::accumulate(const Tensor& embeddings, const std::vector<std::size_t>& labels) {
  require_mutable("accumulate");
  std::size_t m = classes(), d = dim();
  if (embeddings.rank() != 2 || embeddings.cols() != d) {
    throw std::invalid_argument("embeddings have shape " + shape_str(embeddings) + ", table is " +
                                shape_str(e_c_));
  }
  if (embeddings.rows() != labels.size()) {
    throw std::invalid_argument(std::to_string(labels.size()) + " labels for " +
                                std::to_string(embeddings.rows()) + " embedding rows");
  }
  for (std::size_t y : labels) {
    if (y >= m) {
      throw std::invalid_argument("label " + std::to_string(y) + " out of range for " +
                                  std::to_string(m) + " classes");
    }
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::size_t y = labels[i];
    for (std::size_t j = 0; j < d; ++j) {
      accum_.at(y, j) += embeddings.at(i, j);
    }
    counts_[y] += 1;
  }
}

void CentroidTable::finalize_epoch() {
  require_mutable("finalize_epoch");
  std::size_t m = classes(), d = dim();
  for (std::size_t y = 0; y < m; ++y) {
    if (counts_[y] == 0) continue;  // class unseen this epoch: retain
    // True division (not reciprocal multiplication) so the result is
    // bit-equal to sum/count recomputed independently.
    for (std::size_t j = 0; j < d; ++j) {
      e_c_.at(y, j) = accum_.at(y, j) / static_cast<double>(counts_[y]);
    }
  }
  discard_epoch();
  epoch_stamp_ += 1;
}

void CentroidTable::discard_epoch() {
  require_mutable("discard_epoch");
  std::fill(accum_.data.begin(), accum_.data.end(), 0.0);
  std::fill(counts_.begin(), counts_.end(), 0);
}

void CentroidTable::freeze() { frozen_ = true; }

}  // namespace recalnet
