#pragma once

#include <cstdint>
#include <vector>

namespace recalnet {

/// M x M integer counts, counts[t][p] = samples of true class t predicted p.
struct ConfusionMatrix {
  std::size_t M = 0;
  std::vector<std::uint64_t> counts;  // row-major

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes) : M(classes), counts(classes * classes, 0) {}

  std::uint64_t at(std::size_t t, std::size_t p) const { return counts[t * M + p]; }
  std::uint64_t& at(std::size_t t, std::size_t p) { return counts[t * M + p]; }
  std::uint64_t total() const;
};

ConfusionMatrix confusion(const std::vector<std::size_t>& preds,
                          const std::vector<std::size_t>& labels, std::size_t M);

/// Accuracy plus per-class and unweighted-mean precision/recall/F1.
/// Degenerate 0/0 ratios (classes absent from both axes) are defined as 0
/// and still contribute to the macro means.
struct BasicMetrics {
  double accuracy = 0.0;
  std::vector<double> precision, recall, f1;
  double precision_macro = 0.0, recall_macro = 0.0, f1_macro = 0.0;
};

BasicMetrics basic_metrics(const ConfusionMatrix& O);

/// Chance-corrected agreement with squared-distance penalties:
/// w[i][j] = (i-j)^2/(M-1)^2, Ex[i][j] = row_i * col_j / total,
/// kappa = 1 - sum(w*O)/sum(w*Ex); a zero denominator (all mass on one
/// agreed cell) is defined as kappa = 1.
double kappa_quadratic(const ConfusionMatrix& O);

struct MetricsReport {
  double accuracy = 0.0;
  double precision_macro = 0.0, recall_macro = 0.0, f1_macro = 0.0;
  double kappa_quadratic = 0.0;
  std::uint64_t n_samples = 0;
  std::vector<double> precision_per_class, recall_per_class, f1_per_class;
};

MetricsReport full_report(const ConfusionMatrix& O);

}  // namespace recalnet
