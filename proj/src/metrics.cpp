#include "recalnet/metrics.hpp"

#include <stdexcept>
#include <string>

namespace recalnet {

namespace {

double ratio_or_zero(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

void require_nonempty(const ConfusionMatrix& O, const char* op) {
  if (O.M == 0 || O.total() == 0) {
    throw std::invalid_argument(std::string(op) + ": empty confusion matrix");
  }
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (std::uint64_t c : counts) n += c;
  return n;
}

ConfusionMatrix confusion(const std::vector<std::size_t>& preds,
                          const std::vector<std::size_t>& labels, std::size_t M) {
  if (preds.size() != labels.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(preds.size()) + " predictions vs " +
                                std::to_string(labels.size()) + " labels");
  }
  ConfusionMatrix O(M);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] >= M || preds[i] >= M) {
      throw std::invalid_argument("confusion: class index out of range at sample " +
                                  std::to_string(i));
    }
    O.at(labels[i], preds[i]) += 1;
  }
  return O;
}

BasicMetrics basic_metrics(const ConfusionMatrix& O) {
  require_nonempty(O, "basic_metrics");
  std::size_t m = O.M;
  double n = static_cast<double>(O.total());

  BasicMetrics out;
  double trace = 0.0;
  for (std::size_t j = 0; j < m; ++j) trace += static_cast<double>(O.at(j, j));
  out.accuracy = trace / n;

  out.precision.resize(m);
  out.recall.resize(m);
  out.f1.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    double row = 0.0, col = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      row += static_cast<double>(O.at(j, k));
      col += static_cast<double>(O.at(k, j));
    }
    double diag = static_cast<double>(O.at(j, j));
    out.precision[j] = ratio_or_zero(diag, col);
    out.recall[j] = ratio_or_zero(diag, row);
    out.f1[j] = ratio_or_zero(2.0 * out.precision[j] * out.recall[j],
                              out.precision[j] + out.recall[j]);
    out.precision_macro += out.precision[j];
    out.recall_macro += out.recall[j];
    out.f1_macro += out.f1[j];
  }
  out.precision_macro /= static_cast<double>(m);
  out.recall_macro /= static_cast<double>(m);
  out.f1_macro /= static_cast<double>(m);
  return out;
}

double kappa_quadratic(const ConfusionMatrix& O) {
  require_nonempty(O, "kappa_quadratic");
  std::size_t m = O.M;
  if (m < 2) throw std::invalid_argument("kappa_quadratic: needs at least 2 classes");

  double n = static_cast<double>(O.total());
  std::vector<double> row(m, 0.0), col(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double c = static_cast<double>(O.at(i, j));
      row[i] += c;
      col[j] += c;
    }
  }

  double norm = static_cast<double>((m - 1) * (m - 1));
  double observed = 0.0, expected = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double di = static_cast<double>(i) - static_cast<double>(j);
      double w = di * di / norm;
      observed += w * static_cast<double>(O.at(i, j));
      expected += w * row[i] * col[j] / n;
    }
  }
  if (expected == 0.0) return 1.0;  // all mass on one agreed cell
  return 1.0 - observed / expected;
}

MetricsReport full_report(const ConfusionMatrix& O) {
  BasicMetrics basic = basic_metrics(O);
  MetricsReport report;
  report.accuracy = basic.accuracy;
  report.precision_macro = basic.precision_macro;
  report.recall_macro = basic.recall_macro;
  report.f1_macro = basic.f1_macro;
  report.kappa_quadratic = kappa_quadratic(O);
  report.n_samples = O.total();
  report.precision_per_class = std::move(basic.precision);
  report.recall_per_class = std::move(basic.recall);
  report.f1_per_class = std::move(basic.f1);
  return report;
}

}  // namespace recalnet
