#include "recalnet/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "recalnet/errors.hpp"

namespace recalnet {

Adam::Adam(std::vector<std::string> names, const std::vector<Tensor>& like, AdamConfig config)
    : names_(std::move(names)), config_(config) {
  if (names_.size() != like.size()) {
    throw std::invalid_argument("optimizer: " + std::to_string(names_.size()) + " names for " +
                                std::to_string(like.size()) + " parameter slots");
  }
  m_.reserve(like.size());
  v_.reserve(like.size());
  for (const Tensor& t : like) {
    m_.push_back(Tensor::zeros_like(t));
    v_.push_back(Tensor::zeros_like(t));
  }
}

void Adam::step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
                double lr) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("optimizer step: slot count mismatch");
  }
  if (lr < 0.0) throw std::invalid_argument("optimizer step: negative learning rate");
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (!params[p]->same_shape(m_[p])) {
      throw std::invalid_argument("optimizer step: parameter " + names_[p] + " has shape " +
                                  shape_str(*params[p]) + ", slot expects " + shape_str(m_[p]));
    }
    if (!grads[p]->same_shape(m_[p])) {
      throw std::invalid_argument("optimizer step: gradient for " + names_[p] + " has shape " +
                                  shape_str(*grads[p]) + ", slot expects " + shape_str(m_[p]));
    }
    if (!grads[p]->all_finite()) {
      throw std::runtime_error("optimizer step: non-finite gradient for " + names_[p]);
    }
  }

  t_ += 1;
  double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& theta = *params[p];
    const Tensor& g = *grads[p];
    for (std::size_t i = 0; i < theta.data.size(); ++i) {
      double gi = g.data[i];
      m_[p].data[i] = config_.beta1 * m_[p].data[i] + (1.0 - config_.beta1) * gi;
      v_[p].data[i] = config_.beta2 * v_[p].data[i] + (1.0 - config_.beta2) * gi * gi;
      double m_hat = m_[p].data[i] / bc1;
      double v_hat = v_[p].data[i] / bc2;
      theta.data[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

void Adam::restore(std::vector<Tensor> m, std::vector<Tensor> v, std::uint64_t t) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw std::invalid_argument("optimizer restore: slot count mismatch");
  }
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (!m[p].same_shape(m_[p]) || !v[p].same_shape(v_[p])) {
      throw std::invalid_argument("optimizer restore: shape mismatch for " + names_[p]);
    }
  }
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = t;
}

void ScheduleConfig::validate() const {
  if (!(base_lr > 0.0)) throw ConfigError("schedule.base_lr must be > 0");
  if (eta_min < 0.0 || eta_min > base_lr) {
    throw ConfigError("schedule.eta_min must satisfy 0 <= eta_min <= base_lr");
  }
  if (t0 < 1) throw ConfigError("schedule.t0 must be >= 1");
  if (t_mult < 1) throw ConfigError("schedule.t_mult must be >= 1");
  if (epochs < 1) throw ConfigError("schedule.epochs must be >= 1");
}

double lr_at(const ScheduleConfig& schedule, std::size_t epoch) {
  schedule.validate();
  if (epoch >= schedule.epochs) {
    throw std::invalid_argument("lr_at: epoch " + std::to_string(epoch) + " outside schedule of " +
                                std::to_string(schedule.epochs) + " epochs");
  }
  // Walk restart cycles: cycle i spans t0 * t_mult^i epochs.
  std::size_t t_cur = epoch;
  std::size_t cycle_len = schedule.t0;
  while (t_cur >= cycle_len) {
    t_cur -= cycle_len;
    cycle_len *= schedule.t_mult;
  }
  double progress = static_cast<double>(t_cur) / static_cast<double>(cycle_len);
  return schedule.eta_min +
         0.5 * (schedule.base_lr - schedule.eta_min) * (1.0 + std::cos(3.14159265358979323846 * progress));
}

}  // namespace recalnet
