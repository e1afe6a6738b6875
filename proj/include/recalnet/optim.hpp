#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recalnet/tensor.hpp"

namespace recalnet {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction over a fixed list of named parameter slots.
/// Slot order is the canonical parameter order, fixed at construction;
/// step() applies one update to every slot. lr = 0 is legal and advances
/// the moments and step counter without moving parameters.
class Adam {
 public:
  Adam(std::vector<std::string> names, const std::vector<Tensor>& like, AdamConfig config = {});

  void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
            double lr);

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Tensor>& m() const { return m_; }
  const std::vector<Tensor>& v() const { return v_; }
  std::uint64_t t() const { return t_; }
  const AdamConfig& config() const { return config_; }

  /// Reinstates saved moments and step counter (checkpoint restore).
  void restore(std::vector<Tensor> m, std::vector<Tensor> v, std::uint64_t t);

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> m_, v_;
  std::uint64_t t_ = 0;
  AdamConfig config_;
};

/// Cosine annealing with warm restarts, evaluated per epoch:
/// lr = eta_min + (base_lr - eta_min)/2 * (1 + cos(pi * t_cur / T_i))
/// where t_cur resets at each restart and cycle i has length t0 * t_mult^i.
struct ScheduleConfig {
  double base_lr = 1e-3;
  double eta_min = 1e-3;
  std::size_t t0 = 20;
  std::size_t t_mult = 1;
  std::size_t epochs = 50;

  void validate() const;  // throws ConfigError
};

double lr_at(const ScheduleConfig& schedule, std::size_t epoch);

}  // namespace recalnet
