#pragma once

#include "json_util.hpp"
#include "recalnet/config.hpp"
#include "recalnet/data.hpp"
#include "recalnet/metrics.hpp"
#include "recalnet/model.hpp"
#include "recalnet/optim.hpp"
#include "recalnet/version.hpp"

namespace recalnet {

inline json model_config_to_json(const ModelConfig& c) {
  return json{{"d_in", c.d_in},
              {"hidden", c.hidden},
              {"D", c.D},
              {"M", c.M},
              {"merge", merge_to_string(c.merge)},
              {"seed", c.seed},
              {"scaled_attention", c.scaled_attention}};
}

/// allow_seed distinguishes checkpoints (which store the init seed inside
/// the config) from run-config files (where the single top-level seed is
/// authoritative and a nested one would be ambiguous).
template <class Error>
ModelConfig model_config_from_json(const json& j, bool allow_seed) {
  if (allow_seed) {
    check_keys<Error>(j, "model", {"d_in", "hidden", "D", "M", "merge", "seed", "scaled_attention"});
  } else {
    check_keys<Error>(j, "model", {"d_in", "hidden", "D", "M", "merge", "scaled_attention"});
  }
  ModelConfig c;
  c.d_in = need<Error>(j, "model", "d_in").template get<std::size_t>();
  c.D = need<Error>(j, "model", "D").template get<std::size_t>();
  c.M = need<Error>(j, "model", "M").template get<std::size_t>();
  if (j.contains("hidden")) c.hidden = j.at("hidden").template get<std::vector<std::size_t>>();
  if (j.contains("merge")) {
    c.merge = merge_from_string(j.at("merge").template get<std::string>());
  }
  if (j.contains("seed")) c.seed = j.at("seed").template get<std::uint64_t>();
  if (j.contains("scaled_attention")) c.scaled_attention = j.at("scaled_attention").template get<bool>();
  return c;
}

inline json schedule_config_to_json(const ScheduleConfig& s) {
  return json{{"base_lr", s.base_lr},
              {"eta_min", s.eta_min},
              {"t0", s.t0},
              {"t_mult", s.t_mult},
              {"epochs", s.epochs}};
}

template <class Error>
ScheduleConfig schedule_config_from_json(const json& j) {
  check_keys<Error>(j, "schedule", {"base_lr", "eta_min", "t0", "t_mult", "epochs"});
  ScheduleConfig s;
  if (j.contains("base_lr")) s.base_lr = j.at("base_lr").template get<double>();
  if (j.contains("eta_min")) s.eta_min = j.at("eta_min").template get<double>();
  if (j.contains("t0")) s.t0 = j.at("t0").template get<std::size_t>();
  if (j.contains("t_mult")) s.t_mult = j.at("t_mult").template get<std::size_t>();
  if (j.contains("epochs")) s.epochs = j.at("epochs").template get<std::size_t>();
  return s;
}

inline json adam_config_to_json(const AdamConfig& a) {
  return json{{"beta1", a.beta1}, {"beta2", a.beta2}, {"eps", a.eps}};
}

template <class Error>
AdamConfig adam_config_from_json(const json& j) {
  check_keys<Error>(j, "optimizer", {"beta1", "beta2", "eps"});
  AdamConfig a;
  if (j.contains("beta1")) a.beta1 = j.at("beta1").template get<double>();
  if (j.contains("beta2")) a.beta2 = j.at("beta2").template get<double>();
  if (j.contains("eps")) a.eps = j.at("eps").template get<double>();
  return a;
}

inline json dataset_spec_to_json(const DatasetSpec& spec) {
  return json{{"format_version", kFormatVersion},
              {"d_in", spec.d_in},
              {"M", spec.M},
              {"means", spec.means},
              {"sigma", spec.sigma},
              {"counts",
               {{"train", spec.counts[0]},
                {"val", spec.counts[1]},
                {"testI", spec.counts[2]},
                {"testII", spec.counts[3]}}},
              {"shift", {{"delta", spec.delta}, {"gamma", spec.gamma}}},
              {"seed", spec.seed}};
}

inline json data_ref_to_json(const DataRef& ref) {
  json out = json::object();
  if (ref.spec) out["spec"] = dataset_spec_to_json(*ref.spec);
  if (!ref.spec_path.empty()) out["spec_path"] = ref.spec_path;
  if (!ref.dir.empty()) out["dir"] = ref.dir;
  return out;
}

inline json run_config_to_json(const RunConfig& config) {
  return json{{"format_version", kFormatVersion},
              {"model", model_config_to_json(config.train.model)},
              {"schedule", schedule_config_to_json(config.train.schedule)},
              {"optimizer", adam_config_to_json(config.train.adam)},
              {"batch_size", config.train.batch_size},
              {"selection", config.train.selection},
              {"seed", config.train.seed},
              {"data", data_ref_to_json(config.data)}};
}

inline json metrics_report_to_json(const MetricsReport& r) {
  return json{{"accuracy", r.accuracy},
              {"accuracy_pct", r.accuracy * 100.0},
              {"precision_macro", r.precision_macro},
              {"recall_macro", r.recall_macro},
              {"f1_macro", r.f1_macro},
              {"kappa_quadratic", r.kappa_quadratic},
              {"n_samples", r.n_samples},
              {"per_class",
               {{"precision", r.precision_per_class},
                {"recall", r.recall_per_class},
                {"f1", r.f1_per_class}}}};
}

}  // namespace recalnet
