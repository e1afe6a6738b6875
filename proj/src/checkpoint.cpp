#include "recalnet/checkpoint.hpp"

#include <fstream>

#include "serialize.hpp"
#include "recalnet/errors.hpp"
#include "recalnet/version.hpp"

namespace recalnet {

namespace {

struct Malformed : CheckpointError {
  explicit Malformed(const std::string& what) : CheckpointError(Code::malformed, what) {}
};

/// Expected tensor shapes in canonical order, derived from the config.
std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> expected_shapes(
    const ModelConfig& c) {
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> out;
  std::vector<std::size_t> widths;
  widths.push_back(c.d_in);
  widths.insert(widths.end(), c.hidden.begin(), c.hidden.end());
  widths.push_back(c.D);
  for (std::size_t l = 1; l < widths.size(); ++l) {
    std::string tag = "backbone." + std::to_string(l - 1);
    out.push_back({tag + ".w", {widths[l - 1], widths[l]}});
    out.push_back({tag + ".b", {1, widths[l]}});
  }
  if (c.merge != Merge::backbone_only) {
    for (const char* proj : {"q", "k", "v"}) {
      out.push_back({std::string("recal.") + proj + ".w", {c.D, c.D}});
      out.push_back({std::string("recal.") + proj + ".b", {1, c.D}});
    }
  }
  out.push_back({"classifier.w", {c.classifier_in(), c.M}});
  out.push_back({"classifier.b", {1, c.M}});
  return out;
}

Tensor load_named_tensor(const json& obj, const std::string& name,
                         std::pair<std::size_t, std::size_t> want) {
  if (!obj.contains(name)) throw Malformed("missing array '" + name + "'");
  Tensor t = tensor_from_json<Malformed>(obj.at(name), name);
  if (t.rows() != want.first || t.cols() != want.second) {
    throw CheckpointError(CheckpointError::Code::shape_mismatch,
                          name + " has shape " + shape_str(t) + ", config requires [" +
                              std::to_string(want.first) + "x" + std::to_string(want.second) + "]");
  }
  return t;
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  json params = json::object();
  ck.params.for_each([&](const std::string& name, const Tensor& t) {
    params[name] = tensor_to_json(t);
  });

  json m = json::object(), v = json::object();
  std::size_t slot = 0;
  ck.params.for_each([&](const std::string& name, const Tensor&) {
    m[name] = tensor_to_json(ck.adam_m.at(slot));
    v[name] = tensor_to_json(ck.adam_v.at(slot));
    ++slot;
  });

  json doc{
      {"format_version", kFormatVersion},
      {"config", model_config_to_json(ck.config)},
      {"params", std::move(params)},
      {"centroids",
       {{"e_c", tensor_to_json(ck.centroids.centroids())},
        {"accum", tensor_to_json(ck.centroids.accum())},
        {"counts", ck.centroids.counts()},
        {"frozen", ck.centroids.is_frozen()},
        {"epoch_stamp", ck.centroids.epoch_stamp()}}},
      {"optimizer",
       {{"beta1", ck.adam_config.beta1},
        {"beta2", ck.adam_config.beta2},
        {"eps", ck.adam_config.eps},
        {"t", ck.adam_t},
        {"m", std::move(m)},
        {"v", std::move(v)}}},
      {"schedule", schedule_config_to_json(ck.schedule)},
      {"epochs_completed", ck.epochs_completed},
      {"rng_state", ck.rng_state},
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw CheckpointError(CheckpointError::Code::missing_file, "cannot open " + path + " for writing");
  }
  out << doc.dump(1) << '\n';
  if (!out) {
    throw CheckpointError(CheckpointError::Code::malformed, "failed while writing " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Code::missing_file, "cannot open " + path);

  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Malformed(path + ": " + e.what());
  }
  if (!doc.is_object()) throw Malformed(path + ": top level must be an object");

  std::uint64_t version = need<Malformed>(doc, path, "format_version").get<std::uint64_t>();
  if (version != static_cast<std::uint64_t>(kFormatVersion)) {
    throw CheckpointError(CheckpointError::Code::version_mismatch,
                          path + ": format version " + std::to_string(version) + ", expected " +
                              std::to_string(kFormatVersion));
  }

  Checkpoint ck;
  ck.config = model_config_from_json<Malformed>(need<Malformed>(doc, path, "config"), /*allow_seed=*/true);
  ck.config.validate();

  const json& params = need<Malformed>(doc, path, "params");
  const json& opt = need<Malformed>(doc, path, "optimizer");
  check_keys<Malformed>(opt, "optimizer", {"beta1", "beta2", "eps", "t", "m", "v"});
  const json& m = need<Malformed>(opt, "optimizer", "m");
  const json& v = need<Malformed>(opt, "optimizer", "v");

  auto layout = expected_shapes(ck.config);
  if (params.size() != layout.size()) {
    throw Malformed(path + ": params holds " + std::to_string(params.size()) + " arrays, config requires " +
                    std::to_string(layout.size()));
  }

  std::vector<std::size_t> widths;
  widths.push_back(ck.config.d_in);
  widths.insert(widths.end(), ck.config.hidden.begin(), ck.config.hidden.end());
  widths.push_back(ck.config.D);
  for (std::size_t l = 1; l < widths.size(); ++l) {
    ck.params.backbone.push_back(DenseLayer{});
  }
  if (ck.config.merge != Merge::backbone_only) ck.params.recal = RecalParams{};

  std::size_t slot = 0;
  ck.params.for_each([&](const std::string& name, Tensor& t) {
    t = load_named_tensor(params, name, layout[slot].second);
    ck.adam_m.push_back(load_named_tensor(m, name, layout[slot].second));
    ck.adam_v.push_back(load_named_tensor(v, name, layout[slot].second));
    ++slot;
  });

  ck.adam_config.beta1 = need<Malformed>(opt, "optimizer", "beta1").get<double>();
  ck.adam_config.beta2 = need<Malformed>(opt, "optimizer", "beta2").get<double>();
  ck.adam_config.eps = need<Malformed>(opt, "optimizer", "eps").get<double>();
  ck.adam_t = need<Malformed>(opt, "optimizer", "t").get<std::uint64_t>();

  const json& cen = need<Malformed>(doc, path, "centroids");
  check_keys<Malformed>(cen, "centroids", {"e_c", "accum", "counts", "frozen", "epoch_stamp"});
  Tensor e_c = load_named_tensor(cen, "e_c", {ck.config.M, ck.config.D});
  Tensor accum = load_named_tensor(cen, "accum", {ck.config.M, ck.config.D});
  auto counts = need<Malformed>(cen, "centroids", "counts").get<std::vector<std::uint64_t>>();
  if (counts.size() != ck.config.M) {
    throw CheckpointError(CheckpointError::Code::shape_mismatch,
                          "centroid counts hold " + std::to_string(counts.size()) +
                              " classes, config requires " + std::to_string(ck.config.M));
  }
  bool frozen = need<Malformed>(cen, "centroids", "frozen").get<bool>();
  std::uint64_t stamp = need<Malformed>(cen, "centroids", "epoch_stamp").get<std::uint64_t>();
  ck.centroids = CentroidTable::from_state(std::move(e_c), std::move(accum), std::move(counts),
                                           frozen, stamp);

  ck.schedule = schedule_config_from_json<Malformed>(need<Malformed>(doc, path, "schedule"));
  ck.epochs_completed = need<Malformed>(doc, path, "epochs_completed").get<std::uint64_t>();
  ck.rng_state = need<Malformed>(doc, path, "rng_state").get<std::uint64_t>();

  check_shapes(ck.params, ck.config);
  return ck;
}

}  // namespace recalnet
