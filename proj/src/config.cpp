#include "recalnet/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "serialize.hpp"
#include "recalnet/errors.hpp"
#include "recalnet/version.hpp"

namespace recalnet {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_document(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(origin + ": top level must be an object");
  std::uint64_t version = need<ConfigError>(doc, origin, "format_version").get<std::uint64_t>();
  if (version != static_cast<std::uint64_t>(kFormatVersion)) {
    throw ConfigError(origin + ": format version " + std::to_string(version) + ", expected " +
                      std::to_string(kFormatVersion));
  }
  return doc;
}

/// Spreads a split total over classes as evenly as possible, earliest
/// classes taking the remainder — so totals are honored exactly.
std::vector<std::size_t> spread_counts(std::size_t total, std::size_t M) {
  std::vector<std::size_t> out(M, total / M);
  for (std::size_t j = 0; j < total % M; ++j) out[j] += 1;
  return out;
}

std::vector<std::size_t> counts_entry(const json& j, const std::string& where, std::size_t M) {
  if (j.is_number_unsigned() || j.is_number_integer()) {
    long long total = j.get<long long>();
    if (total < 0) throw ConfigError(where + ": counts must be nonnegative");
    return spread_counts(static_cast<std::size_t>(total), M);
  }
  if (j.is_array()) {
    auto per_class = j.get<std::vector<std::size_t>>();
    if (per_class.size() != M) {
      throw ConfigError(where + ": per-class counts must list exactly " + std::to_string(M) +
                        " values");
    }
    return per_class;
  }
  throw ConfigError(where + ": counts must be an integer total or a per-class array");
}

DatasetSpec dataset_spec_from_json(const json& doc, const std::string& origin) {
  check_keys<ConfigError>(doc, origin,
                          {"format_version", "d_in", "M", "means", "sigma", "counts", "shift",
                           "seed", "preset"});
  if (doc.contains("format_version")) {
    std::uint64_t version = doc.at("format_version").get<std::uint64_t>();
    if (version != static_cast<std::uint64_t>(kFormatVersion)) {
      throw ConfigError(origin + ": format version " + std::to_string(version) + ", expected " +
                        std::to_string(kFormatVersion));
    }
  }
  DatasetSpec spec;
  spec.d_in = need<ConfigError>(doc, origin, "d_in").get<std::size_t>();
  spec.M = need<ConfigError>(doc, origin, "M").get<std::size_t>();
  spec.means = need<ConfigError>(doc, origin, "means").get<std::vector<std::vector<double>>>();

  const json& sigma = need<ConfigError>(doc, origin, "sigma");
  if (sigma.is_number()) {
    spec.sigma.assign(spec.M, sigma.get<double>());
  } else if (sigma.is_array()) {
    spec.sigma = sigma.get<std::vector<double>>();
  } else {
    throw ConfigError(origin + ": sigma must be a number or a per-class array");
  }

  const json& counts = need<ConfigError>(doc, origin, "counts");
  check_keys<ConfigError>(counts, origin + ".counts", {"train", "val", "testI", "testII"});
  bool has_preset = doc.contains("preset");
  for (std::size_t split = 0; split < 4; ++split) {
    const char* name = kSplitNames[split];
    if (!counts.contains(name)) {
      if (split == 0 && has_preset) continue;  // preset supplies train counts
      throw ConfigError(origin + ".counts: missing split '" + std::string(name) + "'");
    }
    spec.counts[split] = counts_entry(counts.at(name), origin + ".counts." + name, spec.M);
  }

  if (has_preset) {
    std::string preset = doc.at("preset").get<std::string>();
    if (preset != "reference-imbalance") {
      throw ConfigError(origin + ": unknown preset '" + preset + "'");
    }
    if (spec.M != 4) throw ConfigError(origin + ": preset reference-imbalance requires M = 4");
    if (counts.contains("train")) {
      throw ConfigError(origin + ": preset and explicit train counts conflict");
    }
    spec.counts[0] = {773, 1866, 2997, 1391};
  }

  spec.delta.assign(spec.d_in, 0.0);
  if (doc.contains("shift")) {
    const json& shift = doc.at("shift");
    check_keys<ConfigError>(shift, origin + ".shift", {"delta", "gamma"});
    if (shift.contains("delta")) spec.delta = shift.at("delta").get<std::vector<double>>();
    if (shift.contains("gamma")) spec.gamma = shift.at("gamma").get<double>();
  }
  if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();

  spec.validate();
  return spec;
}

}  // namespace

DatasetSpec parse_dataset_spec(const std::string& text, const std::string& origin) {
  return dataset_spec_from_json(parse_document(text, origin), origin);
}

DatasetSpec load_dataset_spec(const std::string& path) {
  return parse_dataset_spec(read_file(path), path);
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  json doc = parse_document(text, origin);
  check_keys<ConfigError>(doc, origin,
                          {"format_version", "model", "schedule", "optimizer", "batch_size",
                           "selection", "seed", "data"});

  RunConfig config;
  config.train.model =
      model_config_from_json<ConfigError>(need<ConfigError>(doc, origin, "model"), false);
  if (doc.contains("schedule")) {
    config.train.schedule = schedule_config_from_json<ConfigError>(doc.at("schedule"));
  }
  if (doc.contains("optimizer")) {
    config.train.adam = adam_config_from_json<ConfigError>(doc.at("optimizer"));
  }
  if (doc.contains("batch_size")) {
    config.train.batch_size = doc.at("batch_size").get<std::size_t>();
  }
  if (doc.contains("selection")) config.train.selection = doc.at("selection").get<std::string>();
  if (doc.contains("seed")) config.train.seed = doc.at("seed").get<std::uint64_t>();
  config.train.model.seed = config.train.seed;

  const json& data = need<ConfigError>(doc, origin, "data");
  check_keys<ConfigError>(data, origin + ".data", {"spec", "spec_path", "dir"});
  int sources = 0;
  if (data.contains("spec")) {
    // The inline spec is its own document scope, version field and all.
    json inline_spec = data.at("spec");
    config.data.spec = dataset_spec_from_json(inline_spec, origin + ".data.spec");
    ++sources;
  }
  if (data.contains("spec_path")) {
    config.data.spec_path = data.at("spec_path").get<std::string>();
    ++sources;
  }
  if (data.contains("dir")) {
    config.data.dir = data.at("dir").get<std::string>();
    ++sources;
  }
  if (sources != 1) {
    throw ConfigError(origin + ".data: give exactly one of spec, spec_path, or dir");
  }

  config.train.validate();
  return config;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_file(path), path);
}

DataSplits resolve_data(const DataRef& ref, const std::string& config_dir) {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    if (fp.is_absolute() || config_dir.empty()) return p;
    return (std::filesystem::path(config_dir) / fp).string();
  };
  if (ref.spec) return gen_synthetic(*ref.spec);
  if (!ref.spec_path.empty()) return gen_synthetic(load_dataset_spec(resolve(ref.spec_path)));
  if (!ref.dir.empty()) {
    std::filesystem::path dir(resolve(ref.dir));
    DataSplits splits;
    for (std::size_t i = 0; i < 4; ++i) {
      splits[i] = load_csv((dir / (std::string(kSplitNames[i]) + ".csv")).string());
    }
    return splits;
  }
  throw ConfigError("data reference is empty");
}

std::string dataset_spec_to_text(const DatasetSpec& spec) {
  return dataset_spec_to_json(spec).dump(1) + "\n";
}

std::string run_config_to_text(const RunConfig& config) {
  return run_config_to_json(config).dump(1) + "\n";
}

}  // namespace recalnet
