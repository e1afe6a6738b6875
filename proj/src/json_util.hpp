#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "recalnet/errors.hpp"
#include "recalnet/tensor.hpp"

namespace recalnet {

using json = nlohmann::json;

/// Tensor <-> {"shape": [r, c], "data": [[...], ...]}. Doubles survive the
/// round trip bit-exactly (shortest round-trip formatting on write,
/// exact binary-decimal conversion on read).
inline json tensor_to_json(const Tensor& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < t.cols(); ++j) row.push_back(t.at(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"shape", t.shape}, {"data", std::move(rows)}};
}

template <class Error>
Tensor tensor_from_json(const json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data")) {
    throw Error(name + ": expected an object with shape and data");
  }
  std::vector<std::size_t> shape = j.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 2) throw Error(name + ": expected a rank-2 shape");
  const json& rows = j.at("data");
  if (!rows.is_array() || rows.size() != shape[0]) {
    throw Error(name + ": data has " + std::to_string(rows.size()) + " rows, shape says " +
                std::to_string(shape[0]));
  }
  std::vector<double> data;
  data.reserve(shape[0] * shape[1]);
  for (const json& row : rows) {
    if (!row.is_array() || row.size() != shape[1]) {
      throw Error(name + ": ragged or mis-sized row");
    }
    for (const json& v : row) {
      if (!v.is_number()) throw Error(name + ": non-numeric entry");
      data.push_back(v.get<double>());
    }
  }
  return Tensor(std::move(shape), std::move(data));
}

/// Rejects keys outside the allowed set — config typos fail loudly.
template <class Error>
void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw Error(where + ": unknown key '" + it.key() + "'");
  }
}

template <class Error>
const json& need(const json& obj, const std::string& where, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(where + ": missing required key '" + std::string(key) + "'");
  }
  return obj.at(key);
}

}  // namespace recalnet
