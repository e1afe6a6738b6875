#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "recalnet/model.hpp"
#include "recalnet/rng.hpp"
#include "recalnet/tensor.hpp"

namespace testutil {

using recalnet::ModelConfig;
using recalnet::ModelParams;
using recalnet::Rng;
using recalnet::Tensor;

inline Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Tensor t = Tensor::zeros(rows, cols);
  for (double& v : t.data) v = scale * (2.0 * rng.next_uniform() - 1.0);
  return t;
}

inline std::vector<std::size_t> random_labels(std::size_t n, std::size_t M, Rng& rng) {
  std::vector<std::size_t> out(n);
  for (auto& l : out) l = rng.next_below(M);
  return out;
}

// Flatten every trainable tensor in canonical order.
inline std::vector<Tensor> params_to_vec(const ModelParams& params) {
  std::vector<Tensor> out;
  const_cast<ModelParams&>(params).for_each(
      [&](const std::string&, Tensor& t) { out.push_back(t); });
  return out;
}

// Rebuild a ModelParams with the same structure as `shape_like` but values
// taken from `vec` (canonical order).
inline ModelParams vec_to_params(const ModelParams& shape_like, const std::vector<Tensor>& vec) {
  ModelParams out = shape_like;
  std::size_t i = 0;
  out.for_each([&](const std::string&, Tensor& t) { t = vec.at(i++); });
  return out;
}

// Fresh per-test scratch directory under the ctest working directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  std::filesystem::path dir = std::filesystem::path("work") / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

}  // namespace testutil
