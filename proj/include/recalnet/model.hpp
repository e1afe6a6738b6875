#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "recalnet/autodiff.hpp"
#include "recalnet/tensor.hpp"

namespace recalnet {

/// How the backbone embedding E and the recalibrated embedding E_R are
/// combined before the classifier. backbone_only bypasses recalibration
/// entirely (no Q/K/V parameters exercised or counted).
enum class Merge { concat, add, recal_only, backbone_only };

Merge merge_from_string(const std::string& name);
std::string merge_to_string(Merge m);
const std::vector<std::string>& merge_names();

struct ModelConfig {
  std::size_t d_in = 0;
  std::vector<std::size_t> hidden;
  std::size_t D = 0;
  std::size_t M = 0;
  Merge merge = Merge::concat;
  std::uint64_t seed = 0;
  /// Off by default: attention scores are the bare dot product Q*K^T.
  /// When set, scores are multiplied by 1/sqrt(D) before the softmax.
  bool scaled_attention = false;

  std::size_t classifier_in() const { return merge == Merge::concat ? 2 * D : D; }
  void validate() const;  // throws ConfigError on bad extents
};

struct DenseLayer {
  Tensor w;
  Tensor b;
};

struct RecalParams {
  DenseLayer q, k, v;
};

struct ModelParams {
  std::vector<DenseLayer> backbone;
  /// Engaged for every merge except backbone_only. Forward passes ignore a
  /// populated recal under backbone_only, so bypass equivalence can be
  /// tested; check_shapes treats that combination as valid too.
  std::optional<RecalParams> recal;
  DenseLayer classifier;

  /// Visits every tensor in canonical order with its canonical name:
  /// backbone.<l>.{w,b}, recal.{q,k,v}.{w,b}, classifier.{w,b}. The same
  /// order fixes initialization draws, optimizer slots, and checkpoint keys.
  template <typename F>
  void for_each(F&& fn) {
    for (std::size_t l = 0; l < backbone.size(); ++l) {
      fn("backbone." + std::to_string(l) + ".w", backbone[l].w);
      fn("backbone." + std::to_string(l) + ".b", backbone[l].b);
    }
    if (recal) {
      fn(std::string("recal.q.w"), recal->q.w);
      fn(std::string("recal.q.b"), recal->q.b);
      fn(std::string("recal.k.w"), recal->k.w);
      fn(std::string("recal.k.b"), recal->k.b);
      fn(std::string("recal.v.w"), recal->v.w);
      fn(std::string("recal.v.b"), recal->v.b);
    }
    fn(std::string("classifier.w"), classifier.w);
    fn(std::string("classifier.b"), classifier.b);
  }

  template <typename F>
  void for_each(F&& fn) const {
    const_cast<ModelParams*>(this)->for_each(
        [&](const std::string& name, const Tensor& t) { fn(name, t); });
  }

  std::size_t scalar_count() const;
};

/// Fresh parameters drawn from the seeded stream "init": each tensor of a
/// layer is uniform in [-sqrt(1/fan_in), +sqrt(1/fan_in)] where fan_in is
/// the layer's input width. Draw order is the canonical for_each order.
ModelParams init_params(const ModelConfig& config);

/// Closed-form learnable-scalar count for a config; equals
/// init_params(config).scalar_count() for every valid config.
std::size_t count_params(const ModelConfig& config);

/// Shape-consistency check of params against config; throws ConfigError.
void check_shapes(const ModelParams& params, const ModelConfig& config);

/// Node handles for one forward pass built into a Graph.
struct GraphForward {
  std::vector<std::string> param_names;
  std::vector<NodeId> param_ids;  // aligned with param_names
  NodeId x;
  NodeId centroids;
  NodeId embeddings;  // E, the backbone output
  NodeId merged;
  NodeId logits;
};

/// Builds the full forward pass x -> backbone -> recalibration -> merge ->
/// classifier into `g`. With trainable=true every parameter binds as an
/// input() so backward() yields its gradient; x and the centroid table
/// always bind as constants (centroids receive no gradient by design).
GraphForward build_forward(Graph& g, const Tensor& x, const ModelParams& params,
                           const ModelConfig& config, const Tensor& centroids,
                           bool trainable);

struct ForwardResult {
  Tensor logits;
  Tensor embeddings;
};

/// Value-level forward (no gradients): logits plus the embeddings E used
/// for centroid accumulation.
ForwardResult model_forward(const Tensor& x, const ModelParams& params, const ModelConfig& config,
                            const Tensor& centroids);

/// Value-level backbone alone: x [N x d_in] -> E [N x D].
Tensor backbone_forward(const Tensor& x, const ModelParams& params, const ModelConfig& config);

struct CafeResult {
  Tensor e_r;
  Tensor attn;
};

/// Value-level recalibration alone: E [N x D], centroids [M x D] ->
/// (E_R [N x D], attn [N x M]).
CafeResult cafe_forward(const Tensor& E, const Tensor& centroids, const RecalParams& recal,
                        bool scaled_attention = false);

/// Value-level merge of E and E_R per strategy.
Tensor merge_embeddings(const Tensor& E, const Tensor& e_r, Merge strategy);

/// Row-wise argmax with ties broken toward the lowest class index.
std::vector<std::size_t> predict(const Tensor& logits);

}  // namespace recalnet
