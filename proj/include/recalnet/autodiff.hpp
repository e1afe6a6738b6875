#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "recalnet/tensor.hpp"

namespace recalnet {

using NodeId = std::size_t;
using GradMap = std::unordered_map<NodeId, Tensor>;

enum class Op {
  leaf,
  constant,
  matmul,
  transpose,
  add,
  mul,
  scale,
  relu,
  softmax_rows,
  concat_cols,
  linear,
  sum,
  cross_entropy,
};

/// Define-by-run reverse-mode graph. Nodes evaluate eagerly as they are
/// built, so a graph instance is valid for exactly one forward pass;
/// rebuild per step. Node ids are append-order, which guarantees every
/// node's arguments have smaller ids — backward() is a single reverse
/// sweep with a fixed accumulation order, so gradients are bit-stable
/// run to run.
class Graph {
 public:
  /// Leaf that participates in backward(); every input receives an entry
  /// in the returned GradMap even when disconnected from the loss.
  NodeId input(Tensor t);
  /// Leaf excluded from differentiation; backward() never allocates a
  /// gradient for it or for subgraphs that depend only on constants.
  NodeId constant(Tensor t);

  NodeId matmul(NodeId a, NodeId b);
  NodeId transpose(NodeId a);
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);  // elementwise
  NodeId scale(NodeId a, double s);
  NodeId relu(NodeId a);
  /// Row-wise softmax with per-row max subtraction.
  NodeId softmax_rows(NodeId a);
  /// [N x A],[N x B] -> [N x (A+B)]; either side may be zero-width.
  NodeId concat_cols(NodeId a, NodeId b);
  /// x [N x K], w [K x M], b [1 x M] -> x*w + b broadcast over rows.
  NodeId linear(NodeId x, NodeId w, NodeId b);
  /// Sum of all elements -> [1 x 1].
  NodeId sum(NodeId a);
  /// Mean negative log-likelihood of labels under row softmax of logits,
  /// computed in log-sum-exp form -> [1 x 1].
  NodeId cross_entropy(NodeId logits, const std::vector<std::size_t>& labels);

  const Tensor& value(NodeId id) const;
  bool requires_grad(NodeId id) const;
  std::size_t node_count() const { return nodes_.size(); }

  /// Gradient of the scalar at `loss` with respect to every input() leaf.
  GradMap backward(NodeId loss) const;

 private:
  struct Node {
    Op op;
    std::vector<NodeId> args;
    Tensor value;
    bool requires_grad;
    double scalar = 0.0;
    std::vector<std::size_t> labels;
  };

  NodeId emplace(Node n);
  const Node& node(NodeId id) const;

  std::vector<Node> nodes_;
  std::vector<NodeId> inputs_;
};

}  // namespace recalnet
