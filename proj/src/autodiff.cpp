#include "recalnet/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace recalnet {

namespace {

void require_rank2(const Tensor& t, const char* what) {
  if (t.rank() != 2) {
    throw std::invalid_argument(std::string(what) + ": expected rank-2 tensor, got " + shape_str(t));
  }
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " +
                              shape_str(b));
}

Tensor matmul_values(const Tensor& a, const Tensor& b) {
  std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Tensor out = Tensor::zeros(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      double av = a.data[i * k + p];
      for (std::size_t j = 0; j < m; ++j) {
        out.data[i * m + j] += av * b.data[p * m + j];
      }
    }
  }
  return out;
}

Tensor transpose_values(const Tensor& a) {
  std::size_t n = a.rows(), m = a.cols();
  Tensor out = Tensor::zeros(m, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out.data[j * n + i] = a.data[i * m + j];
    }
  }
  return out;
}

Tensor softmax_rows_values(const Tensor& a) {
  std::size_t n = a.rows(), m = a.cols();
  Tensor out = Tensor::zeros(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = a.data[i * m];
    for (std::size_t j = 1; j < m; ++j) mx = std::max(mx, a.data[i * m + j]);
    double denom = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double e = std::exp(a.data[i * m + j] - mx);
      out.data[i * m + j] = e;
      denom += e;
    }
    for (std::size_t j = 0; j < m; ++j) out.data[i * m + j] /= denom;
  }
  return out;
}

void accumulate(Tensor& into, const Tensor& from) {
  for (std::size_t i = 0; i < into.data.size(); ++i) into.data[i] += from.data[i];
}

}  // namespace

NodeId Graph::emplace(Node n) {
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

const Graph::Node& Graph::node(NodeId id) const {
  if (id >= nodes_.size()) throw std::out_of_range("node id " + std::to_string(id));
  return nodes_[id];
}

NodeId Graph::input(Tensor t) {
  require_rank2(t, "input");
  NodeId id = emplace({Op::leaf, {}, std::move(t), true});
  inputs_.push_back(id);
  return id;
}

NodeId Graph::constant(Tensor t) {
  require_rank2(t, "constant");
  return emplace({Op::constant, {}, std::move(t), false});
}

NodeId Graph::matmul(NodeId a, NodeId b) {
  const Tensor& ta = node(a).value;
  const Tensor& tb = node(b).value;
  if (ta.cols() != tb.rows()) shape_error("matmul", ta, tb);
  bool rg = node(a).requires_grad || node(b).requires_grad;
  return emplace({Op::matmul, {a, b}, matmul_values(ta, tb), rg});
}

NodeId Graph::transpose(NodeId a) {
  return emplace({Op::transpose, {a}, transpose_values(node(a).value), node(a).requires_grad});
}

NodeId Graph::add(NodeId a, NodeId b) {
  const Tensor& ta = node(a).value;
  const Tensor& tb = node(b).value;
  if (!ta.same_shape(tb)) shape_error("add", ta, tb);
  Tensor out = ta;
  accumulate(out, tb);
  return emplace({Op::add, {a, b}, std::move(out), node(a).requires_grad || node(b).requires_grad});
}

NodeId Graph::mul(NodeId a, NodeId b) {
  const Tensor& ta = node(a).value;
  const Tensor& tb = node(b).value;
  if (!ta.same_shape(tb)) shape_error("mul", ta, tb);
  Tensor out = ta;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= tb.data[i];
  return emplace({Op::mul, {a, b}, std::move(out), node(a).requires_grad || node(b).requires_grad});
}

NodeId Graph::scale(NodeId a, double s) {
  Tensor out = node(a).value;
  for (double& v : out.data) v *= s;
  Node n{Op::scale, {a}, std::move(out), node(a).requires_grad};
  n.scalar = s;
  return emplace(std::move(n));
}

NodeId Graph::relu(NodeId a) {
  Tensor out = node(a).value;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return emplace({Op::relu, {a}, std::move(out), node(a).requires_grad});
}

NodeId Graph::softmax_rows(NodeId a) {
  if (node(a).value.cols() == 0) {
    throw std::invalid_argument("softmax_rows: zero-width input " + shape_str(node(a).value));
  }
  return emplace({Op::softmax_rows, {a}, softmax_rows_values(node(a).value), node(a).requires_grad});
}

NodeId Graph::concat_cols(NodeId a, NodeId b) {
  const Tensor& ta = node(a).value;
  const Tensor& tb = node(b).value;
  if (ta.rows() != tb.rows()) shape_error("concat_cols", ta, tb);
  std::size_t n = ta.rows(), ca = ta.cols(), cb = tb.cols();
  Tensor out = Tensor::zeros(n, ca + cb);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(ta.data.begin() + i * ca, ca, out.data.begin() + i * (ca + cb));
    std::copy_n(tb.data.begin() + i * cb, cb, out.data.begin() + i * (ca + cb) + ca);
  }
  return emplace(
      {Op::concat_cols, {a, b}, std::move(out), node(a).requires_grad || node(b).requires_grad});
}

NodeId Graph::linear(NodeId x, NodeId w, NodeId b) {
  const Tensor& tx = node(x).value;
  const Tensor& tw = node(w).value;
  const Tensor& tb = node(b).value;
  if (tx.cols() != tw.rows()) shape_error("linear", tx, tw);
  if (tb.rows() != 1 || tb.cols() != tw.cols()) shape_error("linear bias", tw, tb);
  Tensor out = matmul_values(tx, tw);
  std::size_t n = out.rows(), m = out.cols();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) out.data[i * m + j] += tb.data[j];
  }
  bool rg = node(x).requires_grad || node(w).requires_grad || node(b).requires_grad;
  return emplace({Op::linear, {x, w, b}, std::move(out), rg});
}

NodeId Graph::sum(NodeId a) {
  double total = 0.0;
  for (double v : node(a).value.data) total += v;
  return emplace({Op::sum, {a}, Tensor::scalar(total), node(a).requires_grad});
}

NodeId Graph::cross_entropy(NodeId logits, const std::vector<std::size_t>& labels) {
  const Tensor& t = node(logits).value;
  std::size_t n = t.rows(), m = t.cols();
  if (labels.size() != n) {
    throw std::invalid_argument("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(n) + " rows");
  }
  if (n == 0) throw std::invalid_argument("cross_entropy: empty batch");
  for (std::size_t y : labels) {
    if (y >= m) {
      throw std::invalid_argument("cross_entropy: label " + std::to_string(y) + " out of range for " +
                                  std::to_string(m) + " classes");
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mx = t.data[i * m];
    for (std::size_t j = 1; j < m; ++j) mx = std::max(mx, t.data[i * m + j]);
    double lse = 0.0;
    for (std::size_t j = 0; j < m; ++j) lse += std::exp(t.data[i * m + j] - mx);
    lse = mx + std::log(lse);
    total += lse - t.data[i * m + labels[i]];
  }
  Node node_out{Op::cross_entropy, {logits}, Tensor::scalar(total / static_cast<double>(n)),
                node(logits).requires_grad};
  node_out.labels = labels;
  return emplace(std::move(node_out));
}

const Tensor& Graph::value(NodeId id) const { return node(id).value; }

bool Graph::requires_grad(NodeId id) const { return node(id).requires_grad; }

GradMap Graph::backward(NodeId loss) const {
  const Node& top = node(loss);
  if (top.value.rows() != 1 || top.value.cols() != 1) {
    throw std::invalid_argument("backward: loss must be 1x1, got " + shape_str(top.value));
  }
  // grads[i] holds d loss / d node_i; allocated lazily, only for nodes on a
  // differentiable path.
  std::vector<Tensor> grads(nodes_.size());
  std::vector<bool> seeded(nodes_.size(), false);
  auto seed = [&](NodeId id) -> Tensor& {
    if (!seeded[id]) {
      grads[id] = Tensor::zeros_like(nodes_[id].value);
      seeded[id] = true;
    }
    return grads[id];
  };
  seed(loss).data[0] = 1.0;

  for (NodeId id = loss + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!seeded[id] || !n.requires_grad) continue;
    const Tensor& g = grads[id];
    switch (n.op) {
      case Op::leaf:
      case Op::constant:
        break;
      case Op::matmul: {
        const Node& a = nodes_[n.args[0]];
        const Node& b = nodes_[n.args[1]];
        if (a.requires_grad) accumulate(seed(n.args[0]), matmul_values(g, transpose_values(b.value)));
        if (b.requires_grad) accumulate(seed(n.args[1]), matmul_values(transpose_values(a.value), g));
        break;
      }
      case Op::transpose:
        accumulate(seed(n.args[0]), transpose_values(g));
        break;
      case Op::add:
        for (NodeId arg : n.args) {
          if (nodes_[arg].requires_grad) accumulate(seed(arg), g);
        }
        break;
      case Op::mul: {
        const Node& a = nodes_[n.args[0]];
        const Node& b = nodes_[n.args[1]];
        if (a.requires_grad) {
          Tensor ga = g;
          for (std::size_t i = 0; i < ga.data.size(); ++i) ga.data[i] *= b.value.data[i];
          accumulate(seed(n.args[0]), ga);
        }
        if (b.requires_grad) {
          Tensor gb = g;
          for (std::size_t i = 0; i < gb.data.size(); ++i) gb.data[i] *= a.value.data[i];
          accumulate(seed(n.args[1]), gb);
        }
        break;
      }
      case Op::scale: {
        Tensor ga = g;
        for (double& v : ga.data) v *= n.scalar;
        accumulate(seed(n.args[0]), ga);
        break;
      }
      case Op::relu: {
        const Tensor& x = nodes_[n.args[0]].value;
        Tensor ga = g;
        for (std::size_t i = 0; i < ga.data.size(); ++i) {
          if (!(x.data[i] > 0.0)) ga.data[i] = 0.0;
        }
        accumulate(seed(n.args[0]), ga);
        break;
      }
      case Op::softmax_rows: {
        const Tensor& y = n.value;
        std::size_t rows = y.rows(), cols = y.cols();
        Tensor ga = Tensor::zeros(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
          double dot = 0.0;
          for (std::size_t j = 0; j < cols; ++j) dot += g.data[i * cols + j] * y.data[i * cols + j];
          for (std::size_t j = 0; j < cols; ++j) {
            ga.data[i * cols + j] = y.data[i * cols + j] * (g.data[i * cols + j] - dot);
          }
        }
        accumulate(seed(n.args[0]), ga);
        break;
      }
      case Op::concat_cols: {
        const Node& a = nodes_[n.args[0]];
        const Node& b = nodes_[n.args[1]];
        std::size_t rows = n.value.rows(), ca = a.value.cols(), cb = b.value.cols();
        if (a.requires_grad) {
          Tensor ga = Tensor::zeros(rows, ca);
          for (std::size_t i = 0; i < rows; ++i) {
            std::copy_n(g.data.begin() + i * (ca + cb), ca, ga.data.begin() + i * ca);
          }
          accumulate(seed(n.args[0]), ga);
        }
        if (b.requires_grad) {
          Tensor gb = Tensor::zeros(rows, cb);
          for (std::size_t i = 0; i < rows; ++i) {
            std::copy_n(g.data.begin() + i * (ca + cb) + ca, cb, gb.data.begin() + i * cb);
          }
          accumulate(seed(n.args[1]), gb);
        }
        break;
      }
      case Op::linear: {
        const Node& x = nodes_[n.args[0]];
        const Node& w = nodes_[n.args[1]];
        const Node& b = nodes_[n.args[2]];
        if (x.requires_grad) accumulate(seed(n.args[0]), matmul_values(g, transpose_values(w.value)));
        if (w.requires_grad) accumulate(seed(n.args[1]), matmul_values(transpose_values(x.value), g));
        if (b.requires_grad) {
          std::size_t rows = g.rows(), cols = g.cols();
          Tensor gb = Tensor::zeros(1, cols);
          for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) gb.data[j] += g.data[i * cols + j];
          }
          accumulate(seed(n.args[2]), gb);
        }
        break;
      }
      case Op::sum: {
        const Tensor& x = nodes_[n.args[0]].value;
        Tensor ga = Tensor::full(x.rows(), x.cols(), g.data[0]);
        accumulate(seed(n.args[0]), ga);
        break;
      }
      case Op::cross_entropy: {
        const Tensor& logits = nodes_[n.args[0]].value;
        std::size_t rows = logits.rows(), cols = logits.cols();
        Tensor ga = softmax_rows_values(logits);
        double inv_n = 1.0 / static_cast<double>(rows);
        for (std::size_t i = 0; i < rows; ++i) {
          ga.data[i * cols + n.labels[i]] -= 1.0;
        }
        for (double& v : ga.data) v *= inv_n * g.data[0];
        accumulate(seed(n.args[0]), ga);
        break;
      }
    }
  }

  GradMap out;
  out.reserve(inputs_.size());
  for (NodeId id : inputs_) {
    out.emplace(id, seeded[id] ? std::move(grads[id]) : Tensor::zeros_like(nodes_[id].value));
  }
  return out;
}

}  // namespace recalnet
