#include "recalnet/model.hpp"

#include <cmath>
#include <stdexcept>

#include "recalnet/errors.hpp"
#include "recalnet/rng.hpp"

namespace recalnet {

namespace {

const std::vector<std::string> kMergeNames = {"concat", "add", "recal_only", "backbone_only"};

/// Layer widths of the backbone including endpoints: d_in, hidden..., D.
std::vector<std::size_t> backbone_widths(const ModelConfig& config) {
  std::vector<std::size_t> widths;
  widths.reserve(config.hidden.size() + 2);
  widths.push_back(config.d_in);
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(config.D);
  return widths;
}

Tensor init_tensor(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  Tensor t = Tensor::zeros(rows, cols);
  for (double& v : t.data) v = bound * (2.0 * rng.next_uniform() - 1.0);
  return t;
}

void require_shape(const Tensor& t, std::size_t rows, std::size_t cols, const std::string& name) {
  if (t.rank() != 2 || t.rows() != rows || t.cols() != cols) {
    throw ConfigError("parameter " + name + " has shape " + shape_str(t) + ", expected [" +
                      std::to_string(rows) + "x" + std::to_string(cols) + "]");
  }
}

}  // namespace

Merge merge_from_string(const std::string& name) {
  if (name == "concat") return Merge::concat;
  if (name == "add") return Merge::add;
  if (name == "recal_only") return Merge::recal_only;
  if (name == "backbone_only") return Merge::backbone_only;
  throw ConfigError("unknown merge strategy '" + name +
                    "' (expected concat, add, recal_only, or backbone_only)");
}

std::string merge_to_string(Merge m) {
  switch (m) {
    case Merge::concat: return "concat";
    case Merge::add: return "add";
    case Merge::recal_only: return "recal_only";
    case Merge::backbone_only: return "backbone_only";
  }
  throw std::logic_error("invalid merge enum value");
}

const std::vector<std::string>& merge_names() { return kMergeNames; }

void ModelConfig::validate() const {
  if (d_in < 1) throw ConfigError("model.d_in must be >= 1");
  if (D < 1) throw ConfigError("model.D must be >= 1");
  if (M < 2) throw ConfigError("model.M must be >= 2");
  for (std::size_t w : hidden) {
    if (w < 1) throw ConfigError("model.hidden widths must be >= 1");
  }
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const Tensor& t) { n += t.size(); });
  return n;
}

ModelParams init_params(const ModelConfig& config) {
  config.validate();
  Rng rng(config.seed, "init");
  ModelParams params;
  std::vector<std::size_t> widths = backbone_widths(config);
  for (std::size_t l = 1; l < widths.size(); ++l) {
    std::size_t fan_in = widths[l - 1];
    DenseLayer layer;
    layer.w = init_tensor(fan_in, widths[l], fan_in, rng);
    layer.b = init_tensor(1, widths[l], fan_in, rng);
    params.backbone.push_back(std::move(layer));
  }
  if (config.merge != Merge::backbone_only) {
    RecalParams recal;
    for (DenseLayer* layer : {&recal.q, &recal.k, &recal.v}) {
      layer->w = init_tensor(config.D, config.D, config.D, rng);
      layer->b = init_tensor(1, config.D, config.D, rng);
    }
    params.recal = std::move(recal);
  }
  std::size_t cin = config.classifier_in();
  params.classifier.w = init_tensor(cin, config.M, cin, rng);
  params.classifier.b = init_tensor(1, config.M, cin, rng);
  return params;
}

std::size_t count_params(const ModelConfig& config) {
  config.validate();
  std::vector<std::size_t> widths = backbone_widths(config);
  std::size_t n = 0;
  for (std::size_t l = 1; l < widths.size(); ++l) {
    n += widths[l - 1] * widths[l] + widths[l];
  }
  if (config.merge != Merge::backbone_only) {
    n += 3 * (config.D * config.D + config.D);
  }
  n += config.classifier_in() * config.M + config.M;
  return n;
}

void check_shapes(const ModelParams& params, const ModelConfig& config) {
  config.validate();
  std::vector<std::size_t> widths = backbone_widths(config);
  if (params.backbone.size() != widths.size() - 1) {
    throw ConfigError("backbone has " + std::to_string(params.backbone.size()) +
                      " layers, config requires " + std::to_string(widths.size() - 1));
  }
  for (std::size_t l = 1; l < widths.size(); ++l) {
    const DenseLayer& layer = params.backbone[l - 1];
    std::string tag = "backbone." + std::to_string(l - 1);
    require_shape(layer.w, widths[l - 1], widths[l], tag + ".w");
    require_shape(layer.b, 1, widths[l], tag + ".b");
  }
  if (config.merge != Merge::backbone_only && !params.recal) {
    throw ConfigError("merge strategy " + merge_to_string(config.merge) +
                      " requires recalibration parameters");
  }
  if (params.recal) {
    const char* tags[] = {"recal.q", "recal.k", "recal.v"};
    const DenseLayer* layers[] = {&params.recal->q, &params.recal->k, &params.recal->v};
    for (int i = 0; i < 3; ++i) {
      require_shape(layers[i]->w, config.D, config.D, std::string(tags[i]) + ".w");
      require_shape(layers[i]->b, 1, config.D, std::string(tags[i]) + ".b");
    }
  }
  require_shape(params.classifier.w, config.classifier_in(), config.M, "classifier.w");
  require_shape(params.classifier.b, 1, config.M, "classifier.b");
  params.for_each([&](const std::string& name, const Tensor& t) {
    if (!t.all_finite()) throw ConfigError("parameter " + name + " contains non-finite values");
  });
}

GraphForward build_forward(Graph& g, const Tensor& x, const ModelParams& params,
                           const ModelConfig& config, const Tensor& centroids, bool trainable) {
  if (x.rank() != 2 || x.cols() != config.d_in) {
    throw std::invalid_argument("input has shape " + shape_str(x) + ", expected [Nx" +
                                std::to_string(config.d_in) + "]");
  }
  bool use_recal = config.merge != Merge::backbone_only;
  if (use_recal &&
      (centroids.rank() != 2 || centroids.rows() != config.M || centroids.cols() != config.D)) {
    throw std::invalid_argument("centroid table has shape " + shape_str(centroids) + ", expected [" +
                                std::to_string(config.M) + "x" + std::to_string(config.D) + "]");
  }

  GraphForward fwd;
  // Bind parameters in canonical order; under backbone_only a populated
  // recal block is skipped entirely, so it is neither trained nor read.
  std::vector<std::pair<NodeId, NodeId>> backbone_ids;
  std::optional<std::array<std::pair<NodeId, NodeId>, 3>> recal_ids;
  std::pair<NodeId, NodeId> classifier_ids{};
  auto bind = [&](const std::string& name, const Tensor& t) -> NodeId {
    NodeId id = trainable ? g.input(t) : g.constant(t);
    fwd.param_names.push_back(name);
    fwd.param_ids.push_back(id);
    return id;
  };
  for (std::size_t l = 0; l < params.backbone.size(); ++l) {
    std::string tag = "backbone." + std::to_string(l);
    NodeId w = bind(tag + ".w", params.backbone[l].w);
    NodeId b = bind(tag + ".b", params.backbone[l].b);
    backbone_ids.emplace_back(w, b);
  }
  if (use_recal) {
    if (!params.recal) {
      throw ConfigError("merge strategy " + merge_to_string(config.merge) +
                        " requires recalibration parameters");
    }
    std::array<std::pair<NodeId, NodeId>, 3> ids;
    const char* tags[] = {"recal.q", "recal.k", "recal.v"};
    const DenseLayer* layers[] = {&params.recal->q, &params.recal->k, &params.recal->v};
    for (int i = 0; i < 3; ++i) {
      NodeId w = bind(std::string(tags[i]) + ".w", layers[i]->w);
      NodeId b = bind(std::string(tags[i]) + ".b", layers[i]->b);
      ids[i] = {w, b};
    }
    recal_ids = ids;
  }
  classifier_ids.first = bind("classifier.w", params.classifier.w);
  classifier_ids.second = bind("classifier.b", params.classifier.b);

  fwd.x = g.constant(x);

  // Backbone: linear+relu per hidden layer, final linear to D.
  NodeId h = fwd.x;
  for (std::size_t l = 0; l < backbone_ids.size(); ++l) {
    h = g.linear(h, backbone_ids[l].first, backbone_ids[l].second);
    if (l + 1 < backbone_ids.size()) h = g.relu(h);
  }
  fwd.embeddings = h;

  if (use_recal) {
    fwd.centroids = g.constant(centroids);
    NodeId q = g.linear(fwd.embeddings, (*recal_ids)[0].first, (*recal_ids)[0].second);
    NodeId k = g.linear(fwd.centroids, (*recal_ids)[1].first, (*recal_ids)[1].second);
    NodeId v = g.linear(fwd.centroids, (*recal_ids)[2].first, (*recal_ids)[2].second);
    NodeId scores = g.matmul(q, g.transpose(k));
    if (config.scaled_attention) {
      scores = g.scale(scores, 1.0 / std::sqrt(static_cast<double>(config.D)));
    }
    NodeId attn = g.softmax_rows(scores);
    NodeId e_r = g.matmul(attn, v);
    switch (config.merge) {
      case Merge::concat: fwd.merged = g.concat_cols(fwd.embeddings, e_r); break;
      case Merge::add: fwd.merged = g.add(fwd.embeddings, e_r); break;
      case Merge::recal_only: fwd.merged = e_r; break;
      case Merge::backbone_only: throw std::logic_error("unreachable");
    }
  } else {
    fwd.centroids = g.constant(Tensor::zeros(config.M, config.D));
    fwd.merged = fwd.embeddings;
  }

  fwd.logits = g.linear(fwd.merged, classifier_ids.first, classifier_ids.second);
  return fwd;
}

ForwardResult model_forward(const Tensor& x, const ModelParams& params, const ModelConfig& config,
                            const Tensor& centroids) {
  Graph g;
  GraphForward fwd = build_forward(g, x, params, config, centroids, /*trainable=*/false);
  return {g.value(fwd.logits), g.value(fwd.embeddings)};
}

Tensor backbone_forward(const Tensor& x, const ModelParams& params, const ModelConfig& config) {
  if (x.rank() != 2 || x.cols() != config.d_in) {
    throw std::invalid_argument("input has shape " + shape_str(x) + ", expected [Nx" +
                                std::to_string(config.d_in) + "]");
  }
  Graph g;
  NodeId h = g.constant(x);
  for (std::size_t l = 0; l < params.backbone.size(); ++l) {
    NodeId w = g.constant(params.backbone[l].w);
    NodeId b = g.constant(params.backbone[l].b);
    h = g.linear(h, w, b);
    if (l + 1 < params.backbone.size()) h = g.relu(h);
  }
  return g.value(h);
}

CafeResult cafe_forward(const Tensor& E, const Tensor& centroids, const RecalParams& recal,
                        bool scaled_attention) {
  if (E.rank() != 2 || centroids.rank() != 2 || E.cols() != centroids.cols()) {
    throw std::invalid_argument("embeddings " + shape_str(E) + " and centroids " +
                                shape_str(centroids) + " must share their width");
  }
  Graph g;
  NodeId e = g.constant(E);
  NodeId c = g.constant(centroids);
  NodeId q = g.linear(e, g.constant(recal.q.w), g.constant(recal.q.b));
  NodeId k = g.linear(c, g.constant(recal.k.w), g.constant(recal.k.b));
  NodeId v = g.linear(c, g.constant(recal.v.w), g.constant(recal.v.b));
  NodeId scores = g.matmul(q, g.transpose(k));
  if (scaled_attention) {
    scores = g.scale(scores, 1.0 / std::sqrt(static_cast<double>(E.cols())));
  }
  NodeId attn = g.softmax_rows(scores);
  NodeId e_r = g.matmul(attn, v);
  return {g.value(e_r), g.value(attn)};
}

Tensor merge_embeddings(const Tensor& E, const Tensor& e_r, Merge strategy) {
  switch (strategy) {
    case Merge::backbone_only: return E;
    case Merge::recal_only: return e_r;
    case Merge::add: {
      Graph g;
      return g.value(g.add(g.constant(E), g.constant(e_r)));
    }
    case Merge::concat: {
      Graph g;
      return g.value(g.concat_cols(g.constant(E), g.constant(e_r)));
    }
  }
  throw std::logic_error("invalid merge enum value");
}

std::vector<std::size_t> predict(const Tensor& logits) {
  std::size_t n = logits.rows(), m = logits.cols();
  if (m == 0) throw std::invalid_argument("predict: zero-width logits");
  std::vector<std::size_t> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < m; ++j) {
      if (logits.at(i, j) > logits.at(i, best)) best = j;
    }
    out[i] = best;
  }
  return out;
}

}  // namespace recalnet
