// Python bindings for the core operations: recalibration, centroid
// bookkeeping, model forward/predict, metrics, the LR schedule, and the
// file-level commands. Matrices cross the boundary as 2-d float64 numpy
// arrays (row-major copies both ways).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recalnet/centroids.hpp"
#include "recalnet/commands.hpp"
#include "recalnet/errors.hpp"
#include "recalnet/data.hpp"
#include "recalnet/metrics.hpp"
#include "recalnet/model.hpp"
#include "recalnet/optim.hpp"
#include "recalnet/tensor.hpp"
#include "recalnet/version.hpp"

namespace py = pybind11;
using namespace recalnet;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor to_tensor(const DoubleArray& a, const char* what) {
  if (a.ndim() != 2) {
    throw std::invalid_argument(std::string(what) + " must be a 2-d array");
  }
  Tensor t = Tensor::zeros(static_cast<std::size_t>(a.shape(0)),
                           static_cast<std::size_t>(a.shape(1)));
  std::memcpy(t.data.data(), a.data(), sizeof(double) * t.data.size());
  return t;
}

py::array_t<double> to_array(const Tensor& t) {
  py::array_t<double> a({t.rows(), t.cols()});
  std::memcpy(a.mutable_data(), t.data.data(), sizeof(double) * t.data.size());
  return a;
}

ModelConfig make_config(std::size_t d_in, const std::vector<std::size_t>& hidden, std::size_t D,
                        std::size_t M, const std::string& merge, std::uint64_t seed,
                        bool scaled_attention) {
  ModelConfig c;
  c.d_in = d_in;
  c.hidden = hidden;
  c.D = D;
  c.M = M;
  c.merge = merge_from_string(merge);
  c.seed = seed;
  c.scaled_attention = scaled_attention;
  c.validate();
  return c;
}

py::dict report_to_dict(const MetricsReport& r) {
  py::dict d;
  d["accuracy"] = r.accuracy;
  d["precision_macro"] = r.precision_macro;
  d["recall_macro"] = r.recall_macro;
  d["f1_macro"] = r.f1_macro;
  d["kappa_quadratic"] = r.kappa_quadratic;
  d["n_samples"] = r.n_samples;
  d["precision_per_class"] = r.precision_per_class;
  d["recall_per_class"] = r.recall_per_class;
  d["f1_per_class"] = r.f1_per_class;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<FreezeViolation>(m, "FreezeViolation", PyExc_RuntimeError);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init(&make_config), py::arg("d_in"), py::arg("hidden"), py::arg("D"), py::arg("M"),
           py::arg("merge") = "concat", py::arg("seed") = 0,
           py::arg("scaled_attention") = false)
      .def_readonly("d_in", &ModelConfig::d_in)
      .def_readonly("hidden", &ModelConfig::hidden)
      .def_readonly("D", &ModelConfig::D)
      .def_readonly("M", &ModelConfig::M)
      .def_readonly("seed", &ModelConfig::seed)
      .def_readonly("scaled_attention", &ModelConfig::scaled_attention)
      .def_property_readonly("merge",
                             [](const ModelConfig& c) { return merge_to_string(c.merge); })
      .def_property_readonly("classifier_in", &ModelConfig::classifier_in);

  py::class_<ModelParams>(m, "ModelParams")
      .def("tensors",
           [](const ModelParams& p) {
             py::dict out;
             p.for_each([&](const std::string& name, const Tensor& t) {
               out[py::str(name)] = to_array(t);
             });
             return out;
           })
      .def("scalar_count", &ModelParams::scalar_count);

  py::class_<CentroidTable>(m, "CentroidTable")
      .def(py::init<std::size_t, std::size_t>(), py::arg("classes"), py::arg("dim"))
      .def("accumulate",
           [](CentroidTable& t, const DoubleArray& embeddings,
              const std::vector<std::size_t>& labels) {
             t.accumulate(to_tensor(embeddings, "embeddings"), labels);
           })
      .def("finalize_epoch", &CentroidTable::finalize_epoch)
      .def("discard_epoch", &CentroidTable::discard_epoch)
      .def("freeze", &CentroidTable::freeze)
      .def_property_readonly("frozen", &CentroidTable::is_frozen)
      .def_property_readonly("epoch_stamp", &CentroidTable::epoch_stamp)
      .def("centroids", [](const CentroidTable& t) { return to_array(t.centroids()); })
      .def("counts", &CentroidTable::counts);

  m.def("init_params", &init_params, py::arg("config"));
  m.def("count_params", &count_params, py::arg("config"));

  m.def(
      "model_forward",
      [](const DoubleArray& x, const ModelParams& params, const ModelConfig& config,
         const DoubleArray& centroids) {
        ForwardResult r = model_forward(to_tensor(x, "x"), params, config,
                                        to_tensor(centroids, "centroids"));
        return py::make_tuple(to_array(r.logits), to_array(r.embeddings));
      },
      py::arg("x"), py::arg("params"), py::arg("config"), py::arg("centroids"),
      "Full forward pass; returns (logits, embeddings).");

  m.def(
      "recalibrate",
      [](const DoubleArray& E, const DoubleArray& centroids, const DoubleArray& q_w,
         const DoubleArray& q_b, const DoubleArray& k_w, const DoubleArray& k_b,
         const DoubleArray& v_w, const DoubleArray& v_b, bool scaled_attention) {
        RecalParams recal;
        recal.q = {to_tensor(q_w, "q_w"), to_tensor(q_b, "q_b")};
        recal.k = {to_tensor(k_w, "k_w"), to_tensor(k_b, "k_b")};
        recal.v = {to_tensor(v_w, "v_w"), to_tensor(v_b, "v_b")};
        CafeResult r =
            cafe_forward(to_tensor(E, "E"), to_tensor(centroids, "centroids"), recal,
                         scaled_attention);
        return py::make_tuple(to_array(r.e_r), to_array(r.attn));
      },
      py::arg("E"), py::arg("centroids"), py::arg("q_w"), py::arg("q_b"), py::arg("k_w"),
      py::arg("k_b"), py::arg("v_w"), py::arg("v_b"), py::arg("scaled_attention") = false,
      "Attention recalibration of embeddings against class centroids; "
      "returns (recalibrated_embeddings, attention_weights).");

  m.def(
      "predict",
      [](const DoubleArray& logits) { return predict(to_tensor(logits, "logits")); },
      py::arg("logits"), "Row-wise argmax with ties broken toward the lowest class index.");

  m.def(
      "report_from_predictions",
      [](const std::vector<std::size_t>& preds, const std::vector<std::size_t>& labels,
         std::size_t M) { return report_to_dict(full_report(confusion(preds, labels, M))); },
      py::arg("preds"), py::arg("labels"), py::arg("M"));

  m.def(
      "kappa_quadratic",
      [](py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast> O) {
        if (O.ndim() != 2 || O.shape(0) != O.shape(1)) {
          throw std::invalid_argument("confusion matrix must be square");
        }
        ConfusionMatrix cm(static_cast<std::size_t>(O.shape(0)));
        std::memcpy(cm.counts.data(), O.data(), sizeof(std::uint64_t) * cm.counts.size());
        return kappa_quadratic(cm);
      },
      py::arg("confusion"), "Quadratic weighted agreement from an MxM confusion matrix.");

  m.def(
      "lr_at",
      [](std::size_t epoch, double base_lr, double eta_min, std::size_t t0, std::size_t t_mult,
         std::size_t epochs) {
        ScheduleConfig s;
        s.base_lr = base_lr;
        s.eta_min = eta_min;
        s.t0 = t0;
        s.t_mult = t_mult;
        s.epochs = epochs;
        s.validate();
        return lr_at(s, epoch);
      },
      py::arg("epoch"), py::arg("base_lr") = 1e-3, py::arg("eta_min") = 1e-3, py::arg("t0") = 20,
      py::arg("t_mult") = 1, py::arg("epochs") = 50);

  m.def(
      "load_csv",
      [](const std::string& path) {
        Dataset d = load_csv(path);
        return py::make_tuple(to_array(d.features), d.labels, d.split);
      },
      py::arg("path"), "Reads a feature CSV; returns (features, labels, split_tag).");

  // File-level commands, mirroring the CLI; each returns its exit code.
  m.def("gen_data", &cmd_gen_data, py::arg("spec_path"), py::arg("out_dir"));
  m.def("train", &cmd_train, py::arg("config_path"), py::arg("out_dir"),
        py::arg("seed") = std::nullopt);
  m.def("evaluate", &cmd_eval, py::arg("checkpoint_path"), py::arg("data_path"),
        py::arg("report_path"));
  m.def("ablate", &cmd_ablate, py::arg("config_path"), py::arg("variants"), py::arg("seeds"),
        py::arg("out_dir"));
}
