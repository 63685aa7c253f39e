#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "addnet/checkpoint.hpp"
#include "addnet/constructions.hpp"
#include "addnet/dataset.hpp"
#include "addnet/ef_ops.hpp"
#include "addnet/op_counter.hpp"
#include "addnet/synth_digits.hpp"
#include "addnet/train.hpp"

namespace py = pybind11;
using namespace addnet;

namespace {

ops::LayerOperator layer_operator_from(const std::string& name) {
    if (name == "ef") return ops::LayerOperator::Additive;
    if (name == "classic") return ops::LayerOperator::Classic;
    throw ParamError("unknown operator '" + name + "' (expected ef|classic)");
}

}  // namespace

PYBIND11_MODULE(_addnet, m) {
    m.doc() = "multiplication-free (ef-operator) neural networks";

    // -- tensors ------------------------------------------------------------
    py::class_<Matrix>(m, "Matrix")
        .def(py::init<std::size_t, std::size_t>(), py::arg("rows"), py::arg("cols"))
        .def(py::init<std::size_t, std::size_t, std::vector<double>>(), py::arg("rows"),
             py::arg("cols"), py::arg("data"))
        .def_readonly("rows", &Matrix::rows)
        .def_readonly("cols", &Matrix::cols)
        .def_readwrite("data", &Matrix::data)
        .def("at", [](const Matrix& m_, std::size_t i, std::size_t j) { return m_.at(i, j); })
        .def("set",
             [](Matrix& m_, std::size_t i, std::size_t j, double v) { m_.at(i, j) = v; })
        .def("column", &Matrix::column);

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next_u64", &Rng::next_u64)
        .def("next_unit", &Rng::next_unit)
        .def("uniform", &Rng::uniform)
        .def("next_index", &Rng::next_index);

    m.def("zeros", &zeros);
    m.def("uniform_init", &uniform_init);
    m.def("matvec", &matvec);

    // -- ef operator ----------------------------------------------------------
    m.def("sign", &sign);
    m.def("ef_term", &ef_term);
    m.def("ef_term_alt", &ef_term_alt);
    m.def("ef_dot", &ef_dot);
    m.def("ef_matprod", &ef_matprod);

    // -- op accounting --------------------------------------------------------
    py::class_<ops::OpCounts>(m, "OpCounts")
        .def(py::init<>())
        .def_readonly("mults", &ops::OpCounts::mults)
        .def_readonly("adds", &ops::OpCounts::adds)
        .def_readonly("signs", &ops::OpCounts::signs)
        .def_readonly("compares", &ops::OpCounts::compares)
        .def_readonly("abs_ops", &ops::OpCounts::abs_ops)
        .def_readonly("negations", &ops::OpCounts::negations)
        .def("matches_predicted", &ops::OpCounts::matches_predicted)
        .def("__repr__", [](const ops::OpCounts& c) {
            return "OpCounts(mults=" + std::to_string(c.mults) +
                   ", adds=" + std::to_string(c.adds) + ", signs=" + std::to_string(c.signs) +
                   ", compares=" + std::to_string(c.compares) +
                   ", abs_ops=" + std::to_string(c.abs_ops) +
                   ", negations=" + std::to_string(c.negations) + ")";
        });
    m.def("op_counter", [] { return ops::thread_counter(); },
          "snapshot of this thread's cumulative tallies");
    m.def("reset_op_counter", &ops::reset_thread_counter);
    m.def("theoretical_dense",
          [](const std::string& op, std::size_t d, std::size_t M, bool unit_scaling) {
              return ops::theoretical_dense(layer_operator_from(op), d, M, unit_scaling);
          },
          py::arg("op"), py::arg("d"), py::arg("M"), py::arg("unit_scaling") = false);

    // -- datasets ---------------------------------------------------------------
    py::class_<Dataset>(m, "Dataset")
        .def_readonly("samples", &Dataset::samples)
        .def_readonly("labels", &Dataset::labels)
        .def_readonly("n_classes", &Dataset::n_classes)
        .def("size", &Dataset::size)
        .def("row", &Dataset::row);
    m.def("make_dataset", &make_dataset);
    m.def("one_hot", &one_hot);
    m.def("subset_seeded", &subset_seeded);
    m.def("load_idx_images", &load_idx_images);
    m.def("load_idx_labels", &load_idx_labels);
    m.def("write_idx_images", &write_idx_images);
    m.def("write_idx_labels", &write_idx_labels);
    m.def("synth_digits", &synth::make_digits, py::arg("n"), py::arg("seed"));
    m.def("synth_write_idx_corpus", &synth::write_idx_corpus);

    // -- networks / training ------------------------------------------------------
    py::class_<Network>(m, "Network")
        .def_property_readonly("layer_kinds",
                               [](const Network& n) {
                                   std::vector<std::string> kinds;
                                   for (const Layer& l : n.layers)
                                       kinds.push_back(layer_kind_name(l));
                                   return kinds;
                               })
        .def_property_readonly("operator_kind",
                               [](const Network& n) { return std::string(operator_kind(n)); })
        .def("parameter_count", [](const Network& n) { return parameter_count(n); })
        .def("forward", [](const Network& n, const Vec& x) { return forward(n, x); });

    py::class_<SgdConfig>(m, "SgdConfig")
        .def(py::init([](double lr, std::size_t batch_size, std::size_t epochs,
                         std::uint64_t seed, const std::string& grad_mode) {
                 SgdConfig cfg;
                 cfg.learning_rate = lr;
                 cfg.batch_size = batch_size;
                 cfg.epochs = epochs;
                 cfg.seed = seed;
                 cfg.grad_mode = grad_mode_from_name(grad_mode);
                 return cfg;
             }),
             py::arg("lr") = 0.005, py::arg("batch_size") = 150, py::arg("epochs") = 5,
             py::arg("seed") = 1, py::arg("grad_mode") = "input");

    py::class_<EpochMetrics>(m, "EpochMetrics")
        .def_readonly("epoch", &EpochMetrics::epoch)
        .def_readonly("train_loss", &EpochMetrics::train_loss)
        .def_readonly("train_acc", &EpochMetrics::train_acc)
        .def_readonly("test_acc", &EpochMetrics::test_acc)
        .def_readonly("mult_count", &EpochMetrics::mult_count)
        .def_readonly("add_count", &EpochMetrics::add_count);
    m.def("metrics_json_line", &metrics_json_line);

    m.def("sgd_train",
          [](const Network& net, const Dataset& train, const Dataset& test,
             const SgdConfig& cfg, const MetricsSink& sink) {
              TrainResult r = sgd_train(net, train, test, cfg, sink);
              return py::make_tuple(std::move(r.net), std::move(r.history));
          },
          py::arg("net"), py::arg("train"), py::arg("test"), py::arg("cfg"),
          py::arg("sink") = MetricsSink{});
    m.def("evaluate", &evaluate);

    m.def("build_xor_experiment",
          [](const std::string& op, std::uint64_t seed) {
              auto [net, data] = build_xor_experiment(operator_from_name(op), seed);
              return py::make_tuple(std::move(net), std::move(data));
          },
          py::arg("op") = "ef", py::arg("seed") = 1);
    m.def("build_mnist_mlp",
          [](const std::string& op, int hidden, const std::string& act, std::uint64_t seed) {
              return build_mnist_mlp(operator_from_name(op), hidden,
                                     activation_from_name(act), seed);
          },
          py::arg("op") = "ef", py::arg("hidden_layers") = 2, py::arg("activation") = "relu",
          py::arg("seed") = 1);
    m.def("build_lenet",
          [](const std::string& op, const std::string& act, std::uint64_t seed) {
              return build_lenet(operator_from_name(op), activation_from_name(act), seed);
          },
          py::arg("op") = "ef", py::arg("activation") = "relu", py::arg("seed") = 1);

    m.def("save_checkpoint",
          [](const Network& net, const std::string& path,
             const std::map<std::string, std::string>& config) {
              save_checkpoint(net, path, config);
          },
          py::arg("net"), py::arg("path"),
          py::arg("config") = std::map<std::string, std::string>{});
    m.def("load_checkpoint", [](const std::string& path) {
        LoadedCheckpoint lc = load_checkpoint(path);
        return py::make_tuple(std::move(lc.net), std::move(lc.config));
    });

    // -- constructions ---------------------------------------------------------------
    m.def("build_sign_network", [](const Vec& y, double bias) {
        return constructions::build_sign_network(constructions::SignNetSpec{y, bias});
    });
    m.def("build_superposition",
          [](const std::vector<std::tuple<double, Vec, double>>& terms, bool relu) {
              constructions::SuperpositionSpec spec;
              for (const auto& [alpha, y, theta] : terms)
                  spec.terms.push_back(constructions::SuperpositionTerm{alpha, y, theta});
              return constructions::build_superposition(spec, relu);
          },
          py::arg("terms"), py::arg("relu") = false);
    m.def("convert_to_relu_network", &constructions::convert_to_relu_network);
    m.def("exact_forward_approx", [](const Network& net, const Vec& x) {
        Vec out;
        for (const auto& v : constructions::exact_forward(net, x)) out.push_back(v.approx());
        return out;
    });
    m.def("exact_forward_equals",
          [](const Network& net, const Vec& x, const Vec& expected) {
              const auto out = constructions::exact_forward(net, x);
              if (out.size() != expected.size()) return false;
              for (std::size_t i = 0; i < out.size(); ++i)
                  if (!out[i].minus(exact::Value(expected[i])).is_zero()) return false;
              return true;
          },
          "true iff the exact (real-arithmetic) forward equals `expected` exactly");

    py::class_<constructions::VerifyReport>(m, "VerifyReport")
        .def_readonly("name", &constructions::VerifyReport::name)
        .def_readonly("cases", &constructions::VerifyReport::cases)
        .def_readonly("failures", &constructions::VerifyReport::failures)
        .def_readonly("boundary_cases", &constructions::VerifyReport::boundary_cases)
        .def_readonly("boundary_failures", &constructions::VerifyReport::boundary_failures)
        .def("passed", &constructions::VerifyReport::passed);
    m.def("verify_sign_network_exactness", &constructions::verify_sign_network_exactness);
    m.def("verify_relu_conversion", &constructions::verify_relu_conversion);
    m.def("verify_superposition", &constructions::verify_superposition, py::arg("max_terms"),
          py::arg("num_inputs"), py::arg("seed"), py::arg("relu") = false);

    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<ParamError>(m, "ParamError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_RuntimeError);
}
