// pybind11 module exposing the simulator, gradients, metrics, and pipeline.
// Structured results cross the boundary as JSON text; the Python package
// decodes them.

#include "qcredit/ansatz.hpp"
#include "qcredit/classical.hpp"
#include "qcredit/errors.hpp"
#include "qcredit/gradients.hpp"
#include "qcredit/metrics.hpp"
#include "qcredit/pipeline.hpp"
#include "qcredit/qsim.hpp"
#include "qcredit/serialize.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace qcredit;
using serialize::Json;

namespace {

qsim::ParameterizedCircuit circuit_of(const std::string &text) {
  return serialize::circuit_from_json(Json::parse(text));
}

ansatz::Variant variant_of(const std::string &name) {
  const auto v = ansatz::variant_from_string(name);
  if (!v) {
    throw ContractError("unknown ansatz variant '" + name + "'");
  }
  return *v;
}

std::string build_ansatz(const std::string &variant, std::size_t num_qubits, double angle_scale) {
  return serialize::to_json(ansatz::build_ansatz({variant_of(variant), num_qubits, angle_scale})).dump();
}

std::vector<qsim::Complex> run_circuit(const std::string &circuit, const std::vector<double> &encoding,
                                       const std::vector<double> &theta) {
  const auto state = qsim::run_circuit(circuit_of(circuit), encoding, theta);
  std::vector<qsim::Complex> out(state.dimension());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = state[i];
  }
  return out;
}

double expectation(const std::string &circuit, const std::vector<double> &encoding, const std::vector<double> &theta,
                   std::size_t qubit) {
  return gradients::expectation_of(circuit_of(circuit), encoding, theta, {}, {qubit});
}

py::tuple parameter_shift(const std::string &circuit, const std::vector<double> &encoding,
                          const std::vector<double> &theta, std::size_t qubit) {
  const auto r = gradients::parameter_shift_gradient(circuit_of(circuit), encoding, theta, {}, {qubit});
  return py::make_tuple(r.grad, r.evaluations);
}

std::vector<double> finite_difference(const std::string &circuit, const std::vector<double> &encoding,
                                      const std::vector<double> &theta, double epsilon, std::size_t qubit) {
  return gradients::finite_difference_gradient(circuit_of(circuit), encoding, theta, epsilon, {qubit});
}

double qnn_forward(const std::vector<double> &features, const std::vector<double> &theta, const std::string &variant,
                   double angle_scale) {
  const auto circuit = ansatz::build_ansatz({variant_of(variant), features.size(), angle_scale});
  return ansatz::qnn_forward(circuit, features, theta, angle_scale);
}

py::tuple ks_statistic(const std::vector<double> &scores, const std::vector<int> &labels) {
  const auto r = metrics::ks_statistic(scores, labels);
  return py::make_tuple(r.ks, r.threshold);
}

std::string evaluate(const std::vector<double> &scores, const std::vector<int> &labels,
                     std::optional<double> threshold, int partition) {
  const auto policy = threshold ? metrics::ThresholdPolicy::at(*threshold) : metrics::ThresholdPolicy::ks_optimal();
  return serialize::to_json(metrics::evaluate(scores, labels, policy, partition)).dump();
}

std::string generate_dataset(std::uint64_t seed) {
  std::ostringstream out;
  pipeline::write_dataset_csv(out, pipeline::generate_synthetic_dataset(seed));
  return out.str();
}

std::vector<py::dict> partitions(const std::vector<int> &labels, std::size_t n_partitions, double train_fraction,
                                 const std::vector<std::size_t> &batch_sizes, std::uint64_t seed) {
  std::vector<py::dict> out;
  for (const auto &p : pipeline::stratified_partitions(labels, n_partitions, train_fraction, batch_sizes, seed)) {
    py::dict d;
    d["id"] = p.id;
    d["train"] = p.train;
    d["test"] = p.test;
    d["batch_size"] = p.batch_size;
    out.push_back(d);
  }
  return out;
}

std::string cross_validate(const std::string &csv, const std::string &config_json, bool benchmarks) {
  std::istringstream in(csv);
  const auto data = pipeline::read_dataset_csv(in);
  pipeline::CrossValidationConfig config;
  serialize::merge_config(config, Json::parse(config_json));
  config.validate();

  pipeline::CrossValidationResult result;
  {
    py::gil_scoped_release release;
    result = pipeline::run_cross_validation(data, config);
  }
  Json doc = Json::object();
  doc["config"] = serialize::to_json(config);
  Json reports = Json::array();
  for (const auto &r : result.reports()) {
    reports.push_back(serialize::to_json(r));
  }
  doc["partitions"] = reports;
  doc["aggregate"] = serialize::to_json(result.aggregate);
  Json traces = Json::array();
  for (const auto &o : result.outcomes) {
    traces.push_back(serialize::to_json(o.training.trace));
  }
  doc["traces"] = traces;
  if (benchmarks) {
    const auto qnn = result.reports();
    std::vector<pipeline::BenchmarkRow> rows;
    {
      py::gil_scoped_release release;
      rows = pipeline::run_benchmarks(data, result.plans, config, qnn);
    }
    Json table = Json::object();
    for (const auto &row : rows) {
      table[row.model] = serialize::to_json(row.metrics);
    }
    doc["benchmarks"] = table;
  }
  return doc.dump();
}

} // namespace

PYBIND11_MODULE(_qcredit, m) {
  m.doc() = "Native core of the qcredit package";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto contract = py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<IndexError>(m, "IndexError", contract.ptr());
  py::register_exception<SizeError>(m, "SizeError", contract.ptr());
  py::register_exception<UnsupportedGeneratorError>(m, "UnsupportedGeneratorError", contract.ptr());
  py::register_exception<DegenerateDataError>(m, "DegenerateDataError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());

  m.def("build_ansatz", &build_ansatz, py::arg("variant") = "simulation", py::arg("num_qubits") = 3,
        py::arg("angle_scale") = std::numbers::pi);
  m.def("run_circuit", &run_circuit, py::arg("circuit"), py::arg("encoding"), py::arg("theta"));
  m.def("expectation", &expectation, py::arg("circuit"), py::arg("encoding"), py::arg("theta"),
        py::arg("qubit") = 0);
  m.def("parameter_shift_gradient", &parameter_shift, py::arg("circuit"), py::arg("encoding"), py::arg("theta"),
        py::arg("qubit") = 0);
  m.def("finite_difference_gradient", &finite_difference, py::arg("circuit"), py::arg("encoding"), py::arg("theta"),
        py::arg("epsilon") = 1e-5, py::arg("qubit") = 0);
  m.def("qnn_forward", &qnn_forward, py::arg("features"), py::arg("theta"), py::arg("variant") = "simulation",
        py::arg("angle_scale") = std::numbers::pi);

  m.def("bce_loss", [](const std::vector<double> &p, const std::vector<int> &y) { return gradients::bce_loss(p, y); },
        py::arg("predictions"), py::arg("labels"));
  m.def("auc", [](const std::vector<double> &s, const std::vector<int> &y) { return metrics::auc(s, y); },
        py::arg("scores"), py::arg("labels"));
  m.def("ks_statistic", &ks_statistic, py::arg("scores"), py::arg("labels"));
  m.def("evaluate", &evaluate, py::arg("scores"), py::arg("labels"), py::arg("threshold") = py::none(),
        py::arg("partition") = 0);
  m.def("entropy", [](const std::vector<double> &p) { return classical::entropy(p); }, py::arg("probabilities"));
  m.def("information_gain",
        [](const std::vector<int> &parent, const std::vector<std::vector<int>> &children) {
          return classical::information_gain(parent, children);
        },
        py::arg("parent"), py::arg("children"));

  m.def("generate_dataset", &generate_dataset, py::arg("seed") = 0);
  m.def("stratified_partitions", &partitions, py::arg("labels"), py::arg("n_partitions") = 10,
        py::arg("train_fraction") = 0.7, py::arg("batch_sizes") = pipeline::kReferenceBatchSizes,
        py::arg("seed") = 0);
  m.def("cross_validate", &cross_validate, py::arg("csv"), py::arg("config") = "{}", py::arg("benchmarks") = true);
}
