#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qvzne/density_sim.hpp"
#include "qvzne/folding.hpp"
#include "qvzne/harness.hpp"
#include "qvzne/kak.hpp"
#include "qvzne/qasm.hpp"
#include "qvzne/transpiler.hpp"

namespace py = pybind11;
using namespace qvzne;

namespace {

Circuit circuit_from_qasm(const std::string &text) { return qasm_import(text); }

HeavySet heavy_set_of(const std::vector<double> &p) { return heavy_set(p); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantum Volume benchmarking with zero-noise extrapolation";

    py::enum_<GateKind>(m, "GateKind")
        .value("X", GateKind::X)
        .value("SX", GateKind::SX)
        .value("RZ", GateKind::RZ)
        .value("CX", GateKind::CX)
        .value("SU4", GateKind::SU4)
        .value("SWAP", GateKind::SWAP)
        .value("BARRIER", GateKind::Barrier)
        .value("MEASURE", GateKind::Measure);

    py::class_<Gate>(m, "Gate")
        .def_readonly("kind", &Gate::kind)
        .def_readonly("qubits", &Gate::qubits)
        .def_readonly("angle", &Gate::angle);

    py::class_<Circuit>(m, "Circuit")
        .def(py::init<uint32_t>(), py::arg("n_qubits"))
        .def_readonly("n_qubits", &Circuit::n_qubits)
        .def_readonly("gates", &Circuit::gates)
        .def_readonly("layer_marks", &Circuit::layer_marks)
        .def("to_qasm", [](const Circuit &c) { return qasm_export(c); })
        .def_static("from_qasm", &circuit_from_qasm)
        .def("__len__", [](const Circuit &c) { return c.gates.size(); })
        .def("__eq__", [](const Circuit &a, const Circuit &b) { return a == b; });

    m.def("gate_counts", [](const Circuit &c) {
        std::map<std::string, size_t> out;
        for (const auto &[kind, count] : gate_counts(c)) out[gate_kind_name(kind)] = count;
        return out;
    });
    m.def("compose_unitary", &compose_unitary);

    py::class_<QvCircuit>(m, "QvCircuit")
        .def_readonly("n", &QvCircuit::n)
        .def_readonly("circuit", &QvCircuit::circuit)
        .def_readonly("seed", &QvCircuit::seed)
        .def_readonly("layer_permutations", &QvCircuit::layer_permutations);

    py::class_<HeavySet>(m, "HeavySet")
        .def_readonly("n", &HeavySet::n)
        .def_readonly("median", &HeavySet::median)
        .def_property_readonly("members", [](const HeavySet &h) {
            return std::vector<uint64_t>(h.members.begin(), h.members.end());
        });

    m.def("generate_qv_circuit", &generate_qv_circuit, py::arg("n"), py::arg("seed"));
    m.def("ideal_distribution",
          [](const QvCircuit &qv) { return ideal_distribution(qv); });
    m.def("ideal_distribution_of",
          [](const Circuit &c) { return ideal_distribution(c); });
    m.def("heavy_set", &heavy_set_of, py::arg("probabilities"));
    m.def("heavy_mass", &heavy_mass);
    m.def("haar_random_su4", [](uint64_t seed) {
        Rng rng(seed);
        return Matrix4cd(haar_random_su4(rng));
    });
    m.def("decompose_su4", [](const Matrix4cd &u) {
        Circuit c(2);
        for (Gate &g : decompose_su4(u, 0, 1)) c.push(std::move(g));
        return c;
    });

    py::class_<CouplingGraph>(m, "CouplingGraph")
        .def_readonly("vertices", &CouplingGraph::vertices)
        .def_readonly("edges", &CouplingGraph::edges)
        .def("to_json", &CouplingGraph::to_json)
        .def_static("from_json", &CouplingGraph::from_json)
        .def_static("all_to_all", &CouplingGraph::all_to_all)
        .def_static("heavy_hex_27", &CouplingGraph::heavy_hex_27);

    py::class_<SubgraphClass>(m, "SubgraphClass")
        .def_readonly("representative", &SubgraphClass::representative)
        .def_readonly("embeddings", &SubgraphClass::embeddings);
    m.def("enumerate_subgraph_classes", &enumerate_subgraph_classes, py::arg("graph"),
          py::arg("n"));

    py::class_<RoutedCircuit>(m, "RoutedCircuit")
        .def_readonly("circuit", &RoutedCircuit::circuit)
        .def_readonly("wire_of_logical", &RoutedCircuit::wire_of_logical);
    m.def("route", [](const QvCircuit &qv, const CouplingGraph &g) {
        return route(qv, Layout::identity(g));
    });
    m.def("rebase_only", &rebase_only);

    py::class_<FoldPlan>(m, "FoldPlan")
        .def_readonly("lambda_", &FoldPlan::lambda)
        .def_readonly("k", &FoldPlan::k)
        .def_readonly("t_or_d", &FoldPlan::t_or_d);
    py::class_<FoldedCircuit>(m, "FoldedCircuit")
        .def_readonly("circuit", &FoldedCircuit::circuit)
        .def_readonly("plan", &FoldedCircuit::plan);
    m.def("fold_count", &fold_count, py::arg("t_or_d"), py::arg("lambda_"));
    m.def("fold_global", &fold_global, py::arg("circuit"), py::arg("lambda_"));
    m.def("fold_local_random", [](const Circuit &c, double lambda, uint64_t seed) {
        Rng rng(seed);
        return fold_local_random(c, lambda, rng);
    });
    m.def("fold_local_ensemble", [](const Circuit &c, double lambda, size_t m_, uint64_t seed) {
        Rng rng(seed);
        return fold_local_ensemble(c, lambda, m_, rng);
    });

    py::class_<NoiseModel>(m, "NoiseModel")
        .def(py::init<>())
        .def_readwrite("p2", &NoiseModel::p2)
        .def_readwrite("p1", &NoiseModel::p1)
        .def_readwrite("readout_flip", &NoiseModel::readout_flip)
        .def_readwrite("idle_z_rate", &NoiseModel::idle_z_rate);

    py::class_<DensityState>(m, "DensityState")
        .def_readonly("n", &DensityState::n)
        .def_property_readonly("rho", [](const DensityState &s) { return MatrixXcd(s.rho); })
        .def("diagonal", &DensityState::diagonal);

    m.def("simulate", [](const Circuit &c, const NoiseModel &noise) { return simulate(c, noise); });
    m.def("exact_heavy_prob", &exact_heavy_prob);
    m.def("sample_counts", [](const DensityState &s, uint64_t shots, double readout, uint64_t seed) {
        Rng rng(seed);
        return sample_counts(s, shots, readout, rng);
    });

    m.def("hop_from_counts", &hop_from_counts);
    m.def("combine_local_ensemble", &combine_local_ensemble);
    py::class_<ZneEstimate>(m, "ZneEstimate")
        .def_readonly("intercept", &ZneEstimate::intercept)
        .def_readonly("coefficients", &ZneEstimate::coefficients)
        .def_readonly("order", &ZneEstimate::order)
        .def_readonly("residual_rms", &ZneEstimate::residual_rms);
    m.def("extrapolate", &extrapolate, py::arg("points"), py::arg("order") = 1);
    m.def("bootstrap_sigma", [](const std::vector<double> &v, size_t resamples, uint64_t seed) {
        Rng rng(seed);
        return bootstrap_sigma(v, resamples, rng);
    });
    m.def("evaluate_pass", &evaluate_pass);

    py::class_<BenchmarkReport>(m, "BenchmarkReport")
        .def_readonly("zne_mean", &BenchmarkReport::zne_mean)
        .def_readonly("sigma", &BenchmarkReport::sigma)
        .def_readonly("pass_", &BenchmarkReport::pass)
        .def_readonly("zne_hops", &BenchmarkReport::zne_hops)
        .def("summary_json", &BenchmarkReport::summary_json);
    m.def("run_experiment", [](const std::string &config_json, const std::string &run_dir) {
        return run_experiment(ExperimentConfig::from_json(config_json), run_dir);
    });
    m.def("calibrate_p2", [](const std::string &config_json, double lo, double hi, uint64_t k) {
        const CalibrationResult r = calibrate_p2(ExperimentConfig::from_json(config_json), lo, hi, k);
        return py::make_tuple(r.p2, r.raw_hop);
    });
}
