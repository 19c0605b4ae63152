// Command-line front end for the QV/ZNE benchmarking engine.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qvzne/harness.hpp"
#include "qvzne/qasm.hpp"
#include "qvzne/transpiler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qvzne;

namespace {

std::string read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

ExperimentConfig load_config(const std::string &path) {
    return ExperimentConfig::from_json(read_file(path));
}

CouplingGraph load_coupling(const std::string &name) {
    if (name == "heavy_hex_27") return CouplingGraph::heavy_hex_27();
    if (name == "all_to_all") {
        throw std::runtime_error("all_to_all needs a size; pass a coupling file instead");
    }
    return CouplingGraph::from_json(read_file(name));
}

void print_report_line(const BenchmarkReport &report) {
    std::cout << "n=" << report.config.n << " circuits=" << report.records.size()
              << " raw_mean=" << (report.lambda_means.count(1.0) ? report.lambda_means.at(1.0) : 0.0)
              << " zne_mean=" << report.zne_mean << " two_sigma=" << 2 * report.sigma << " -> "
              << (report.pass ? "PASS" : "FAIL") << "\n";
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum Volume benchmarking with zero-noise extrapolation"};
    app.require_subcommand(1);

    // gen
    auto *gen = app.add_subcommand("gen", "Generate random QV circuits as QASM + JSON sidecars");
    uint32_t gen_n = 4;
    uint64_t gen_count = 1, gen_seed = 7;
    std::string gen_out = ".";
    gen->add_option("--n", gen_n, "qubit count")->required();
    gen->add_option("--count", gen_count, "number of circuits");
    gen->add_option("--seed", gen_seed, "base seed (circuit i uses seed+i)");
    gen->add_option("--out", gen_out, "output directory");

    // transpile
    auto *transpile = app.add_subcommand("transpile", "Route a native QASM circuit to a coupling map");
    std::string tr_in, tr_coupling = "heavy_hex_27", tr_out;
    uint32_t tr_class = 0, tr_embedding = 0;
    transpile->add_option("--in", tr_in, "input QASM file")->required();
    transpile->add_option("--coupling", tr_coupling, "builtin name or coupling JSON file");
    transpile->add_option("--class", tr_class, "subgraph class index");
    transpile->add_option("--embedding", tr_embedding, "embedding index");
    transpile->add_option("--out", tr_out, "output QASM file")->required();

    // fold
    auto *fold = app.add_subcommand("fold", "Apply unitary folding to a native QASM circuit");
    std::string fold_in, fold_out_dir = ".", fold_mode = "global";
    double fold_lambda = 2.0;
    uint32_t fold_instances = 10;
    uint64_t fold_seed = 7;
    fold->add_option("--in", fold_in, "input QASM file")->required();
    fold->add_option("--lambda", fold_lambda, "noise scale factor in [1,3]");
    fold->add_option("--mode", fold_mode, "global or local");
    fold->add_option("--instances", fold_instances, "local ensemble size");
    fold->add_option("--seed", fold_seed, "seed for local folding");
    fold->add_option("--out", fold_out_dir, "output directory");

    // run
    auto *run = app.add_subcommand("run", "Run the full benchmark pipeline from a config file");
    std::string run_config, run_out = "runs", run_dir_override;
    run->add_option("--config", run_config, "experiment config JSON")->required();
    run->add_option("--out", run_out, "output root (run dir is qv_<config hash>)");
    run->add_option("--run-dir", run_dir_override, "explicit run directory");

    // ingest
    auto *ingest = app.add_subcommand("ingest", "Recompute HOPs from externally executed counts");
    std::string in_config, in_records, in_out;
    std::vector<std::string> in_counts;
    ingest->add_option("--config", in_config, "experiment config JSON")->required();
    ingest->add_option("--records", in_records, "records.jsonl from a run")->required();
    ingest->add_option("--counts", in_counts, "counts JSONL file(s)")->required()->expected(-1);
    ingest->add_option("--out", in_out, "output run directory")->required();

    // analyze
    auto *analyze = app.add_subcommand("analyze", "Recompute ensemble statistics from records");
    std::string an_config, an_records;
    analyze->add_option("--config", an_config, "experiment config JSON")->required();
    analyze->add_option("--records", an_records, "records.jsonl")->required();

    // report
    auto *report_cmd = app.add_subcommand("report", "Write summary.json, report.csv and report.svg");
    std::string rp_config, rp_records, rp_out;
    report_cmd->add_option("--config", rp_config, "experiment config JSON")->required();
    report_cmd->add_option("--records", rp_records, "records.jsonl")->required();
    report_cmd->add_option("--out", rp_out, "output directory")->required();

    // subgraphs
    auto *subgraphs = app.add_subcommand("subgraphs", "Enumerate connected induced subgraph classes");
    std::string sg_coupling = "heavy_hex_27", sg_out;
    uint32_t sg_n = 6;
    subgraphs->add_option("--coupling", sg_coupling, "builtin name or coupling JSON file");
    subgraphs->add_option("--n", sg_n, "subgraph size")->required();
    subgraphs->add_option("--out", sg_out, "optional JSON output file");

    // calibrate
    auto *calibrate = app.add_subcommand("calibrate", "Find p2 putting the raw mean HOP in a window");
    std::string cal_config;
    double cal_low = 0.55, cal_high = 0.66;
    uint64_t cal_circuits = 40;
    calibrate->add_option("--config", cal_config, "experiment config JSON")->required();
    calibrate->add_option("--low", cal_low, "window lower bound");
    calibrate->add_option("--high", cal_high, "window upper bound");
    calibrate->add_option("--circuits", cal_circuits, "circuits per probe");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            fs::create_directories(gen_out);
            for (uint64_t i = 0; i < gen_count; ++i) {
                const uint64_t seed = gen_seed + i;
                const QvCircuit qv = generate_qv_circuit(gen_n, seed);
                const HeavySet heavy = heavy_set(ideal_distribution(qv));
                const Circuit native = rebase_only(qv.circuit);
                const fs::path base =
                    fs::path(gen_out) / ("qv_n" + std::to_string(gen_n) + "_" + std::to_string(i));
                write_file(base.string() + ".qasm", qasm_export(native));
                json side;
                side["n"] = qv.n;
                side["seed"] = qv.seed;
                side["permutations"] = qv.layer_permutations;
                side["heavy_members"] = json::array();
                for (uint64_t x : heavy.members) side["heavy_members"].push_back(x);
                side["median"] = heavy.median;
                write_file(base.string() + ".json", side.dump(2) + "\n");
                std::cout << base.string() << ".qasm\n";
            }
        } else if (*transpile) {
            const Circuit input = qasm_import(read_file(tr_in));
            Circuit body = input;
            std::erase_if(body.gates, [](const Gate &g) { return g.kind == GateKind::Measure; });
            if (!body.layer_marks.empty()) body.layer_marks.back() = body.gates.size();
            Layout layout;
            if (tr_coupling == "all_to_all") {
                layout = Layout::identity(CouplingGraph::all_to_all(body.n_qubits));
            } else {
                const CouplingGraph host = load_coupling(tr_coupling);
                const auto classes = enumerate_subgraph_classes(host, body.n_qubits);
                if (tr_class >= classes.size()) throw std::runtime_error("subgraph class out of range");
                if (tr_embedding >= classes[tr_class].embeddings.size()) {
                    throw std::runtime_error("embedding index out of range");
                }
                layout = Layout::identity(classes[tr_class].representative);
            }
            RoutedCircuit routed = route_native(body, layout);
            write_file(tr_out, qasm_export(routed.measured_circuit()));
            json side;
            side["wire_of_logical"] = routed.wire_of_logical;
            side["device_vertex_of_wire"] = routed.device_vertex_of_wire;
            side["cx_count"] = gate_counts(routed.circuit)[GateKind::CX];
            write_file(fs::path(tr_out).replace_extension(".layout.json").string(),
                       side.dump(2) + "\n");
            std::cout << tr_out << "\n";
        } else if (*fold) {
            const Circuit input = qasm_import(read_file(fold_in));
            fs::create_directories(fold_out_dir);
            const std::string stem = fs::path(fold_in).stem().string();
            auto emit = [&](const FoldedCircuit &f, const std::string &name) {
                const fs::path base = fs::path(fold_out_dir) / name;
                write_file(base.string() + ".qasm", qasm_export(f.circuit));
                json side;
                side["lambda"] = f.plan.lambda;
                side["k"] = f.plan.k;
                side["basis"] = f.plan.basis == FoldBasis::Layers ? "layers" : "cx_gates";
                side["t_or_d"] = f.plan.t_or_d;
                if (f.local_instance_seed) side["instance_seed"] = *f.local_instance_seed;
                write_file(base.string() + ".json", side.dump(2) + "\n");
                std::cout << base.string() << ".qasm\n";
            };
            if (fold_mode == "global") {
                emit(fold_global(input, fold_lambda), stem + "_global");
            } else if (fold_mode == "local") {
                Rng rng(fold_seed);
                const auto ensemble = fold_local_ensemble(input, fold_lambda, fold_instances, rng);
                for (size_t i = 0; i < ensemble.size(); ++i) {
                    emit(ensemble[i], stem + "_local_" + std::to_string(i));
                }
            } else {
                throw std::runtime_error("fold mode must be global or local");
            }
        } else if (*run) {
            const ExperimentConfig config = load_config(run_config);
            const fs::path dir = run_dir_override.empty() ? default_run_dir(config, run_out)
                                                          : fs::path(run_dir_override);
            const BenchmarkReport report = run_experiment(config, dir);
            print_report_line(report);
            std::cout << dir.string() << "\n";
        } else if (*ingest) {
            const ExperimentConfig config = load_config(in_config);
            std::vector<fs::path> counts(in_counts.begin(), in_counts.end());
            const BenchmarkReport report = ingest_counts(config, in_records, counts, in_out);
            print_report_line(report);
            std::cout << in_out << "\n";
        } else if (*analyze) {
            const ExperimentConfig config = load_config(an_config);
            const BenchmarkReport report = analyze_records(config, an_records);
            std::cout << report.summary_json();
        } else if (*report_cmd) {
            const ExperimentConfig config = load_config(rp_config);
            const BenchmarkReport report = analyze_records(config, rp_records);
            emit_report(report, rp_out);
            print_report_line(report);
            std::cout << rp_out << "\n";
        } else if (*subgraphs) {
            const CouplingGraph host = load_coupling(sg_coupling);
            const auto classes = enumerate_subgraph_classes(host, sg_n);
            json j;
            j["n"] = sg_n;
            j["num_classes"] = classes.size();
            j["classes"] = json::array();
            for (const SubgraphClass &cls : classes) {
                json cj;
                cj["vertices"] = cls.representative.vertices;
                cj["edges"] = json::array();
                for (auto [a, b] : cls.representative.edges) cj["edges"].push_back({a, b});
                cj["num_embeddings"] = cls.embeddings.size();
                cj["embeddings"] = cls.embeddings;
                j["classes"].push_back(cj);
            }
            const std::string text = j.dump(2) + "\n";
            if (sg_out.empty()) {
                std::cout << text;
            } else {
                write_file(sg_out, text);
                std::cout << classes.size() << " classes -> " << sg_out << "\n";
            }
        } else if (*calibrate) {
            const ExperimentConfig config = load_config(cal_config);
            const CalibrationResult result = calibrate_p2(config, cal_low, cal_high, cal_circuits);
            json j;
            j["p2"] = result.p2;
            j["p1"] = result.p2 / 10.0;
            j["raw_hop"] = result.raw_hop;
            std::cout << j.dump(2) << "\n";
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
