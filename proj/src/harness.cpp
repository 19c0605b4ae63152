#include "qvzne/harness.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "qvzne/transpiler.hpp"

namespace qvzne {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kThreshold = 2.0 / 3.0;
const double kIdealHop = (1.0 + std::log(2.0)) / 2.0;

bool lambda_is_one(double lambda) { return std::abs(lambda - 1.0) < 1e-9; }

uint64_t fnv1a64(const std::string &data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::string lambda_key(double lambda) { return json(lambda).dump(); }

void append_measurements(Circuit &c, const std::vector<uint32_t> &wire_of_logical) {
    std::vector<uint32_t> all(c.n_qubits);
    std::iota(all.begin(), all.end(), 0u);
    c.gates.push_back(Gate::barrier(all));
    std::vector<uint32_t> logical_of_wire(c.n_qubits, 0);
    for (uint32_t l = 0; l < wire_of_logical.size(); ++l) logical_of_wire[wire_of_logical[l]] = l;
    for (uint32_t w = 0; w < c.n_qubits; ++w) c.gates.push_back(Gate::measure(w, logical_of_wire[w]));
    if (!c.layer_marks.empty()) c.layer_marks.back() = c.gates.size();
}

uint64_t wire_index_of(uint64_t logical_index, const std::vector<uint32_t> &wire_of_logical) {
    uint64_t y = 0;
    for (uint32_t l = 0; l < wire_of_logical.size(); ++l) {
        if (logical_index & (uint64_t{1} << l)) y |= uint64_t{1} << wire_of_logical[l];
    }
    return y;
}

uint64_t logical_index_of(uint64_t wire_index, const std::vector<uint32_t> &wire_of_logical) {
    uint64_t x = 0;
    for (uint32_t l = 0; l < wire_of_logical.size(); ++l) {
        if (wire_index & (uint64_t{1} << wire_of_logical[l])) x |= uint64_t{1} << l;
    }
    return x;
}

std::map<std::string, uint64_t> counts_to_logical(const std::map<std::string, uint64_t> &wire_counts,
                                                  const std::vector<uint32_t> &wire_of_logical,
                                                  uint32_t n) {
    std::map<std::string, uint64_t> out;
    for (const auto &[bits, c] : wire_counts) {
        out[bitstring_of(logical_index_of(index_of_bitstring(bits), wire_of_logical), n)] += c;
    }
    return out;
}

json record_to_json(const QvRecord &rec) {
    json j;
    j["circuit_id"] = rec.circuit_id;
    j["n"] = rec.n;
    j["seed"] = rec.seed;
    j["median"] = rec.heavy.median;
    j["heavy_members"] = json::array();
    for (uint64_t x : rec.heavy.members) j["heavy_members"].push_back(x);
    j["wires"] = rec.wire_of_logical;
    j["per_lambda"] = json::array();
    for (const LambdaResult &lr : rec.per_lambda) {
        json lj;
        lj["lambda"] = lr.lambda;
        lj["hop"] = lr.hop;
        lj["shots"] = lr.shots;
        lj["instances"] = lr.instances;
        lj["instance_hops"] = lr.instance_hops;
        j["per_lambda"].push_back(lj);
    }
    j["zne"] = {{"intercept", rec.zne.intercept},
                {"coefficients", rec.zne.coefficients},
                {"order", rec.zne.order},
                {"lambdas", rec.zne.lambdas_used},
                {"residual_rms", rec.zne.residual_rms}};
    return j;
}

QvRecord record_from_json(const json &j) {
    QvRecord rec;
    rec.circuit_id = j.at("circuit_id").get<uint64_t>();
    rec.n = j.at("n").get<uint32_t>();
    rec.seed = j.at("seed").get<uint64_t>();
    rec.heavy.n = rec.n;
    rec.heavy.median = j.at("median").get<double>();
    for (const auto &x : j.at("heavy_members")) rec.heavy.members.insert(x.get<uint64_t>());
    rec.wire_of_logical = j.at("wires").get<std::vector<uint32_t>>();
    for (const auto &lj : j.at("per_lambda")) {
        LambdaResult lr;
        lr.lambda = lj.at("lambda").get<double>();
        lr.hop = lj.at("hop").get<double>();
        lr.shots = lj.at("shots").get<uint64_t>();
        lr.instances = lj.at("instances").get<uint32_t>();
        lr.instance_hops = lj.at("instance_hops").get<std::vector<double>>();
        rec.per_lambda.push_back(std::move(lr));
    }
    const json &zj = j.at("zne");
    rec.zne.intercept = zj.at("intercept").get<double>();
    rec.zne.coefficients = zj.at("coefficients").get<std::vector<double>>();
    rec.zne.order = zj.at("order").get<int>();
    rec.zne.lambdas_used = zj.at("lambdas").get<std::vector<double>>();
    rec.zne.residual_rms = zj.at("residual_rms").get<double>();
    return rec;
}

std::map<uint64_t, QvRecord> load_records_file(const fs::path &path) {
    std::map<uint64_t, QvRecord> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            QvRecord rec = record_from_json(json::parse(line));
            out[rec.circuit_id] = std::move(rec);
        } catch (const std::exception &) {
            break;  // torn tail from an interrupted run; recompute from here
        }
    }
    return out;
}

size_t worker_count() {
    if (const char *env = std::getenv("QVZNE_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256) return static_cast<size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

}  // namespace

uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b) {
    return splitmix64(splitmix64(base + 0x51ed270b * a) ^ splitmix64(b + 0x9e3779b9));
}

void ExperimentConfig::validate() const {
    if (n < 2 || n > 10) throw std::invalid_argument("config: n must be in [2, 10]");
    if (num_circuits < 1) throw std::invalid_argument("config: num_circuits must be >= 1");
    if (shots.base < 1 || shots.global_folded < 1 || shots.local_folded < 1) {
        throw std::invalid_argument("config: shot counts must be positive");
    }
    bool has_one = false;
    for (double l : lambdas) {
        if (!(l >= 1.0 - 1e-9 && l <= 3.0)) throw std::invalid_argument("config: lambdas must lie in [1, 3]");
        has_one = has_one || lambda_is_one(l);
    }
    if (!has_one) throw std::invalid_argument("config: lambdas must contain 1");
    if (local_instances < 1) throw std::invalid_argument("config: local_instances must be >= 1");
    if (extrapolation_order < 1) throw std::invalid_argument("config: extrapolation order must be >= 1");
    if (bootstrap_resamples < 2) throw std::invalid_argument("config: bootstrap_resamples must be >= 2");
    if (flush_interval < 1) throw std::invalid_argument("config: flush_interval must be >= 1");
    noise.validate();
    durations.validate();
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["n"] = n;
    j["num_circuits"] = num_circuits;
    j["base_seed"] = base_seed;
    j["lambdas"] = lambdas;
    j["folding"] = local_folding ? "local" : "global";
    j["local_instances"] = local_instances;
    j["shots"] = {{"base", shots.base},
                  {"global_folded", shots.global_folded},
                  {"local_folded", shots.local_folded}};
    j["noise"] = {{"p2", noise.p2},
                  {"p1", noise.p1},
                  {"readout_flip", noise.readout_flip},
                  {"idle_z_rate", noise.idle_z_rate}};
    j["durations"] = {{"x", durations.x},
                      {"sx", durations.sx},
                      {"cx", durations.cx},
                      {"measure", durations.measure},
                      {"rz", durations.rz}};
    j["dd_enabled"] = dd_enabled;
    j["coupling"] = coupling;
    j["layout"] = {{"subgraph_class", layout.subgraph_class}, {"embedding", layout.embedding}};
    j["extrapolation_order"] = extrapolation_order;
    j["bootstrap_resamples"] = bootstrap_resamples;
    j["flush_interval"] = flush_interval;
    j["export_counts"] = export_counts;
    return j.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json(const std::string &text) {
    const json j = json::parse(text);
    ExperimentConfig c;
    c.n = j.value("n", c.n);
    c.num_circuits = j.value("num_circuits", c.num_circuits);
    c.base_seed = j.value("base_seed", c.base_seed);
    if (j.contains("lambdas")) c.lambdas = j.at("lambdas").get<std::vector<double>>();
    if (j.contains("folding")) {
        const std::string mode = j.at("folding").get<std::string>();
        if (mode != "global" && mode != "local") {
            throw std::invalid_argument("config: folding must be 'global' or 'local'");
        }
        c.local_folding = (mode == "local");
    }
    c.local_instances = j.value("local_instances", c.local_instances);
    if (j.contains("shots")) {
        const json &s = j.at("shots");
        c.shots.base = s.value("base", c.shots.base);
        c.shots.global_folded = s.value("global_folded", c.shots.global_folded);
        c.shots.local_folded = s.value("local_folded", c.shots.local_folded);
    }
    if (j.contains("noise")) {
        const json &nj = j.at("noise");
        c.noise.p2 = nj.value("p2", 0.0);
        c.noise.p1 = nj.contains("p1") ? nj.at("p1").get<double>() : c.noise.p2 / 10.0;
        c.noise.readout_flip = nj.value("readout_flip", 0.0);
        c.noise.idle_z_rate = nj.value("idle_z_rate", 0.0);
    }
    if (j.contains("durations")) {
        const json &dj = j.at("durations");
        c.durations.x = dj.value("x", c.durations.x);
        c.durations.sx = dj.value("sx", c.durations.sx);
        c.durations.cx = dj.value("cx", c.durations.cx);
        c.durations.measure = dj.value("measure", c.durations.measure);
        c.durations.rz = dj.value("rz", c.durations.rz);
    }
    c.dd_enabled = j.value("dd_enabled", c.dd_enabled);
    c.coupling = j.value("coupling", c.coupling);
    if (j.contains("layout")) {
        c.layout.subgraph_class = j.at("layout").value("subgraph_class", 0u);
        c.layout.embedding = j.at("layout").value("embedding", 0u);
    }
    c.extrapolation_order = j.value("extrapolation_order", c.extrapolation_order);
    c.bootstrap_resamples = j.value("bootstrap_resamples", c.bootstrap_resamples);
    c.flush_interval = j.value("flush_interval", c.flush_interval);
    c.export_counts = j.value("export_counts", c.export_counts);
    c.validate();
    return c;
}

std::string ExperimentConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_json())));
    return buf;
}

Layout resolve_layout(const ExperimentConfig &config) {
    CouplingGraph host;
    if (config.coupling == "all_to_all") {
        return Layout::identity(CouplingGraph::all_to_all(config.n));
    } else if (config.coupling == "heavy_hex_27") {
        host = CouplingGraph::heavy_hex_27();
    } else {
        std::ifstream in(config.coupling);
        if (!in) throw std::invalid_argument("cannot open coupling file " + config.coupling);
        std::stringstream ss;
        ss << in.rdbuf();
        host = CouplingGraph::from_json(ss.str());
    }
    const std::vector<SubgraphClass> classes = enumerate_subgraph_classes(host, config.n);
    if (config.layout.subgraph_class >= classes.size()) {
        throw std::invalid_argument("layout: subgraph_class " +
                                    std::to_string(config.layout.subgraph_class) +
                                    " out of range (" + std::to_string(classes.size()) +
                                    " classes)");
    }
    const SubgraphClass &cls = classes[config.layout.subgraph_class];
    if (config.layout.embedding >= cls.embeddings.size()) {
        throw std::invalid_argument("layout: embedding index out of range");
    }
    return Layout::identity(cls.representative);
}

QvRecord process_circuit(const ExperimentConfig &config, const Layout &layout,
                         uint64_t circuit_id,
                         std::map<std::pair<double, uint32_t>,
                                  std::map<std::string, uint64_t>> *counts_out) {
    const uint64_t seed = config.base_seed + circuit_id;
    const QvCircuit qv = generate_qv_circuit(config.n, seed);
    const std::vector<double> p_ideal = ideal_distribution(qv);
    const HeavySet heavy = heavy_set(p_ideal);
    const RoutedCircuit routed = route(qv, layout);

    HeavySet heavy_wire;
    heavy_wire.n = config.n;
    heavy_wire.median = heavy.median;
    for (uint64_t x : heavy.members) {
        heavy_wire.members.insert(wire_index_of(x, routed.wire_of_logical));
    }

    QvRecord rec;
    rec.circuit_id = circuit_id;
    rec.n = config.n;
    rec.seed = seed;
    rec.heavy = heavy;
    rec.wire_of_logical = routed.wire_of_logical;

    for (size_t li = 0; li < config.lambdas.size(); ++li) {
        const double lambda = config.lambdas[li];
        std::vector<Circuit> variants;
        uint64_t shots = 0;
        if (lambda_is_one(lambda)) {
            variants.push_back(routed.circuit);
            shots = config.shots.base;
        } else if (!config.local_folding) {
            variants.push_back(fold_global(routed.circuit, lambda).circuit);
            shots = config.shots.global_folded;
        } else {
            Rng fold_rng(derive_seed(seed, 17, li));
            for (FoldedCircuit &f :
                 fold_local_ensemble(routed.circuit, lambda, config.local_instances, fold_rng)) {
                variants.push_back(std::move(f.circuit));
            }
            shots = config.shots.local_folded;
        }

        LambdaResult lr;
        lr.lambda = lambda;
        lr.shots = shots;
        lr.instances = static_cast<uint32_t>(variants.size());
        for (size_t inst = 0; inst < variants.size(); ++inst) {
            Circuit prepared = rebase_only(variants[inst]);
            append_measurements(prepared, routed.wire_of_logical);
            ScheduledCircuit sched = schedule_alap(prepared, config.durations);
            if (config.dd_enabled) sched = insert_dd(sched, config.durations);
            const DensityState state = simulate(sched, config.noise);
            Rng shot_rng(derive_seed(seed, 101 + li, inst));
            const auto wire_counts =
                sample_counts(state, shots, config.noise.readout_flip, shot_rng);
            lr.instance_hops.push_back(hop_from_counts(wire_counts, heavy_wire));
            if (counts_out) {
                (*counts_out)[{lambda, static_cast<uint32_t>(inst)}] =
                    counts_to_logical(wire_counts, routed.wire_of_logical, config.n);
            }
        }
        lr.hop = combine_local_ensemble(lr.instance_hops);
        rec.per_lambda.push_back(std::move(lr));
    }

    std::vector<std::pair<double, double>> points;
    for (const LambdaResult &lr : rec.per_lambda) points.push_back({lr.lambda, lr.hop});
    rec.zne = extrapolate(points, config.extrapolation_order);
    return rec;
}

namespace {

BenchmarkReport build_report(const ExperimentConfig &config, std::vector<QvRecord> records) {
    BenchmarkReport report;
    report.config = config;
    for (const QvRecord &rec : records) report.zne_hops.push_back(rec.zne.intercept);
    for (double lambda : config.lambdas) {
        std::vector<double> hops;
        for (const QvRecord &rec : records) {
            const LambdaResult *lr = rec.find_lambda(lambda);
            if (lr) hops.push_back(lr->hop);
        }
        if (!hops.empty()) report.lambda_means[lambda] = mean_of(hops);
    }
    report.zne_mean = mean_of(report.zne_hops);
    report.cumulative = cumulative_series(report.zne_hops, config.bootstrap_resamples,
                                          derive_seed(config.base_seed, 997, 0));
    report.sigma = report.cumulative.back().two_sigma / 2.0;
    report.pass = evaluate_pass(report.zne_mean, report.sigma);
    report.records = std::move(records);
    return report;
}

}  // namespace

std::string BenchmarkReport::summary_json() const {
    json j;
    j["schema"] = "qvzne-summary-v1";
    j["config_hash"] = config.hash();
    j["n"] = config.n;
    j["num_circuits"] = records.size();
    json lm = json::object();
    for (const auto &[lambda, mean] : lambda_means) lm[lambda_key(lambda)] = mean;
    j["lambda_means"] = lm;
    double raw = 0.0;
    if (auto it = lambda_means.find(1.0); it != lambda_means.end()) raw = it->second;
    j["raw_mean"] = raw;
    j["zne_mean"] = zne_mean;
    j["sigma"] = sigma;
    j["two_sigma"] = 2.0 * sigma;
    j["threshold"] = kThreshold;
    j["ideal_reference"] = kIdealHop;
    j["pass"] = pass;
    double lo = 0.0, hi = 0.0;
    if (!zne_hops.empty()) {
        lo = *std::min_element(zne_hops.begin(), zne_hops.end());
        hi = *std::max_element(zne_hops.begin(), zne_hops.end());
    }
    j["min_zne_hop"] = lo;
    j["max_zne_hop"] = hi;
    j["mean_in_physical_range"] = (zne_mean >= 0.0 && zne_mean <= 1.0);
    return j.dump(2) + "\n";
}

std::filesystem::path default_run_dir(const ExperimentConfig &config,
                                      const std::filesystem::path &out_root) {
    return out_root / ("qv_" + config.hash());
}

BenchmarkReport run_experiment(const ExperimentConfig &config, const fs::path &run_dir) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(run_dir);

    const fs::path config_path = run_dir / "config.json";
    const std::string canonical = config.to_json();
    if (fs::exists(config_path)) {
        std::ifstream in(config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        if (ss.str() != canonical) {
            throw std::runtime_error("run directory " + run_dir.string() +
                                     " holds a different config");
        }
    } else {
        std::ofstream out(config_path, std::ios::binary);
        out << canonical;
    }

    const Layout layout = resolve_layout(config);
    const fs::path records_path = run_dir / "records.jsonl";
    std::map<uint64_t, QvRecord> existing = load_records_file(records_path);

    const uint64_t total = config.num_circuits;
    std::vector<std::optional<QvRecord>> results(total);
    using CountsBlob = std::map<std::pair<double, uint32_t>, std::map<std::string, uint64_t>>;
    std::vector<CountsBlob> counts_blobs(config.export_counts ? total : 0);
    std::vector<char> fresh(total, false);
    for (auto &[id, rec] : existing) {
        if (id < total) results[id] = std::move(rec);
    }

    std::mutex mu;
    std::condition_variable cv;
    std::vector<char> done(total, false);
    std::atomic<uint64_t> next{0};
    std::exception_ptr worker_error;

    auto work = [&]() {
        for (;;) {
            const uint64_t id = next.fetch_add(1);
            if (id >= total) return;
            try {
                if (!results[id].has_value()) {
                    CountsBlob blob;
                    QvRecord rec = process_circuit(config, layout, id,
                                                   config.export_counts ? &blob : nullptr);
                    std::lock_guard<std::mutex> lock(mu);
                    results[id] = std::move(rec);
                    if (config.export_counts) counts_blobs[id] = std::move(blob);
                    fresh[id] = true;
                    done[id] = true;
                } else {
                    std::lock_guard<std::mutex> lock(mu);
                    done[id] = true;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                worker_error = std::current_exception();
                done[id] = true;
            }
            cv.notify_all();
        }
    };

    const size_t pool = std::min<size_t>(worker_count(), total);
    std::vector<std::thread> threads;
    for (size_t w = 0; w < pool; ++w) threads.emplace_back(work);

    {
        std::ofstream rec_out(records_path, std::ios::app | std::ios::binary);
        std::ofstream counts_out;
        if (config.export_counts) {
            counts_out.open(run_dir / "counts.jsonl", std::ios::app | std::ios::binary);
        }
        for (uint64_t id = 0; id < total; ++id) {
            {
                std::unique_lock<std::mutex> lock(mu);
                cv.wait(lock, [&] { return static_cast<bool>(done[id]) || worker_error; });
                if (worker_error) break;
            }
            if (fresh[id]) {
                rec_out << record_to_json(*results[id]).dump() << "\n";
                if (config.export_counts) {
                    for (const auto &[key, counts] : counts_blobs[id]) {
                        json cj;
                        cj["circuit_id"] = id;
                        cj["lambda"] = key.first;
                        cj["instance"] = key.second;
                        cj["counts"] = counts;
                        counts_out << cj.dump() << "\n";
                    }
                }
            }
            if ((id + 1) % config.flush_interval == 0) {
                rec_out.flush();
                if (config.export_counts) counts_out.flush();
            }
        }
    }
    for (std::thread &t : threads) t.join();
    if (worker_error) std::rethrow_exception(worker_error);

    std::vector<QvRecord> records;
    records.reserve(total);
    for (uint64_t id = 0; id < total; ++id) {
        if (!results[id].has_value()) {
            throw std::runtime_error("circuit " + std::to_string(id) + " was not processed");
        }
        records.push_back(std::move(*results[id]));
    }

    BenchmarkReport report = build_report(config, std::move(records));
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit_report(report, run_dir);
    {
        json meta;
        meta["wall_seconds"] = report.wall_seconds;
        meta["workers"] = pool;
        std::ofstream out(run_dir / "meta.json", std::ios::binary);
        out << meta.dump(2) << "\n";
    }
    return report;
}

std::optional<uint32_t> effective_qv_search(ExperimentConfig config, uint32_t n_min,
                                            uint32_t n_max, const fs::path &out_root) {
    if (n_min > n_max || n_max > 10) {
        throw std::invalid_argument("effective_qv_search: need n_min <= n_max <= 10");
    }
    std::optional<uint32_t> best;
    for (uint32_t n = n_min; n <= n_max; ++n) {
        config.n = n;
        const BenchmarkReport report = run_experiment(config, default_run_dir(config, out_root));
        if (!report.pass) break;
        best = n;
    }
    return best;
}

BenchmarkReport analyze_records(const ExperimentConfig &config, const fs::path &records_file) {
    std::map<uint64_t, QvRecord> by_id = load_records_file(records_file);
    if (by_id.empty()) throw std::runtime_error("no records in " + records_file.string());
    std::vector<QvRecord> records;
    records.reserve(by_id.size());
    for (auto &[id, rec] : by_id) records.push_back(std::move(rec));
    return build_report(config, std::move(records));
}

BenchmarkReport ingest_counts(const ExperimentConfig &config, const fs::path &records_file,
                              const std::vector<fs::path> &counts_files,
                              const fs::path &run_dir) {
    std::map<uint64_t, QvRecord> by_id = load_records_file(records_file);
    if (by_id.empty()) throw std::runtime_error("no records in " + records_file.string());

    // (circuit_id, lambda fixed-point, instance) -> counts
    std::map<std::tuple<uint64_t, int64_t, uint32_t>, std::map<std::string, uint64_t>> ingested;
    for (const fs::path &path : counts_files) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open counts file " + path.string());
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            line_no++;
            if (line.empty()) continue;
            json cj;
            try {
                cj = json::parse(line);
            } catch (const std::exception &e) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                         e.what());
            }
            const uint64_t id = cj.at("circuit_id").get<uint64_t>();
            const double lambda = cj.at("lambda").get<double>();
            const uint32_t instance = cj.value("instance", 0u);
            std::map<std::string, uint64_t> counts;
            for (const auto &[bits, c] : cj.at("counts").items()) {
                counts[bits] = c.get<uint64_t>();
            }
            ingested[{id, std::llround(lambda * 1e6), instance}] = std::move(counts);
        }
    }

    for (auto &[id, rec] : by_id) {
        for (LambdaResult &lr : rec.per_lambda) {
            lr.instance_hops.clear();
            uint64_t shots_seen = 0;
            for (uint32_t inst = 0; inst < lr.instances; ++inst) {
                const auto key = std::make_tuple(id, std::llround(lr.lambda * 1e6), inst);
                auto it = ingested.find(key);
                if (it == ingested.end()) {
                    if (lambda_is_one(lr.lambda)) {
                        throw std::runtime_error("circuit " + std::to_string(id) +
                                                 ": missing lambda=1 counts");
                    }
                    throw std::runtime_error("circuit " + std::to_string(id) +
                                             ": missing counts for lambda=" +
                                             std::to_string(lr.lambda) + " instance " +
                                             std::to_string(inst));
                }
                uint64_t total = 0;
                for (const auto &[bits, c] : it->second) total += c;
                if (total == 0) {
                    throw std::runtime_error("circuit " + std::to_string(id) +
                                             ": zero total shots");
                }
                lr.instance_hops.push_back(hop_from_counts(it->second, rec.heavy));
                shots_seen = total;
            }
            lr.shots = shots_seen;
            lr.hop = combine_local_ensemble(lr.instance_hops);
        }
        std::vector<std::pair<double, double>> points;
        for (const LambdaResult &lr : rec.per_lambda) points.push_back({lr.lambda, lr.hop});
        rec.zne = extrapolate(points, config.extrapolation_order);
    }

    std::vector<QvRecord> records;
    records.reserve(by_id.size());
    for (auto &[id, rec] : by_id) records.push_back(std::move(rec));
    BenchmarkReport report = build_report(config, std::move(records));

    fs::create_directories(run_dir);
    std::ofstream rec_out(run_dir / "records.jsonl", std::ios::trunc | std::ios::binary);
    for (const QvRecord &rec : report.records) rec_out << record_to_json(rec).dump() << "\n";
    emit_report(report, run_dir);
    return report;
}

namespace {

std::string format_csv_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string svg_report(const BenchmarkReport &report) {
    const double width = 960, height = 540;
    const double left = 70, right = 930, top = 30, bottom = 490;
    const size_t n = report.cumulative.size();

    double ymin = 0.35, ymax = 1.1;
    for (const CumulativePoint &p : report.cumulative) {
        ymax = std::max(ymax, std::min(p.mean + p.two_sigma, 2.0) + 0.02);
    }
    auto xpix = [&](double i) {
        return left + (right - left) * (n <= 1 ? 0.5 : i / static_cast<double>(n - 1));
    };
    auto ypix = [&](double v) {
        const double t = (v - ymin) / (ymax - ymin);
        return bottom - (bottom - top) * std::clamp(t, 0.0, 1.0);
    };
    auto polyline = [&](const std::vector<double> &ys, const std::string &color,
                        const std::string &id, const std::string &dash = "") {
        std::ostringstream s;
        s << "  <polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"";
        if (!dash.empty()) s << " stroke-dasharray=\"" << dash << "\"";
        s << " points=\"";
        for (size_t i = 0; i < ys.size(); ++i) {
            if (i) s << " ";
            s << format_csv_double(xpix(static_cast<double>(i))) << ","
              << format_csv_double(ypix(ys[i]));
        }
        s << "\"/>\n";
        return s.str();
    };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    s << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    s << "  <line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
      << bottom << "\" stroke=\"black\"/>\n";
    s << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
      << "\" stroke=\"black\"/>\n";
    for (double v = 0.4; v <= ymax + 1e-9; v += 0.1) {
        s << "  <line x1=\"" << left - 4 << "\" y1=\"" << ypix(v) << "\" x2=\"" << left
          << "\" y2=\"" << ypix(v) << "\" stroke=\"black\"/>\n";
        s << "  <text x=\"" << left - 8 << "\" y=\"" << ypix(v) + 4
          << "\" font-size=\"12\" text-anchor=\"end\">" << format_csv_double(v) << "</text>\n";
    }
    s << "  <text x=\"" << (left + right) / 2
      << "\" y=\"525\" font-size=\"13\" text-anchor=\"middle\">circuit index (cumulative)</text>\n";
    s << "  <text x=\"18\" y=\"" << (top + bottom) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (top + bottom) / 2 << ")\">heavy output probability</text>\n";

    // reference lines
    s << "  <line id=\"ref-two-thirds\" x1=\"" << left << "\" y1=\"" << ypix(kThreshold)
      << "\" x2=\"" << right << "\" y2=\"" << ypix(kThreshold)
      << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    s << "  <line id=\"ref-ideal-hop\" x1=\"" << left << "\" y1=\"" << ypix(kIdealHop)
      << "\" x2=\"" << right << "\" y2=\"" << ypix(kIdealHop)
      << "\" stroke=\"gray\" stroke-dasharray=\"2,4\"/>\n";

    // cumulative per-lambda means
    const std::vector<std::string> palette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b"};
    size_t color_i = 0;
    double legend_y = 50;
    for (const auto &[lambda, mean] : report.lambda_means) {
        std::vector<double> series;
        double acc = 0.0;
        size_t count = 0;
        for (const QvRecord &rec : report.records) {
            const LambdaResult *lr = rec.find_lambda(lambda);
            if (!lr) continue;
            acc += lr->hop;
            count++;
            series.push_back(acc / static_cast<double>(count));
        }
        const std::string color = palette[color_i % palette.size()];
        s << polyline(series, color, "lambda-" + lambda_key(lambda));
        s << "  <text x=\"" << right - 150 << "\" y=\"" << legend_y << "\" font-size=\"12\" fill=\""
          << color << "\">lambda = " << lambda_key(lambda) << "</text>\n";
        color_i++;
        legend_y += 16;
    }

    // cumulative ZNE mean and band
    std::vector<double> mean_series, lo_series, hi_series;
    for (const CumulativePoint &p : report.cumulative) {
        mean_series.push_back(p.mean);
        lo_series.push_back(p.mean - p.two_sigma);
        hi_series.push_back(p.mean + p.two_sigma);
    }
    s << polyline(mean_series, "#000000", "zne-mean");
    s << polyline(lo_series, "#555555", "zne-lo", "3,3");
    s << polyline(hi_series, "#555555", "zne-hi", "3,3");
    s << "  <text x=\"" << right - 150 << "\" y=\"" << legend_y
      << "\" font-size=\"12\">ZNE mean &#177; 2&#963;</text>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace

void emit_report(const BenchmarkReport &report, const fs::path &run_dir) {
    fs::create_directories(run_dir);
    {
        std::ofstream out(run_dir / "summary.json", std::ios::trunc | std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (run_dir / "summary.json").string());
        out << report.summary_json();
    }
    {
        std::ofstream out(run_dir / "report.csv", std::ios::trunc | std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (run_dir / "report.csv").string());
        out << "index,zne_mean,zne_lo,zne_hi";
        std::vector<double> lambdas;
        for (const auto &[lambda, mean] : report.lambda_means) {
            lambdas.push_back(lambda);
            out << ",hop_lambda_" << lambda_key(lambda);
        }
        out << "\n";
        std::map<double, std::pair<double, size_t>> acc;  // lambda -> (sum, count)
        for (size_t i = 0; i < report.cumulative.size(); ++i) {
            const CumulativePoint &p = report.cumulative[i];
            out << i << "," << format_csv_double(p.mean) << ","
                << format_csv_double(p.mean - p.two_sigma) << ","
                << format_csv_double(p.mean + p.two_sigma);
            for (double lambda : lambdas) {
                const LambdaResult *lr = report.records[i].find_lambda(lambda);
                auto &a = acc[lambda];
                if (lr) {
                    a.first += lr->hop;
                    a.second++;
                }
                out << "," << format_csv_double(a.second ? a.first / a.second : 0.0);
            }
            out << "\n";
        }
    }
    {
        std::ofstream out(run_dir / "report.svg", std::ios::trunc | std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (run_dir / "report.svg").string());
        out << svg_report(report);
    }
}

CalibrationResult calibrate_p2(ExperimentConfig config, double hop_low, double hop_high,
                               uint64_t circuits) {
    if (!(hop_low > 0.5 && hop_high < 1.0 && hop_low < hop_high)) {
        throw std::invalid_argument("calibrate_p2: need 0.5 < hop_low < hop_high < 1");
    }
    config.validate();
    const Layout layout = resolve_layout(config);
    const double target = 0.5 * (hop_low + hop_high);

    auto exact_mean_hop = [&](double p2) {
        NoiseModel noise = config.noise;
        noise.p2 = p2;
        noise.p1 = p2 / 10.0;
        double acc = 0.0;
        for (uint64_t id = 0; id < circuits; ++id) {
            const uint64_t seed = config.base_seed + id;
            const QvCircuit qv = generate_qv_circuit(config.n, seed);
            const HeavySet heavy = heavy_set(ideal_distribution(qv));
            const RoutedCircuit routed = route(qv, layout);
            HeavySet heavy_wire;
            heavy_wire.n = config.n;
            heavy_wire.median = heavy.median;
            for (uint64_t x : heavy.members) {
                heavy_wire.members.insert(wire_index_of(x, routed.wire_of_logical));
            }
            Circuit prepared = rebase_only(routed.circuit);
            append_measurements(prepared, routed.wire_of_logical);
            ScheduledCircuit sched = schedule_alap(prepared, config.durations);
            if (config.dd_enabled) sched = insert_dd(sched, config.durations);
            const DensityState state = simulate(sched, noise);
            acc += exact_heavy_prob(state, heavy_wire, noise.readout_flip);
        }
        return acc / static_cast<double>(circuits);
    };

    double lo = 0.0, hi = 0.12;
    // make sure the bracket straddles the target
    while (exact_mean_hop(hi) > target && hi < 0.9) hi *= 1.8;
    CalibrationResult result;
    for (int iter = 0; iter < 28; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double hop = exact_mean_hop(mid);
        result = {mid, hop};
        if (hop > hop_low + 0.25 * (hop_high - hop_low) &&
            hop < hop_high - 0.25 * (hop_high - hop_low)) {
            break;
        }
        if (hop > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return result;
}

}  // namespace qvzne
