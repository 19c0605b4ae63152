#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qvzne/coupling.hpp"
#include "qvzne/density_sim.hpp"
#include "qvzne/folding.hpp"
#include "qvzne/schedule.hpp"
#include "qvzne/zne.hpp"

namespace qvzne {

struct ShotBudget {
    uint64_t base = 10000;
    uint64_t global_folded = 1000;
    uint64_t local_folded = 100;
};

struct LayoutSelection {
    uint32_t subgraph_class = 0;
    uint32_t embedding = 0;
};

/// Full experiment description. Defaults mirror the reference protocol:
/// 1000 circuits, lambdas {1, 1.2, 1.5, 1.8, 2}, global folding, 10 local
/// instances, 10000/1000/100 shots, linear extrapolation, DD on.
struct ExperimentConfig {
    uint32_t n = 4;
    uint64_t num_circuits = 1000;
    uint64_t base_seed = 7;
    std::vector<double> lambdas = {1.0, 1.2, 1.5, 1.8, 2.0};
    bool local_folding = false;
    uint32_t local_instances = 10;
    ShotBudget shots;
    NoiseModel noise;
    DurationModel durations;
    bool dd_enabled = true;
    std::string coupling = "heavy_hex_27";  // builtin name or JSON file path
    LayoutSelection layout;
    int extrapolation_order = 1;
    uint32_t bootstrap_resamples = 100;
    uint32_t flush_interval = 250;
    bool export_counts = false;

    void validate() const;
    std::string to_json() const;  // canonical (sorted keys, stable bytes)
    static ExperimentConfig from_json(const std::string &text);
    std::string hash() const;  // 16 hex chars over the canonical form
};

struct BenchmarkReport {
    ExperimentConfig config;
    std::vector<QvRecord> records;
    std::vector<double> zne_hops;           // per-circuit extrapolated values
    std::map<double, double> lambda_means;  // ensemble mean per lambda
    double zne_mean = 0.0;
    double sigma = 0.0;
    bool pass = false;
    std::vector<CumulativePoint> cumulative;
    double wall_seconds = 0.0;

    std::string summary_json() const;  // deterministic (no timing)
};

/// Resolves the routing layout for the configured coupling map.
Layout resolve_layout(const ExperimentConfig &config);

/// Runs the full pipeline (generate, route, fold, rebase, schedule, DD,
/// simulate, sample, extrapolate), persisting one record per line to
/// records.jsonl under run_dir. Completed circuit ids found in an existing
/// record log are reused instead of recomputed. Deterministic in base_seed
/// regardless of worker count (QVZNE_WORKERS overrides the pool size).
BenchmarkReport run_experiment(const ExperimentConfig &config,
                               const std::filesystem::path &run_dir);

/// run_dir = out_root/qv_<config hash>.
std::filesystem::path default_run_dir(const ExperimentConfig &config,
                                      const std::filesystem::path &out_root);

/// Ascending sweep over n; returns the largest n whose report passes.
std::optional<uint32_t> effective_qv_search(ExperimentConfig config, uint32_t n_min,
                                            uint32_t n_max, const std::filesystem::path &out_root);

/// Replaces measured counts from external executions (JSONL: one object per
/// line with circuit_id, lambda, instance, counts) and recomputes HOPs,
/// extrapolations, and the summary.
BenchmarkReport ingest_counts(const ExperimentConfig &config,
                              const std::filesystem::path &records_file,
                              const std::vector<std::filesystem::path> &counts_files,
                              const std::filesystem::path &run_dir);

/// Loads records.jsonl and recomputes the ensemble analysis.
BenchmarkReport analyze_records(const ExperimentConfig &config,
                                const std::filesystem::path &records_file);

/// Writes report.csv (cumulative series), summary.json, and report.svg with
/// 2/3 and (1+ln2)/2 reference lines.
void emit_report(const BenchmarkReport &report, const std::filesystem::path &run_dir);

struct CalibrationResult {
    double p2 = 0.0;
    double raw_hop = 0.0;  // exact lambda=1 mean HOP at that p2
};

/// Bisects the two-qubit depolarizing rate until the exact (shot-free)
/// lambda=1 mean HOP over `circuits` pipeline circuits lands inside
/// (hop_low, hop_high). p1 follows as p2/10 unless pinned by the config.
CalibrationResult calibrate_p2(ExperimentConfig config, double hop_low, double hop_high,
                               uint64_t circuits);

/// One fully processed circuit (shared by the run and ingest paths).
QvRecord process_circuit(const ExperimentConfig &config, const Layout &layout,
                         uint64_t circuit_id,
                         std::map<std::pair<double, uint32_t>,
                                  std::map<std::string, uint64_t>> *counts_out);

uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b);

}  // namespace qvzne
