#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qvzne/qv.hpp"

namespace qvzne {

/// Zero-noise extrapolation result: least-squares polynomial fit of HOP
/// against lambda evaluated at lambda = 0. Non-physical intercepts are
/// reported as-is, never clipped.
struct ZneEstimate {
    double intercept = 0.0;
    std::vector<double> coefficients;  // ascending powers of lambda
    int order = 1;
    std::vector<double> lambdas_used;
    double residual_rms = 0.0;
};

/// Per-lambda measurement summary for one circuit.
struct LambdaResult {
    double lambda = 1.0;
    double hop = 0.0;
    uint64_t shots = 0;
    uint32_t instances = 1;
    std::vector<double> instance_hops;
};

/// Per-circuit benchmark record.
struct QvRecord {
    uint64_t circuit_id = 0;
    uint32_t n = 0;
    uint64_t seed = 0;
    HeavySet heavy;
    std::vector<uint32_t> wire_of_logical;
    std::vector<LambdaResult> per_lambda;
    ZneEstimate zne;

    const LambdaResult *find_lambda(double lambda) const;
};

/// Fraction of shots landing in the heavy set; bitstring keys are in the
/// state's own qubit order (qubit 0 rightmost).
double hop_from_counts(const std::map<std::string, uint64_t> &counts, const HeavySet &heavy);

/// Arithmetic mean of the instance HOPs of a local-folding ensemble.
double combine_local_ensemble(const std::vector<double> &hops);

ZneEstimate extrapolate(const std::vector<std::pair<double, double>> &points, int order = 1);

/// Standard deviation of resample means, resampling the extrapolated HOP
/// vector with replacement. Deterministic for a given rng state.
double bootstrap_sigma(const std::vector<double> &hop_vector, size_t resamples, Rng &rng);

/// pass iff mean - 2 sigma > 2/3.
bool evaluate_pass(double mean_hop, double sigma);

struct CumulativePoint {
    size_t index;
    double mean;
    double two_sigma;
};

/// Prefix statistics over the HOP vector; element i covers the first i+1
/// circuits, each prefix bootstrapped with seed base_seed + i so the final
/// element reproduces bootstrap_sigma(vector, resamples, Rng(base_seed+N-1)).
std::vector<CumulativePoint> cumulative_series(const std::vector<double> &hop_vector,
                                               size_t resamples, uint64_t base_seed);

double mean_of(const std::vector<double> &values);

}  // namespace qvzne
