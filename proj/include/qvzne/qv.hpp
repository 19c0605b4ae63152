#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "qvzne/circuit.hpp"
#include "qvzne/unitary.hpp"

namespace qvzne {

using Rng = std::mt19937_64;

/// A square QV circuit: d = n layers, each a fresh uniform relabeling of the
/// qubits followed by Haar-random SU(4) blocks on consecutive pairs of the
/// permuted labels. Odd n leaves one qubit idle per layer.
struct QvCircuit {
    uint32_t n = 0;
    Circuit circuit;
    uint64_t seed = 0;
    std::vector<std::vector<uint32_t>> layer_permutations;
};

/// Basis states whose ideal probability strictly exceeds the median.
struct HeavySet {
    uint32_t n = 0;
    std::set<uint64_t> members;
    double median = 0.0;
};

/// Haar-random U(4) via QR of a complex Ginibre matrix with R-diagonal phase
/// correction, then rephased to unit determinant.
Matrix4cd haar_random_su4(Rng &rng);

/// Generates the n-layer QV circuit for 2 <= n <= 12, deterministic in seed.
QvCircuit generate_qv_circuit(uint32_t n, uint64_t seed);

/// p(x) = |<x|U|0>|^2 by statevector application; sums to 1 within 1e-9.
std::vector<double> ideal_distribution(const QvCircuit &qv);
std::vector<double> ideal_distribution(const Circuit &circuit);

/// Median is the mean of the two central order statistics; membership uses
/// strict inequality, so exact ties fall outside the heavy set.
HeavySet heavy_set(const std::vector<double> &p);

/// Sum of probability mass over heavy members.
double heavy_mass(const std::vector<double> &p, const HeavySet &heavy);

}  // namespace qvzne
