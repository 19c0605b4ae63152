#pragma once

#include <map>
#include <string>

#include "qvzne/qv.hpp"
#include "qvzne/schedule.hpp"
#include "qvzne/unitary.hpp"

namespace qvzne {

/// Depolarizing/readout/idle-drift parameters for the density-matrix
/// simulator. Depolarizing acts as "replace with the maximally mixed state on
/// the touched qubits with probability p"; RZ is virtual and error free.
struct NoiseModel {
    double p2 = 0.0;            // per-CX two-qubit depolarizing
    double p1 = 0.0;            // per-X/SX single-qubit depolarizing
    double readout_flip = 0.0;  // per-qubit symmetric readout bit flip
    double idle_z_rate = 0.0;   // coherent Z drift (radians per time unit)

    void validate() const;
    static NoiseModel noiseless() { return {}; }
};

/// 2^n x 2^n density matrix; trace one, Hermitian, positive to tolerance.
struct DensityState {
    uint32_t n = 0;
    MatrixXcd rho;

    static DensityState zero_state(uint32_t n);
    void validate(double tol = 1e-8) const;
    std::vector<double> diagonal() const;
};

/// Exact noisy evolution of a native circuit (n <= 10): each gate's unitary
/// channel followed by its depolarizing channel. Idle-Z drift needs timing
/// and therefore the scheduled overload.
DensityState simulate(const Circuit &circuit, const NoiseModel &noise);
DensityState simulate(const ScheduledCircuit &scheduled, const NoiseModel &noise);

/// Continues evolution from an existing state (composition:
/// simulate(c1 ++ c2) == simulate(c2, simulate(c1))).
DensityState simulate(const Circuit &circuit, const NoiseModel &noise, DensityState initial);

/// Readout-error-convolved diagonal: each qubit's outcome flips independently
/// with probability readout_flip.
std::vector<double> readout_convolved_diagonal(const DensityState &state, double readout_flip);

/// Probability that a measured bitstring lands in the heavy set.
double exact_heavy_prob(const DensityState &state, const HeavySet &heavy, double readout_flip);

/// Multinomial sample of the readout-convolved diagonal. Keys are bitstrings
/// with qubit 0 rightmost; counts sum to shots.
std::map<std::string, uint64_t> sample_counts(const DensityState &state, uint64_t shots,
                                              double readout_flip, Rng &rng);

std::string bitstring_of(uint64_t index, uint32_t n);
uint64_t index_of_bitstring(const std::string &bits);

/// Uhlmann fidelity of state against a pure reference |psi><psi|.
double fidelity_with_pure(const DensityState &state, const VectorXcd &psi);

}  // namespace qvzne
