#include "qvzne/density_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qvzne {

void NoiseModel::validate() const {
    auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in01(p2) || !in01(p1)) throw std::invalid_argument("depolarizing probability out of range");
    if (!(readout_flip >= 0.0 && readout_flip <= 0.5)) {
        throw std::invalid_argument("readout_flip must lie in [0, 0.5]");
    }
    if (!std::isfinite(idle_z_rate)) throw std::invalid_argument("idle_z_rate must be finite");
}

DensityState DensityState::zero_state(uint32_t n) {
    DensityState s;
    s.n = n;
    const size_t dim = size_t{1} << n;
    s.rho = MatrixXcd::Zero(dim, dim);
    s.rho(0, 0) = 1.0;
    return s;
}

void DensityState::validate(double tol) const {
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol) {
        throw std::runtime_error("density matrix trace is not 1");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) {
        throw std::runtime_error("density matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -std::max(tol, 1e-8)) {
        throw std::runtime_error("density matrix has a negative eigenvalue");
    }
}

std::vector<double> DensityState::diagonal() const {
    std::vector<double> d(rho.rows());
    for (Eigen::Index i = 0; i < rho.rows(); ++i) d[i] = rho(i, i).real();
    return d;
}

namespace {

// rho <- (G x I) rho (G x I)^dag via statevector kernels on columns (left)
// and conjugated rows (right).
void apply_gate_channel(MatrixXcd &rho, const Gate &g) {
    const size_t dim = rho.rows();
    for (size_t col = 0; col < dim; ++col) {
        std::span<Complex> view(rho.col(col).data(), dim);
        apply_gate(view, g);
    }
    rho.transposeInPlace();
    for (size_t col = 0; col < dim; ++col) {
        std::span<Complex> view(rho.col(col).data(), dim);
        switch (g.kind) {
            case GateKind::X:
            case GateKind::SX:
            case GateKind::RZ:
                apply_1q(view, one_qubit_matrix(g).conjugate(), g.qubits[0]);
                break;
            default:
                apply_2q(view, two_qubit_matrix(g).conjugate(), g.qubits[0], g.qubits[1]);
        }
    }
    rho.transposeInPlace();
}

void apply_rz(MatrixXcd &rho, uint32_t q, double angle) {
    Gate g = Gate::rz(angle, q);
    apply_gate_channel(rho, g);
}

// Replace the marginal on `qs` with the maximally mixed state with
// probability p: rho <- (1-p) rho + p (I/2^k (x) tr_qs rho).
void depolarize(MatrixXcd &rho, const std::vector<uint32_t> &qs, double p) {
    if (p <= 0.0) return;
    const size_t dim = rho.rows();
    size_t mask = 0;
    for (uint32_t q : qs) mask |= size_t{1} << q;
    const double scale = 1.0 / static_cast<double>(size_t{1} << qs.size());

    MatrixXcd mixed = MatrixXcd::Zero(dim, dim);
    // tr_qs rho, re-embedded as I/2^k on the traced qubits: entries survive
    // where the traced bits agree between row and column after summing.
    for (size_t r = 0; r < dim; ++r) {
        for (size_t c = 0; c < dim; ++c) {
            if (((r ^ c) & mask) != 0) continue;  // off-diagonal in traced bits
            Complex acc = 0;
            const size_t rbase = r & ~mask, cbase = c & ~mask;
            for (size_t sub = mask;; sub = (sub - 1) & mask) {
                acc += rho(rbase | sub, cbase | sub);
                if (sub == 0) break;
            }
            mixed(r, c) = acc * scale;
        }
    }
    rho = (1.0 - p) * rho + p * mixed;
}

DensityState simulate_ordered(const Circuit &circuit, const std::vector<double> *starts,
                              double total_time, const DurationModel *durations,
                              const NoiseModel &noise,
                              DensityState *initial = nullptr) {
    noise.validate();
    circuit.validate();
    if (circuit.n_qubits > 10) {
        throw std::invalid_argument("simulate: n_qubits > 10 exceeds the memory guard");
    }
    DensityState state = DensityState::zero_state(circuit.n_qubits);
    if (initial) {
        if (initial->n != circuit.n_qubits) {
            throw std::invalid_argument("simulate: initial state size mismatch");
        }
        state = std::move(*initial);
    }
    std::vector<double> busy_until(circuit.n_qubits, 0.0);

    auto apply_idle_z = [&](uint32_t q, double now) {
        if (noise.idle_z_rate == 0.0 || starts == nullptr) return;
        const double gap = now - busy_until[q];
        if (gap > 1e-12) apply_rz(state.rho, q, noise.idle_z_rate * gap);
    };

    for (size_t i = 0; i < circuit.gates.size(); ++i) {
        const Gate &g = circuit.gates[i];
        if (g.kind == GateKind::Barrier) continue;
        const double now = starts ? (*starts)[i] : 0.0;
        for (uint32_t q : g.qubits) apply_idle_z(q, now);
        if (g.kind == GateKind::Measure) {
            if (starts) {
                for (uint32_t q : g.qubits) busy_until[q] = now + durations->of(g);
            }
            continue;
        }
        apply_gate_channel(state.rho, g);
        switch (g.kind) {
            case GateKind::X:
            case GateKind::SX: depolarize(state.rho, g.qubits, noise.p1); break;
            case GateKind::CX: depolarize(state.rho, g.qubits, noise.p2); break;
            default: break;  // RZ is virtual and error free
        }
        if (starts) {
            for (uint32_t q : g.qubits) busy_until[q] = now + durations->of(g);
        }
    }
    // trailing drift up to the end of the schedule
    if (starts && noise.idle_z_rate != 0.0) {
        for (uint32_t q = 0; q < circuit.n_qubits; ++q) apply_idle_z(q, total_time);
    }
    return state;
}

}  // namespace

DensityState simulate(const Circuit &circuit, const NoiseModel &noise) {
    if (noise.idle_z_rate != 0.0) {
        throw std::invalid_argument("simulate: idle-Z drift needs a ScheduledCircuit");
    }
    return simulate_ordered(circuit, nullptr, 0.0, nullptr, noise);
}

DensityState simulate(const ScheduledCircuit &scheduled, const NoiseModel &noise) {
    return simulate_ordered(scheduled.circuit, &scheduled.start_times, scheduled.total_time,
                            &scheduled.durations, noise);
}

DensityState simulate(const Circuit &circuit, const NoiseModel &noise, DensityState initial) {
    if (noise.idle_z_rate != 0.0) {
        throw std::invalid_argument("simulate: idle-Z drift needs a ScheduledCircuit");
    }
    return simulate_ordered(circuit, nullptr, 0.0, nullptr, noise, &initial);
}

std::vector<double> readout_convolved_diagonal(const DensityState &state, double readout_flip) {
    std::vector<double> d = state.diagonal();
    if (readout_flip <= 0.0) return d;
    const double r = readout_flip;
    for (uint32_t q = 0; q < state.n; ++q) {
        const size_t stride = size_t{1} << q;
        for (size_t base = 0; base < d.size(); base += 2 * stride) {
            for (size_t off = 0; off < stride; ++off) {
                const double a = d[base + off];
                const double b = d[base + off + stride];
                d[base + off] = (1 - r) * a + r * b;
                d[base + off + stride] = (1 - r) * b + r * a;
            }
        }
    }
    return d;
}

double exact_heavy_prob(const DensityState &state, const HeavySet &heavy, double readout_flip) {
    if (heavy.n != state.n) {
        throw std::invalid_argument("exact_heavy_prob: heavy set size does not match the state");
    }
    const std::vector<double> d = readout_convolved_diagonal(state, readout_flip);
    double p = 0.0;
    for (uint64_t x : heavy.members) p += d[x];
    return p;
}

std::string bitstring_of(uint64_t index, uint32_t n) {
    std::string s(n, '0');
    for (uint32_t q = 0; q < n; ++q) {
        if (index & (uint64_t{1} << q)) s[n - 1 - q] = '1';  // qubit 0 rightmost
    }
    return s;
}

uint64_t index_of_bitstring(const std::string &bits) {
    uint64_t idx = 0;
    for (size_t i = 0; i < bits.size(); ++i) {
        const char c = bits[i];
        if (c != '0' && c != '1') throw std::invalid_argument("bitstring must be binary");
        if (c == '1') idx |= uint64_t{1} << (bits.size() - 1 - i);
    }
    return idx;
}

std::map<std::string, uint64_t> sample_counts(const DensityState &state, uint64_t shots,
                                              double readout_flip, Rng &rng) {
    if (shots < 1) throw std::invalid_argument("sample_counts: shots must be >= 1");
    const std::vector<double> d = readout_convolved_diagonal(state, readout_flip);
    std::vector<double> cdf(d.size());
    double acc = 0.0;
    for (size_t i = 0; i < d.size(); ++i) {
        acc += std::max(0.0, d[i]);
        cdf[i] = acc;
    }
    std::uniform_real_distribution<double> uni(0.0, acc);
    std::map<std::string, uint64_t> counts;
    for (uint64_t s = 0; s < shots; ++s) {
        const double u = uni(rng);
        const size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        counts[bitstring_of(std::min(idx, d.size() - 1), state.n)]++;
    }
    return counts;
}

double fidelity_with_pure(const DensityState &state, const VectorXcd &psi) {
    return (psi.adjoint() * state.rho * psi)(0, 0).real();
}

}  // namespace qvzne
