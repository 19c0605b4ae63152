#include "qvzne/qv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qvzne {

Matrix4cd haar_random_su4(Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix4cd ginibre;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const double re = normal(rng);
            const double im = normal(rng);
            ginibre(r, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<Matrix4cd> qr(ginibre);
    Matrix4cd q = qr.householderQ();
    Matrix4cd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < 4; ++i) {
        Complex d = r(i, i);
        q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : Complex(1.0, 0.0);
    }
    // Rephase so det = 1; the global phase is irrelevant to output
    // distributions but keeps the blocks in SU(4).
    const Complex det = q.determinant();
    q *= std::pow(det, -0.25);
    return q;
}

QvCircuit generate_qv_circuit(uint32_t n, uint64_t seed) {
    if (n < 2 || n > 12) {
        throw std::invalid_argument("generate_qv_circuit: n must be in [2, 12]");
    }
    QvCircuit qv;
    qv.n = n;
    qv.seed = seed;
    qv.circuit = Circuit(n);

    Rng rng(seed);
    std::vector<uint32_t> labels(n);
    for (uint32_t layer = 0; layer < n; ++layer) {
        std::iota(labels.begin(), labels.end(), 0u);
        std::shuffle(labels.begin(), labels.end(), rng);
        qv.layer_permutations.push_back(labels);
        for (uint32_t b = 0; b + 1 < n; b += 2) {
            qv.circuit.push(Gate::su4_block(haar_random_su4(rng), labels[b], labels[b + 1]));
        }
        qv.circuit.mark_layer();
    }
    return qv;
}

std::vector<double> ideal_distribution(const Circuit &circuit) {
    if (circuit.n_qubits > 12) {
        throw std::invalid_argument("ideal_distribution: n_qubits > 12 exceeds the memory guard");
    }
    Circuit unitary_part = circuit;
    std::erase_if(unitary_part.gates, [](const Gate &g) { return g.kind == GateKind::Measure; });
    unitary_part.layer_marks.clear();
    VectorXcd state = run_statevector(unitary_part);
    std::vector<double> p(state.size());
    for (Eigen::Index i = 0; i < state.size(); ++i) p[i] = std::norm(state(i));
    return p;
}

std::vector<double> ideal_distribution(const QvCircuit &qv) { return ideal_distribution(qv.circuit); }

HeavySet heavy_set(const std::vector<double> &p) {
    if (p.empty() || (p.size() & (p.size() - 1)) != 0) {
        throw std::invalid_argument("heavy_set: probability vector length must be a power of two");
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-6) {
        throw std::invalid_argument("heavy_set: probabilities sum to " + std::to_string(total));
    }
    HeavySet h;
    h.n = static_cast<uint32_t>(std::countr_zero(p.size()));
    std::vector<double> sorted(p);
    std::sort(sorted.begin(), sorted.end());
    const size_t half = sorted.size() / 2;
    h.median = (sorted.size() == 1) ? sorted[0] : 0.5 * (sorted[half - 1] + sorted[half]);
    for (size_t x = 0; x < p.size(); ++x) {
        if (p[x] > h.median) h.members.insert(x);
    }
    return h;
}

double heavy_mass(const std::vector<double> &p, const HeavySet &heavy) {
    double mass = 0.0;
    for (uint64_t x : heavy.members) mass += p[x];
    return mass;
}

}  // namespace qvzne
